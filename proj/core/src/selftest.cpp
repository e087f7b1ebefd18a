#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sdom/calculus.hpp"
#include "sdom/errors.hpp"
#include "sdom/harness.hpp"
#include "sdom/rng.hpp"
#include "sdom/sparse.hpp"

// Invariant sweep exercising every module against its own contract on
// fixed-seed inputs. Each suite is named module.invariant; a failure
// records the first offending witness so reruns can start from it.

namespace sdom {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Ctx {
    SelftestOptions opt;
    SelftestReport rep;
    std::string current;
    bool current_ok = true;

    void begin(const std::string& suite) {
        current = suite;
        current_ok = true;
    }
    void end() {
        if (current_ok) rep.passed.push_back(current);
    }
    void require(bool ok, const std::string& witness) {
        if (!ok && current_ok) {
            current_ok = false;
            rep.failures.push_back({current, witness});
        }
    }
};

double median_via(const Ctx& c, const Signal& f, const Interval& q) {
    return c.opt.median_fn ? c.opt.median_fn(f, q) : median(f, q);
}

Signal trig(std::int64_t n, std::uint64_t seed, int kmax) {
    SignalSpec s;
    s.kind = "trig";
    s.n = n;
    s.seed = seed;
    s.max_freq = kmax;
    return generate_signal(s);
}

DyadicCube random_cube(Rng& rng, int max_level) {
    DyadicCube q;
    q.grid = static_cast<int>(rng.uniform_int(2));
    q.level = static_cast<int>(rng.uniform_int(max_level + 1));
    q.index = rng.uniform_int(std::int64_t(1) << q.level);
    return q;
}

// ------------------------------------------------------------------- dyadic

void suite_dyadic_partition(Ctx& c) {
    Rng rng(Rng::mix(c.opt.seed, 11));
    for (int rep = 0; rep < 40; ++rep) {
        const DyadicCube q = random_cube(rng, 10);
        const Interval qi = to_interval(q);
        const auto ch = children(q);
        const Interval a = to_interval(ch[0]), b = to_interval(ch[1]);
        c.require(a.measure() + b.measure() == qi.measure(),
                  "children measures do not sum to parent at " + q.str());
        c.require(qi.contains(a) && qi.contains(b),
                  "child escapes parent at " + q.str());
        c.require(a.intersection_measure(b) == Rational(0),
                  "children overlap at " + q.str());
        c.require(parent(ch[0]) == q && parent(ch[1]) == q,
                  "parent(child) != cube at " + q.str());
        const Rational x(rng.uniform_int(std::int64_t(1) << 14),
                         std::int64_t(1) << 14);
        const DyadicCube holder = cube_containing(q.grid, q.level, x);
        c.require(to_interval(holder).contains(x),
                  "cube_containing misses x = " + x.str());
    }
}

void suite_dyadic_lattice(Ctx& c) {
    Rng rng(Rng::mix(c.opt.seed, 12));
    for (int rep = 0; rep < 60; ++rep) {
        DyadicCube a = random_cube(rng, 8);
        DyadicCube b = random_cube(rng, 8);
        b.grid = a.grid; // lattice property is per grid
        const Interval ia = to_interval(a), ib = to_interval(b);
        const Rational m = ia.intersection_measure(ib);
        const bool disjoint = (m == Rational(0));
        const Rational small =
            ia.measure() < ib.measure() ? ia.measure() : ib.measure();
        c.require(disjoint || m == small,
                  "partial overlap between " + a.str() + " and " + b.str());
        c.require(nested(a, b) == !disjoint,
                  "nested() disagrees with overlap at " + a.str() + ", " + b.str());
    }
}

void suite_dyadic_cover(Ctx& c) {
    Rng rng(Rng::mix(c.opt.seed, 13));
    const std::int64_t n = 4096;
    for (int rep = 0; rep < 50; ++rep) {
        const std::int64_t first = rng.uniform_int(n);
        const std::int64_t count = 1 + rng.uniform_int(n / 6);
        const Interval iv(Rational(first, n), Rational(count, n));
        const DyadicCube cover = shifted_cover(iv);
        const Interval ci = to_interval(cover);
        c.require(ci.contains(iv), "cover misses " + iv.str());
        c.require(ci.measure() <= Rational(6) * iv.measure(),
                  "cover too large for " + iv.str() + ": " + ci.str());
    }
}

void suite_dyadic_packing(Ctx& c) {
    std::vector<Interval> arcs;
    for (int level = 0; level <= 1; ++level)
        for (std::int64_t m = 0; m < (std::int64_t(1) << level); ++m)
            arcs.push_back(to_interval(DyadicCube{0, level, m}));
    const SparseFamily half(Rational(1, 2), arcs);
    c.require(sparseness_check(half).certified,
              "two-level grid family must satisfy eta = 1/2");

    std::vector<Interval> arcs3 = arcs;
    for (std::int64_t m = 0; m < 4; ++m)
        arcs3.push_back(to_interval(DyadicCube{0, 2, m}));
    const PackingReport pr = sparseness_check(SparseFamily(Rational(1, 2), arcs3));
    c.require(!pr.certified, "three full levels cannot be 1/2-sparse");
    c.require(pr.violator == 0, "violator should be the root cube");

    const SparseFamily sub(Rational(1, 2),
                           {arcs[0], arcs[1]}); // drop one child: still fine
    c.require(sparseness_check(sub).certified,
              "subfamily of a certified family must stay certified");
}

// ------------------------------------------------------------------- signal

void suite_signal_rearrangement(Ctx& c) {
    const std::int64_t n = 256;
    const Signal f = trig(n, Rng::mix(c.opt.seed, 21), 8);
    const Interval full = Interval::full_circle();

    std::vector<double> sorted_abs;
    sorted_abs.reserve(static_cast<std::size_t>(n));
    for (double v : f.samples) sorted_abs.push_back(std::abs(v));
    std::sort(sorted_abs.begin(), sorted_abs.end(), std::greater<double>());

    std::vector<double> recovered;
    recovered.push_back(rearrangement(f, full, 0.5 / static_cast<double>(n)));
    for (std::int64_t k = 0; k + 1 < n; ++k)
        recovered.push_back(rearrangement(
            f, full, static_cast<double>(k + 1) / static_cast<double>(n)));
    std::sort(recovered.begin(), recovered.end(), std::greater<double>());
    c.require(recovered == sorted_abs,
              "rearrangement samples are not the sorted |f| multiset");

    double prev = rearrangement(f, full, 0.01);
    for (double t : {0.05, 0.13, 0.37, 0.5, 0.83, 0.99}) {
        const double cur = rearrangement(f, full, t);
        c.require(cur <= prev, "rearrangement not non-increasing at t = " + num(t));
        prev = cur;
    }
}

void suite_signal_av(Ctx& c) {
    const Signal f = trig(256, Rng::mix(c.opt.seed, 22), 8);
    Rng rng(Rng::mix(c.opt.seed, 23));
    for (int rep = 0; rep < 12; ++rep) {
        const Interval q = to_interval(random_cube(rng, 5));
        const std::vector<double> vals = gather(f, q);
        for (double delta : {0.5, 1.0, 2.0}) {
            double mean = 0.0;
            for (double v : vals) mean += std::pow(std::abs(v), delta);
            mean /= static_cast<double>(vals.size());
            for (double lambda : {0.125, 0.5}) {
                const double t = lambda * q.measure().to_double();
                const double lhs = rearrangement(f, q, t);
                const double rhs = std::pow(mean / lambda, 1.0 / delta);
                c.require(lhs <= rhs * (1 + 1e-9) + 1e-12,
                          "(AV) fails on " + q.str() + " delta=" + num(delta) +
                              " lambda=" + num(lambda) + ": " + num(lhs) + " > " +
                              num(rhs));
            }
        }
    }
}

void suite_signal_median(Ctx& c) {
    const Signal f = trig(256, Rng::mix(c.opt.seed, 24), 8);
    Rng rng(Rng::mix(c.opt.seed, 25));
    for (int rep = 0; rep < 16; ++rep) {
        const Interval q = to_interval(random_cube(rng, 5));
        const double m = median_via(c, f, q);
        for (double lambda : {0.125, 0.25, 0.49}) {
            const double rhs =
                rearrangement(f, q, lambda * q.measure().to_double());
            c.require(std::abs(m) <= rhs,
                      "|median| exceeds the " + num(lambda) +
                          "-rearrangement on " + q.str() + ": " + num(std::abs(m)) +
                          " > " + num(rhs));
        }
    }
}

void suite_signal_key(Ctx& c) {
    const Signal f = trig(256, Rng::mix(c.opt.seed, 26), 8);
    Rng rng(Rng::mix(c.opt.seed, 27));
    const double lambda = 0.125;
    for (int rep = 0; rep < 10; ++rep) {
        const Interval q = to_interval(random_cube(rng, 4));
        const double omega = oscillation(f, q, lambda);
        std::vector<double> vals = gather(f, q);
        std::sort(vals.begin(), vals.end());
        std::vector<double> centers = vals;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i)
            centers.push_back(0.5 * (vals[i] + vals[i + 1]));
        centers.push_back(median(f, q));
        for (double delta : {1.0, 2.0}) {
            double best = HUGE_VAL;
            for (double ctr : centers) {
                double mean = 0.0;
                for (double v : vals) mean += std::pow(std::abs(v - ctr), delta);
                mean /= static_cast<double>(vals.size());
                best = std::min(best, std::pow(mean, 1.0 / delta));
            }
            const double cap = std::pow(1.0 / lambda, 1.0 / delta) * best;
            c.require(omega <= cap * (1 + 1e-9) + 1e-12,
                      "oscillation above its delta-average cap on " + q.str() +
                          " delta=" + num(delta) + ": " + num(omega) + " > " +
                          num(cap));
        }
        // the local sharp sup at any x in q includes the root term
        const SampleRange sr = Interval::full_circle().sample_range(f.n());
        const std::int64_t x = (sr.first + rng.uniform_int(sr.count)) % f.n();
        c.require(local_sharp_maximal(f, Interval::full_circle(), lambda, x) >=
                      oscillation(f, Interval::full_circle(), lambda),
                  "local sharp sup below the root oscillation at x=" +
                      std::to_string(x));
    }
}

void suite_signal_homogeneity(Ctx& c) {
    const Signal f = trig(256, Rng::mix(c.opt.seed, 28), 8);
    const double k = 3.7;
    Signal g = f;
    for (double& v : g.samples) v *= k;
    Rng rng(Rng::mix(c.opt.seed, 29));
    for (int rep = 0; rep < 10; ++rep) {
        const Interval q = to_interval(random_cube(rng, 4));
        const double la = lp_average(f, q, 2.0), lb = lp_average(g, q, 2.0);
        c.require(std::abs(lb - k * la) <= 1e-12 * std::max(1.0, k * la),
                  "lp_average not 1-homogeneous on " + q.str());
        const double oa = oscillation(f, q, 0.125), ob = oscillation(g, q, 0.125);
        c.require(std::abs(ob - k * oa) <= 1e-12 * std::max(1.0, k * oa),
                  "oscillation not 1-homogeneous on " + q.str());
        const double t = 0.33 * q.measure().to_double();
        const double ra = rearrangement(f, q, t), rb = rearrangement(g, q, t);
        c.require(rb == k * ra, "rearrangement not exactly scaled on " + q.str());
        c.require(median(g, q) == k * median(f, q),
                  "median not exactly scaled on " + q.str());
        const YoungFunction p2 = YoungFunction::power(2.0);
        const double na = orlicz_norm(f, q, p2), nb = orlicz_norm(g, q, p2);
        c.require(std::abs(nb - k * na) <= 1e-6 * std::max(1.0, k * na),
                  "orlicz_norm not 1-homogeneous on " + q.str());
    }
}

void suite_signal_orlicz(Ctx& c) {
    const Signal f = trig(256, Rng::mix(c.opt.seed, 30), 8);
    Rng rng(Rng::mix(c.opt.seed, 31));
    for (int rep = 0; rep < 8; ++rep) {
        const Interval q = to_interval(random_cube(rng, 4));
        for (double p : {1.5, 2.0, 3.0}) {
            const double lux = orlicz_norm(f, q, YoungFunction::power(p));
            const double lp = lp_average(f, q, p);
            c.require(std::abs(lux - lp) <= 1e-6 * std::max(1.0, lp),
                      "power-p Luxemburg norm != p-average on " + q.str() +
                          " p=" + num(p) + ": " + num(lux) + " vs " + num(lp));
        }
    }
    Signal zero;
    zero.samples.assign(64, 0.0);
    c.require(orlicz_norm(zero, Interval::full_circle(),
                          YoungFunction::t_log_e_plus_t()) == 0.0,
              "orlicz_norm of the zero signal must be 0");
    try {
        YoungFunction::power(2.0).validate({0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
        YoungFunction::t_log_e_plus_t().validate({0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
    } catch (const std::exception& e) {
        c.require(false, std::string("Young validation threw: ") + e.what());
    }
    const double gh = YoungFunction::t_log_e_plus_t().gamma_hat(2.0);
    const double expect = std::log(std::numbers::e + 1.0);
    c.require(std::abs(gh - expect) <= 1e-12,
              "gamma_hat(tloget, 2) = " + num(gh) + ", expected " + num(expect));
}

void suite_signal_orlicz_gamma(Ctx& c) {
    const Signal f = trig(256, Rng::mix(c.opt.seed, 32), 8);
    const YoungFunction phi = YoungFunction::t_log_e_plus_t();
    const double gh = phi.gamma_hat(2.0);
    Rng rng(Rng::mix(c.opt.seed, 33));
    for (int rep = 0; rep < 16; ++rep) {
        const std::int64_t x = rng.uniform_int(f.n());
        const double lhs = maximal_orlicz(f, phi, x);
        const double rhs = gh * maximal_r(f, 2.0, x);
        c.require(lhs <= rhs * (1 + 1e-8) + 1e-12,
                  "M_Phi exceeds gamma_hat * M_2 at x=" + std::to_string(x) +
                      ": " + num(lhs) + " > " + num(rhs));
    }
}

// ---------------------------------------------------------------- operators

void suite_operators_cancellation(Ctx& c) {
    const std::int64_t n = 256;
    Signal ones;
    ones.samples.assign(static_cast<std::size_t>(n), 1.0);
    const KernelSpec kh = make_kernel("periodic_hilbert");
    const KernelSpec kp = make_kernel("perturbed_hilbert", 0.5, "cos");
    for (const KernelSpec* k : {&kh, &kp}) {
        const std::vector<double> field = maximal_truncated_all(ones, *k);
        const double worst = *std::max_element(field.begin(), field.end());
        c.require(worst <= 1e-9,
                  k->name + " does not annihilate constants: max " + num(worst));
    }
    c.require(truncated_apply(ones, kh, 0.6, 3) == 0.0,
              "eps beyond the circle radius must give an empty sum");
}

void suite_operators_consistency(Ctx& c) {
    const std::int64_t n = 256;
    const Signal f = trig(n, Rng::mix(c.opt.seed, 41), 8);
    const Signal g = trig(n, Rng::mix(c.opt.seed, 42), 8);
    const KernelSpec k = make_kernel("periodic_hilbert");
    const OperatorProfile prof =
        OperatorProfile::make(k, ModulationFamily::symmetric(4), n);
    Rng rng(Rng::mix(c.opt.seed, 43));

    for (std::size_t e = 0; e < 3 && e < prof.epsilon_grid.size(); ++e) {
        const double eps = prof.epsilon_grid[e];
        const std::vector<double> all = truncated_apply_all(f, k, eps);
        for (int rep = 0; rep < 8; ++rep) {
            const std::int64_t x = rng.uniform_int(n);
            const double direct = truncated_apply(f, k, eps, x);
            c.require(std::abs(all[static_cast<std::size_t>(x)] - direct) <= 1e-9,
                      "fast path disagrees with the direct sum at eps=" +
                          num(eps) + " x=" + std::to_string(x));
        }
    }

    const std::vector<double> sup = modulated_sup_all(f, prof);
    const std::vector<double> star = modulated_maximal_sup_all(f, prof);
    for (int rep = 0; rep < 8; ++rep) {
        const std::int64_t x = rng.uniform_int(n);
        const double direct = modulated_sup(f, prof, x);
        c.require(std::abs(sup[static_cast<std::size_t>(x)] - direct) <= 1e-9,
                  "modulation sweep disagrees with the direct sup at x=" +
                      std::to_string(x));
    }
    const OperatorProfile base =
        OperatorProfile::make(k, ModulationFamily(), n); // {0} only
    const std::vector<double> plain = modulated_sup_all(f, base);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        c.require(plain[u] <= sup[u] + 1e-9,
                  "sup over a larger family dropped at x=" + std::to_string(i));
        c.require(sup[u] <= star[u],
                  "star variant below its base-eps member at x=" +
                      std::to_string(i));
    }

    // sublinearity and linearity of the underlying truncation
    Signal sum = f;
    for (std::int64_t i = 0; i < n; ++i)
        sum.samples[static_cast<std::size_t>(i)] +=
            g.samples[static_cast<std::size_t>(i)];
    const std::vector<double> tsum = modulated_sup_all(sum, prof);
    const std::vector<double> tg = modulated_sup_all(g, prof);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        c.require(tsum[u] <= sup[u] + tg[u] + 1e-9,
                  "T^F not sublinear at x=" + std::to_string(i));
    }
    Signal combo = f;
    for (std::int64_t i = 0; i < n; ++i)
        combo.samples[static_cast<std::size_t>(i)] =
            2.5 * f.samples[static_cast<std::size_t>(i)] -
            1.25 * g.samples[static_cast<std::size_t>(i)];
    const double eps0 = prof.base_epsilon;
    const std::vector<double> tf0 = truncated_apply_all(f, k, eps0);
    const std::vector<double> tg0 = truncated_apply_all(g, k, eps0);
    const std::vector<double> tc0 = truncated_apply_all(combo, k, eps0);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        c.require(std::abs(tc0[u] - (2.5 * tf0[u] - 1.25 * tg0[u])) <= 1e-9,
                  "T_eps not linear at x=" + std::to_string(i));
    }

    // real signals cannot tell +xi from -xi
    std::vector<int> pos, neg;
    for (int v = 0; v <= 4; ++v) pos.push_back(v);
    for (int v = -4; v <= 0; ++v) neg.push_back(v);
    const OperatorProfile ppos =
        OperatorProfile::make(k, ModulationFamily(pos), n);
    const OperatorProfile pneg =
        OperatorProfile::make(k, ModulationFamily(neg), n);
    const std::vector<double> fp = modulated_sup_all(f, ppos);
    const std::vector<double> fn = modulated_sup_all(f, pneg);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        c.require(std::abs(fp[u] - fn[u]) <= 1e-9,
                  "conjugate modulation symmetry broken at x=" + std::to_string(i));
    }
}

void suite_operators_multiplier(Ctx& c) {
    const std::int64_t n = 256;
    const KernelSpec k = make_kernel("periodic_hilbert");
    const double eps = 0.5 / static_cast<double>(n);
    for (int nu : {1, 5, 17}) {
        std::vector<cdouble> g(static_cast<std::size_t>(n));
        for (std::int64_t j = 0; j < n; ++j)
            g[static_cast<std::size_t>(j)] = std::polar(
                1.0, 2.0 * std::numbers::pi * nu * static_cast<double>(j) /
                         static_cast<double>(n));
        const cdouble mult(0.0, -(1.0 - 2.0 * static_cast<double>(nu) /
                                            static_cast<double>(n)));
        double worst = 0.0;
        for (std::int64_t x = 0; x < n; ++x) {
            const cdouble out = truncated_apply(g, k, eps, x);
            worst = std::max(worst,
                             std::abs(out - mult * g[static_cast<std::size_t>(x)]));
        }
        c.require(worst <= 1e-9, "diagonal-excluded multiplier off for nu=" +
                                     std::to_string(nu) + ": err " + num(worst));
    }
}

void suite_operators_weak(Ctx& c) {
    const std::int64_t n = 256;
    const OperatorProfile prof = OperatorProfile::make(
        make_kernel("periodic_hilbert"), ModulationFamily::symmetric(4), n);
    std::vector<Signal> family;
    for (int t = 0; t < 4; ++t)
        family.push_back(trig(n, Rng::mix(c.opt.seed, 500 + t), 8));
    const double psi = weak_norm_estimate(prof, 1.5, family);
    c.require(psi > 0.0 && std::isfinite(psi) && psi < 1e3,
              "weak norm estimate out of range: " + num(psi));
    std::vector<Signal> scaled = family;
    for (Signal& s : scaled)
        for (double& v : s.samples) v *= 3.0;
    const double psi3 = weak_norm_estimate(prof, 1.5, scaled);
    c.require(std::abs(psi3 - psi) <= 1e-9 * psi,
              "weak norm not scale-invariant: " + num(psi) + " vs " + num(psi3));
}

void suite_operators_wq(Ctx& c) {
    const std::int64_t n = 256;
    const OperatorProfile prof = OperatorProfile::make(
        make_kernel("periodic_hilbert"), ModulationFamily::symmetric(8), n);
    const Interval Q(Rational(1, 4), Rational(1, 2));
    std::vector<Signal> calib, valid;
    for (int t = 0; t < 32; ++t)
        calib.push_back(trig(n, Rng::mix(c.opt.seed, 1000 + t), 8));
    for (int t = 0; t < 4; ++t)
        valid.push_back(trig(n, Rng::mix(c.opt.seed, 2000 + t), 8));
    const std::vector<double> lambdas = {0.5, 0.25, 0.125};
    const WqReport rep = wq_calibrate(prof, 2.0, Q, calib, valid, lambdas);
    for (double l : lambdas) {
        const auto it = rep.xi_hat.find(l);
        c.require(it != rep.xi_hat.end() && it->second > 0.0,
                  "missing or nonpositive xi_hat at lambda=" + num(l));
    }
    if (rep.xi_hat.size() == 3) {
        // map is keyed ascending in lambda; thresholds must not increase
        double prev = HUGE_VAL;
        for (const auto& [l, xi] : rep.xi_hat) {
            c.require(xi <= prev, "xi_hat not monotone in lambda at " + num(l));
            prev = xi;
        }
    }
    std::string witness = "validation exceedances:";
    for (const auto& row : rep.violations)
        witness += " (lambda=" + num(row[0]) + ", trial=" + num(row[1]) +
                   ", exceeders=" + num(row[2]) + ", allowed=" + num(row[3]) + ")";
    c.require(rep.validation_ok, witness);
}

// ------------------------------------------------------------------- sparse

void check_lerner(Ctx& c, const Signal& f, const Interval& root,
                  const std::string& tag) {
    const LernerResult lr = lerner_decompose(f, root, 0.125);
    c.require(lr.cubes.size() == lr.omega.size(),
              tag + ": cube/omega length mismatch");
    c.require(sparseness_check(lr.family).certified,
              tag + ": emitted family is not 1/2-sparse");
    const std::int64_t n = f.n();
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < lr.cubes.size(); ++i) {
        const SampleRange sr = to_interval(lr.cubes[i]).sample_range(n);
        for (std::int64_t j = 0; j < sr.count; ++j)
            rhs[static_cast<std::size_t>((sr.first + j) % n)] += 2.0 * lr.omega[i];
    }
    const SampleRange rr = root.sample_range(n);
    for (std::int64_t j = 0; j < rr.count; ++j) {
        const std::int64_t i = (rr.first + j) % n;
        const double lhs =
            std::abs(f.samples[static_cast<std::size_t>(i)] - lr.root_median);
        c.require(lhs <= rhs[static_cast<std::size_t>(i)],
                  tag + ": |f - m| > 2 sum omega at sample " + std::to_string(i) +
                      ": " + num(lhs) + " > " +
                      num(rhs[static_cast<std::size_t>(i)]));
    }
}

void suite_sparse_lerner(Ctx& c) {
    // hand-checkable spike: one heavy eighth plus a stray sample
    Signal spike;
    spike.samples.assign(64, 0.0);
    for (int i = 0; i < 7; ++i) spike.samples[static_cast<std::size_t>(i)] = 100.0;
    check_lerner(c, spike, Interval::full_circle(), "spike");

    check_lerner(c, trig(256, Rng::mix(c.opt.seed, 51), 8),
                 Interval::full_circle(), "trig256");
    check_lerner(c, trig(1024, Rng::mix(c.opt.seed, 52), 16),
                 Interval::full_circle(), "trig1024");
    check_lerner(c, trig(256, Rng::mix(c.opt.seed, 53), 8),
                 to_interval(DyadicCube{0, 1, 1}), "halfcube");
}

void suite_sparse_apply(Ctx& c) {
    const Signal f = trig(256, Rng::mix(c.opt.seed, 54), 8);
    const Signal g = trig(256, Rng::mix(c.opt.seed, 55), 8);
    const LernerResult lr = lerner_decompose(f, Interval::full_circle(), 0.125);
    const SparseFamily& fam = lr.family;
    Signal fk = f, sum = f;
    for (double& v : fk.samples) v *= 2.5;
    for (std::size_t i = 0; i < sum.samples.size(); ++i)
        sum.samples[i] += g.samples[i];
    Rng rng(Rng::mix(c.opt.seed, 56));
    for (int rep = 0; rep < 12; ++rep) {
        const std::int64_t x = rng.uniform_int(f.n());
        const double af = sparse_apply(f, fam, 2.0, x);
        const double ak = sparse_apply(fk, fam, 2.0, x);
        c.require(std::abs(ak - 2.5 * af) <= 1e-12 * std::max(1.0, 2.5 * af),
                  "sparse_apply not 1-homogeneous at x=" + std::to_string(x));
        const double ag = sparse_apply(g, fam, 2.0, x);
        const double as = sparse_apply(sum, fam, 2.0, x);
        c.require(as <= af + ag + 1e-9,
                  "sparse_apply not subadditive at x=" + std::to_string(x));
    }
}

void suite_sparse_dominate(Ctx& c) {
    const std::int64_t n = 256;
    const Signal f = trig(n, Rng::mix(c.opt.seed, 61), 4);
    const OperatorProfile prof = OperatorProfile::make(
        make_kernel("periodic_hilbert"), ModulationFamily::symmetric(4), n);
    const OperatorHandle op = handle_modulated_maximal_sup(prof);
    const Interval root = Interval::full_circle();

    DominationConfig dc;
    dc.sharp.seed = Rng::mix(c.opt.seed, 62);
    DominationResult res;
    try {
        res = sparse_dominate(f, op, root, dc);
    } catch (const std::exception& e) {
        c.require(false, std::string("AUTO domination threw: ") + e.what());
        return;
    }
    c.require(res.packing.certified, "result family lost its certificate");
    c.require(std::isfinite(res.c_empirical) && res.c_empirical >= 0.0,
              "c_empirical out of range: " + num(res.c_empirical));

    const std::vector<double> op_values =
        op.eval_all(restrict_to(f, root.dilate(dc.alpha)));
    const VerificationReport ver = verify_domination(f, op_values, res, dc.s);
    c.require(ver.packing_certified, "verification packing check failed");
    c.require(ver.max_ratio == res.c_empirical,
              "verify max ratio " + num(ver.max_ratio) +
                  " != c_empirical " + num(res.c_empirical));
    c.require(ver.argmax == res.argmax, "verify argmax disagrees");

    // replaying with the discovered threshold reproduces the family;
    // doubling it must still succeed
    DominationConfig fixed = dc;
    fixed.A = res.threshold_a;
    const DominationResult res2 = sparse_dominate(f, op, root, fixed);
    c.require(res2.cubes == res.cubes,
              "fixed-A replay changed the family");
    fixed.A = 2.0 * res.threshold_a;
    try {
        const DominationResult res3 = sparse_dominate(f, op, root, fixed);
        c.require(res3.packing.certified, "doubled-A family not certified");
    } catch (const std::exception& e) {
        c.require(false, std::string("doubled A failed: ") + e.what());
    }
}

// ------------------------------------------------------------------ harness

void suite_harness_fit(Ctx& c) {
    std::vector<double> t, frac;
    for (int i = 0; i < 8; ++i) {
        t.push_back(0.5 + 0.5 * i);
        frac.push_back(0.8 * std::exp(-0.7 * t.back()));
    }
    const FitResult fit = fit_exponential(t, frac);
    c.require(std::abs(fit.alpha_hat - 0.7) <= 1e-12, "alpha_hat off on exact data");
    c.require(std::abs(fit.c_hat - 0.8) <= 1e-12, "c_hat off on exact data");
    c.require(std::abs(fit.r_squared - 1.0) <= 1e-12, "R^2 off on exact data");
    bool degenerate = false;
    try {
        fit_exponential({1.0, 2.0, 3.0, 4.0}, {0.25, 0.25, 0.25, 0.25});
    } catch (const DegenerateFit&) {
        degenerate = true;
    }
    c.require(degenerate, "constant fractions must raise DegenerateFit");
}

ExperimentConfig small_decay_config(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.experiment = "decay";
    cfg.signal.n = 256;
    cfg.signal.seed = seed;
    cfg.signal.max_freq = 4;
    cfg.op.max_freq = 4;
    cfg.t_grid = {0.4, 0.6, 0.8, 1.0, 1.3, 1.7};
    cfg.trials = 2;
    return cfg;
}

void suite_harness_fractions(Ctx& c) {
    const ExperimentConfig cfg = small_decay_config(Rng::mix(c.opt.seed, 71));
    const OperatorProfile prof = profile_from(cfg.op, cfg.signal.n);
    const Signal f = trig(cfg.signal.n, Rng::mix(c.opt.seed, 72), 4);
    const DecayFractions fr = compute_decay_fractions(
        f, prof, Interval::full_circle(), 2.0, {0.5, 1.0, 2.0, 4.0, 8.0});
    c.require(fr.skipped == 0, "nonzero signal produced skipped samples");
    for (std::size_t i = 0; i < fr.fraction.size(); ++i) {
        c.require(fr.fraction[i] >= 0.0 && fr.fraction[i] <= 1.0,
                  "fraction outside [0, 1]");
        if (i > 0)
            c.require(fr.fraction[i] <= fr.fraction[i - 1],
                      "fractions not non-increasing in t");
    }

    DecayReport rep;
    try {
        rep = run_decay(cfg);
    } catch (const std::exception& e) {
        c.require(false, std::string("run_decay threw: ") + e.what());
        return;
    }
    // aggregation is exactly the mean of the per-trial fraction curves
    for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
        double mean = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
            SignalSpec spec = cfg.signal;
            spec.seed = Rng::mix(cfg.signal.seed, static_cast<std::uint64_t>(t));
            const Signal ft = generate_signal(spec);
            mean += compute_decay_fractions(ft, prof, cfg.signal.support, cfg.r,
                                            cfg.t_grid)
                        .fraction[k];
        }
        mean /= static_cast<double>(cfg.trials);
        c.require(rep.fraction[k] == mean,
                  "trial aggregation is not the plain mean at t=" +
                      num(cfg.t_grid[k]));
    }
}

void suite_harness_determinism(Ctx& c) {
    const ExperimentConfig cfg = small_decay_config(Rng::mix(c.opt.seed, 73));
    const DecayReport a = run_decay(cfg);
    const DecayReport b = run_decay(cfg);
    c.require(decay_json(a, cfg) == decay_json(b, cfg),
              "repeated run changed the JSON report");
    c.require(decay_csv(a) == decay_csv(b), "repeated run changed the CSV report");

    ExperimentConfig wide = cfg;
    wide.workers = 2;
    const DecayReport w = run_decay(wide);
    c.require(decay_csv(w) == decay_csv(a),
              "worker count leaked into the results");
    c.require(decay_json(w, wide) == decay_json(a, cfg),
              "worker count leaked into the JSON report");

    const ExperimentConfig round =
        ExperimentConfig::from_json_text(cfg.to_json_text());
    c.require(round.to_json_text() == cfg.to_json_text(),
              "config does not round-trip through JSON");
}

} // namespace

SelftestReport run_selftest(const SelftestOptions& opt) {
    Ctx c;
    c.opt = opt;
    struct Entry {
        const char* name;
        void (*fn)(Ctx&);
    };
    const Entry entries[] = {
        {"dyadic.partition", suite_dyadic_partition},
        {"dyadic.lattice", suite_dyadic_lattice},
        {"dyadic.cover", suite_dyadic_cover},
        {"dyadic.packing", suite_dyadic_packing},
        {"signal.rearrangement", suite_signal_rearrangement},
        {"signal.av", suite_signal_av},
        {"signal.median", suite_signal_median},
        {"signal.key", suite_signal_key},
        {"signal.homogeneity", suite_signal_homogeneity},
        {"signal.orlicz", suite_signal_orlicz},
        {"signal.orlicz_gamma", suite_signal_orlicz_gamma},
        {"operators.cancellation", suite_operators_cancellation},
        {"operators.consistency", suite_operators_consistency},
        {"operators.multiplier", suite_operators_multiplier},
        {"operators.weak", suite_operators_weak},
        {"operators.wq", suite_operators_wq},
        {"sparse.lerner", suite_sparse_lerner},
        {"sparse.apply", suite_sparse_apply},
        {"sparse.dominate", suite_sparse_dominate},
        {"harness.fit", suite_harness_fit},
        {"harness.fractions", suite_harness_fractions},
        {"harness.determinism", suite_harness_determinism},
    };
    for (const Entry& e : entries) {
        c.begin(e.name);
        try {
            e.fn(c);
        } catch (const std::exception& ex) {
            c.require(false, std::string("unhandled exception: ") + ex.what());
        }
        c.end();
    }
    return c.rep;
}

} // namespace sdom
