#include "sdom/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sdom/calculus.hpp"
#include "sdom/dyadic.hpp"
#include "sdom/errors.hpp"
#include "sdom/rng.hpp"

namespace sdom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t norm_index(std::int64_t x, std::int64_t n) {
    return ((x % n) + n) % n;
}

double kernel_at_step(const KernelSpec& k, std::int64_t d, std::int64_t n) {
    const double u = static_cast<double>(d) / static_cast<double>(n);
    if (k.difference) return k.difference(u);
    return k.evaluate(u, 0.0);
}

void require_resolution(double eps, std::int64_t n) {
    const double base = 1.0 / (2.0 * static_cast<double>(n));
    if (eps < base)
        throw EpsilonBelowResolution("eps below 1/(2N)");
}

// Truncated kernel column c[d] = K(d/N) when the circle distance of d/N
// to 0 exceeds eps, else 0. Convolving f with it realizes T_eps.
std::vector<cdouble> kernel_column(const KernelSpec& k, double eps, std::int64_t n) {
    std::vector<cdouble> c(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t d = 1; d < n; ++d) {
        const double dist = static_cast<double>(std::min(d, n - d)) /
                            static_cast<double>(n);
        if (dist > eps) c[static_cast<std::size_t>(d)] = kernel_at_step(k, d, n);
    }
    return c;
}

std::vector<double> make_epsilon_grid(std::int64_t n) {
    std::vector<double> grid;
    grid.push_back(1.0 / (2.0 * static_cast<double>(n)));
    for (std::int64_t step = 1; step <= n; step *= 2)
        grid.push_back(static_cast<double>(step) / static_cast<double>(n));
    return grid;
}

} // namespace

ModulationFamily::ModulationFamily(std::vector<int> freqs)
    : frequencies(std::move(freqs)) {
    std::sort(frequencies.begin(), frequencies.end());
    frequencies.erase(std::unique(frequencies.begin(), frequencies.end()),
                      frequencies.end());
    if (frequencies.empty())
        throw std::domain_error("modulation family must not be empty");
}

ModulationFamily ModulationFamily::symmetric(int max_freq) {
    if (max_freq < 0) throw std::domain_error("max_freq must be >= 0");
    std::vector<int> freqs;
    for (int xi = -max_freq; xi <= max_freq; ++xi) freqs.push_back(xi);
    return ModulationFamily(std::move(freqs));
}

bool ModulationFamily::contains(int xi) const {
    return std::binary_search(frequencies.begin(), frequencies.end(), xi);
}

OperatorProfile OperatorProfile::make(KernelSpec kernel, ModulationFamily modulation,
                                      std::int64_t n) {
    if (n < 2) throw std::domain_error("profile needs n >= 2");
    if (!kernel.periodic)
        throw std::domain_error("profiles exist for periodic kernels only");
    OperatorProfile prof;
    prof.kernel = std::move(kernel);
    prof.modulation = std::move(modulation);
    prof.n = n;
    prof.base_epsilon = 1.0 / (2.0 * static_cast<double>(n));
    prof.epsilon_grid = make_epsilon_grid(n);
    return prof;
}

double truncated_apply(const Signal& f, const KernelSpec& k, double eps,
                       std::int64_t x) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    require_resolution(eps, n);
    const std::int64_t xm = norm_index(x, n);
    double acc = 0.0;
    for (std::int64_t d = 1; d < n; ++d) {
        const double dist = static_cast<double>(std::min(d, n - d)) /
                            static_cast<double>(n);
        if (dist <= eps) continue;
        const std::int64_t j = norm_index(xm - d, n);
        acc += kernel_at_step(k, d, n) * f.samples[static_cast<std::size_t>(j)];
    }
    return acc / static_cast<double>(n);
}

cdouble truncated_apply(const std::vector<cdouble>& f, const KernelSpec& k,
                        double eps, std::int64_t x) {
    const std::int64_t n = static_cast<std::int64_t>(f.size());
    if (n <= 0) throw EmptyCube("empty signal");
    require_resolution(eps, n);
    const std::int64_t xm = norm_index(x, n);
    cdouble acc = 0.0;
    for (std::int64_t d = 1; d < n; ++d) {
        const double dist = static_cast<double>(std::min(d, n - d)) /
                            static_cast<double>(n);
        if (dist <= eps) continue;
        const std::int64_t j = norm_index(xm - d, n);
        acc += kernel_at_step(k, d, n) * f[static_cast<std::size_t>(j)];
    }
    return acc / static_cast<double>(n);
}

std::vector<double> truncated_apply_all(const Signal& f, const KernelSpec& k,
                                        double eps) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    require_resolution(eps, n);
    std::vector<double> out(static_cast<std::size_t>(n));
    if (!is_power_of_two(static_cast<std::size_t>(n))) {
        for (std::int64_t x = 0; x < n; ++x)
            out[static_cast<std::size_t>(x)] = truncated_apply(f, k, eps, x);
        return out;
    }
    std::vector<cdouble> fc(f.samples.begin(), f.samples.end());
    const std::vector<cdouble> conv =
        circular_convolve(kernel_column(k, eps, n), fc);
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            conv[static_cast<std::size_t>(i)].real() / static_cast<double>(n);
    return out;
}

double maximal_truncated(const Signal& f, const KernelSpec& k, std::int64_t x) {
    double best = 0.0;
    for (double eps : make_epsilon_grid(f.n()))
        best = std::max(best, std::abs(truncated_apply(f, k, eps, x)));
    return best;
}

std::vector<double> maximal_truncated_all(const Signal& f, const KernelSpec& k) {
    const std::int64_t n = f.n();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (double eps : make_epsilon_grid(n)) {
        const std::vector<double> t = truncated_apply_all(f, k, eps);
        for (std::int64_t i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            out[ui] = std::max(out[ui], std::abs(t[ui]));
        }
    }
    return out;
}

namespace {

std::vector<cdouble> modulate(const Signal& f, int xi) {
    const std::int64_t n = f.n();
    std::vector<cdouble> g(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        const double phase = kTwoPi * static_cast<double>(xi) *
                             static_cast<double>(j) / static_cast<double>(n);
        g[static_cast<std::size_t>(j)] =
            std::polar(1.0, phase) * f.samples[static_cast<std::size_t>(j)];
    }
    return g;
}

void check_profile_signal(const Signal& f, const OperatorProfile& prof) {
    if (f.n() != prof.n)
        throw std::domain_error("signal resolution does not match profile");
}

// Shared FFT sweep: for every (eps, xi) requested, the inverse transform
// of Chat_eps[v] * F[(v - xi) mod n] is T_eps(M^xi f); pointwise maxima of
// moduli are folded into out. One forward transform of f total.
std::vector<double> sup_sweep(const Signal& f, const OperatorProfile& prof,
                              const std::vector<double>& eps_set) {
    const std::int64_t n = prof.n;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    std::vector<cdouble> F(f.samples.begin(), f.samples.end());
    fft(F, false);
    std::vector<cdouble> work(static_cast<std::size_t>(n));
    for (double eps : eps_set) {
        std::vector<cdouble> chat = kernel_column(prof.kernel, eps, n);
        fft(chat, false);
        for (int xi : prof.modulation.frequencies) {
            for (std::int64_t v = 0; v < n; ++v) {
                const std::int64_t src = norm_index(v - xi, n);
                work[static_cast<std::size_t>(v)] =
                    chat[static_cast<std::size_t>(v)] *
                    F[static_cast<std::size_t>(src)];
            }
            fft(work, true);
            for (std::int64_t i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                out[ui] = std::max(out[ui],
                                   std::abs(work[ui]) / static_cast<double>(n));
            }
        }
    }
    return out;
}

double sup_direct(const Signal& f, const OperatorProfile& prof,
                  const std::vector<double>& eps_set, std::int64_t x) {
    double best = 0.0;
    for (int xi : prof.modulation.frequencies) {
        const std::vector<cdouble> g = modulate(f, xi);
        for (double eps : eps_set)
            best = std::max(best, std::abs(truncated_apply(g, prof.kernel, eps, x)));
    }
    return best;
}

} // namespace

double modulated_sup(const Signal& f, const OperatorProfile& prof, std::int64_t x) {
    check_profile_signal(f, prof);
    return sup_direct(f, prof, {prof.base_epsilon}, x);
}

std::vector<double> modulated_sup_all(const Signal& f, const OperatorProfile& prof) {
    check_profile_signal(f, prof);
    if (!is_power_of_two(static_cast<std::size_t>(prof.n))) {
        std::vector<double> out(static_cast<std::size_t>(prof.n));
        for (std::int64_t x = 0; x < prof.n; ++x)
            out[static_cast<std::size_t>(x)] = modulated_sup(f, prof, x);
        return out;
    }
    return sup_sweep(f, prof, {prof.base_epsilon});
}

double modulated_maximal_sup(const Signal& f, const OperatorProfile& prof,
                             std::int64_t x) {
    check_profile_signal(f, prof);
    return sup_direct(f, prof, prof.epsilon_grid, x);
}

std::vector<double> modulated_maximal_sup_all(const Signal& f,
                                              const OperatorProfile& prof) {
    check_profile_signal(f, prof);
    if (!is_power_of_two(static_cast<std::size_t>(prof.n))) {
        std::vector<double> out(static_cast<std::size_t>(prof.n));
        for (std::int64_t x = 0; x < prof.n; ++x)
            out[static_cast<std::size_t>(x)] = modulated_maximal_sup(f, prof, x);
        return out;
    }
    return sup_sweep(f, prof, prof.epsilon_grid);
}

OperatorHandle handle_modulated_sup(const OperatorProfile& prof) {
    return {"modulated_sup",
            [prof](const Signal& g) { return modulated_sup_all(g, prof); }};
}

OperatorHandle handle_modulated_maximal_sup(const OperatorProfile& prof) {
    return {"modulated_maximal_sup",
            [prof](const Signal& g) { return modulated_maximal_sup_all(g, prof); }};
}

OperatorHandle handle_identity() {
    return {"identity", [](const Signal& g) {
                std::vector<double> out(g.samples.size());
                for (std::size_t i = 0; i < out.size(); ++i)
                    out[i] = std::abs(g.samples[i]);
                return out;
            }};
}

namespace {

std::uint64_t cube_stream(const DyadicCube& q, std::uint64_t seed) {
    const std::uint64_t tag =
        (static_cast<std::uint64_t>(q.grid) << 62) ^
        (static_cast<std::uint64_t>(q.level) << 48) ^
        static_cast<std::uint64_t>(q.index);
    return Rng::mix(seed, tag);
}

// Oscillation of the operator field over one cube, with f silenced on the
// alpha-dilate. Returns the osc value and the cube's sample range.
double cube_oscillation(
    const Signal& f,
    const std::function<std::vector<double>(const Signal&)>& eval_all,
    const DyadicCube& q, int alpha, const SharpConfig& cfg, SampleRange* sr_out) {
    const std::int64_t n = f.n();
    const Interval qi = to_interval(q);
    const SampleRange sr = qi.sample_range(n);
    if (sr_out) *sr_out = sr;
    if (sr.count == 0) return 0.0;

    Signal g = f;
    const Interval qstar = qi.dilate(alpha);
    const SampleRange star = qstar.sample_range(n);
    for (std::int64_t t = 0; t < star.count; ++t)
        g.samples[static_cast<std::size_t>((star.first + t) % n)] = 0.0;

    const std::vector<double> field = eval_all(g);
    const std::int64_t w = sr.count;
    if (cfg.full_pairs || w * w <= cfg.max_pairs) {
        double lo = field[static_cast<std::size_t>(sr.first % n)];
        double hi = lo;
        for (std::int64_t t = 1; t < w; ++t) {
            const double v = field[static_cast<std::size_t>((sr.first + t) % n)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    }
    Rng rng(cube_stream(q, cfg.seed));
    double best = 0.0;
    for (int t = 0; t < cfg.max_pairs; ++t) {
        const std::int64_t i1 = (sr.first + rng.uniform_int(w)) % n;
        const std::int64_t i2 = (sr.first + rng.uniform_int(w)) % n;
        best = std::max(best, std::abs(field[static_cast<std::size_t>(i1)] -
                                       field[static_cast<std::size_t>(i2)]));
    }
    return best;
}

// Cube lengths admitted by the sharp operator: 8/n <= 2^-k <= 1/(2 alpha).
void sharp_level_range(std::int64_t n, int alpha, int* k_lo, int* k_hi) {
    if (alpha < 3 || alpha % 2 == 0)
        throw std::domain_error("alpha must be an odd integer >= 3");
    int lo = 0;
    while ((std::int64_t{1} << lo) < 2 * alpha) ++lo;
    int hi = 0;
    while ((std::int64_t{1} << (hi + 1)) <= n / 8) ++hi;
    *k_lo = lo;
    *k_hi = std::min(hi, kMaxDepth);
}

} // namespace

std::vector<double> grand_sharp_on_range(
    const Signal& f,
    const std::function<std::vector<double>(const Signal&)>& eval_all, int alpha,
    const SharpConfig& cfg, const SampleRange& where) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    std::vector<double> out(static_cast<std::size_t>(where.count), 0.0);
    if (where.count == 0) return out;
    int k_lo = 0;
    int k_hi = 0;
    sharp_level_range(n, alpha, &k_lo, &k_hi);
    const Rational first_pos(norm_index(where.first, n), n);
    for (int grid = 0; grid < 2; ++grid) {
        for (int k = k_lo; k <= k_hi; ++k) {
            const std::int64_t cubes = std::int64_t{1} << k;
            const std::int64_t width = n >> k; // samples per cube at this level
            // walk consecutive cubes left to right from the one holding
            // the first requested sample until the range is covered
            const std::int64_t m0 = cube_containing(grid, k, first_pos).index;
            const std::int64_t steps =
                std::min(cubes, where.count / width + 2);
            for (std::int64_t j = 0; j < steps; ++j) {
                const DyadicCube q{grid, k, (m0 + j) % cubes};
                SampleRange sr;
                const double osc = cube_oscillation(f, eval_all, q, alpha, cfg, &sr);
                for (std::int64_t t = 0; t < sr.count; ++t) {
                    const std::int64_t i = (sr.first + t) % n;
                    const std::int64_t off = norm_index(i - where.first, n);
                    if (off < where.count) {
                        auto& slot = out[static_cast<std::size_t>(off)];
                        slot = std::max(slot, osc);
                    }
                }
            }
        }
    }
    return out;
}

std::vector<double> grand_sharp_all(
    const Signal& f,
    const std::function<std::vector<double>(const Signal&)>& eval_all, int alpha,
    const SharpConfig& cfg) {
    return grand_sharp_on_range(f, eval_all, alpha, cfg, SampleRange{0, f.n()});
}

std::vector<double> grand_sharp_all(const Signal& f, const OperatorProfile& prof,
                                    int alpha, const SharpConfig& cfg) {
    check_profile_signal(f, prof);
    return grand_sharp_all(
        f, [&prof](const Signal& g) { return modulated_sup_all(g, prof); }, alpha,
        cfg);
}

double grand_sharp(const Signal& f, const OperatorProfile& prof, int alpha,
                   std::int64_t x, const SharpConfig& cfg) {
    check_profile_signal(f, prof);
    const std::int64_t n = f.n();
    const std::int64_t xm = norm_index(x, n);
    const Rational pos(xm, n);
    int k_lo = 0;
    int k_hi = 0;
    sharp_level_range(n, alpha, &k_lo, &k_hi);
    const auto eval = [&prof](const Signal& g) { return modulated_sup_all(g, prof); };
    double best = 0.0;
    for (int grid = 0; grid < 2; ++grid)
        for (int k = k_lo; k <= k_hi; ++k)
            best = std::max(best, cube_oscillation(f, eval,
                                                   cube_containing(grid, k, pos),
                                                   alpha, cfg, nullptr));
    return best;
}

KappaResult kappa_estimate(const KernelSpec& k, double r, const KappaConfig& cfg) {
    if (r < 1.0) throw std::domain_error("kappa_estimate needs r >= 1");
    if (cfg.k_max < 2 || cfg.quad_points < 1 || cfg.min_level > cfg.max_level)
        throw std::domain_error("bad kappa probe budget");
    const double conj_exp = 1.0 - 1.0 / r; // 1/r'
    KappaResult res;
    res.config = cfg;
    res.kappa_by_kmax.assign(static_cast<std::size_t>(cfg.k_max), 0.0);

    Rng rng(cfg.seed);
    for (int level = cfg.min_level; level <= cfg.max_level; ++level) {
        const double len = std::ldexp(1.0, -level);
        for (int c = 0; c < cfg.cubes_per_level; ++c) {
            const double center = rng.uniform() + 0.5 * len;
            for (int p = 0; p < cfg.pairs_per_cube; ++p) {
                // both points land in the concentric half cube
                const double xp = center + (rng.uniform() - 0.5) * 0.5 * len;
                const double xq = center + (rng.uniform() - 0.5) * 0.5 * len;
                ++res.probes_used;
                double running = 0.0;
                for (int kk = 1; kk <= cfg.k_max; ++kk) {
                    const double inner = std::ldexp(len, kk - 2); // half of 2^(kk-1)Q
                    double outer = std::ldexp(len, kk - 1);       // half of 2^kk Q
                    double measure = std::ldexp(len, kk);         // |2^kk Q|
                    if (k.periodic) {
                        if (inner >= 0.5) break; // annuli exhausted the circle
                        outer = std::min(outer, 0.5);
                        measure = std::min(measure, 1.0);
                    }
                    const double side = outer - inner;
                    const double step = side / static_cast<double>(cfg.quad_points);
                    double integral = 0.0;
                    for (int j = 0; j < cfg.quad_points; ++j) {
                        const double off =
                            inner + (static_cast<double>(j) + 0.5) * step;
                        for (const double y : {center + off, center - off}) {
                            const double diff =
                                std::abs(k.evaluate(xp, y) - k.evaluate(xq, y));
                            integral += std::pow(diff, r) * step;
                        }
                    }
                    running += std::pow(measure, conj_exp) * std::pow(integral, 1.0 / r);
                    auto& slot = res.kappa_by_kmax[static_cast<std::size_t>(kk - 1)];
                    slot = std::max(slot, running);
                }
            }
        }
    }
    // Partial sums are non-decreasing in K per probe; probes whose annuli
    // capped early stopped updating, so carry their plateau forward.
    for (int kk = 1; kk < cfg.k_max; ++kk) {
        auto& slot = res.kappa_by_kmax[static_cast<std::size_t>(kk)];
        slot = std::max(slot, res.kappa_by_kmax[static_cast<std::size_t>(kk - 1)]);
    }
    res.kappa_hat = res.kappa_by_kmax.back();

    // Leveling check: a Hormander kernel has geometrically decaying terms,
    // so the tail past k_max/2 must not dominate the head.
    const double half =
        res.kappa_by_kmax[static_cast<std::size_t>((cfg.k_max + 1) / 2 - 1)];
    if (res.kappa_hat > 2.0 * half)
        throw DivergentSum("annulus sums still growing at k_max");
    return res;
}

double weak_norm_estimate(const OperatorProfile& prof, double p,
                          const std::vector<Signal>& trials) {
    if (p <= 1.0 || p > 2.0)
        throw std::domain_error("weak_norm_estimate needs p in (1,2]");
    const std::int64_t n = prof.n;
    double best = 0.0;
    for (const Signal& f : trials) {
        check_profile_signal(f, prof);
        double norm_acc = 0.0;
        for (double v : f.samples) norm_acc += std::pow(std::abs(v), p);
        const double fnorm =
            std::pow(norm_acc / static_cast<double>(n), 1.0 / p);
        if (fnorm == 0.0) continue;
        std::vector<double> field = modulated_sup_all(f, prof);
        std::sort(field.begin(), field.end(), std::greater<double>());
        for (std::int64_t kk = 1; kk <= n; ++kk) {
            const double lambda = field[static_cast<std::size_t>(kk - 1)];
            const double meas = static_cast<double>(kk) / static_cast<double>(n);
            best = std::max(best, lambda * std::pow(meas, 1.0 / p) / fnorm);
        }
    }
    return best;
}

WqReport wq_calibrate(const OperatorProfile& prof, double q_exp, const Interval& Q,
                      const std::vector<Signal>& calibration,
                      const std::vector<Signal>& validation,
                      const std::vector<double>& lambdas) {
    WqReport rep;
    const std::int64_t n = prof.n;
    const SampleRange sr = Q.sample_range(n);
    if (sr.count == 0) throw EmptyCube("W_q cube holds no samples");

    // ratio field T^F(f chi_Q)(x) / <f>_{q,Q} over x in Q, one per trial
    const auto ratios_of = [&](const Signal& f) {
        const Signal g = restrict_to(f, Q);
        const double avg = lp_average(g, Q, q_exp);
        std::vector<double> out;
        if (avg == 0.0) return out;
        const std::vector<double> field = modulated_sup_all(g, prof);
        out.reserve(static_cast<std::size_t>(sr.count));
        for (std::int64_t t = 0; t < sr.count; ++t)
            out.push_back(field[static_cast<std::size_t>((sr.first + t) % n)] / avg);
        return out;
    };

    std::vector<std::vector<double>> calib_ratios;
    calib_ratios.reserve(calibration.size());
    for (const Signal& f : calibration) calib_ratios.push_back(ratios_of(f));
    std::vector<std::vector<double>> valid_ratios;
    valid_ratios.reserve(validation.size());
    for (const Signal& f : validation) valid_ratios.push_back(ratios_of(f));

    for (double lambda : lambdas) {
        const std::int64_t allowed = count_floor(
            lambda * Q.measure().to_double() * static_cast<double>(n));
        double xi = 0.0;
        for (const auto& ratios : calib_ratios) {
            if (ratios.empty()) continue; // trial vanished on Q
            if (allowed >= static_cast<std::int64_t>(ratios.size())) continue;
            std::vector<double> sorted = ratios;
            std::nth_element(sorted.begin(),
                             sorted.begin() + static_cast<std::ptrdiff_t>(allowed),
                             sorted.end(), std::greater<double>());
            xi = std::max(xi, sorted[static_cast<std::size_t>(allowed)]);
        }
        rep.xi_hat[lambda] = xi;
        for (std::size_t ti = 0; ti < valid_ratios.size(); ++ti) {
            const auto& ratios = valid_ratios[ti];
            std::int64_t exceeders = 0;
            for (double v : ratios)
                if (v > xi) ++exceeders;
            if (exceeders > allowed) {
                rep.validation_ok = false;
                rep.violations.push_back({lambda, static_cast<double>(ti),
                                          static_cast<double>(exceeders),
                                          static_cast<double>(allowed)});
            }
        }
    }
    return rep;
}

} // namespace sdom
