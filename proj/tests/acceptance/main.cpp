// Acceptance harness: one pass/fail line per criterion, exit code = number
// of failed criteria. argv[1] is the path to the sdom CLI binary (used by
// the determinism criterion), argv[2] is a scratch directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sdom/calculus.hpp"
#include "sdom/dyadic.hpp"
#include "sdom/harness.hpp"
#include "sdom/kernels.hpp"
#include "sdom/operators.hpp"
#include "sdom/rng.hpp"
#include "sdom/sparse.hpp"

using namespace sdom;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_scratch;

Signal trig(std::int64_t n, std::uint64_t seed, int max_freq) {
    SignalSpec spec;
    spec.kind = "trig";
    spec.n = n;
    spec.seed = seed;
    spec.max_freq = max_freq;
    return generate_signal(spec);
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in.good()) return std::string("<unreadable: ") + p.string() + ">";
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// ---- criterion 1: rearrangement / median order statistics -----------------

bool criterion_rearrangement(std::string& detail) {
    const std::int64_t n = 1024;
    for (int sig = 0; sig < 100; ++sig) {
        const Signal f = trig(n, Rng::mix(9001, static_cast<std::uint64_t>(sig)), 32);
        const Interval q = Interval::full_circle();

        std::vector<double> sorted;
        sorted.reserve(static_cast<std::size_t>(n));
        for (double v : f.samples) sorted.push_back(std::abs(v));
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());

        double prev = HUGE_VAL;
        for (std::int64_t k = 0; k < n; k += 8) {
            const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
            const double star = rearrangement(f, q, t);
            // equimeasurability: the profile walks the sorted |f| values
            if (star != sorted[static_cast<std::size_t>(k)]) {
                detail = "profile mismatch at signal " + std::to_string(sig) +
                         " k=" + std::to_string(k);
                return false;
            }
            if (star > prev) {
                detail = "profile increased at signal " + std::to_string(sig) +
                         " k=" + std::to_string(k);
                return false;
            }
            prev = star;
        }

        for (double delta : {0.5, 1.0, 2.0}) {
            double mean = 0.0;
            for (double v : f.samples) mean += std::pow(std::abs(v), delta);
            mean /= static_cast<double>(n);
            for (double lambda : {0.125, 0.5}) {
                const double lhs = rearrangement(f, q, lambda);
                const double rhs = std::pow(mean / lambda, 1.0 / delta);
                if (lhs > rhs) {
                    detail = "averaging inequality fails at signal " +
                             std::to_string(sig) + " delta=" + std::to_string(delta) +
                             " lambda=" + std::to_string(lambda);
                    return false;
                }
            }
        }

        const double m = median(f, q);
        for (double lambda : {0.125, 0.25, 0.49}) {
            if (std::abs(m) > rearrangement(f, q, lambda)) {
                detail = "median exceeds rearrangement at signal " +
                         std::to_string(sig) + " lambda=" + std::to_string(lambda);
                return false;
            }
        }
    }
    detail = "100 signals, N=1024, zero tolerance";
    return true;
}

// ---- criterion 2: Orlicz norm consistency with p-averages ------------------

bool criterion_orlicz(std::string& detail) {
    const std::int64_t n = 256;
    // Full circle plus grid-0 subcubes of assorted sizes and positions.
    const DyadicCube cubes[] = {{0, 0, 0}, {0, 1, 1}, {0, 2, 0}, {0, 3, 5}};
    double worst = 0.0;
    for (int sig = 0; sig < 50; ++sig) {
        const Signal f = trig(n, Rng::mix(9002, static_cast<std::uint64_t>(sig)), 16);
        for (const DyadicCube& q : cubes) {
            const Interval iq = to_interval(q);
            for (double p : {1.0, 1.5, 2.0, 3.0}) {
                const double lp = lp_average(f, iq, p);
                const double lux = orlicz_norm(f, iq, YoungFunction::power(p));
                const double rel = std::abs(lux - lp) / lp;
                worst = std::max(worst, rel);
                if (!(rel <= 1e-8)) {
                    std::ostringstream os;
                    os << "signal " << sig << " p=" << p << " cube " << q.str()
                       << ": relative gap " << rel << " > 1e-8";
                    detail = os.str();
                    return false;
                }
            }
        }
    }
    std::ostringstream os;
    os << "50 signals, 4 cubes, p in {1,1.5,2,3}, worst relative gap " << worst;
    detail = os.str();
    return true;
}

// ---- criterion 3: local oscillation decomposition --------------------------

bool criterion_lerner(std::string& detail) {
    const std::int64_t n = 1024;
    for (int sig = 0; sig < 20; ++sig) {
        const Signal f = trig(n, Rng::mix(9003, static_cast<std::uint64_t>(sig)), 32);
        const LernerResult lr =
            lerner_decompose(f, Interval::full_circle(), 0.125);
        if (!sparseness_check(lr.family).certified) {
            detail = "packing failed at signal " + std::to_string(sig);
            return false;
        }
        std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
        for (std::size_t k = 0; k < lr.cubes.size(); ++k) {
            const SampleRange sr = to_interval(lr.cubes[k]).sample_range(n);
            for (std::int64_t j = 0; j < sr.count; ++j)
                rhs[static_cast<std::size_t>((sr.first + j) % n)] +=
                    2.0 * lr.omega[k];
        }
        for (std::int64_t x = 0; x < n; ++x) {
            const double lhs =
                std::abs(f.samples[static_cast<std::size_t>(x)] - lr.root_median);
            if (lhs > rhs[static_cast<std::size_t>(x)]) {
                detail = "pointwise bound fails at signal " + std::to_string(sig) +
                         " x=" + std::to_string(x);
                return false;
            }
        }
    }
    detail = "20 signals, N=1024, constant 2, zero tolerance";
    return true;
}

// ---- criterion 4: grand sharp pointwise bound ------------------------------

bool criterion_sharp_bound(std::string& detail) {
    const std::int64_t n = 512;
    OperatorSpecCfg op;
    op.kernel = "periodic_hilbert";
    op.max_freq = 8;
    const OperatorProfile prof = profile_from(op, n);

    KappaConfig kc;
    const KappaResult kr = kappa_estimate(prof.kernel, 2.0, kc);
    if (!(kr.kappa_hat > 0.0) || !std::isfinite(kr.kappa_hat)) {
        detail = "kappa estimate degenerate";
        return false;
    }

    SharpConfig sc;
    sc.full_pairs = true;
    double worst = 0.0;
    for (int sig = 0; sig < 10; ++sig) {
        const Signal f = trig(n, Rng::mix(9004, static_cast<std::uint64_t>(sig)), 32);
        const std::vector<double> sharp = grand_sharp_all(f, prof, 3, sc);
        const std::vector<double> mr = maximal_r_all(f, 2.0);
        for (std::int64_t x = 0; x < n; ++x) {
            const double bound =
                kr.kappa_hat * mr[static_cast<std::size_t>(x)] * 1.1;
            const double val = sharp[static_cast<std::size_t>(x)];
            if (mr[static_cast<std::size_t>(x)] > 0.0)
                worst = std::max(worst,
                                 val / (kr.kappa_hat *
                                        mr[static_cast<std::size_t>(x)]));
            if (val > bound) {
                detail = "bound fails at signal " + std::to_string(sig) +
                         " x=" + std::to_string(x);
                return false;
            }
        }
    }
    {
        std::ostringstream os;
        os << "10 signals, N=512, worst ratio " << worst << " <= 1.1";
        detail = os.str();
    }
    return true;
}

// ---- criterion 5: Hoermander constant nesting and stabilization ------------

bool criterion_kappa_nesting(std::string& detail) {
    KappaConfig kc;
    const KernelSpec hilbert = make_kernel("periodic_hilbert");
    const double k15 = kappa_estimate(hilbert, 1.5, kc).kappa_hat;
    const double k2 = kappa_estimate(hilbert, 2.0, kc).kappa_hat;
    const double k3 = kappa_estimate(hilbert, 3.0, kc).kappa_hat;
    if (!(k15 <= k2 * (1.0 + 1e-9))) {
        detail = "nesting fails for (1.5, 2)";
        return false;
    }
    if (!(k2 <= k3 * (1.0 + 1e-9))) {
        detail = "nesting fails for (2, 3)";
        return false;
    }

    const KernelSpec line = make_kernel("line_hilbert");
    KappaConfig kc20;
    kc20.k_max = 20;
    KappaConfig kc30;
    kc30.k_max = 30;
    const double at20 = kappa_estimate(line, 2.0, kc20).kappa_hat;
    const double at30 = kappa_estimate(line, 2.0, kc30).kappa_hat;
    if (std::abs(at30 - at20) > 0.01 * at30) {
        std::ostringstream os;
        os << "line kernel tail moves " << std::abs(at30 - at20) / at30 * 100
           << "% between K=20 and K=30";
        detail = os.str();
        return false;
    }
    std::ostringstream os;
    os << "nesting holds; line kernel tail moves "
       << std::abs(at30 - at20) / at30 * 100 << "% <= 1%";
    detail = os.str();
    return true;
}

// ---- criterion 6: sparse domination across handles and resolutions ---------

bool criterion_domination(std::string& detail) {
    const std::vector<std::int64_t> sizes = {256, 512, 1024};
    for (int which = 0; which < 2; ++which) {
        std::vector<double> constants;
        for (std::int64_t n : sizes) {
            OperatorSpecCfg opcfg;
            opcfg.kernel = "periodic_hilbert";
            opcfg.max_freq = 8;
            const OperatorProfile prof = profile_from(opcfg, n);
            const OperatorHandle op = which == 0
                                          ? handle_modulated_sup(prof)
                                          : handle_modulated_maximal_sup(prof);
            const Signal f =
                trig(n, Rng::mix(9006, static_cast<std::uint64_t>(n) + which), 8);
            DominationConfig dc;
            dc.sharp.seed = Rng::mix(9106, static_cast<std::uint64_t>(n));
            DominationResult res;
            try {
                res = sparse_dominate(f, op, Interval::full_circle(), dc);
            } catch (const std::exception& e) {
                detail = op.name + " N=" + std::to_string(n) +
                         " did not terminate: " + e.what();
                return false;
            }
            if (!sparseness_check(res.family).certified) {
                detail = op.name + " N=" + std::to_string(n) +
                         ": packing above 2";
                return false;
            }
            if (!std::isfinite(res.c_empirical) || res.c_empirical <= 0.0) {
                detail = op.name + " N=" + std::to_string(n) +
                         ": degenerate empirical constant";
                return false;
            }
            constants.push_back(res.c_empirical);
        }
        const double lo = *std::min_element(constants.begin(), constants.end());
        const double hi = *std::max_element(constants.begin(), constants.end());
        if (hi / lo > 2.0) {
            std::ostringstream os;
            os << (which == 0 ? "modulated_sup" : "modulated_maximal_sup")
               << ": constants spread " << hi / lo << " > 2 across N";
            detail = os.str();
            return false;
        }
    }
    detail = "both operator handles, N in {256,512,1024}, packing exact, "
             "constant spread <= 2";
    return true;
}

// ---- criterion 7: local exponential decay ----------------------------------

bool criterion_decay(std::string& detail) {
    ExperimentConfig cfg;
    cfg.experiment = "decay";
    cfg.signal.n = 4096;
    cfg.signal.max_freq = 32;
    cfg.signal.support = Interval(Rational(1, 4), Rational(1, 2));
    cfg.op.kernel = "periodic_hilbert";
    cfg.op.max_freq = 32;
    cfg.r = 2.0;
    cfg.trials = 8;
    const DecayReport rep = run_decay(cfg);
    for (std::size_t i = 1; i < rep.fraction.size(); ++i) {
        if (rep.fraction[i] > rep.fraction[i - 1]) {
            detail = "fractions increase at t=" + std::to_string(rep.t_grid[i]);
            return false;
        }
    }
    if (!(rep.alpha_hat > 0.0)) {
        detail = "fitted rate is not positive";
        return false;
    }
    if (!(rep.r_squared >= 0.85)) {
        std::ostringstream os;
        os << "fit quality " << rep.r_squared << " < 0.85";
        detail = os.str();
        return false;
    }
    std::ostringstream os;
    os << "N=4096, 8 trials: rate " << rep.alpha_hat << " > 0, R^2 "
       << rep.r_squared << " >= 0.85, fractions non-increasing";
    detail = os.str();
    return true;
}

// ---- criterion 8: shifted-grid covers --------------------------------------

bool criterion_cover(std::string& detail) {
    const std::int64_t n = 4096;
    const std::int64_t max_len = n / 6; // 682: length 682/4096 <= 1/6
    Rng rng(9008);
    const Rational six(6);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::int64_t a = rng.uniform_int(n);
        const std::int64_t len = 1 + rng.uniform_int(max_len);
        const Interval arc(Rational(a, n), Rational(len, n));
        DyadicCube cover{};
        try {
            cover = shifted_cover(arc);
        } catch (const std::exception& e) {
            detail = "cover failed for " + arc.str() + ": " + e.what();
            return false;
        }
        const Interval ci = to_interval(cover);
        if (!ci.contains(arc)) {
            detail = "cover does not contain " + arc.str();
            return false;
        }
        if (!(ci.measure() <= six * arc.measure())) {
            detail = "cover ratio above 6 for " + arc.str();
            return false;
        }
    }
    detail = "1000 arcs, N=4096, ratio <= 6 exact";
    return true;
}

// ---- criterion 9: CLI determinism across reruns and workers ----------------

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        g_cli + " " + args + " > " + log.string() + " 2>&1";
    return std::system(cmd.c_str());
}

bool criterion_determinism(std::string& detail) {
    const fs::path dir = g_scratch / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const fs::path cfg_path = dir / "decay.json";
    {
        ExperimentConfig cfg;
        cfg.experiment = "decay";
        cfg.signal.n = 1024;
        cfg.signal.max_freq = 8;
        cfg.op.max_freq = 8;
        cfg.t_grid = {0.4, 0.6, 0.8, 1.0, 1.3, 1.7};
        cfg.trials = 2;
        cfg.seed = 5;
        std::ofstream out(cfg_path);
        out << cfg.to_json_text();
    }

    // All three runs share one output directory so the configs really are
    // identical (up to worker count); bytes are cached between runs.
    const fs::path out = dir / "out";
    const std::string base = "decay --config " + cfg_path.string() +
                             " --out " + out.string();
    if (run_cli(base, dir / "a.log") != 0) {
        detail = "CLI run failed, see " + dir.string();
        return false;
    }
    const std::string csv_a = read_all(out / "decay.csv");
    const std::string json_a = read_all(out / "decay.json");

    if (run_cli(base, dir / "b.log") != 0) {
        detail = "CLI rerun failed, see " + dir.string();
        return false;
    }
    if (csv_a != read_all(out / "decay.csv") ||
        json_a != read_all(out / "decay.json")) {
        detail = "rerun with identical config changed the outputs";
        return false;
    }

    if (run_cli(base + " --workers 2", dir / "w.log") != 0) {
        detail = "CLI workers=2 run failed, see " + dir.string();
        return false;
    }
    if (csv_a != read_all(out / "decay.csv") ||
        json_a != read_all(out / "decay.json")) {
        detail = "worker count changed the outputs";
        return false;
    }
    detail = "rerun and workers=2 byte-identical (CSV and JSON)";
    return true;
}

struct Criterion {
    int number;
    const char* label;
    bool (*fn)(std::string&);
};

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: sdom_acceptance <cli-binary> <scratch-dir>\n";
        return 64;
    }
    g_cli = argv[1];
    g_scratch = argv[2];
    fs::create_directories(g_scratch);

    const Criterion criteria[] = {
        {1, "rearrangement, averaging, median order statistics",
         criterion_rearrangement},
        {2, "Orlicz norm consistency with p-averages", criterion_orlicz},
        {3, "local oscillation decomposition bound", criterion_lerner},
        {4, "grand sharp maximal pointwise bound", criterion_sharp_bound},
        {5, "Hoermander constant nesting and tail stabilization",
         criterion_kappa_nesting},
        {6, "sparse domination across handles and resolutions",
         criterion_domination},
        {7, "local exponential decay fit", criterion_decay},
        {8, "shifted-grid six-fold covers", criterion_cover},
        {9, "CLI determinism across reruns and worker counts",
         criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("unhandled exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::ostringstream line;
        line << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": "
             << c.label << " (" << detail << ") [" << secs << "s]";
        std::cout << line.str() << std::endl;
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::cout << "all 9 acceptance criteria passed" << std::endl;
    else
        std::cout << failures << " acceptance criteria FAILED" << std::endl;
    return failures;
}
