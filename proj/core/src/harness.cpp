#include "sdom/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include <json.hpp>

#include "sdom/calculus.hpp"
#include "sdom/errors.hpp"
#include "sdom/rng.hpp"

namespace sdom {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad_config(const std::string& msg) {
    throw ConfigError("config: " + msg);
}

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            bad_config("unknown key '" + it.key() + "' in " + where);
    }
}

const json& field(const json& obj, const char* key) { return obj.at(key); }

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) bad_config(where + " must be a number");
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) bad_config(where + " must be an integer");
    return v.get<std::int64_t>();
}

std::uint64_t as_seed(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const std::int64_t s = as_integer(v, where);
    if (s < 0) bad_config(where + " must be nonnegative");
    return static_cast<std::uint64_t>(s);
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) bad_config(where + " must be a string");
    return v.get<std::string>();
}

Rational as_rational(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2)
        bad_config(where + " must be a [numerator, denominator] pair");
    try {
        return Rational(as_integer(v[0], where + "[0]"),
                        as_integer(v[1], where + "[1]"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad_config(where + ": " + e.what());
    }
}

Interval as_interval(const json& v, const std::string& where) {
    if (!v.is_object()) bad_config(where + " must be an object");
    check_keys(v, where.c_str(), {"left", "length"});
    if (!v.contains("left") || !v.contains("length"))
        bad_config(where + " needs both 'left' and 'length'");
    try {
        return Interval(as_rational(v["left"], where + ".left"),
                        as_rational(v["length"], where + ".length"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        bad_config(where + ": " + e.what());
    }
}

std::vector<double> as_number_array(const json& v, const std::string& where) {
    if (!v.is_array()) bad_config(where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

json rational_json(const Rational& r) { return json::array({r.num(), r.den()}); }

json interval_json(const Interval& q) {
    json out;
    out["left"] = rational_json(q.left());
    out["length"] = rational_json(q.length());
    return out;
}

} // namespace

// ---------------------------------------------------------------- config io

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad_config(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) bad_config("top level must be an object");
    check_keys(j, "top level",
               {"experiment", "signal", "op", "t_grid", "r", "s", "p", "q",
                "lambdas", "A", "c0", "trials", "out_dir", "format", "workers",
                "seed"});

    ExperimentConfig cfg;
    if (j.contains("experiment"))
        cfg.experiment = as_string(field(j, "experiment"), "experiment");

    if (j.contains("signal")) {
        const json& s = field(j, "signal");
        if (!s.is_object()) bad_config("signal must be an object");
        check_keys(s, "signal", {"kind", "n", "seed", "support", "max_freq"});
        if (s.contains("kind")) cfg.signal.kind = as_string(s["kind"], "signal.kind");
        if (s.contains("n")) cfg.signal.n = as_integer(s["n"], "signal.n");
        if (s.contains("seed")) cfg.signal.seed = as_seed(s["seed"], "signal.seed");
        if (s.contains("support"))
            cfg.signal.support = as_interval(s["support"], "signal.support");
        if (s.contains("max_freq"))
            cfg.signal.max_freq =
                static_cast<int>(as_integer(s["max_freq"], "signal.max_freq"));
    }

    if (j.contains("op")) {
        const json& o = field(j, "op");
        if (!o.is_object()) bad_config("op must be an object");
        check_keys(o, "op", {"kernel", "a", "h", "max_freq", "alpha"});
        if (o.contains("kernel")) cfg.op.kernel = as_string(o["kernel"], "op.kernel");
        if (o.contains("a")) cfg.op.a = as_number(o["a"], "op.a");
        if (o.contains("h")) cfg.op.h = as_string(o["h"], "op.h");
        if (o.contains("max_freq"))
            cfg.op.max_freq = static_cast<int>(as_integer(o["max_freq"], "op.max_freq"));
        if (o.contains("alpha"))
            cfg.op.alpha = static_cast<int>(as_integer(o["alpha"], "op.alpha"));
    }

    if (j.contains("t_grid")) cfg.t_grid = as_number_array(field(j, "t_grid"), "t_grid");
    if (j.contains("r")) cfg.r = as_number(field(j, "r"), "r");
    if (j.contains("s")) cfg.s = as_number(field(j, "s"), "s");
    if (j.contains("p")) cfg.p = as_number(field(j, "p"), "p");
    if (j.contains("q")) cfg.q = as_number(field(j, "q"), "q");
    if (j.contains("lambdas"))
        cfg.lambdas = as_number_array(field(j, "lambdas"), "lambdas");
    if (j.contains("A")) {
        const json& a = field(j, "A");
        if (a.is_null())
            cfg.A.reset();
        else
            cfg.A = as_number(a, "A");
    }
    if (j.contains("c0")) cfg.c0 = as_number(field(j, "c0"), "c0");
    if (j.contains("trials"))
        cfg.trials = static_cast<int>(as_integer(field(j, "trials"), "trials"));
    if (j.contains("out_dir")) cfg.out_dir = as_string(field(j, "out_dir"), "out_dir");
    if (j.contains("format")) cfg.format = as_string(field(j, "format"), "format");
    if (j.contains("workers"))
        cfg.workers = static_cast<int>(as_integer(field(j, "workers"), "workers"));
    if (j.contains("seed")) cfg.seed = as_seed(field(j, "seed"), "seed");

    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["experiment"] = experiment;
    json sig;
    sig["kind"] = signal.kind;
    sig["n"] = signal.n;
    sig["seed"] = signal.seed;
    sig["support"] = interval_json(signal.support);
    sig["max_freq"] = signal.max_freq;
    j["signal"] = sig;
    json o;
    o["kernel"] = op.kernel;
    o["a"] = op.a;
    o["h"] = op.h;
    o["max_freq"] = op.max_freq;
    o["alpha"] = op.alpha;
    j["op"] = o;
    j["t_grid"] = t_grid;
    j["r"] = r;
    j["s"] = s;
    j["p"] = p;
    j["q"] = q;
    j["lambdas"] = lambdas;
    if (A)
        j["A"] = *A;
    else
        j["A"] = nullptr;
    j["c0"] = c0;
    j["trials"] = trials;
    j["out_dir"] = out_dir;
    j["format"] = format;
    j["workers"] = workers;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> kExperiments = {
        "decay", "dominate", "sharp-check", "kappa", "lerner", "selftest"};
    static const std::set<std::string> kKinds = {"trig", "indicator", "step"};
    static const std::set<std::string> kKernels = {
        "periodic_hilbert", "perturbed_hilbert", "line_hilbert"};
    static const std::set<std::string> kFormats = {"csv", "json", "both"};

    if (!kExperiments.count(experiment))
        bad_config("experiment must be one of decay, dominate, sharp-check, "
                   "kappa, lerner, selftest");
    if (!kKinds.count(signal.kind))
        bad_config("signal.kind must be trig, indicator, or step");
    if (signal.n < 2 || !is_power_of_two(signal.n))
        bad_config("signal.n must be a power of two >= 2");
    if (signal.kind == "trig" && signal.max_freq < 1)
        bad_config("signal.max_freq must be >= 1 for trig signals");
    if (signal.max_freq < 0) bad_config("signal.max_freq must be nonnegative");
    if (!kKernels.count(op.kernel))
        bad_config("op.kernel must be periodic_hilbert, perturbed_hilbert, or "
                   "line_hilbert");
    if (op.kernel == "perturbed_hilbert" && !(std::abs(op.a) < 1.0))
        bad_config("op.a must satisfy |a| < 1");
    if (op.h != "cos" && op.h != "sin") bad_config("op.h must be cos or sin");
    if (op.max_freq < 0) bad_config("op.max_freq must be nonnegative");
    if (op.alpha < 3 || op.alpha % 2 == 0)
        bad_config("op.alpha must be an odd integer >= 3");
    if (!(r >= 1.0)) bad_config("r must be >= 1");
    if (!(s >= 1.0)) bad_config("s must be >= 1");
    if (!(p > 1.0 && p <= 2.0)) bad_config("p must lie in (1, 2]");
    if (!(q > 1.0)) bad_config("q must be > 1");
    if (t_grid.empty()) bad_config("t_grid must be nonempty");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) bad_config("t_grid entries must be positive");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            bad_config("t_grid must be strictly ascending");
    }
    if (lambdas.empty()) bad_config("lambdas must be nonempty");
    for (double l : lambdas)
        if (!(l > 0.0 && l < 1.0)) bad_config("lambdas entries must lie in (0, 1)");
    if (A && !(*A > 0.0)) bad_config("A must be positive when fixed");
    if (!(c0 > 0.0)) bad_config("c0 must be positive");
    if (trials < 1) bad_config("trials must be >= 1");
    if (out_dir.empty()) bad_config("out_dir must be nonempty");
    if (!kFormats.count(format)) bad_config("format must be csv, json, or both");
    if (workers < 1) bad_config("workers must be >= 1");
}

// ------------------------------------------------------------------ signals

Signal generate_signal(const SignalSpec& spec) {
    if (spec.n < 2 || !is_power_of_two(spec.n))
        throw ConfigError("config: signal.n must be a power of two >= 2");
    const std::int64_t n = spec.n;
    Signal f;
    f.samples.assign(static_cast<std::size_t>(n), 0.0);

    if (spec.kind == "trig") {
        if (spec.max_freq < 1)
            throw ConfigError("config: signal.max_freq must be >= 1 for trig");
        Rng rng(spec.seed);
        const int kmax = spec.max_freq;
        std::vector<double> ac(static_cast<std::size_t>(kmax) + 1, 0.0);
        std::vector<double> bc(static_cast<std::size_t>(kmax) + 1, 0.0);
        for (int k = 1; k <= kmax; ++k) {
            ac[static_cast<std::size_t>(k)] = rng.normal();
            bc[static_cast<std::size_t>(k)] = rng.normal();
        }
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(n);
            double v = 0.0;
            for (int k = 1; k <= kmax; ++k) {
                const double ph = 2.0 * std::numbers::pi * k * x;
                v += ac[static_cast<std::size_t>(k)] * std::cos(ph) +
                     bc[static_cast<std::size_t>(k)] * std::sin(ph);
            }
            f.samples[static_cast<std::size_t>(i)] = v;
        }
    } else if (spec.kind == "indicator") {
        const SampleRange sr = spec.support.sample_range(n);
        for (std::int64_t t = 0; t < sr.count; ++t)
            f.samples[static_cast<std::size_t>((sr.first + t) % n)] = 1.0;
    } else if (spec.kind == "step") {
        const SampleRange sr = spec.support.sample_range(n);
        for (std::int64_t t = 0; t < sr.count; ++t)
            f.samples[static_cast<std::size_t>((sr.first + t) % n)] =
                (2 * t < sr.count) ? 1.0 : -1.0;
    } else {
        throw ConfigError("config: signal.kind must be trig, indicator, or step");
    }

    return restrict_to(f, spec.support);
}

KernelSpec kernel_from(const OperatorSpecCfg& op) {
    return make_kernel(op.kernel, op.a, op.h);
}

OperatorProfile profile_from(const OperatorSpecCfg& op, std::int64_t n) {
    return OperatorProfile::make(kernel_from(op),
                                 ModulationFamily::symmetric(op.max_freq), n);
}

std::vector<double> default_t_grid() {
    std::vector<double> out;
    out.reserve(24);
    for (int k = 0; k < 24; ++k)
        out.push_back(0.5 * std::pow(48.0, static_cast<double>(k) / 23.0));
    return out;
}

// -------------------------------------------------------------------- decay

DecayFractions compute_decay_fractions(const Signal& f,
                                       const OperatorProfile& prof,
                                       const Interval& Q, double r,
                                       const std::vector<double>& t_grid) {
    if (f.n() != prof.n)
        throw std::domain_error("compute_decay_fractions: resolution mismatch");
    const std::int64_t n = f.n();
    const SampleRange sr = Q.sample_range(n);
    if (sr.count == 0) throw EmptyCube("decay window contains no samples");

    const std::vector<double> field = modulated_maximal_sup_all(f, prof);
    const std::vector<double> mr = maximal_r_all(f, r);

    DecayFractions out;
    out.fraction.assign(t_grid.size(), 0.0);
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(sr.count));
    for (std::int64_t t = 0; t < sr.count; ++t) {
        const std::int64_t i = (sr.first + t) % n;
        const double m = mr[static_cast<std::size_t>(i)];
        if (m <= 0.0) {
            ++out.skipped;
            continue;
        }
        ratios.push_back(field[static_cast<std::size_t>(i)] / m);
    }
    std::sort(ratios.begin(), ratios.end());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const auto it = std::upper_bound(ratios.begin(), ratios.end(), t_grid[k]);
        const std::int64_t exceeders = static_cast<std::int64_t>(ratios.end() - it);
        out.fraction[k] =
            static_cast<double>(exceeders) / static_cast<double>(sr.count);
    }
    return out;
}

DecayReport run_decay(const ExperimentConfig& cfg) {
    cfg.validate();
    const OperatorProfile prof = profile_from(cfg.op, cfg.signal.n);
    const int trials = cfg.trials;

    std::vector<DecayFractions> per(static_cast<std::size_t>(trials));
    parallel_for(trials, cfg.workers, [&](int t) {
        SignalSpec spec = cfg.signal;
        spec.seed = Rng::mix(cfg.signal.seed, static_cast<std::uint64_t>(t));
        const Signal f = generate_signal(spec);
        per[static_cast<std::size_t>(t)] =
            compute_decay_fractions(f, prof, cfg.signal.support, cfg.r, cfg.t_grid);
    });

    DecayReport rep;
    rep.t_grid = cfg.t_grid;
    rep.trials = trials;
    rep.fraction.assign(cfg.t_grid.size(), 0.0);
    for (const DecayFractions& d : per) {
        rep.skipped += d.skipped;
        for (std::size_t k = 0; k < rep.fraction.size(); ++k)
            rep.fraction[k] += d.fraction[k];
    }
    for (double& v : rep.fraction) v /= static_cast<double>(trials);

    // Fit only above the resolution floor: a mean fraction below 16/n is
    // dominated by single-sample granularity, not by the decay profile.
    const double floor_frac = 16.0 / static_cast<double>(cfg.signal.n);
    std::vector<double> ts, fs;
    for (std::size_t k = 0; k < rep.fraction.size(); ++k) {
        if (rep.fraction[k] >= floor_frac) {
            ts.push_back(rep.t_grid[k]);
            fs.push_back(rep.fraction[k]);
        }
    }
    if (ts.size() < 4)
        throw InsufficientRange(
            "decay: fewer than 4 grid points above the resolution floor "
            "16/n; lower the t grid or raise n");
    const FitResult fit = fit_exponential(ts, fs);
    rep.alpha_hat = fit.alpha_hat;
    rep.c_hat = fit.c_hat;
    rep.r_squared = fit.r_squared;
    return rep;
}

FitResult fit_exponential(const std::vector<double>& t,
                          const std::vector<double>& frac) {
    if (t.size() != frac.size())
        throw std::domain_error("fit_exponential: size mismatch");
    if (t.size() < 2) throw DegenerateFit("fit needs at least two points");
    std::vector<double> y;
    y.reserve(frac.size());
    for (double v : frac) {
        if (!(v > 0.0))
            throw DegenerateFit("fit requires strictly positive fractions");
        y.push_back(std::log(v));
    }
    const double m = static_cast<double>(t.size());
    double tbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tbar += t[i];
        ybar += y[i];
    }
    tbar /= m;
    ybar /= m;
    double sxx = 0.0, sxy = 0.0, stot = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (t[i] - tbar) * (t[i] - tbar);
        sxy += (t[i] - tbar) * (y[i] - ybar);
        stot += (y[i] - ybar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw DegenerateFit("fit needs at least two distinct t");
    if (stot == 0.0) throw DegenerateFit("fractions are all equal");
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * tbar;
    double sres = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = y[i] - (intercept + slope * t[i]);
        sres += e * e;
    }
    FitResult fit;
    fit.c_hat = std::exp(intercept);
    fit.alpha_hat = -slope;
    fit.r_squared = 1.0 - sres / stot;
    return fit;
}

// ----------------------------------------------------------------- dominate

DominateOutcome run_dominate(const ExperimentConfig& cfg) {
    cfg.validate();
    const OperatorProfile prof = profile_from(cfg.op, cfg.signal.n);
    const Signal f = generate_signal(cfg.signal);
    const OperatorHandle op = handle_modulated_maximal_sup(prof);

    DominationConfig dc;
    dc.alpha = cfg.op.alpha;
    dc.s = cfg.s;
    dc.c0 = cfg.c0;
    dc.A = cfg.A;
    dc.sharp.seed = Rng::mix(cfg.seed, 101);

    DominateOutcome out;
    out.root = cfg.signal.support;
    out.op_name = op.name;
    out.result = sparse_dominate(f, op, out.root, dc);
    out.op_values = op.eval_all(restrict_to(f, out.root.dilate(dc.alpha)));
    out.verification = verify_domination(f, out.op_values, out.result, cfg.s);
    return out;
}

// -------------------------------------------------------------- sharp check

SharpCheckReport run_sharp_check(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!(cfg.r > 1.0))
        throw ConfigError(
            "config: sharp-check needs r > 1 (conjugate exponent r' finite)");
    const double rp = cfg.r / (cfg.r - 1.0);

    KappaConfig kc;
    kc.seed = Rng::mix(cfg.seed, 202);
    const KappaResult kres = kappa_estimate(kernel_from(cfg.op), cfg.r, kc);

    const OperatorProfile prof = profile_from(cfg.op, cfg.signal.n);
    const OperatorHandle op = handle_modulated_maximal_sup(prof);
    const std::int64_t n = cfg.signal.n;

    struct TrialStats {
        double max_ratio = 0.0;
        std::int64_t violations = 0;
        std::int64_t skipped = 0;
    };
    std::vector<TrialStats> stats(static_cast<std::size_t>(cfg.trials));

    SharpCheckReport rep;
    rep.kappa_hat = kres.kappa_hat;
    rep.trials = cfg.trials;

    parallel_for(cfg.trials, cfg.workers, [&](int t) {
        SignalSpec spec = cfg.signal;
        spec.seed = Rng::mix(cfg.signal.seed, static_cast<std::uint64_t>(t));
        const Signal f = generate_signal(spec);
        SharpConfig sc;
        sc.seed = Rng::mix(cfg.seed, 303 + static_cast<std::uint64_t>(t));
        const std::vector<double> sharp =
            grand_sharp_all(f, op.eval_all, cfg.op.alpha, sc);
        const std::vector<double> mr = maximal_r_all(f, rp);
        TrialStats& st = stats[static_cast<std::size_t>(t)];
        for (std::int64_t i = 0; i < n; ++i) {
            const double denom = rep.kappa_hat * mr[static_cast<std::size_t>(i)];
            if (denom <= 0.0) {
                ++st.skipped;
                continue;
            }
            const double ratio = sharp[static_cast<std::size_t>(i)] / denom;
            st.max_ratio = std::max(st.max_ratio, ratio);
            if (ratio > rep.slack) ++st.violations;
        }
    });

    for (const TrialStats& st : stats) {
        rep.max_ratio = std::max(rep.max_ratio, st.max_ratio);
        rep.violations += st.violations;
        rep.skipped += st.skipped;
    }
    return rep;
}

// -------------------------------------------------------------------- kappa

KappaOutcome run_kappa(const ExperimentConfig& cfg) {
    cfg.validate();
    KappaConfig kc;
    kc.seed = Rng::mix(cfg.seed, 202);
    KappaOutcome out;
    out.result = kappa_estimate(kernel_from(cfg.op), cfg.r, kc);
    out.r = cfg.r;
    out.kernel = cfg.op.kernel;
    return out;
}

// ------------------------------------------------------------------- lerner

LernerOutcome run_lerner(const ExperimentConfig& cfg) {
    cfg.validate();
    const double lambda = *std::min_element(cfg.lambdas.begin(), cfg.lambdas.end());
    const std::int64_t n = cfg.signal.n;

    LernerOutcome out;
    out.trials = cfg.trials;
    out.bound_ok = true;
    out.packing_ok = true;
    for (int t = 0; t < cfg.trials; ++t) {
        SignalSpec spec = cfg.signal;
        spec.seed = Rng::mix(cfg.signal.seed, static_cast<std::uint64_t>(t));
        const Signal f = generate_signal(spec);
        LernerResult lr = lerner_decompose(f, cfg.signal.support, lambda);

        std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
        for (std::size_t k = 0; k < lr.cubes.size(); ++k) {
            const SampleRange sr = to_interval(lr.cubes[k]).sample_range(n);
            for (std::int64_t j = 0; j < sr.count; ++j)
                rhs[static_cast<std::size_t>((sr.first + j) % n)] +=
                    2.0 * lr.omega[k];
        }
        const SampleRange root = cfg.signal.support.sample_range(n);
        for (std::int64_t j = 0; j < root.count; ++j) {
            const std::int64_t i = (root.first + j) % n;
            const double lhs =
                std::abs(f.samples[static_cast<std::size_t>(i)] - lr.root_median);
            out.max_defect =
                std::max(out.max_defect, lhs - rhs[static_cast<std::size_t>(i)]);
            if (lhs > rhs[static_cast<std::size_t>(i)]) out.bound_ok = false;
        }
        if (!sparseness_check(lr.family).certified) out.packing_ok = false;
        if (t + 1 == cfg.trials) out.result = std::move(lr);
    }
    return out;
}

// ------------------------------------------------------------- parallel_for

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (count <= 0) return;
    const int w = std::min(std::max(workers, 1), count);
    if (w == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    std::exception_ptr err;
    auto drain = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> hold(mu);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) pool.emplace_back(drain);
    for (std::thread& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace sdom
