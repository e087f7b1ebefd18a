#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdom/operators.hpp"
#include "sdom/sparse.hpp"

namespace sdom {

inline constexpr const char* kVersion = "0.1.0";

// ------------------------------------------------------------------ config

struct SignalSpec {
    std::string kind = "trig"; // trig | indicator | step
    std::int64_t n = 1024;     // power of two
    std::uint64_t seed = 1;
    Interval support = Interval::full_circle();
    int max_freq = 32; // trig only
};

// Random trigonometric polynomial (iid standard normal coefficients on
// frequencies 1..max_freq), indicator of the support arc, or a +1/-1 step
// split at the support midpoint. Everything outside the support is zeroed.
Signal generate_signal(const SignalSpec& spec);

struct OperatorSpecCfg {
    std::string kernel = "periodic_hilbert";
    double a = 0.0;        // perturbed_hilbert strength
    std::string h = "cos"; // perturbed_hilbert shape
    int max_freq = 32;     // modulation family bound
    int alpha = 3;
};

KernelSpec kernel_from(const OperatorSpecCfg& op);
OperatorProfile profile_from(const OperatorSpecCfg& op, std::int64_t n);

std::vector<double> default_t_grid(); // 24 points, geometric in [0.5, 24]

struct ExperimentConfig {
    std::string experiment = "decay"; // decay | dominate | sharp-check |
                                      // kappa | lerner | selftest
    SignalSpec signal;
    OperatorSpecCfg op;
    std::vector<double> t_grid = default_t_grid();
    double r = 2.0;
    double s = 2.0;
    double p = 2.0;
    double q = 2.0;
    std::vector<double> lambdas = {0.5, 0.25, 0.125};
    std::optional<double> A; // fixed domination threshold; empty = AUTO
    double c0 = 4.0;
    int trials = 8;
    std::string out_dir = ".";
    std::string format = "both"; // csv | json | both
    int workers = 1;
    std::uint64_t seed = 1;

    // Strict parse: unknown keys, wrong types, or invalid values throw
    // ConfigError. Emission is key-sorted and byte-stable.
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
    void validate() const; // throws ConfigError
};

// --------------------------------------------------------------- experiments

struct DecayReport {
    std::vector<double> t_grid;
    std::vector<double> fraction; // mean over trials, aligned with t_grid
    double alpha_hat = 0.0;
    double c_hat = 0.0;
    double r_squared = 0.0;
    std::int64_t skipped = 0;
    int trials = 0;
};

struct DecayFractions {
    std::vector<double> fraction;
    std::int64_t skipped = 0;
};

// Level-set fractions |{x in Q : T^F_* f(x) > t M_r f(x)}| / |Q| for one
// signal; samples with M_r f = 0 are skipped and counted.
DecayFractions compute_decay_fractions(const Signal& f,
                                       const OperatorProfile& prof,
                                       const Interval& Q, double r,
                                       const std::vector<double>& t_grid);

DecayReport run_decay(const ExperimentConfig& cfg);

struct FitResult {
    double c_hat = 0.0;
    double alpha_hat = 0.0;
    double r_squared = 0.0;
};

// Least squares on (t, log frac): log frac ~ log c - alpha t. Caller
// supplies at least 4 positive fractions; all-equal data is DegenerateFit.
FitResult fit_exponential(const std::vector<double>& t,
                          const std::vector<double>& frac);

struct DominateOutcome {
    DominationResult result;
    VerificationReport verification;
    std::vector<double> op_values; // operator applied to f chi_root*
    Interval root = Interval::full_circle();
    std::string op_name;
};

DominateOutcome run_dominate(const ExperimentConfig& cfg);

struct SharpCheckReport {
    double kappa_hat = 0.0;
    double slack = 1.1;
    double max_ratio = 0.0; // max over trials/samples of sharp/(kappa M_r')
    std::int64_t violations = 0;
    std::int64_t skipped = 0; // samples with M_r' f = 0
    int trials = 0;
    bool ok() const { return violations == 0; }
};

// Pointwise sharp-function bound: grand_sharp <= kappa_hat(r) M_{r'} f
// times the slack, swept over random trig trials.
SharpCheckReport run_sharp_check(const ExperimentConfig& cfg);

struct KappaOutcome {
    KappaResult result;
    double r = 0.0;
    std::string kernel;
};

KappaOutcome run_kappa(const ExperimentConfig& cfg);

struct LernerOutcome {
    LernerResult result;
    double max_defect = 0.0; // max over samples of lhs - rhs (<= 0 iff ok)
    bool bound_ok = false;
    bool packing_ok = false;
    int trials = 0;
};

LernerOutcome run_lerner(const ExperimentConfig& cfg);

// ----------------------------------------------------------------- selftest

struct SelftestOptions {
    std::uint64_t seed = 2026;
    // Seam for mutation checks: the order-statistics suite reads its median
    // through this hook (defaults to sdom::median when empty).
    std::function<double(const Signal&, const Interval&)> median_fn;
};

struct SelftestFailure {
    std::string suite;
    std::string witness;
};

struct SelftestReport {
    std::vector<std::string> passed;
    std::vector<SelftestFailure> failures;
    bool ok() const { return failures.empty(); }
};

// Fixed-seed invariant sweep over every module at N in {256, 1024}.
SelftestReport run_selftest(const SelftestOptions& opt = {});

// ------------------------------------------------------------------ reports

// Writers emit <out_dir>/<experiment>.csv and/or .json per `format`
// ("csv" | "json" | "both"), returning the paths written. Bytes depend
// only on (config, seed).
std::vector<std::string> write_report(const DecayReport& rep,
                                      const ExperimentConfig& cfg);
std::vector<std::string> write_report(const DominateOutcome& rep,
                                      const ExperimentConfig& cfg);
std::vector<std::string> write_report(const SharpCheckReport& rep,
                                      const ExperimentConfig& cfg);
std::vector<std::string> write_report(const KappaOutcome& rep,
                                      const ExperimentConfig& cfg);
std::vector<std::string> write_report(const LernerOutcome& rep,
                                      const ExperimentConfig& cfg);
std::vector<std::string> write_report(const SelftestReport& rep,
                                      const ExperimentConfig& cfg);

// In-memory renderings (the file writers above are thin wrappers; tests
// compare these strings for byte stability).
std::string decay_csv(const DecayReport& rep);
std::string decay_json(const DecayReport& rep, const ExperimentConfig& cfg);
std::string dominate_csv(const DominateOutcome& rep);
std::string dominate_json(const DominateOutcome& rep, const ExperimentConfig& cfg);
std::string sharp_csv(const SharpCheckReport& rep);
std::string sharp_json(const SharpCheckReport& rep, const ExperimentConfig& cfg);
std::string kappa_csv(const KappaOutcome& rep);
std::string kappa_json(const KappaOutcome& rep, const ExperimentConfig& cfg);
std::string lerner_csv(const LernerOutcome& rep);
std::string lerner_json(const LernerOutcome& rep, const ExperimentConfig& cfg);
std::string selftest_json(const SelftestReport& rep, const ExperimentConfig& cfg);

// Run trial bodies over [0, count) with the requested worker count;
// results must be written into per-index slots so the schedule cannot
// affect the outcome.
void parallel_for(int count, int workers, const std::function<void(int)>& body);

} // namespace sdom
