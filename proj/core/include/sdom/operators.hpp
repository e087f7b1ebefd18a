#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sdom/fft.hpp"
#include "sdom/kernels.hpp"
#include "sdom/signal.hpp"

namespace sdom {

// Phase family for the modulation supremum; linear phases xi * y with
// integer xi only (exactly periodic on the circle).
struct ModulationFamily {
    std::vector<int> frequencies; // sorted, unique

    ModulationFamily() : frequencies{0} {}
    explicit ModulationFamily(std::vector<int> freqs);

    // {-max_freq, ..., max_freq}
    static ModulationFamily symmetric(int max_freq);
    bool contains(int xi) const;
};

// Frozen description of one maximally modulated operator at resolution n:
// which kernel, which phases, which truncation radii. Calibration results
// (empirical weak norms, W_q thresholds) are written in by the harness
// once and the profile is treated as immutable afterwards.
struct OperatorProfile {
    KernelSpec kernel;
    ModulationFamily modulation;
    std::int64_t n = 0;
    double base_epsilon = 0.0;         // 1/(2n): drops exactly the diagonal sample
    std::vector<double> epsilon_grid;  // {1/(2n)} then {2^l/n : l = 0..log2(n)}
    std::map<double, double> weak_norm_estimates; // p -> psi_hat(p)
    std::map<double, double> wq_threshold;        // lambda -> xi_hat(lambda)

    static OperatorProfile make(KernelSpec kernel, ModulationFamily modulation,
                                std::int64_t n);
};

// T_eps f(x) = (1/n) sum over samples j with circle distance(x, j/n) > eps
// of K(x/n, j/n) f_j. Real and complex signal variants; the complex one
// carries the modulated signals.
double truncated_apply(const Signal& f, const KernelSpec& k, double eps,
                       std::int64_t x);
cdouble truncated_apply(const std::vector<cdouble>& f, const KernelSpec& k,
                        double eps, std::int64_t x);

// All sample points at once through the circular-convolution fast path
// (difference kernels only). Agrees with the pointwise sum to roundoff.
std::vector<double> truncated_apply_all(const Signal& f, const KernelSpec& k,
                                        double eps);

// T_* f(x): max of |T_eps f(x)| over the epsilon grid of resolution f.n().
double maximal_truncated(const Signal& f, const KernelSpec& k, std::int64_t x);
std::vector<double> maximal_truncated_all(const Signal& f, const KernelSpec& k);

// T^F f(x) = max over frequencies of |T_base(e^{2 pi i xi .} f)(x)|.
double modulated_sup(const Signal& f, const OperatorProfile& prof, std::int64_t x);
std::vector<double> modulated_sup_all(const Signal& f, const OperatorProfile& prof);

// T^F_* f(x): the same supremum extended over the whole epsilon grid.
double modulated_maximal_sup(const Signal& f, const OperatorProfile& prof,
                             std::int64_t x);
std::vector<double> modulated_maximal_sup_all(const Signal& f,
                                              const OperatorProfile& prof);

// A pointwise operator packaged for the sparse-domination recursion:
// eval_all returns the (nonnegative) field of the operator applied to a
// signal at every sample.
struct OperatorHandle {
    std::string name;
    std::function<std::vector<double>(const Signal&)> eval_all;
};

OperatorHandle handle_modulated_sup(const OperatorProfile& prof);
OperatorHandle handle_modulated_maximal_sup(const OperatorProfile& prof);
OperatorHandle handle_identity(); // |f| itself; hand-traceable baseline

// Pair-sampling policy for the grand sharp maximal operator. Cubes whose
// sample-pair count exceeds max_pairs get max_pairs seeded random pairs;
// full_pairs forces the exact max-min oscillation everywhere.
struct SharpConfig {
    int max_pairs = 64;
    bool full_pairs = false;
    std::uint64_t seed = 7;
};

// M#_{T,alpha} f(x): sup over dyadic cubes Q (both grids) containing x
// with 8/n <= |Q| <= 1/(2 alpha), of the pair oscillation over Q of
// T applied to f zeroed on dilate(Q, alpha).
double grand_sharp(const Signal& f, const OperatorProfile& prof, int alpha,
                   std::int64_t x, const SharpConfig& cfg = {});
std::vector<double> grand_sharp_all(const Signal& f, const OperatorProfile& prof,
                                    int alpha, const SharpConfig& cfg = {});
// Generic core used by the domination recursion (any operator field).
std::vector<double> grand_sharp_all(
    const Signal& f,
    const std::function<std::vector<double>(const Signal&)>& eval_all, int alpha,
    const SharpConfig& cfg = {});

// Sharp values at the samples of `where` only (result[t] is the value at
// sample where.first + t). Identical numbers to grand_sharp_all on the
// overlap; exists so per-node work in the domination recursion scales with
// the node, not with the resolution.
std::vector<double> grand_sharp_on_range(
    const Signal& f,
    const std::function<std::vector<double>(const Signal&)>& eval_all, int alpha,
    const SharpConfig& cfg, const SampleRange& where);

// Probe budget for the Hormander-constant estimate.
struct KappaConfig {
    int min_level = 2;        // cube length 2^-level
    int max_level = 9;
    int cubes_per_level = 8;
    int pairs_per_cube = 16;
    int k_max = 20;           // annuli per pair
    int quad_points = 256;    // midpoint nodes per annulus side
    std::uint64_t seed = 1;
};

struct KappaResult {
    double kappa_hat = 0.0;
    // kappa_by_kmax[K-1] is the estimate truncating every annulus sum at K,
    // so stabilization in K is reported, not just the final value.
    std::vector<double> kappa_by_kmax;
    std::int64_t probes_used = 0;
    KappaConfig config;
};

// kappa_r estimate: max over probed cubes Q and point pairs in the half
// cube of sum_k |2^k Q|^{1/r'} (integral over the annulus of
// |K(x',y) - K(x'',y)|^r dy)^{1/r}, midpoint quadrature, annuli capped at
// the full circle for periodic kernels.
KappaResult kappa_estimate(const KernelSpec& k, double r, const KappaConfig& cfg);

// Empirical weak-(p,p) lower estimate of T^F over a trial family:
// max over trials of sup_lambda lambda |{T^F f > lambda}|^{1/p} / ||f||_p,
// the sup realized at the sample breakpoints of the field.
double weak_norm_estimate(const OperatorProfile& prof, double p,
                          const std::vector<Signal>& trials);

// W_q calibration: xi_hat(lambda) = max over calibration trials of the
// per-trial (1-lambda)-quantile of T^F(f chi_Q)/<f>_{q,Q} over Q; the
// thresholds are then frozen and replayed against a validation family.
struct WqReport {
    std::map<double, double> xi_hat;
    bool validation_ok = true;
    // one row per violation: (lambda, trial index, exceeder count, allowed)
    std::vector<std::array<double, 4>> violations;
};

WqReport wq_calibrate(const OperatorProfile& prof, double q_exp, const Interval& Q,
                      const std::vector<Signal>& calibration,
                      const std::vector<Signal>& validation,
                      const std::vector<double>& lambdas);

} // namespace sdom
