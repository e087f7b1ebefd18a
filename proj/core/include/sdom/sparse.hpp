#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sdom/dyadic.hpp"
#include "sdom/operators.hpp"
#include "sdom/signal.hpp"

namespace sdom {

// A_{p,S} f(x) = sum over family cubes containing x of <f>_{Q,p}.
double sparse_apply(const Signal& f, const SparseFamily& fam, double p,
                    std::int64_t x);

// Same sum with averages taken over per-cube dilations: raw[i] decides
// membership of x, dilated[i] carries the average.
double sparse_apply_dilated(const Signal& f, const std::vector<Interval>& raw,
                            const std::vector<Interval>& dilated, double s,
                            std::int64_t x);

// Local mean oscillation decomposition on a grid-0 dyadic cube: a 1/2-sparse
// family L of dyadic subcubes with
//   |f(x) - m_f(q0)| <= 2 sum_L omega_lambda(f; L) chi_L(x)
// at every sample of q0.
struct LernerResult {
    SparseFamily family; // the cubes below, eta = 1/2
    std::vector<DyadicCube> cubes;
    std::vector<double> omega; // omega_lambda(f; cube), aligned with cubes
    double root_median = 0.0;
    double lambda = 0.0;
};

LernerResult lerner_decompose(const Signal& f, const Interval& q0,
                              double lambda = 0.125);

struct DominationConfig {
    int alpha = 3;
    double s = 2.0;
    // Scale on the maximal-function branch of the exceptional set. The
    // recursion cannot repair a too-small value by raising A, so it is
    // surfaced in CalibrationFailure messages.
    double c0 = 4.0;
    std::optional<double> A; // fixed threshold; empty = AUTO (doubling)
    double auto_a0 = 1.0;
    int max_doublings = 60;
    SharpConfig sharp{};
};

struct DominationResult {
    SparseFamily family; // raw cubes, eta = 1/2
    std::vector<DyadicCube> cubes;
    std::vector<Interval> raw;     // intervals of `cubes`, same order
    std::vector<Interval> dilated; // alpha-dilates carrying the averages
    // Shifted-grid dyadic container of each dilate, when short enough
    // for the two-grid cover to apply (length <= 1/6).
    std::vector<std::optional<DyadicCube>> covers;
    double threshold_a = 0.0;
    double c_empirical = 0.0;
    int recursion_depth = 0;
    std::int64_t node_count = 0;
    std::int64_t skipped = 0; // ratio points where both sides vanish
    std::int64_t argmax = -1; // sample attaining c_empirical
    PackingReport packing;
};

// Calderon-Zygmund style recursion: at each node Q the exceptional set
//   Omega = { x in Q : M_s(f chi_Q*)(x)/c0 > <f>_{s,Q*}  or
//                      max(|op(f chi_Q*)(x)|, M#(f chi_Q*)(x))/A > <f>_{s,Q*} }
// must occupy at most |Q|/8; the maximal dyadic P with
// |P cap Omega| > |P|/4 become the children. Emits the visited cubes as a
// 1/2-sparse family and measures the smallest pointwise domination
// constant on the root cube.
DominationResult sparse_dominate(const Signal& f, const OperatorHandle& op,
                                 const Interval& q,
                                 const DominationConfig& cfg = {});

struct VerificationReport {
    double max_ratio = 0.0;
    std::int64_t argmax = -1;
    std::int64_t skipped = 0;
    // ratio counts over 16 equal bins spanning [0, max_ratio]
    std::vector<std::int64_t> histogram;
    bool packing_certified = false;
};

// Replays the domination inequality: per-sample |op_values| against the
// dilated sparse sum, plus a fresh packing certification of the family.
VerificationReport verify_domination(const Signal& f,
                                     const std::vector<double>& op_values,
                                     const DominationResult& res, double s);

} // namespace sdom
