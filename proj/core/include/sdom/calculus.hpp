#pragma once

#include <cstdint>
#include <vector>

#include "sdom/interval.hpp"
#include "sdom/signal.hpp"
#include "sdom/young.hpp"

namespace sdom {

// Sample-count floor used wherever a real threshold t multiplies a sample
// count: floor(t*N) with a tiny absolute guard so exact binary products
// (lambda = 1/8 etc.) never round down spuriously.
std::int64_t count_floor(double t_times_n);

// ((1/|q|) integral_q |f|^p)^{1/p} over the samples in q; p >= 1.
double lp_average(const Signal& f, const Interval& q, double p);

// Luxemburg norm inf{ lam > 0 : avg_q phi(|f|/lam) <= 1 } via bracketing
// and bisection (relative tolerance 1e-9, at most 200 doublings).
double orlicz_norm(const Signal& f, const Interval& q, const YoungFunction& phi);

// Decreasing rearrangement of f restricted to q, evaluated at t in (0, |q|]:
// the smallest alpha with |{x in q : |f(x)| > alpha}| <= t.
double rearrangement(const Signal& f, const Interval& q, double t);

// Lower median: smallest sample value m on q with |{f > m}| <= |q|/2 and
// |{f < m}| <= |q|/2. Exact integer-count comparisons.
double median(const Signal& f, const Interval& q);

// Local mean oscillation omega_lambda(f; q) = inf_c ((f-c) chi_q)*(lambda|q|),
// the infimum scanned over sample values and midpoints of consecutive
// sorted sample values (where the piecewise-linear objective can turn).
double oscillation(const Signal& f, const Interval& q, double lambda);

// sup of oscillation(f, Q, lambda) over grid-0 dyadic Q with x in Q, Q inside q0.
double local_sharp_maximal(const Signal& f, const Interval& q0, double lambda,
                           std::int64_t x);

// M_r f(x) = sup of lp_average(f, Q, r) over cubes Q from both grids
// containing x, all levels down to single-sample.
double maximal_r(const Signal& f, double r, std::int64_t x);
std::vector<double> maximal_r_all(const Signal& f, double r);

// Same supremum with the Luxemburg norm in place of the p-average.
double maximal_orlicz(const Signal& f, const YoungFunction& phi, std::int64_t x);

// Binder for repeated statistics on one (signal, cube) pair.
class LocalStats {
public:
    LocalStats(const Signal& f, const Interval& q) : f_(&f), q_(q) {}

    double lp_average(double p) const { return sdom::lp_average(*f_, q_, p); }
    double rearrangement(double t) const { return sdom::rearrangement(*f_, q_, t); }
    double median() const { return sdom::median(*f_, q_); }
    double oscillation(double lambda) const { return sdom::oscillation(*f_, q_, lambda); }

private:
    const Signal* f_;
    Interval q_;
};

} // namespace sdom
