#include "sdom/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdom/dyadic.hpp"
#include "sdom/errors.hpp"

namespace sdom {

std::int64_t count_floor(double t_times_n) {
    return static_cast<std::int64_t>(std::floor(t_times_n + 1e-9));
}

namespace {

std::vector<double> values_on(const Signal& f, const Interval& q) {
    std::vector<double> v = gather(f, q);
    if (v.empty()) throw EmptyCube("no samples in " + q.str());
    return v;
}

int floor_log2(std::int64_t n) {
    int k = 0;
    while ((std::int64_t{1} << (k + 1)) <= n) ++k;
    return k;
}

} // namespace

double lp_average(const Signal& f, const Interval& q, double p) {
    if (p < 1.0) throw std::domain_error("lp_average needs p >= 1");
    const std::vector<double> v = values_on(f, q);
    double acc = 0.0;
    for (double x : v) acc += std::pow(std::abs(x), p);
    return std::pow(acc / static_cast<double>(v.size()), 1.0 / p);
}

double orlicz_norm(const Signal& f, const Interval& q, const YoungFunction& phi) {
    const std::vector<double> v = values_on(f, q);
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    if (vmax == 0.0) return 0.0;

    const auto mean_phi = [&](double lam) {
        double acc = 0.0;
        for (double x : v) acc += phi(std::abs(x) / lam);
        return acc / static_cast<double>(v.size());
    };

    // Bracket the unit level set of the decreasing map lam -> mean_phi(lam).
    double hi = vmax;
    int steps = 0;
    while (mean_phi(hi) > 1.0) {
        hi *= 2.0;
        if (++steps > 200) throw NonconvergentBisection("orlicz upper bracket ran away");
    }
    double lo = hi * 0.5;
    steps = 0;
    while (mean_phi(lo) <= 1.0) {
        lo *= 0.5;
        if (++steps > 200) {
            // phi vanishes on the whole data range at any positive level;
            // the infimum is then 0.
            return 0.0;
        }
    }
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mean_phi(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double rearrangement(const Signal& f, const Interval& q, double t) {
    if (t <= 0.0) throw std::domain_error("rearrangement needs t > 0");
    std::vector<double> v = values_on(f, q);
    for (double& x : v) x = std::abs(x);
    const std::int64_t m = static_cast<std::int64_t>(v.size());
    const std::int64_t allowed =
        count_floor(t * static_cast<double>(f.n()));
    if (allowed >= m) return 0.0;
    // (allowed+1)-th largest absolute value: with at most `allowed`
    // exceeders permitted, this is the smallest admissible level.
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(allowed),
                     v.end(), std::greater<double>());
    return v[static_cast<std::size_t>(allowed)];
}

double median(const Signal& f, const Interval& q) {
    std::vector<double> v = values_on(f, q);
    const std::size_t m = v.size();
    const std::size_t idx = (m - 1) / 2; // lower median
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
    return v[idx];
}

double oscillation(const Signal& f, const Interval& q, double lambda) {
    if (lambda <= 0.0 || lambda >= 1.0)
        throw std::domain_error("oscillation needs lambda in (0,1)");
    std::vector<double> v = values_on(f, q);
    const std::int64_t m = static_cast<std::int64_t>(v.size());
    const std::int64_t allowed =
        count_floor(lambda * q.measure().to_double() * static_cast<double>(f.n()));
    if (allowed >= m) return 0.0;
    std::sort(v.begin(), v.end());
    // Discarding `allowed` samples, split any way between the two tails,
    // leaves a window of m - allowed consecutive order statistics; the
    // best centre is the window midpoint and the cost its half-width.
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= allowed; ++k) {
        const double width = v[static_cast<std::size_t>(m - 1 - allowed + k)] -
                             v[static_cast<std::size_t>(k)];
        best = std::min(best, 0.5 * width);
    }
    return best;
}

double local_sharp_maximal(const Signal& f, const Interval& q0, double lambda,
                           std::int64_t x) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    const std::int64_t xm = ((x % n) + n) % n;
    const Rational pos(xm, n);
    if (!q0.contains(pos))
        throw PointOutsideCube("sample " + std::to_string(xm) + " outside " + q0.str());
    const int kmax = std::min(floor_log2(n), kMaxDepth);
    double best = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        const DyadicCube cube = cube_containing(0, k, pos);
        const Interval qi = to_interval(cube);
        if (!q0.contains(qi)) continue;
        best = std::max(best, oscillation(f, qi, lambda));
    }
    return best;
}

namespace {

// Shared cube walk for the maximal operators: both translated lattices,
// every level down to single-sample cubes, applied to the cubes holding x.
template <typename Fn>
double sup_over_cubes_at(const Signal& f, std::int64_t x, Fn&& local) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    const std::int64_t xm = ((x % n) + n) % n;
    const Rational pos(xm, n);
    const int kmax = std::min(floor_log2(n), kMaxDepth);
    double best = 0.0;
    for (int grid = 0; grid < 2; ++grid) {
        for (int k = 0; k <= kmax; ++k) {
            const Interval qi = to_interval(cube_containing(grid, k, pos));
            if (qi.sample_range(n).count == 0) continue;
            best = std::max(best, local(qi));
        }
    }
    return best;
}

} // namespace

double maximal_r(const Signal& f, double r, std::int64_t x) {
    double best = sup_over_cubes_at(
        f, x, [&](const Interval& qi) { return lp_average(f, qi, r); });
    const std::int64_t n = f.n();
    const std::int64_t xm = ((x % n) + n) % n;
    return std::max(best, std::abs(f.samples[static_cast<std::size_t>(xm)]));
}

std::vector<double> maximal_r_all(const Signal& f, double r) {
    const std::int64_t n = f.n();
    if (n <= 0) throw EmptyCube("empty signal");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = std::abs(f.samples[static_cast<std::size_t>(i)]);

    // Prefix sums of |f|^r over two periods make every circular range a
    // single subtraction.
    std::vector<double> prefix(static_cast<std::size_t>(2 * n + 1), 0.0);
    for (std::int64_t i = 0; i < 2 * n; ++i) {
        const double a = std::abs(f.samples[static_cast<std::size_t>(i % n)]);
        prefix[static_cast<std::size_t>(i + 1)] =
            prefix[static_cast<std::size_t>(i)] + std::pow(a, r);
    }

    const int kmax = std::min(floor_log2(n), kMaxDepth);
    for (int grid = 0; grid < 2; ++grid) {
        for (int k = 0; k <= kmax; ++k) {
            const std::int64_t cubes = std::int64_t{1} << k;
            for (std::int64_t m = 0; m < cubes; ++m) {
                const Interval qi = to_interval(DyadicCube{grid, k, m});
                const SampleRange sr = qi.sample_range(n);
                if (sr.count == 0) continue;
                const double sum = prefix[static_cast<std::size_t>(sr.first + sr.count)] -
                                   prefix[static_cast<std::size_t>(sr.first)];
                const double avg =
                    std::pow(sum / static_cast<double>(sr.count), 1.0 / r);
                for (std::int64_t kk = 0; kk < sr.count; ++kk) {
                    const std::size_t i =
                        static_cast<std::size_t>((sr.first + kk) % n);
                    out[i] = std::max(out[i], avg);
                }
            }
        }
    }
    return out;
}

double maximal_orlicz(const Signal& f, const YoungFunction& phi, std::int64_t x) {
    return sup_over_cubes_at(
        f, x, [&](const Interval& qi) { return orlicz_norm(f, qi, phi); });
}

} // namespace sdom
