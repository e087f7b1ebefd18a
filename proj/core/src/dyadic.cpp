#include "sdom/dyadic.hpp"

#include <algorithm>

#include "sdom/errors.hpp"

namespace sdom {

namespace {

Rational grid_shift(int grid) {
    return grid == 0 ? Rational(0) : Rational(1, 3);
}

void check_cube(const DyadicCube& q) {
    if (q.grid != 0 && q.grid != 1)
        throw std::domain_error("DyadicCube: grid must be 0 or 1");
    if (q.level < 0 || q.level > kMaxDepth)
        throw DepthExceeded("DyadicCube: level " + std::to_string(q.level) +
                            " outside [0, " + std::to_string(kMaxDepth) + "]");
    if (q.index < 0 || q.index >= (std::int64_t{1} << q.level))
        throw std::domain_error("DyadicCube: index out of range for level");
}

} // namespace

std::string DyadicCube::str() const {
    return "(" + std::to_string(grid) + "," + std::to_string(level) + "," +
           std::to_string(index) + ")";
}

Interval to_interval(const DyadicCube& q) {
    check_cube(q);
    const std::int64_t den = std::int64_t{1} << q.level;
    return Interval(Rational(q.index, den) + grid_shift(q.grid), Rational(1, den));
}

std::array<DyadicCube, 2> children(const DyadicCube& q, int max_depth) {
    check_cube(q);
    if (q.level + 1 > std::min(max_depth, kMaxDepth))
        throw DepthExceeded("children: refinement past depth " +
                            std::to_string(std::min(max_depth, kMaxDepth)));
    return {DyadicCube{q.grid, q.level + 1, 2 * q.index},
            DyadicCube{q.grid, q.level + 1, 2 * q.index + 1}};
}

DyadicCube parent(const DyadicCube& q) {
    check_cube(q);
    if (q.level == 0) throw RootHasNoParent("parent: level-0 cube has no parent");
    return DyadicCube{q.grid, q.level - 1, q.index >> 1};
}

DyadicCube cube_containing(int grid, int level, const Rational& x) {
    if (level < 0 || level > kMaxDepth)
        throw DepthExceeded("cube_containing: level out of range");
    const Rational y = (x - grid_shift(grid)).mod1();
    // floor(y * 2^level), exact: y in [0,1) so the product is in [0, 2^level).
    const __int128 p = static_cast<__int128>(y.num()) << level;
    const std::int64_t m = static_cast<std::int64_t>(p / y.den());
    return DyadicCube{grid, level, m};
}

bool nested(const DyadicCube& a, const DyadicCube& b) {
    if (a.grid != b.grid) return false;
    const DyadicCube& big = a.level <= b.level ? a : b;
    const DyadicCube& small = a.level <= b.level ? b : a;
    return (small.index >> (small.level - big.level)) == big.index;
}

DyadicCube shifted_cover(const Interval& i, int max_depth) {
    if (i.length() > Rational(1, 6))
        throw IntervalTooLong("shifted_cover: interval longer than 1/6");
    const int depth = std::min(max_depth, kMaxDepth);
    // Deepest level whose cubes are still at least as long as the interval.
    int k_hi = 0;
    while (k_hi < depth && Rational(1, std::int64_t{1} << (k_hi + 1)) >= i.length())
        ++k_hi;
    for (int k = k_hi; k >= 0; --k) {
        for (int g = 0; g <= 1; ++g) {
            const DyadicCube c = cube_containing(g, k, i.left());
            if (to_interval(c).contains(i)) return c;
        }
    }
    // Unreachable: the level-0 cube of grid 1 is the full circle.
    throw Error("shifted_cover: no containing cube found");
}

SparseFamily::SparseFamily(const Rational& eta_, std::vector<Interval> cubes_)
    : eta(eta_), cubes(std::move(cubes_)) {
    if (eta <= Rational(0) || eta > Rational(1))
        throw std::domain_error("SparseFamily: eta must lie in (0, 1]");
    // Duplicates would double-count in packing sums; reject them up front.
    std::vector<std::pair<Rational, Rational>> keys;
    keys.reserve(cubes.size());
    for (const auto& c : cubes) keys.emplace_back(c.left(), c.length());
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        throw std::domain_error("SparseFamily: duplicate cube");
}

PackingReport sparseness_check(const SparseFamily& fam) {
    PackingReport report;
    report.packing.reserve(fam.cubes.size());
    const std::size_t n = fam.cubes.size();
    for (std::size_t qi = 0; qi < n; ++qi) {
        Rational sum(0);
        for (std::size_t pi = 0; pi < n; ++pi) {
            if (fam.cubes[qi].contains(fam.cubes[pi])) sum += fam.cubes[pi].measure();
        }
        report.packing.push_back(sum);
        // sum <= eta^-1 |Q|, kept in multiplied-out form to stay exact.
        if (sum * fam.eta > fam.cubes[qi].measure() && report.violator == SIZE_MAX)
            report.violator = qi;
    }
    report.certified = report.violator == SIZE_MAX;
    return report;
}

} // namespace sdom
