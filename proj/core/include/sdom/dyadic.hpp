#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdom/interval.hpp"

namespace sdom {

// Hard floor on grid refinement. Level-k cubes have length 2^-k, so this
// keeps every endpoint denominator within 3 * 2^24.
inline constexpr int kMaxDepth = 24;

// Cube of the dyadic system on the circle. Grid 0 is the standard system
// [m 2^-k, (m+1) 2^-k); grid 1 is the same lattice translated by 1/3
// (uniform shift at every level, so the nesting structure is preserved).
struct DyadicCube {
    int grid = 0;            // 0 or 1
    int level = 0;           // k >= 0
    std::int64_t index = 0;  // m in [0, 2^k)

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
    std::string str() const;
};

Interval to_interval(const DyadicCube& q);

// Left/right halves, in that order.
std::array<DyadicCube, 2> children(const DyadicCube& q, int max_depth = kMaxDepth);

// Throws RootHasNoParent at level 0.
DyadicCube parent(const DyadicCube& q);

// The unique level-k cube of the given grid containing the point x (mod 1).
DyadicCube cube_containing(int grid, int level, const Rational& x);

// True when a and b belong to the same grid and one contains the other.
// Same-grid cubes are always nested or disjoint.
bool nested(const DyadicCube& a, const DyadicCube& b);

// Smallest cube from either grid containing the interval. Requires
// length(i) <= 1/6; the result never exceeds 6x the interval's length
// (the shifted grid catches whatever straddles a grid-0 boundary).
// Prefers grid 0 when both grids contain at the same level.
DyadicCube shifted_cover(const Interval& i, int max_depth = kMaxDepth);

// Family of cubes (as arcs) carrying a sparseness parameter eta in (0, 1].
// Duplicates are rejected at construction.
struct SparseFamily {
    Rational eta;
    std::vector<Interval> cubes;

    SparseFamily() : eta(1) {}
    SparseFamily(const Rational& eta_, std::vector<Interval> cubes_);
};

// Carleson packing certificate: per-cube sums over contained family members.
struct PackingReport {
    bool certified = false;
    std::vector<Rational> packing;     // sum_{P subset Q} |P|, per cube Q
    std::size_t violator = SIZE_MAX;   // first failing cube, family order
};

// Exact check of sum_{P in fam, P subset Q} |P| <= eta^-1 |Q| for every Q.
PackingReport sparseness_check(const SparseFamily& fam);

} // namespace sdom
