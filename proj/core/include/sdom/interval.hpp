#pragma once

#include <cstdint>
#include <string>

#include "sdom/rational.hpp"

namespace sdom {

// Contiguous block of sample indices i (meaning points i/N), wrapping
// modulo N: the block is {first, first+1, ..., first+count-1} mod N.
struct SampleRange {
    std::int64_t first = 0;
    std::int64_t count = 0;
};

// Half-open arc [left, left+length) on the unit circle, exact endpoints.
// All arithmetic wraps modulo 1; length 1 is the full circle.
class Interval {
public:
    Interval(const Rational& left, const Rational& length);

    static Interval full_circle();

    const Rational& left() const { return left_; }
    const Rational& length() const { return length_; }
    Rational measure() const { return length_; }
    // left + length, not reduced mod 1 (can reach up to 2).
    Rational right() const { return left_ + length_; }
    // Midpoint of the arc, reduced into [0, 1).
    Rational center() const;

    bool is_full_circle() const { return length_ == Rational(1); }

    // Point membership; the point is reduced mod 1 first.
    bool contains(const Rational& x) const;
    // Arc containment (exact).
    bool contains(const Interval& other) const;
    // Exact arc-overlap measure.
    Rational intersection_measure(const Interval& other) const;

    // Concentric dilation by an odd factor alpha >= 1. Saturates at the
    // full circle when alpha * length >= 1 (is_full_circle flags it).
    Interval dilate(int alpha) const;

    // Sample points i/N inside the arc, as a circular index block.
    SampleRange sample_range(std::int64_t n) const;

    std::string str() const { return "[" + left_.str() + ", +" + length_.str() + ")"; }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.left_ == b.left_ && a.length_ == b.length_;
    }

private:
    Rational left_;   // in [0, 1)
    Rational length_; // in (0, 1]
};

} // namespace sdom
