#include "sdom/interval.hpp"

#include <algorithm>
#include <stdexcept>

#include "sdom/errors.hpp"

namespace sdom {

Interval::Interval(const Rational& left, const Rational& length)
    : left_(left.mod1()), length_(length) {
    if (length <= Rational(0) || length > Rational(1))
        throw std::domain_error("Interval: length must lie in (0, 1]");
}

Interval Interval::full_circle() {
    return Interval(Rational(0), Rational(1));
}

Rational Interval::center() const {
    return (left_ + length_ / Rational(2)).mod1();
}

bool Interval::contains(const Rational& x) const {
    const Rational d = (x - left_).mod1();
    return d < length_;
}

bool Interval::contains(const Interval& other) const {
    if (is_full_circle()) return true;
    const Rational d = (other.left_ - left_).mod1();
    return d + other.length_ <= length_;
}

Rational Interval::intersection_measure(const Interval& other) const {
    // Rotate so this arc starts at 0; the other becomes [d, d+Lb), which
    // overlaps [0, La) either directly or through its wrapped copy.
    const Rational d = (other.left_ - left_).mod1();
    const Rational la = length_, lb = other.length_;
    const Rational zero(0);
    Rational direct = std::min(la, d + lb) - d;
    if (direct < zero) direct = zero;
    Rational wrapped = std::min(la, d + lb - Rational(1));
    if (wrapped < zero) wrapped = zero;
    return direct + wrapped;
}

Interval Interval::dilate(int alpha) const {
    if (alpha < 1 || alpha % 2 == 0)
        throw std::domain_error("Interval::dilate: alpha must be odd and positive");
    const Rational stretched = Rational(alpha) * length_;
    if (stretched >= Rational(1)) {
        // Full circle; keep the center so callers can still ask for it.
        return Interval((center() - Rational(1, 2)).mod1(), Rational(1));
    }
    const Rational new_left = (center() - stretched / Rational(2)).mod1();
    return Interval(new_left, stretched);
}

namespace {
// Smallest integer >= p/q * n, exact.
std::int64_t ceil_times(const Rational& v, std::int64_t n) {
    const __int128 p = static_cast<__int128>(v.num()) * n;
    const __int128 q = v.den();
    __int128 c = p / q;
    if (p % q != 0 && p > 0) ++c;
    return static_cast<std::int64_t>(c);
}
} // namespace

SampleRange Interval::sample_range(std::int64_t n) const {
    if (n <= 0) throw std::domain_error("Interval::sample_range: n must be positive");
    const std::int64_t lo = ceil_times(left_, n);
    const std::int64_t hi = ceil_times(right(), n);
    SampleRange r;
    r.count = hi - lo;
    r.first = ((lo % n) + n) % n;
    return r;
}

} // namespace sdom
