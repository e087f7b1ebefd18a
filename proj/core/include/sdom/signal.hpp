#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdom/interval.hpp"

namespace sdom {

// Uniformly sampled function on the circle: samples[i] is the value at
// i/N. The optional mask records an intended support set; values outside
// a restriction are zeroed, so every operation can stay mask-oblivious.
struct Signal {
    std::vector<double> samples;
    std::optional<std::vector<std::uint8_t>> support_mask;

    Signal() = default;
    explicit Signal(std::vector<double> s) : samples(std::move(s)) {}

    std::int64_t n() const { return static_cast<std::int64_t>(samples.size()); }
};

// Copy with everything outside the arc set to zero (mask updated).
Signal restrict_to(const Signal& f, const Interval& q);

// Values at the sample points inside the arc, in circular order.
std::vector<double> gather(const Signal& f, const Interval& q);

// CSV round-trip; single column with header "value".
std::string signal_to_csv(const Signal& f);
Signal signal_from_csv(const std::string& text);

// JSON round-trip; a raw array of numbers.
std::string signal_to_json(const Signal& f);
Signal signal_from_json(const std::string& text);

// File helpers (throw IoFailure).
void save_signal(const Signal& f, const std::string& path); // by extension .csv/.json
Signal load_signal(const std::string& path);

} // namespace sdom
