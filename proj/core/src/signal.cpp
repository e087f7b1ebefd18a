#include "sdom/signal.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdom/errors.hpp"

namespace sdom {

namespace {

// Shortest decimal that round-trips a double exactly.
std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Signal restrict_to(const Signal& f, const Interval& q) {
    const std::int64_t n = f.n();
    Signal out;
    out.samples.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
    const SampleRange r = q.sample_range(n);
    for (std::int64_t k = 0; k < r.count; ++k) {
        const std::int64_t i = (r.first + k) % n;
        out.samples[static_cast<std::size_t>(i)] = f.samples[static_cast<std::size_t>(i)];
        mask[static_cast<std::size_t>(i)] = 1;
    }
    out.support_mask = std::move(mask);
    return out;
}

std::vector<double> gather(const Signal& f, const Interval& q) {
    const std::int64_t n = f.n();
    const SampleRange r = q.sample_range(n);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(r.count));
    for (std::int64_t k = 0; k < r.count; ++k) {
        const std::int64_t i = (r.first + k) % n;
        out.push_back(f.samples[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::string signal_to_csv(const Signal& f) {
    std::string out = "value\n";
    for (double v : f.samples) {
        out += format_value(v);
        out += '\n';
    }
    return out;
}

Signal signal_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoFailure("empty csv");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "value") throw IoFailure("csv header mismatch: " + line);
    Signal f;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(line, &pos);
        if (pos != line.size()) throw IoFailure("bad csv row: " + line);
        f.samples.push_back(v);
    }
    return f;
}

std::string signal_to_json(const Signal& f) {
    nlohmann::json j = f.samples;
    return j.dump();
}

Signal signal_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw IoFailure("expected a json array of numbers");
    Signal f;
    f.samples.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw IoFailure("non-numeric entry in json signal");
        f.samples.push_back(v.get<double>());
    }
    return f;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

void save_signal(const Signal& f, const std::string& path) {
    std::string body;
    if (ends_with(path, ".csv")) {
        body = signal_to_csv(f);
    } else if (ends_with(path, ".json")) {
        body = signal_to_json(f);
    } else {
        throw IoFailure("unknown signal extension: " + path);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open for write: " + path);
    out << body;
    if (!out) throw IoFailure("write failed: " + path);
}

Signal load_signal(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open for read: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (ends_with(path, ".csv")) return signal_from_csv(buf.str());
    if (ends_with(path, ".json")) return signal_from_json(buf.str());
    throw IoFailure("unknown signal extension: " + path);
}

} // namespace sdom
