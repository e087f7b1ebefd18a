#include "sdom/young.hpp"

#include <cmath>
#include <stdexcept>

namespace sdom {

YoungFunction YoungFunction::power(double p) {
    if (p < 1.0) throw std::domain_error("power Young function needs p >= 1");
    return YoungFunction("power(" + std::to_string(p) + ")",
                         [p](double t) { return std::pow(t, p); });
}

YoungFunction YoungFunction::t_log_e_plus_t() {
    const double e = std::exp(1.0);
    return YoungFunction("tloget",
                         [e](double t) { return t * std::log(e + t); });
}

YoungFunction YoungFunction::by_name(const std::string& name, double param) {
    if (name == "power") return power(param);
    if (name == "tloget") return t_log_e_plus_t();
    throw std::domain_error("unknown Young function: " + name);
}

double YoungFunction::gamma_hat(double p, int grid_points, double t_max) const {
    if (p <= 1.0) throw std::domain_error("gamma_hat needs p > 1");
    const double pprime = p / (p - 1.0);
    const double log_max = std::log(t_max);
    double best = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double t = std::exp(log_max * static_cast<double>(i) /
                                  static_cast<double>(grid_points - 1));
        const double ratio = phi_(t) / std::pow(t, pprime);
        if (ratio > best) best = ratio;
    }
    return best;
}

void YoungFunction::validate(const std::vector<double>& checkpoints) const {
    if (phi_(0.0) != 0.0)
        throw std::domain_error(name_ + ": phi(0) != 0");
    double prev_t = 0.0;
    double prev_v = 0.0;
    double prev_slope = -1.0; // phi(t)/t at the previous checkpoint
    for (double t : checkpoints) {
        if (t <= prev_t)
            throw std::domain_error(name_ + ": checkpoints must be ascending and positive");
        const double v = phi_(t);
        if (v < prev_v)
            throw std::domain_error(name_ + ": not monotone at t=" + std::to_string(t));
        // Midpoint convexity against the previous checkpoint.
        const double mid = 0.5 * (prev_t + t);
        if (phi_(mid) > 0.5 * (prev_v + v) * (1.0 + 1e-12))
            throw std::domain_error(name_ + ": midpoint convexity fails near t=" + std::to_string(t));
        const double slope = v / t;
        if (slope + 1e-15 < prev_slope)
            throw std::domain_error(name_ + ": phi(t)/t decreasing at t=" + std::to_string(t));
        prev_t = t;
        prev_v = v;
        prev_slope = slope;
    }
}

} // namespace sdom
