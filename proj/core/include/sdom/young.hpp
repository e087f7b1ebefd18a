#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sdom {

// Young function: increasing, convex, phi(0) = 0, superlinear at infinity.
// Carries a name so configs and reports can refer to it.
class YoungFunction {
public:
    YoungFunction(std::string name, std::function<double(double)> phi)
        : name_(std::move(name)), phi_(std::move(phi)) {}

    double operator()(double t) const { return phi_(t); }
    const std::string& name() const { return name_; }

    // phi(t) = t^p, p >= 1.
    static YoungFunction power(double p);
    // phi(t) = t * log(e + t).
    static YoungFunction t_log_e_plus_t();
    // Registry lookup: "power" (param = p) or "tloget".
    static YoungFunction by_name(const std::string& name, double param = 1.0);

    // sup over a geometric grid on [1, t_max] of phi(t)/t^{p'} with
    // p' = p/(p-1); requires p > 1.
    double gamma_hat(double p, int grid_points = 512, double t_max = 1e6) const;

    // Sanity checks at the given points (ascending, positive): phi(0)=0,
    // monotone, midpoint-convex, phi(t)/t growing. Throws on violation.
    void validate(const std::vector<double>& checkpoints) const;

private:
    std::string name_;
    std::function<double(double)> phi_;
};

} // namespace sdom
