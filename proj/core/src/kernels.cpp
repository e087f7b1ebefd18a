#include "sdom/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdom {

namespace {

// cot(pi u), wrapped into [0, 1) so the periodic kernels accept any real
// difference. The upper half is evaluated by reflection: 1 - u is exact
// for u in [1/2, 1) (Sterbenz), so u and 1 - u give exact floating
// negatives and odd kernels cancel exactly on symmetric sums.
double cot_pi(double u) {
    u -= std::floor(u);
    if (u > 0.5) return -1.0 / std::tan(std::numbers::pi * (1.0 - u));
    return 1.0 / std::tan(std::numbers::pi * u);
}

} // namespace

KernelSpec make_kernel(const std::string& name, double a, const std::string& h) {
    KernelSpec k;
    k.name = name;
    if (name == "periodic_hilbert") {
        k.odd_symmetric = true;
        k.difference = [](double u) { return cot_pi(u); };
    } else if (name == "perturbed_hilbert") {
        if (!(std::abs(a) < 1.0))
            throw std::domain_error("perturbed_hilbert needs |a| < 1");
        k.params["a"] = a;
        k.params["h"] = (h == "cos") ? 0.0 : 1.0;
        if (h == "cos") {
            // even perturbation keeps the kernel odd
            k.odd_symmetric = true;
            k.difference = [a](double u) {
                return (1.0 + a * std::cos(2.0 * std::numbers::pi * u)) * cot_pi(u);
            };
        } else if (h == "sin") {
            k.odd_symmetric = false;
            k.difference = [a](double u) {
                return (1.0 + a * std::sin(2.0 * std::numbers::pi * u)) * cot_pi(u);
            };
        } else {
            throw std::domain_error("perturbed_hilbert h must be cos or sin");
        }
    } else if (name == "line_hilbert") {
        k.odd_symmetric = true;
        k.periodic = false;
        k.difference = [](double u) { return 1.0 / u; };
    } else {
        throw std::domain_error("unknown kernel: " + name);
    }
    const auto diff = k.difference;
    k.evaluate = [diff](double x, double y) { return diff(x - y); };
    return k;
}

} // namespace sdom
