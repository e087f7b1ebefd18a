#pragma once

#include <functional>
#include <map>
#include <string>

namespace sdom {

// Singular kernel with its registry identity. `evaluate` takes circle
// coordinates (periodic kernels read only x - y mod 1); it is finite
// whenever x != y mod 1. `periodic` is false only for the line kernel,
// which exists for Hormander-constant probing on the real line.
struct KernelSpec {
    std::string name;
    bool odd_symmetric = false;
    bool periodic = true;
    std::map<std::string, double> params;
    std::function<double(double, double)> evaluate;

    // Difference form K(x,y) = k(x-y); all registry kernels satisfy it,
    // which is what lets the convolution fast paths exist.
    std::function<double(double)> difference;
};

// Registry:
//   periodic_hilbert            cot(pi (x-y))
//   perturbed_hilbert(a, h)     (1 + a h(x-y)) cot(pi (x-y)),
//                               h in {cos, sin} meaning h(u) = cos/sin(2 pi u),
//                               |a| < 1 so the factor never vanishes
//   line_hilbert                1 / (x - y), non-periodic
KernelSpec make_kernel(const std::string& name, double a = 0.0,
                       const std::string& h = "cos");

} // namespace sdom
