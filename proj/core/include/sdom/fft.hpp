#pragma once

#include <complex>
#include <vector>

namespace sdom {

using cdouble = std::complex<double>;

// In-place iterative radix-2 transform; size must be a power of two.
// Forward uses kernel e^{-2pi i jk/n}; inverse divides by n at the end.
// Fixed butterfly order and precomputed twiddle tables make the result
// bit-reproducible run to run.
void fft(std::vector<cdouble>& a, bool inverse);

// Circular convolution out[i] = sum_j a[j] b[(i-j) mod n] via FFT.
std::vector<cdouble> circular_convolve(const std::vector<cdouble>& a,
                                       const std::vector<cdouble>& b);

bool is_power_of_two(std::size_t n);

} // namespace sdom
