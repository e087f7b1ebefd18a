#include "sdom/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sdom {

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Twiddle factors e^{-2pi i k/n} for k < n/2, computed once per size.
const std::vector<cdouble>& twiddles(std::size_t n) {
    static std::map<std::size_t, std::vector<cdouble>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cdouble> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double a = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = cdouble(std::cos(a), std::sin(a));
    }
    return cache.emplace(n, std::move(w)).first->second;
}

} // namespace

void fft(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
    if (n == 1) return;

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const auto& w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble t = w[k * stride];
                if (inverse) t = std::conj(t);
                t *= a[i + k + len / 2];
                const cdouble u = a[i + k];
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
            }
        }
    }

    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= inv;
    }
}

std::vector<cdouble> circular_convolve(const std::vector<cdouble>& a,
                                       const std::vector<cdouble>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("circular_convolve: size mismatch");
    std::vector<cdouble> fa = a, fb = b;
    fft(fa, false);
    fft(fb, false);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    fft(fa, true);
    return fa;
}

} // namespace sdom
