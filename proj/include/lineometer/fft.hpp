#pragma once

// Forward DFT of arbitrary length: iterative radix-2 for powers of two,
// Bluestein's chirp-z reduction otherwise. X_m = sum_j x_j exp(-2 pi i m j / n).

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace lineometer::fft {

using cd = std::complex<double>;

namespace detail {

inline void bit_reverse(std::vector<cd>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
}

// In-place radix-2 transform; n must be a power of two. Twiddles are
// evaluated directly per index rather than by recurrence.
inline void radix2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    bit_reverse(a);
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cd> roots(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        roots[k] = {std::cos(angle), std::sin(angle)};
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cd w = roots[k * stride];
                const cd u = a[i + k];
                const cd v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

} // namespace detail

inline std::vector<cd> forward(std::span<const cd> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    if (std::has_single_bit(n)) {
        std::vector<cd> a(x.begin(), x.end());
        detail::radix2(a, false);
        return a;
    }

    // chirp w_j = exp(-i pi j^2 / n); j^2 is reduced mod 2n to keep the
    // angle small and exact
    const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
    std::vector<cd> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t jj = (static_cast<std::uint64_t>(j) * j) % two_n;
        const double angle = -std::numbers::pi * static_cast<double>(jj) / static_cast<double>(n);
        chirp[j] = {std::cos(angle), std::sin(angle)};
    }
    const std::size_t m = std::bit_ceil(2 * n - 1);
    std::vector<cd> a(m), b(m);
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
    b[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) {
        b[j] = std::conj(chirp[j]);
        b[m - j] = std::conj(chirp[j]);
    }
    detail::radix2(a, false);
    detail::radix2(b, false);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    detail::radix2(a, true);
    const double scale = 1.0 / static_cast<double>(m);
    std::vector<cd> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
    return out;
}

} // namespace lineometer::fft
