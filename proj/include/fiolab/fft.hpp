#pragma once

// Iterative radix-2 complex FFT for power-of-two lengths. This is the only
// transform engine the library needs: grids are power-of-two by contract and
// the oscillatory-operator quadratures dominate the cost anyway.

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "fiolab/common.hpp"

namespace fiolab::detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddle table for size n: table[k] = exp(-2*pi*i*k/n), k < n/2.
// Every entry comes from std::polar directly, so butterflies never see an
// accumulated-product twiddle. Cached per thread for the last size used.
inline const std::vector<cplx>& twiddle_table(std::size_t n) {
    thread_local std::size_t cached_n = 0;
    thread_local std::vector<cplx> table;
    if (cached_n != n) {
        table.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            table[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(n));
        cached_n = n;
    }
    return table;
}

// In-place transform, sign = -1 for exp(-2*pi*i*jk/n) kernel, +1 for its
// conjugate. No normalization is applied.
inline void fft_pow2(std::span<cplx> a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: length must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const auto& table = twiddle_table(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t block = 0; block < n; block += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx w = table[k * stride];
                if (sign > 0) w = std::conj(w);
                const cplx u = a[block + k];
                const cplx v = a[block + k + len / 2] * w;
                a[block + k] = u + v;
                a[block + k + len / 2] = u - v;
            }
        }
    }
}

}  // namespace fiolab::detail
