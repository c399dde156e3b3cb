#pragma once

// Shared numeric utilities: deterministic reductions, smooth cutoff
// construction and a small thread pool helper. Everything here is pure
// and allocation-light; the heavy lifting lives in the other headers.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fiolab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Small fixed-size point type; components beyond the active dimension are 0.
using Vec = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec vec1(double x) { return Vec{x, 0.0}; }
inline Vec vec2(double x, double y) { return Vec{x, y}; }

inline double dot(const Vec& a, const Vec& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

// ---------------------------------------------------------------------------
// Deterministic summation.
//
// Index-ascending pairwise reduction: the tree shape depends only on the
// length, so results are bit-identical no matter how callers schedule the
// surrounding work.
// ---------------------------------------------------------------------------

template <typename T>
T pairwise_sum(std::span<const T> v) {
    const std::size_t n = v.size();
    if (n == 0) return T{};
    if (n <= 16) {
        T acc = v[0];
        for (std::size_t i = 1; i < n; ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(std::span<const T>(v));
}

// ---------------------------------------------------------------------------
// Smooth gluing functions.
//
// All cutoffs in the library are built from u(x) = exp(-1/x) on x > 0.
// They are exactly zero (not merely tiny) outside their stated supports.
// ---------------------------------------------------------------------------

inline double glue_u(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// C^inf step: 0 for x <= 0, 1 for x >= 1, strictly increasing in between.
inline double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = glue_u(x);
    const double b = glue_u(1.0 - x);
    return a / (a + b);
}

// Radial plateau: 1 for r <= r_one, 0 for r >= r_zero (requires r_one < r_zero).
inline double smooth_plateau(double r, double r_one, double r_zero) {
    if (r_one >= r_zero) throw std::invalid_argument("smooth_plateau: r_one must be < r_zero");
    return 1.0 - smooth_step((std::abs(r) - r_one) / (r_zero - r_one));
}

// The standard bump on (0,1): exp(-1/(t(1-t))) inside, exactly 0 outside.
inline double bump01(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(-1.0 / (t * (1.0 - t)));
}

// <x> = (1 + |x|^2)^{1/2}, the Japanese bracket.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }
inline double bracket(const Vec& x, int dim) { return std::sqrt(1.0 + dot(x, x, dim)); }

// ---------------------------------------------------------------------------
// Parallel loop over [0, n). Each index is handled by exactly one thread and
// outputs must be disjoint, so values do not depend on the thread count.
// FIO_LAB_THREADS caps the pool (default: hardware concurrency).
// ---------------------------------------------------------------------------

inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("FIO_LAB_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return hw;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& body) {
    const unsigned threads = thread_budget();
    if (threads <= 1 || n < 256) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fiolab
