#pragma once

// Sampled periodic functions on [-L, L)^d and the discrete transform pair.
//
// Conventions, fixed across the library:
//   time lattice       t_k   = -L + k*dt,          dt  = 2L/N
//   frequency lattice  eta_k = (k - N/2)*deta,     deta = 1/(2L)
//   forward transform  F f(eta) ~ sum f(t) exp(-2*pi*i*t*eta) dt^d
// so forward output values approximate the continuum Fourier transform on
// the frequency lattice directly (Riemann-sum weight and domain-offset
// phases included). inverse(forward(f)) == f to rounding since dt*deta*N = 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fiolab/common.hpp"
#include "fiolab/fft.hpp"

namespace fiolab {

enum class Domain { time, frequency };
enum class FourierDirection { forward, inverse };

struct GridSpec {
    int dim = 1;            // 1 or 2
    int samples = 8;        // N per axis, power of two >= 8
    double half_width = 1;  // L; domain is [-L, L)^d

    GridSpec() = default;
    GridSpec(int d, int n, double l) : dim(d), samples(n), half_width(l) {
        if (d != 1 && d != 2) throw std::invalid_argument("GridSpec: dimension must be 1 or 2");
        if (n < 8 || !detail::is_pow2(static_cast<std::size_t>(n)))
            throw std::invalid_argument("GridSpec: samples per axis must be a power of two >= 8");
        if (!(l > 0.0) || !std::isfinite(l))
            throw std::invalid_argument("GridSpec: half width must be positive and finite");
    }

    double dt() const { return 2.0 * half_width / samples; }
    double deta() const { return 1.0 / (2.0 * half_width); }
    double nyquist() const { return samples / 2 * deta(); }
    std::size_t size() const {
        std::size_t s = static_cast<std::size_t>(samples);
        return dim == 1 ? s : s * s;
    }
    double spacing(Domain d) const { return d == Domain::time ? dt() : deta(); }
    double cell(Domain d) const { return std::pow(spacing(d), dim); }

    double time_coord(int k) const { return -half_width + k * dt(); }
    double freq_coord(int k) const { return (k - samples / 2) * deta(); }
    double coord(Domain d, int k) const { return d == Domain::time ? time_coord(k) : freq_coord(k); }

    // Row-major axis split of a flat index: axis 0 is the slow one.
    std::array<int, 2> axes(std::size_t flat) const {
        if (dim == 1) return {static_cast<int>(flat), 0};
        return {static_cast<int>(flat / samples), static_cast<int>(flat % samples)};
    }
    std::size_t flat(int i0, int i1 = 0) const {
        return dim == 1 ? static_cast<std::size_t>(i0)
                        : static_cast<std::size_t>(i0) * samples + static_cast<std::size_t>(i1);
    }
    Vec point(Domain d, std::size_t flat_index) const {
        const auto ax = axes(flat_index);
        Vec p{coord(d, ax[0]), 0.0};
        if (dim == 2) p[1] = coord(d, ax[1]);
        return p;
    }

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && samples == o.samples && half_width == o.half_width;
    }
};

struct SampledFunction {
    GridSpec grid;
    Domain domain = Domain::time;
    std::vector<cplx> values;

    SampledFunction() = default;
    SampledFunction(const GridSpec& g, Domain d)
        : grid(g), domain(d), values(g.size(), cplx{0.0, 0.0}) {}
};

inline void require_same_grid(const SampledFunction& f, const SampledFunction& g, const char* who) {
    if (!(f.grid == g.grid) || f.domain != g.domain)
        throw std::invalid_argument(std::string(who) + ": grid or domain mismatch");
}

// ---------------------------------------------------------------------------
// sample: evaluate a closure on the lattice of the requested domain.
// ---------------------------------------------------------------------------

template <typename Fn>
SampledFunction sample(Fn&& closure, const GridSpec& grid, Domain domain) {
    SampledFunction f(grid, domain);
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec p = grid.point(domain, i);
        const cplx v = closure(p);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream msg;
            msg << "sample: non-finite value at lattice point (" << p[0];
            if (grid.dim == 2) msg << ", " << p[1];
            msg << "), flat index " << i;
            throw std::domain_error(msg.str());
        }
        f.values[i] = v;
    }
    return f;
}

// Convenience for real-valued 1-d closures.
template <typename Fn>
SampledFunction sample1(Fn&& closure, const GridSpec& grid, Domain domain) {
    return sample([&](const Vec& p) { return cplx(closure(p[0]), 0.0); }, grid, domain);
}

// ---------------------------------------------------------------------------
// fourier: the normalized transform described in the header comment.
//
// Both directions accept either domain tag; the input's lattice is treated
// as primal and the output lands on the dual lattice with the tag flipped.
// ---------------------------------------------------------------------------

namespace detail {

// Transform along one axis of row-major data (n per axis).
inline void fft_axis(std::vector<cplx>& v, int dim, int n, int axis, int sign) {
    if (dim == 1) {
        fft_pow2(std::span<cplx>(v), sign);
        return;
    }
    std::vector<cplx> scratch(static_cast<std::size_t>(n));
    if (axis == 1) {
        for (int row = 0; row < n; ++row)
            fft_pow2(std::span<cplx>(v.data() + static_cast<std::size_t>(row) * n,
                                     static_cast<std::size_t>(n)),
                     sign);
    } else {
        for (int col = 0; col < n; ++col) {
            for (int row = 0; row < n; ++row) scratch[row] = v[static_cast<std::size_t>(row) * n + col];
            fft_pow2(std::span<cplx>(scratch), sign);
            for (int row = 0; row < n; ++row) v[static_cast<std::size_t>(row) * n + col] = scratch[row];
        }
    }
}

// Multiply by (-1)^(sum of axis indices); this recenters both lattices at 0.
inline void checkerboard(std::vector<cplx>& v, int dim, int n) {
    if (dim == 1) {
        for (int k = 1; k < n; k += 2) v[k] = -v[k];
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((i + j) & 1) {
                    auto& z = v[static_cast<std::size_t>(i) * n + j];
                    z = -z;
                }
    }
}

}  // namespace detail

inline SampledFunction fourier(const SampledFunction& f, FourierDirection direction) {
    // The parity trick below assumes (-1)^(N/2) = 1 per axis, i.e. 4 | N;
    // guaranteed by the GridSpec contract (power of two >= 8).
    SampledFunction out = f;
    const int n = f.grid.samples;
    const int sign = direction == FourierDirection::forward ? -1 : +1;
    const double weight = f.grid.cell(f.domain);

    detail::checkerboard(out.values, f.grid.dim, n);
    for (int axis = 0; axis < f.grid.dim; ++axis)
        detail::fft_axis(out.values, f.grid.dim, n, axis, sign);
    detail::checkerboard(out.values, f.grid.dim, n);
    for (auto& z : out.values) z *= weight;

    out.domain = f.domain == Domain::time ? Domain::frequency : Domain::time;
    return out;
}

// ---------------------------------------------------------------------------
// L^p norms and inner products (Riemann sums with the lattice cell weight).
// ---------------------------------------------------------------------------

inline double lp_norm(const SampledFunction& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& z : f.values) m = std::max(m, std::abs(z));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    std::vector<double> terms(f.values.size());
    if (p == 1.0) {
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::abs(f.values[i]);
    } else if (p == 2.0) {
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::norm(f.values[i]);
    } else {
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::abs(f.values[i]), p);
    }
    const double total = pairwise_sum(terms) * f.grid.cell(f.domain);
    return p == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / p);
}

inline cplx inner(const SampledFunction& f, const SampledFunction& g) {
    require_same_grid(f, g, "inner");
    std::vector<cplx> terms(f.values.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = f.values[i] * std::conj(g.values[i]);
    return pairwise_sum(terms) * f.grid.cell(f.domain);
}

inline double max_abs(const SampledFunction& f) {
    double m = 0.0;
    for (const auto& z : f.values) m = std::max(m, std::abs(z));
    return m;
}

// ---------------------------------------------------------------------------
// shift: f -> M_eta T_x f, i.e. e^{2 pi i eta.t} f(t - x).
//
// Lattice-commensurate x is a circular index shift (exact); otherwise the
// translation acts as the phase e^{-2 pi i x.eta} on the spectrum.
// ---------------------------------------------------------------------------

namespace detail {

inline bool commensurate(double x, double step, long& out) {
    const double r = x / step;
    const double rr = std::round(r);
    if (std::abs(r - rr) < 1e-9) {
        out = static_cast<long>(rr);
        return true;
    }
    return false;
}

inline long wrap(long k, long n) {
    long m = k % n;
    return m < 0 ? m + n : m;
}

}  // namespace detail

inline SampledFunction shift(const SampledFunction& f, const Vec& x, const Vec& eta) {
    if (f.domain != Domain::time) throw std::invalid_argument("shift: expects a time-domain function");
    const int d = f.grid.dim;
    const int n = f.grid.samples;

    SampledFunction out = f;
    bool translate = false;
    long steps[2] = {0, 0};
    bool exact = true;
    for (int a = 0; a < d; ++a) {
        if (x[a] != 0.0) translate = true;
        if (!detail::commensurate(x[a], f.grid.dt(), steps[a])) exact = false;
    }

    if (translate && exact) {
        SampledFunction shifted(f.grid, Domain::time);
        const std::size_t total = f.grid.size();
        for (std::size_t i = 0; i < total; ++i) {
            const auto ax = f.grid.axes(i);
            const long s0 = detail::wrap(ax[0] - steps[0], n);
            const long s1 = d == 2 ? detail::wrap(ax[1] - steps[1], n) : 0;
            shifted.values[i] = f.values[f.grid.flat(static_cast<int>(s0), static_cast<int>(s1))];
        }
        out = std::move(shifted);
    } else if (translate) {
        SampledFunction hat = fourier(f, FourierDirection::forward);
        for (std::size_t i = 0; i < hat.values.size(); ++i) {
            const Vec e = f.grid.point(Domain::frequency, i);
            hat.values[i] *= std::polar(1.0, -kTwoPi * dot(x, e, d));
        }
        out = fourier(hat, FourierDirection::inverse);
    }

    bool modulate = false;
    for (int a = 0; a < d; ++a)
        if (eta[a] != 0.0) modulate = true;
    if (modulate) {
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            const Vec t = f.grid.point(Domain::time, i);
            out.values[i] *= std::polar(1.0, kTwoPi * dot(eta, t, d));
        }
    }
    return out;
}

inline SampledFunction shift(const SampledFunction& f, double x, double eta) {
    return shift(f, vec1(x), vec1(eta));
}

// ---------------------------------------------------------------------------
// Support diagnostics and deterministic test inputs.
// ---------------------------------------------------------------------------

// Fraction of the squared mass outside the centered box [-r, r)^d.
inline double mass_fraction_outside(const SampledFunction& f, double r) {
    std::vector<double> out_terms, all_terms;
    out_terms.reserve(f.values.size());
    all_terms.reserve(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const Vec p = f.grid.point(f.domain, i);
        const double m = std::norm(f.values[i]);
        all_terms.push_back(m);
        bool outside = false;
        for (int a = 0; a < f.grid.dim; ++a)
            if (std::abs(p[a]) > r) outside = true;
        if (outside) out_terms.push_back(m);
    }
    const double total = pairwise_sum(all_terms);
    if (total == 0.0) return 0.0;
    return pairwise_sum(out_terms) / total;
}

// Band-limited pseudo-random function: independent unit Gaussians on every
// frequency with |eta| <= band, zero elsewhere. Bit-deterministic for a
// fixed seed (explicit Box-Muller over mt19937_64 draws).
inline SampledFunction random_bandlimited(const GridSpec& grid, double band, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    };
    SampledFunction hat(grid, Domain::frequency);
    for (std::size_t i = 0; i < hat.values.size(); ++i) {
        const Vec e = grid.point(Domain::frequency, i);
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const cplx z = std::polar(r, kTwoPi * u2);
        if (norm2(e, grid.dim) <= band) hat.values[i] = z;
    }
    return fourier(hat, FourierDirection::inverse);
}

}  // namespace fiolab
