#pragma once

// Short-time Fourier transform on a separable time-frequency lattice,
// window constructors, and lattice-frame inversion.
//
//   V_g f(x, eta) = <f, M_eta T_x g> = F[f . conj(T_x g)](eta)
//
// computed per time slot with the grid transform, then subsampled on the
// frequency sublattice. Inversion applies the synthesis sum and corrects by
// the (diagonal-dominant) lattice frame operator via conjugate gradients.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fiolab/common.hpp"
#include "fiolab/grid.hpp"

namespace fiolab {

struct Window {
    SampledFunction base;  // time domain, usually unit L2 norm
    bool l2_normalized = false;
    std::optional<double> support_radius;  // per-axis box radius when compactly supported
};

// Default window: the L2-normalized Gaussian 2^{d/4} exp(-pi |t|^2).
// The grid must be wide enough that the boundary value is below tail_tol,
// otherwise periodization would contaminate every coefficient.
inline Window gaussian_window(const GridSpec& grid, double tail_tol = 1e-12) {
    const double boundary =
        std::pow(2.0, grid.dim / 4.0) * std::exp(-kPi * grid.half_width * grid.half_width);
    if (boundary >= tail_tol) {
        throw std::invalid_argument(
            "gaussian_window: boundary value " + std::to_string(boundary) +
            " exceeds the tail tolerance; use a larger half width L");
    }
    auto g = sample(
        [&](const Vec& p) {
            return cplx(std::pow(2.0, grid.dim / 4.0) * std::exp(-kPi * dot(p, p, grid.dim)), 0.0);
        },
        grid, Domain::time);
    const double n2 = lp_norm(g, 2.0);
    for (auto& v : g.values) v /= n2;
    return Window{std::move(g), true, std::nullopt};
}

// Compactly supported smooth window: tensor product of 1-d bumps on
// (-radius, radius) per axis, exactly zero outside, unit L2 norm.
inline Window bump_window(const GridSpec& grid, double radius) {
    if (!(radius > 0.0) || radius >= grid.half_width)
        throw std::invalid_argument("bump_window: radius must be in (0, L)");
    auto g = sample(
        [&](const Vec& p) {
            double v = 1.0;
            for (int a = 0; a < grid.dim; ++a) v *= bump01(0.5 * (p[a] / radius + 1.0));
            return cplx(v, 0.0);
        },
        grid, Domain::time);
    const double n2 = lp_norm(g, 2.0);
    if (n2 == 0.0) throw std::invalid_argument("bump_window: radius below grid resolution");
    for (auto& v : g.values) v /= n2;
    return Window{std::move(g), true, radius};
}

// Window whose spectrum is a compactly supported bump of the given per-axis
// radius (so the time profile fills the grid). Unit L2 norm.
inline Window band_window(const GridSpec& grid, double radius) {
    if (!(radius > 0.0) || radius >= grid.nyquist())
        throw std::invalid_argument("band_window: radius must be in (0, nyquist)");
    auto hat = sample(
        [&](const Vec& p) {
            double v = 1.0;
            for (int a = 0; a < grid.dim; ++a) v *= bump01(0.5 * (p[a] / radius + 1.0));
            return cplx(v, 0.0);
        },
        grid, Domain::frequency);
    auto g = fourier(hat, FourierDirection::inverse);
    const double n2 = lp_norm(g, 2.0);
    for (auto& v : g.values) v /= n2;
    return Window{std::move(g), true, std::nullopt};
}

// ---------------------------------------------------------------------------
// Lattice geometry. Offsets are identical per axis; in two dimensions the
// slot/frequency sets are the cartesian products, row-major.
// ---------------------------------------------------------------------------

struct GaborLattice {
    long time_stride = 1;  // a = time_stride * dt
    long freq_stride = 1;  // b = freq_stride * deta
    std::vector<int> time_indices;  // per-axis lattice indices into [0, N)
    std::vector<int> freq_indices;
};

namespace detail {

inline long commensurate_stride(double step, double spacing, const char* what) {
    const double r = step / spacing;
    const double rr = std::round(r);
    if (!(rr >= 1.0) || std::abs(r - rr) > 1e-9 * std::max(1.0, rr))
        throw std::invalid_argument(std::string(what) +
                                    ": step must be a positive integer multiple of the grid spacing");
    return static_cast<long>(rr);
}

inline GaborLattice make_lattice(const GridSpec& grid, double a, double b) {
    GaborLattice lat;
    lat.time_stride = commensurate_stride(a, grid.dt(), "stft time step");
    lat.freq_stride = commensurate_stride(b, grid.deta(), "stft freq step");
    const int half = grid.samples / 2;
    // All multiples of the step whose lattice point lies inside the cube.
    for (long m = -(half / lat.time_stride); m * lat.time_stride < half; ++m) {
        const long idx = m * lat.time_stride + half;
        if (idx >= 0 && idx < grid.samples) lat.time_indices.push_back(static_cast<int>(idx));
    }
    for (long m = -(half / lat.freq_stride); m * lat.freq_stride < half; ++m) {
        const long idx = m * lat.freq_stride + half;
        if (idx >= 0 && idx < grid.samples) lat.freq_indices.push_back(static_cast<int>(idx));
    }
    return lat;
}

}  // namespace detail

struct GaborCoefficients {
    GridSpec grid;
    double time_step = 0.0;  // a
    double freq_step = 0.0;  // b
    GaborLattice lattice;
    std::vector<cplx> matrix;  // [slot (d-fold row-major)][freq (d-fold row-major)]

    std::size_t slots() const {
        const std::size_t s = lattice.time_indices.size();
        return grid.dim == 1 ? s : s * s;
    }
    std::size_t freqs() const {
        const std::size_t s = lattice.freq_indices.size();
        return grid.dim == 1 ? s : s * s;
    }
    // Physical coordinates of a flat slot / frequency index.
    Vec slot_point(std::size_t s) const {
        const std::size_t n = lattice.time_indices.size();
        Vec p{0.0, 0.0};
        if (grid.dim == 1) {
            p[0] = grid.time_coord(lattice.time_indices[s]);
        } else {
            p[0] = grid.time_coord(lattice.time_indices[s / n]);
            p[1] = grid.time_coord(lattice.time_indices[s % n]);
        }
        return p;
    }
    Vec freq_point(std::size_t k) const {
        const std::size_t n = lattice.freq_indices.size();
        Vec p{0.0, 0.0};
        if (grid.dim == 1) {
            p[0] = grid.freq_coord(lattice.freq_indices[k]);
        } else {
            p[0] = grid.freq_coord(lattice.freq_indices[k / n]);
            p[1] = grid.freq_coord(lattice.freq_indices[k % n]);
        }
        return p;
    }
};

// ---------------------------------------------------------------------------
// Analysis.
// ---------------------------------------------------------------------------

inline GaborCoefficients stft(const SampledFunction& f, const Window& g, double a, double b) {
    if (f.domain != Domain::time) throw std::invalid_argument("stft: expects a time-domain input");
    require_same_grid(f, g.base, "stft");
    const GridSpec& grid = f.grid;
    GaborCoefficients c;
    c.grid = grid;
    c.time_step = a;
    c.freq_step = b;
    c.lattice = detail::make_lattice(grid, a, b);

    const std::size_t slot_count = c.slots();
    const std::size_t freq_count = c.freqs();
    c.matrix.assign(slot_count * freq_count, cplx{0.0, 0.0});

    const int n = grid.samples;
    const std::size_t st = c.lattice.time_indices.size();
    const int half = n / 2;

    parallel_for(slot_count, [&](std::size_t s) {
        // Per-axis circular shift amounts for T_x g at this slot.
        int shift0 = c.lattice.time_indices[grid.dim == 1 ? s : s / st] - half;
        int shift1 = grid.dim == 2 ? c.lattice.time_indices[s % st] - half : 0;

        SampledFunction h(grid, Domain::time);
        const std::size_t total = grid.size();
        for (std::size_t i = 0; i < total; ++i) {
            const auto ax = grid.axes(i);
            const long k0 = detail::wrap(ax[0] - shift0, n);
            const long k1 = grid.dim == 2 ? detail::wrap(ax[1] - shift1, n) : 0;
            h.values[i] =
                f.values[i] * std::conj(g.base.values[grid.flat(static_cast<int>(k0),
                                                                static_cast<int>(k1))]);
        }
        SampledFunction hat = fourier(h, FourierDirection::forward);

        const std::size_t sf = c.lattice.freq_indices.size();
        for (std::size_t k = 0; k < freq_count; ++k) {
            const int f0 = c.lattice.freq_indices[grid.dim == 1 ? k : k / sf];
            const int f1 = grid.dim == 2 ? c.lattice.freq_indices[k % sf] : 0;
            c.matrix[s * freq_count + k] = hat.values[grid.flat(f0, f1)];
        }
    });
    return c;
}

// ---------------------------------------------------------------------------
// Synthesis and frame-corrected inversion.
// ---------------------------------------------------------------------------

namespace detail {

// sum over the lattice of V(x,eta) M_eta T_x g * a^d b^d
inline SampledFunction gabor_synthesis(const GaborCoefficients& c, const Window& g) {
    const GridSpec& grid = c.grid;
    const int n = grid.samples;
    const int half = n / 2;
    const std::size_t st = c.lattice.time_indices.size();
    const std::size_t sf = c.lattice.freq_indices.size();
    const std::size_t freq_count = c.freqs();
    const double subsample_gain = std::pow(static_cast<double>(c.lattice.freq_stride), grid.dim);
    const double slot_weight = std::pow(c.time_step, grid.dim);

    SampledFunction acc(grid, Domain::time);
    const std::size_t slot_count = c.slots();
    for (std::size_t s = 0; s < slot_count; ++s) {
        SampledFunction spread(grid, Domain::frequency);
        for (std::size_t k = 0; k < freq_count; ++k) {
            const int f0 = c.lattice.freq_indices[grid.dim == 1 ? k : k / sf];
            const int f1 = grid.dim == 2 ? c.lattice.freq_indices[k % sf] : 0;
            spread.values[grid.flat(f0, f1)] = c.matrix[s * freq_count + k];
        }
        SampledFunction wave = fourier(spread, FourierDirection::inverse);

        const int shift0 = c.lattice.time_indices[grid.dim == 1 ? s : s / st] - half;
        const int shift1 = grid.dim == 2 ? c.lattice.time_indices[s % st] - half : 0;
        const std::size_t total = grid.size();
        for (std::size_t i = 0; i < total; ++i) {
            const auto ax = grid.axes(i);
            const long k0 = wrap(ax[0] - shift0, n);
            const long k1 = grid.dim == 2 ? wrap(ax[1] - shift1, n) : 0;
            acc.values[i] += wave.values[i] * subsample_gain * slot_weight *
                             g.base.values[grid.flat(static_cast<int>(k0), static_cast<int>(k1))];
        }
    }
    return acc;
}

inline SampledFunction frame_apply(const SampledFunction& u, const Window& g, double a, double b) {
    return gabor_synthesis(stft(u, g, a, b), g);
}

}  // namespace detail

// Inverse STFT. Synthesizes the lattice sum and removes the frame-operator
// bias with conjugate gradients; errors out when the lattice frame is
// numerically singular (estimated condition number above 1e8).
inline SampledFunction istft(const GaborCoefficients& c, const Window& g) {
    const GridSpec& grid = c.grid;
    const double density = c.time_step * c.freq_step;
    if (density > 0.5 + 1e-12)
        throw std::invalid_argument("istft: lattice too sparse, needs a*b <= 1/2");

    SampledFunction rhs = detail::gabor_synthesis(c, g);
    const double rhs_norm = lp_norm(rhs, 2.0);
    if (rhs_norm == 0.0) return rhs;  // zero coefficients reconstruct zero

    auto apply_s = [&](const SampledFunction& u) { return detail::frame_apply(u, g, c.time_step, c.freq_step); };

    // Condition estimate: power iteration for the top of the spectrum, then
    // a shifted power iteration for the bottom.
    SampledFunction probe(grid, Domain::time);
    for (std::size_t i = 0; i < probe.values.size(); ++i)
        probe.values[i] = cplx(1.0 + 0.25 * std::sin(0.7 * static_cast<double>(i)), 0.0);
    double lambda_max = 0.0;
    for (int it = 0; it < 20; ++it) {
        SampledFunction next = apply_s(probe);
        lambda_max = lp_norm(next, 2.0) / lp_norm(probe, 2.0);
        probe = std::move(next);
        const double nn = lp_norm(probe, 2.0);
        for (auto& v : probe.values) v /= nn;
    }
    SampledFunction probe2(grid, Domain::time);
    for (std::size_t i = 0; i < probe2.values.size(); ++i)
        probe2.values[i] = cplx(std::cos(0.3 * static_cast<double>(i)), 0.1);
    double mu_max = 0.0;
    for (int it = 0; it < 20; ++it) {
        SampledFunction su = apply_s(probe2);
        SampledFunction next = probe2;
        for (std::size_t i = 0; i < next.values.size(); ++i)
            next.values[i] = lambda_max * probe2.values[i] - su.values[i];
        mu_max = lp_norm(next, 2.0) / lp_norm(probe2, 2.0);
        probe2 = std::move(next);
        const double nn = lp_norm(probe2, 2.0);
        for (auto& v : probe2.values) v /= nn;
    }
    const double lambda_min = lambda_max - mu_max;
    if (!(lambda_min > 0.0) || lambda_max / lambda_min > 1e8)
        throw std::runtime_error("istft: frame operator numerically singular on this lattice");

    // CG on S w = rhs.
    SampledFunction w(grid, Domain::time);
    SampledFunction r = rhs;
    SampledFunction p = r;
    double rho = inner(r, r).real();
    const double target = 1e-24 * rho;
    for (int it = 0; it < 200 && rho > target; ++it) {
        SampledFunction sp = apply_s(p);
        const double denom = inner(sp, p).real();
        if (!(denom > 0.0)) break;
        const double alpha = rho / denom;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            w.values[i] += alpha * p.values[i];
            r.values[i] -= alpha * sp.values[i];
        }
        const double rho_next = inner(r, r).real();
        const double beta = rho_next / rho;
        for (std::size_t i = 0; i < p.values.size(); ++i)
            p.values[i] = r.values[i] + beta * p.values[i];
        rho = rho_next;
    }
    return w;
}

}  // namespace fiolab
