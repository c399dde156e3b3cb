#pragma once

// Dyadic frequency decomposition and dilation machinery:
//   - the Littlewood-Paley multiplier system psi_0, psi_j = psi(2^{-j} .),
//   - Fourier multipliers,
//   - dilation operators U_lambda f = f(lambda .) with their M^p indices,
//   - dyadically localized operator pieces and the conjugation
//       T^(j) = U_{2^{j/2}} T~^(j) U_{2^{-j/2}},
//     realized across exactly nested grids,
//   - the shell-coupling matrix ||psi_k(D) T^(j) u||_{M^inf}.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fiolab/common.hpp"
#include "fiolab/fio.hpp"
#include "fiolab/grid.hpp"
#include "fiolab/norms.hpp"

namespace fiolab {

// ---------------------------------------------------------------------------
// Littlewood-Paley system. psi0 is the radial smooth plateau (1 on |eta|<=1,
// 0 on |eta|>=2); the shells telescope out of it.
// ---------------------------------------------------------------------------

struct LpSystem {
    int j_max = 0;

    static double psi0_radial(double r) { return smooth_plateau(r, 1.0, 2.0); }
    static double psi_radial(double r) { return psi0_radial(r) - psi0_radial(2.0 * r); }

    double psi0(const Vec& eta, int dim) const { return psi0_radial(norm2(eta, dim)); }
    // j = 0 means psi0 itself; j >= 1 is the shell 2^{j-1} <= |eta| <= 2^{j+1}.
    double psi(int j, const Vec& eta, int dim) const {
        const double r = norm2(eta, dim);
        if (j == 0) return psi0_radial(r);
        return psi_radial(std::ldexp(r, -j));
    }
    double tail(const Vec& eta, int dim) const {
        return 1.0 - psi0_radial(std::ldexp(norm2(eta, dim), -j_max));
    }
};

inline LpSystem lp_system(int j_max, const GridSpec& grid) {
    if (j_max < 1) throw std::invalid_argument("lp_system: j_max must be >= 1");
    // The top shell lives on 2^{j_max-1} <= |eta| <= 2^{j_max+1}; the grid
    // lattice stops at nyquist - deta, so equality is still representable.
    if (std::ldexp(1.0, j_max + 1) > grid.nyquist())
        throw std::invalid_argument("lp_system: 2^(j_max+1) must not exceed the grid nyquist");
    return LpSystem{j_max};
}

// ---------------------------------------------------------------------------
// Fourier multiplier m(D) u = F^{-1}[ m(.) F u ].
// ---------------------------------------------------------------------------

template <typename Fn>
SampledFunction apply_multiplier(const SampledFunction& f, Fn&& multiplier) {
    if (f.domain != Domain::time)
        throw std::invalid_argument("apply_multiplier: expects a time-domain input");
    SampledFunction hat = fourier(f, FourierDirection::forward);
    for (std::size_t i = 0; i < hat.values.size(); ++i)
        hat.values[i] *= multiplier(f.grid.point(Domain::frequency, i));
    return fourier(hat, FourierDirection::inverse);
}

// ---------------------------------------------------------------------------
// Dilation exponents of the modulation spaces.
// ---------------------------------------------------------------------------

struct DilationIndices {
    double p = 2.0;
    double mu1 = -0.5;
    double mu2 = -0.5;
};

inline DilationIndices dilation_indices(double p) {
    if (!(p >= 1.0) && !std::isinf(p))
        throw std::invalid_argument("dilation_indices: p must be >= 1 or infinity");
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double inv_q = 1.0 - inv_p;  // conjugate exponent
    DilationIndices idx;
    idx.p = p;
    idx.mu1 = (inv_p >= 0.5) ? -inv_q : -inv_p;  // 1<=p<=2 : -1/p', else -1/p
    idx.mu2 = (inv_p >= 0.5) ? -inv_p : -inv_q;
    return idx;
}

// ---------------------------------------------------------------------------
// dilate: U_lambda f(x) = f(lambda x), same grid.
//
// Integer lambda contracts by exact index arithmetic; reciprocal-integer
// lambda expands by exact index arithmetic on the spectrum; anything else
// falls back to per-axis trigonometric interpolation. Reads outside the cube
// are zero, and expansions whose support would spill out are rejected.
// ---------------------------------------------------------------------------

namespace detail {

inline bool near_integer(double x, long& out) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12 && r >= 1.0) {
        out = static_cast<long>(r);
        return true;
    }
    return false;
}

// Evaluate the trigonometric interpolant of one axis at the points
// lambda * t_k, zero outside the cube. rows = n^{dim-1} independent lines.
inline void dilate_axis_interp(SampledFunction& f, int axis, double lambda) {
    const GridSpec& g = f.grid;
    const int n = g.samples;
    const std::size_t nn = static_cast<std::size_t>(n);
    const std::size_t stride = (g.dim == 2 && axis == 0) ? nn : 1;
    const std::size_t lines = g.dim == 2 ? nn : 1;
    const std::size_t line_step = (g.dim == 2 && axis == 0) ? 1 : nn;

    std::vector<cplx> line(nn), hat(nn), out(nn);
    for (std::size_t l = 0; l < lines; ++l) {
        cplx* base = f.values.data() + l * line_step;
        for (std::size_t k = 0; k < nn; ++k) line[k] = base[k * stride];
        // 1-d forward transform of the line (checkerboard + fft + weight).
        hat = line;
        for (std::size_t k = 1; k < nn; k += 2) hat[k] = -hat[k];
        fft_pow2(std::span<cplx>(hat), -1);
        for (std::size_t k = 1; k < nn; k += 2) hat[k] = -hat[k];
        for (auto& z : hat) z *= g.dt();
        for (std::size_t k = 0; k < nn; ++k) {
            const double target = lambda * g.time_coord(static_cast<int>(k));
            if (std::abs(target) >= g.half_width) {
                out[k] = cplx{0.0, 0.0};
                continue;
            }
            thread_local std::vector<cplx> row;
            phase_row(target, g, row);
            cplx acc{0.0, 0.0};
            for (std::size_t j = 0; j < nn; ++j) acc += row[j] * hat[j];
            out[k] = acc * g.deta();
        }
        for (std::size_t k = 0; k < nn; ++k) base[k * stride] = out[k];
    }
}

}  // namespace detail

inline SampledFunction dilate(const SampledFunction& f, double lambda) {
    if (f.domain != Domain::time) throw std::invalid_argument("dilate: expects a time-domain input");
    if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
    const GridSpec& g = f.grid;
    const int n = g.samples;
    if (lambda == 1.0) return f;

    if (lambda < 1.0) {
        // Expansion: the support grows by 1/lambda; demand it fits.
        if (mass_fraction_outside(f, lambda * g.half_width) > 1e-8)
            throw std::invalid_argument(
                "dilate: dilated support exceeds the cube with mass > 1e-8");
    }

    long q = 0;
    if (detail::near_integer(lambda, q)) {
        // f(lambda t): exact index read with zero fill.
        SampledFunction out(g, Domain::time);
        const std::size_t total = g.size();
        for (std::size_t i = 0; i < total; ++i) {
            const auto ax = g.axes(i);
            long src[2] = {0, 0};
            bool ok = true;
            for (int a = 0; a < g.dim; ++a) {
                src[a] = q * ax[a] - (q - 1) * (n / 2);
                if (src[a] < 0 || src[a] >= n) ok = false;
            }
            out.values[i] = ok ? f.values[g.flat(static_cast<int>(src[0]), static_cast<int>(src[1]))]
                               : cplx{0.0, 0.0};
        }
        return out;
    }
    if (detail::near_integer(1.0 / lambda, q)) {
        // (U_{1/q} f)^(eta) = q^d Ff(q eta): exact index read on the spectrum.
        SampledFunction hat = fourier(f, FourierDirection::forward);
        SampledFunction squeezed(g, Domain::frequency);
        const double gain = std::pow(static_cast<double>(q), g.dim);
        const std::size_t total = g.size();
        for (std::size_t i = 0; i < total; ++i) {
            const auto ax = g.axes(i);
            long src[2] = {0, 0};
            bool ok = true;
            for (int a = 0; a < g.dim; ++a) {
                src[a] = q * (ax[a] - n / 2) + n / 2;
                if (src[a] < 0 || src[a] >= n) ok = false;
            }
            squeezed.values[i] =
                ok ? gain * hat.values[g.flat(static_cast<int>(src[0]), static_cast<int>(src[1]))]
                   : cplx{0.0, 0.0};
        }
        return fourier(squeezed, FourierDirection::inverse);
    }

    SampledFunction out = f;
    for (int axis = 0; axis < g.dim; ++axis) detail::dilate_axis_interp(out, axis, lambda);
    return out;
}

// ---------------------------------------------------------------------------
// Dyadic operator pieces and the dilation conjugation.
// ---------------------------------------------------------------------------

// T^(j): same phase, symbol sigma(x,eta) psi_j(eta).
inline FioOperator dyadic_piece(const FioOperator& op, int j, const LpSystem& lp) {
    if (!op.symbol.eta_window || op.symbol.eta_window->first < 2.0)
        throw std::invalid_argument(
            "dyadic_piece: operator symbol must declare vanishing for |eta| <= 2");
    if (j > lp.j_max) throw std::invalid_argument("dyadic_piece: shell index beyond the system");
    FioOperator piece = op;
    const int dim = op.grid.dim;
    if (op.symbol.separable()) {
        piece.symbol = separable_symbol(
            op.symbol.order, op.symbol.x_factor,
            [ef = op.symbol.eta_factor, lp, j, dim](const Vec& eta) {
                return ef(eta) * lp.psi(j, eta, dim);
            },
            op.symbol.x_support_radius, op.symbol.eta_window);
    } else {
        piece.symbol.eval = [ev = op.symbol.eval, lp, j, dim](const Vec& x, const Vec& eta) {
            return ev(x, eta) * lp.psi(j, eta, dim);
        };
    }
    // Shell support bookkeeping.
    const double lo = std::max(op.symbol.eta_window->first, j >= 1 ? std::ldexp(1.0, j - 1) : 0.0);
    const double hi = std::min(op.symbol.eta_window->second,
                               j >= 1 ? std::ldexp(1.0, j + 1) : 2.0);
    piece.symbol.eta_window = std::make_pair(lo, hi);
    return piece;
}

// The grid on which the conjugated piece lives: same N, half width scaled by
// 2^{j/2}, so its lattice is exactly 2^{j/2} times the base lattice.
inline GridSpec conjugate_grid(const GridSpec& base, int j) {
    return GridSpec(base.dim, base.samples, base.half_width * std::pow(2.0, 0.5 * j));
}

// Reinterpret values on an exactly nested grid (same N, scaled half width):
// this IS the dilation U_{L'/L} realized without interpolation.
inline SampledFunction relabel(const SampledFunction& f, const GridSpec& target) {
    if (target.dim != f.grid.dim || target.samples != f.grid.samples)
        throw std::invalid_argument("relabel: grids must share dimension and sample count");
    SampledFunction out = f;
    out.grid = target;
    return out;
}

// T~^(j) on the conjugate grid: phase 2^{j/2} Phi(2^{-j/2} x, eta) and symbol
// sigma_j(2^{-j/2} x, 2^{j/2} eta).
inline FioOperator conjugated_operator(const FioOperator& piece, int j) {
    const double lam = std::pow(2.0, 0.5 * j);
    FioOperator conj_op;
    conj_op.grid = conjugate_grid(piece.grid, j);
    conj_op.taper_start = piece.taper_start;
    conj_op.taper_end = piece.taper_end;
    conj_op.tapered = piece.tapered;

    if (piece.phase.linear_in_eta &&
        static_cast<int>(piece.phase.tensor.size()) == piece.grid.dim) {
        std::vector<TensorMap> maps;
        for (const TensorMap& t : piece.phase.tensor) {
            maps.push_back(TensorMap{
                [t, lam](double u) { return lam * t.value(u / lam); },
                [t, lam](double u) { return t.derivative(u / lam); },
                t.inverse ? std::function<double(double)>(
                                [t, lam](double u) { return lam * t.inverse(u / lam); })
                          : std::function<double(double)>()});
        }
        conj_op.phase = tensor_linear_phase(piece.grid.dim, std::move(maps));
    } else {
        const Phase& p = piece.phase;
        const int dim = piece.grid.dim;
        conj_op.phase = p;
        conj_op.phase.eval = [p, lam, dim](const Vec& x, const Vec& eta) {
            Vec xs{0.0, 0.0};
            for (int a = 0; a < dim; ++a) xs[a] = x[a] / lam;
            return lam * p.eval(xs, eta);
        };
        conj_op.phase.tensor.clear();
    }

    const int dim = piece.grid.dim;
    if (piece.symbol.separable()) {
        conj_op.symbol = separable_symbol(
            piece.symbol.order,
            [xf = piece.symbol.x_factor, lam, dim](const Vec& x) {
                Vec xs{0.0, 0.0};
                for (int a = 0; a < dim; ++a) xs[a] = x[a] / lam;
                return xf(xs);
            },
            [ef = piece.symbol.eta_factor, lam, dim](const Vec& eta) {
                Vec es{0.0, 0.0};
                for (int a = 0; a < dim; ++a) es[a] = eta[a] * lam;
                return ef(es);
            },
            piece.symbol.x_support_radius * lam);
    } else {
        conj_op.symbol.order = piece.symbol.order;
        conj_op.symbol.eval = [ev = piece.symbol.eval, lam, dim](const Vec& x, const Vec& eta) {
            Vec xs{0.0, 0.0}, es{0.0, 0.0};
            for (int a = 0; a < dim; ++a) {
                xs[a] = x[a] / lam;
                es[a] = eta[a] * lam;
            }
            return ev(xs, es);
        };
        conj_op.symbol.x_support_radius = piece.symbol.x_support_radius * lam;
    }
    if (piece.symbol.eta_window)
        conj_op.symbol.eta_window = std::make_pair(piece.symbol.eta_window->first / lam,
                                                   piece.symbol.eta_window->second / lam);
    return conj_op;
}

// || T^(j) u  -  U_{2^{j/2}} T~^(j) U_{2^{-j/2}} u ||_L2  /  ||u||_L2.
inline double conjugation_residual(const FioOperator& op, int j, const SampledFunction& u,
                                   const LpSystem& lp) {
    FioOperator piece = dyadic_piece(op, j, lp);
    SampledFunction lhs = apply_fio(piece, u);

    FioOperator tilde = conjugated_operator(piece, j);
    SampledFunction u2 = relabel(u, tilde.grid);
    SampledFunction mid = apply_fio(tilde, u2);
    SampledFunction rhs = relabel(mid, op.grid);

    std::vector<double> diff(lhs.values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::norm(lhs.values[i] - rhs.values[i]);
    const double err = std::sqrt(pairwise_sum(diff) * op.grid.cell(Domain::time));
    return err / lp_norm(u, 2.0);
}

// ---------------------------------------------------------------------------
// Shell-coupling matrix: rows k (output shells), columns j (operator pieces).
// Entries are the M^inf size of psi_k(D) T^(j) u via the STFT-lattice sup.
// ---------------------------------------------------------------------------

struct OrthogonalityMatrix {
    int k_max = 0;
    int j_max = 0;
    std::vector<double> entries;  // entries[k * j_max + (j-1)], j = 1..j_max
    int band_width = 0;           // largest |k-j| carrying > 1e-3 of a row max

    double at(int k, int j) const { return entries[static_cast<std::size_t>(k) * j_max + (j - 1)]; }
};

// Rows whose maximum stays below row_floor times the global maximum carry
// only smoothing-remainder tails (no shell actually couples there); they are
// reported in the matrix but excluded from the band-width measurement.
inline OrthogonalityMatrix almost_orthogonality(const FioOperator& op, const SampledFunction& u,
                                                int k_max, const LpSystem& lp,
                                                const MpOptions& mp_opt = {},
                                                double row_floor = 1e-2) {
    OrthogonalityMatrix res;
    res.k_max = k_max;
    res.j_max = lp.j_max;
    res.entries.assign(static_cast<std::size_t>(k_max + 1) * lp.j_max, 0.0);
    const int dim = op.grid.dim;

    for (int j = 1; j <= lp.j_max; ++j) {
        SampledFunction vj = apply_fio(dyadic_piece(op, j, lp), u);
        for (int k = 0; k <= k_max; ++k) {
            SampledFunction w =
                apply_multiplier(vj, [&](const Vec& eta) { return lp.psi(k, eta, dim); });
            res.entries[static_cast<std::size_t>(k) * lp.j_max + (j - 1)] =
                mp_norm(w, std::numeric_limits<double>::infinity(), 0.0, NormMethod::stft, mp_opt)
                    .value;
        }
    }

    double global = 0.0;
    for (double e : res.entries) global = std::max(global, e);
    for (int k = 0; k <= k_max; ++k) {
        double row_max = 0.0;
        for (int j = 1; j <= lp.j_max; ++j) row_max = std::max(row_max, res.at(k, j));
        if (row_max < row_floor * global) continue;
        for (int j = 1; j <= lp.j_max; ++j)
            if (res.at(k, j) > 1e-3 * row_max)
                res.band_width = std::max(res.band_width, std::abs(k - j));
    }
    return res;
}

}  // namespace fiolab
