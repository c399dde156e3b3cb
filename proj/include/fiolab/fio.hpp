#pragma once

// Discretized Fourier integral operators
//
//   T f(x) = sum_eta  e^{2 pi i Phi(x,eta)} sigma(x,eta) taper(eta) Ff(eta) deta^d
//
// with real phases Phi positively homogeneous of degree 1 in eta and symbols
// of Hormander type with compact x-support. The quadrature is the plain
// O(N^{2d}) sum over the frequency lattice; when the phase is linear in eta
// with per-axis structure and the symbol factors as sx(x) * se(eta), the sum
// collapses axis by axis, which is what makes the larger experiments cheap.
// Per-point summation order is fixed (ascending row-major eta), so results
// do not depend on how the output points are scheduled.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fiolab/common.hpp"
#include "fiolab/grid.hpp"
#include "fiolab/stft.hpp"

namespace fiolab {

// Per-axis scalar map and its calculus, for phases of the form
// Phi(x, eta) = sum_a phi_a(x_a) eta_a.
struct TensorMap {
    std::function<double(double)> value;
    std::function<double(double)> derivative;  // for gradients / Jacobians
    std::function<double(double)> inverse;     // optional, adjoints only
};

inline TensorMap identity_map() {
    return TensorMap{[](double u) { return u; }, [](double) { return 1.0; },
                     [](double u) { return u; }};
}

struct Phase {
    std::function<double(const Vec&, const Vec&)> eval;
    std::function<Vec(const Vec&, const Vec&)> grad_x;
    std::function<Vec(const Vec&, const Vec&)> grad_eta;
    std::function<Mat2(const Vec&, const Vec&)> mixed_hessian;
    bool homogeneous = false;
    bool linear_in_eta = false;
    std::vector<TensorMap> tensor;  // size == dim iff the phase is tensor-linear
    // Conic validity region; null means everywhere. apply_fio refuses to
    // evaluate outside it wherever the symbol is alive.
    std::function<bool(const Vec&, const Vec&)> cone_contains;
};

// Phi(x,eta) = sum_a phi_a(x_a) eta_a from per-axis maps.
inline Phase tensor_linear_phase(int dim, std::vector<TensorMap> maps) {
    if (static_cast<int>(maps.size()) != dim)
        throw std::invalid_argument("tensor_linear_phase: one map per axis required");
    auto shared = std::make_shared<std::vector<TensorMap>>(std::move(maps));
    Phase p;
    p.eval = [shared, dim](const Vec& x, const Vec& eta) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += (*shared)[a].value(x[a]) * eta[a];
        return s;
    };
    p.grad_x = [shared, dim](const Vec& x, const Vec& eta) {
        Vec g{0.0, 0.0};
        for (int a = 0; a < dim; ++a) g[a] = (*shared)[a].derivative(x[a]) * eta[a];
        return g;
    };
    p.grad_eta = [shared, dim](const Vec& x, const Vec&) {
        Vec g{0.0, 0.0};
        for (int a = 0; a < dim; ++a) g[a] = (*shared)[a].value(x[a]);
        return g;
    };
    p.mixed_hessian = [shared, dim](const Vec& x, const Vec&) {
        Mat2 h{{{0.0, 0.0}, {0.0, 0.0}}};
        for (int a = 0; a < dim; ++a) h[a][a] = (*shared)[a].derivative(x[a]);
        return h;
    };
    p.homogeneous = true;
    p.linear_in_eta = true;
    p.tensor = *shared;
    return p;
}

inline Phase identity_phase(int dim) {
    return tensor_linear_phase(dim, std::vector<TensorMap>(dim, identity_map()));
}

// Phi(x,eta) = phi(x)|eta| in one dimension; positively homogeneous with a
// kink at eta = 0 where the value is 0 by continuity.
inline Phase abs_eta_phase(std::function<double(double)> phi,
                           std::function<double(double)> phi_prime) {
    Phase p;
    p.eval = [phi](const Vec& x, const Vec& eta) { return phi(x[0]) * std::abs(eta[0]); };
    p.grad_x = [phi_prime](const Vec& x, const Vec& eta) {
        return Vec{phi_prime(x[0]) * std::abs(eta[0]), 0.0};
    };
    p.grad_eta = [phi](const Vec& x, const Vec& eta) {
        return Vec{eta[0] >= 0.0 ? phi(x[0]) : -phi(x[0]), 0.0};
    };
    p.mixed_hessian = [phi_prime](const Vec& x, const Vec& eta) {
        Mat2 h{{{0.0, 0.0}, {0.0, 0.0}}};
        h[0][0] = eta[0] >= 0.0 ? phi_prime(x[0]) : -phi_prime(x[0]);
        return h;
    };
    p.homogeneous = true;
    return p;
}

// ---------------------------------------------------------------------------

struct Symbol {
    double order = 0.0;
    std::function<cplx(const Vec&, const Vec&)> eval;
    double x_support_radius = std::numeric_limits<double>::infinity();
    std::optional<std::pair<double, double>> eta_window;  // sigma = 0 unless low <= |eta| <= high
    // Optional factorization sigma(x,eta) = x_factor(x) * eta_factor(eta).
    std::function<cplx(const Vec&)> x_factor;
    std::function<cplx(const Vec&)> eta_factor;

    bool separable() const { return static_cast<bool>(x_factor) && static_cast<bool>(eta_factor); }
};

inline Symbol separable_symbol(double order, std::function<cplx(const Vec&)> x_factor,
                               std::function<cplx(const Vec&)> eta_factor,
                               double x_support_radius,
                               std::optional<std::pair<double, double>> eta_window = {}) {
    Symbol s;
    s.order = order;
    s.x_factor = std::move(x_factor);
    s.eta_factor = std::move(eta_factor);
    s.eval = [xf = s.x_factor, ef = s.eta_factor](const Vec& x, const Vec& eta) {
        return xf(x) * ef(eta);
    };
    s.x_support_radius = x_support_radius;
    s.eta_window = eta_window;
    return s;
}

struct FioOperator {
    Phase phase;
    Symbol symbol;
    GridSpec grid;
    // Smooth radial frequency taper: identically 1 below taper_start * nyquist
    // and exactly 0 from taper_end * nyquist on; guards the quadrature in (1)
    // against wrap-around aliasing.
    double taper_start = 0.7;
    double taper_end = 0.9;
    bool tapered = true;

    double taper(const Vec& eta) const {
        if (!tapered) return 1.0;
        const double r = norm2(eta, grid.dim);
        return smooth_plateau(r, taper_start * grid.nyquist(), taper_end * grid.nyquist());
    }
};

// ---------------------------------------------------------------------------
// apply_fio
// ---------------------------------------------------------------------------

namespace detail {

// exp(2 pi i c eta_j) along the ascending frequency axis by unimodular
// recurrence, re-anchored every block to keep the drift near machine eps.
inline void phase_row(double c, const GridSpec& grid, std::vector<cplx>& out) {
    const int n = grid.samples;
    out.resize(static_cast<std::size_t>(n));
    const cplx step = std::polar(1.0, kTwoPi * c * grid.deta());
    constexpr int kBlock = 1024;
    cplx w{1.0, 0.0};
    for (int j = 0; j < n; ++j) {
        if (j % kBlock == 0) w = std::polar(1.0, kTwoPi * c * grid.freq_coord(j));
        out[static_cast<std::size_t>(j)] = w;
        w *= step;
    }
}

inline SampledFunction apply_fio_fast(const FioOperator& op, const SampledFunction& f) {
    const GridSpec& grid = op.grid;
    const int n = grid.samples;
    SampledFunction hat = fourier(f, FourierDirection::forward);

    // Frequency-only part of every quadrature term.
    std::vector<cplx> m(hat.values.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Vec eta = grid.point(Domain::frequency, i);
        m[i] = op.symbol.eta_factor(eta) * op.taper(eta) * hat.values[i] * grid.cell(Domain::frequency);
    }

    SampledFunction out(grid, Domain::time);
    if (grid.dim == 1) {
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
            const double c = op.phase.tensor[0].value(grid.time_coord(static_cast<int>(k)));
            thread_local std::vector<cplx> row;
            phase_row(c, grid, row);
            cplx acc{0.0, 0.0};
            for (int j = 0; j < n; ++j) acc += row[static_cast<std::size_t>(j)] * m[static_cast<std::size_t>(j)];
            out.values[k] = op.symbol.x_factor(grid.point(Domain::time, k)) * acc;
        });
        return out;
    }

    // d = 2: collapse the inner axis once per distinct second coordinate,
    // then sweep the outer axis. Exact same ascending bracketing as the
    // direct row-major sum.
    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<cplx> bridge(nn * nn);  // bridge[k1 * n + i0]
    parallel_for(nn, [&](std::size_t k1) {
        const double c1 = op.phase.tensor[1].value(grid.time_coord(static_cast<int>(k1)));
        thread_local std::vector<cplx> row;
        phase_row(c1, grid, row);
        for (std::size_t i0 = 0; i0 < nn; ++i0) {
            cplx acc{0.0, 0.0};
            const cplx* mrow = m.data() + i0 * nn;
            for (std::size_t i1 = 0; i1 < nn; ++i1) acc += row[i1] * mrow[i1];
            bridge[k1 * nn + i0] = acc;
        }
    });
    parallel_for(nn, [&](std::size_t k0) {
        const double c0 = op.phase.tensor[0].value(grid.time_coord(static_cast<int>(k0)));
        thread_local std::vector<cplx> row;
        phase_row(c0, grid, row);
        for (std::size_t k1 = 0; k1 < nn; ++k1) {
            cplx acc{0.0, 0.0};
            const cplx* brow = bridge.data() + k1 * nn;
            for (std::size_t i0 = 0; i0 < nn; ++i0) acc += row[i0] * brow[i0];
            const Vec x = grid.point(Domain::time, k0 * nn + k1);
            out.values[k0 * nn + k1] = op.symbol.x_factor(x) * acc;
        }
    });
    return out;
}

inline SampledFunction apply_fio_generic(const FioOperator& op, const SampledFunction& f) {
    const GridSpec& grid = op.grid;
    SampledFunction hat = fourier(f, FourierDirection::forward);
    const std::size_t total = grid.size();

    std::vector<cplx> m(total);
    std::vector<Vec> etas(total);
    for (std::size_t i = 0; i < total; ++i) {
        etas[i] = grid.point(Domain::frequency, i);
        m[i] = op.taper(etas[i]) * hat.values[i] * grid.cell(Domain::frequency);
    }

    SampledFunction out(grid, Domain::time);
    std::vector<char> cone_bad(total, 0);  // written only by the owning point
    parallel_for(total, [&](std::size_t k) {
        const Vec x = grid.point(Domain::time, k);
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < total; ++i) {
            if (m[i] == cplx{0.0, 0.0}) continue;
            const cplx sig = op.symbol.eval(x, etas[i]);
            if (sig == cplx{0.0, 0.0}) continue;
            if (op.phase.cone_contains && !op.phase.cone_contains(x, etas[i])) {
                cone_bad[k] = 1;
                return;
            }
            acc += std::polar(1.0, kTwoPi * op.phase.eval(x, etas[i])) * sig * m[i];
        }
        out.values[k] = acc;
    });
    for (std::size_t k = 0; k < total; ++k) {
        if (cone_bad[k]) {
            const Vec x = grid.point(Domain::time, k);
            throw std::domain_error("apply_fio: phase cone violated at output point x=(" +
                                    std::to_string(x[0]) +
                                    (grid.dim == 2 ? ", " + std::to_string(x[1]) : "") + ")");
        }
    }
    return out;
}

}  // namespace detail

inline SampledFunction apply_fio(const FioOperator& op, const SampledFunction& f) {
    if (!(f.grid == op.grid)) throw std::invalid_argument("apply_fio: grid mismatch");
    if (f.domain != Domain::time) throw std::invalid_argument("apply_fio: expects a time-domain input");
    const bool fast = op.phase.linear_in_eta &&
                      static_cast<int>(op.phase.tensor.size()) == op.grid.dim &&
                      op.symbol.separable();
    return fast ? detail::apply_fio_fast(op, f) : detail::apply_fio_generic(op, f);
}

// ---------------------------------------------------------------------------
// Non-degeneracy: min |det d^2 Phi / dx deta| over sampled cone points.
// ---------------------------------------------------------------------------

struct ConeSamples {
    std::vector<Vec> x_points;
    std::vector<Vec> eta_directions;  // usually |eta| = 1 representatives
};

struct NondegeneracyReport {
    double min_abs_det = 0.0;
    Vec argmin_x{0.0, 0.0};
    Vec argmin_eta{0.0, 0.0};
};

inline NondegeneracyReport check_nondegeneracy(const Phase& phase, const ConeSamples& samples,
                                               int dim) {
    if (samples.x_points.empty() || samples.eta_directions.empty())
        throw std::invalid_argument("check_nondegeneracy: empty sample spec");
    NondegeneracyReport rep;
    rep.min_abs_det = std::numeric_limits<double>::infinity();
    for (const Vec& x : samples.x_points) {
        for (const Vec& e : samples.eta_directions) {
            const Mat2 h = phase.mixed_hessian(x, e);
            const double det = dim == 1 ? h[0][0] : h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if (std::abs(det) < rep.min_abs_det) {
                rep.min_abs_det = std::abs(det);
                rep.argmin_x = x;
                rep.argmin_eta = e;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gabor matrix of the operator against time-frequency shifted windows
// (one-dimensional diagnostic).
// ---------------------------------------------------------------------------

struct GaborProbeLattice {
    std::vector<double> y;        // input time shifts
    std::vector<double> omega;    // input frequency shifts
    std::vector<double> y_out;    // output time shifts
    std::vector<double> omega_out;
};

struct DecayFit {
    double order = 0.0;     // fitted polynomial decay order (positive = decaying)
    double residual = 0.0;  // RMS log residual
    std::size_t used = 0;   // entries entering the regression
};

struct GaborMatrixResult {
    GaborProbeLattice lattice;
    // entries[out_flat * in_count + in_flat], out_flat = iy_out * |omega_out| + iw_out.
    std::vector<cplx> entries;
    std::vector<double> bound_factor;   // <grad_x Phi - omega'> <grad_eta Phi - y> per entry
    std::vector<bool> inside_sigma;     // (y', omega) within the eps/2 neighborhood of supp sigma
    DecayFit decay;

    std::size_t in_count() const { return lattice.y.size() * lattice.omega.size(); }
    std::size_t out_count() const { return lattice.y_out.size() * lattice.omega_out.size(); }
};

namespace detail {

inline double dist_to_symbol_support(const Symbol& sym, double y, double omega, double eta_high) {
    double dx = 0.0;
    if (std::isfinite(sym.x_support_radius)) dx = std::max(0.0, std::abs(y) - sym.x_support_radius);
    double lo = 0.0, hi = eta_high;
    if (sym.eta_window) {
        lo = sym.eta_window->first;
        hi = std::min(hi, sym.eta_window->second);
    }
    double de = 0.0;
    const double ae = std::abs(omega);
    if (ae < lo) de = lo - ae;
    if (ae > hi) de = ae - hi;
    return std::hypot(dx, de);
}

}  // namespace detail

inline GaborMatrixResult gabor_matrix(const FioOperator& op, const Window& g, const Window& gamma,
                                      const GaborProbeLattice& lattice, double eps) {
    if (op.grid.dim != 1)
        throw std::invalid_argument("gabor_matrix: one-dimensional grids only");
    const GridSpec& grid = op.grid;
    for (double y : lattice.y)
        if (std::abs(y) > grid.half_width) throw std::invalid_argument("gabor_matrix: y outside grid");
    for (double y : lattice.y_out)
        if (std::abs(y) > grid.half_width) throw std::invalid_argument("gabor_matrix: y' outside grid");
    for (double w : lattice.omega)
        if (std::abs(w) > grid.nyquist()) throw std::invalid_argument("gabor_matrix: omega outside grid");
    for (double w : lattice.omega_out)
        if (std::abs(w) > grid.nyquist())
            throw std::invalid_argument("gabor_matrix: omega' outside grid");

    GaborMatrixResult res;
    res.lattice = lattice;
    const std::size_t in_count = lattice.y.size() * lattice.omega.size();
    const std::size_t out_count = lattice.y_out.size() * lattice.omega_out.size();
    res.entries.assign(out_count * in_count, cplx{0.0, 0.0});
    res.bound_factor.assign(out_count * in_count, 0.0);
    res.inside_sigma.assign(out_count * in_count, false);

    // Prebuild the shifted analysis windows.
    std::vector<SampledFunction> probes;
    probes.reserve(out_count);
    for (double yo : lattice.y_out)
        for (double wo : lattice.omega_out) probes.push_back(shift(gamma.base, yo, wo));

    for (std::size_t iy = 0; iy < lattice.y.size(); ++iy) {
        for (std::size_t iw = 0; iw < lattice.omega.size(); ++iw) {
            const std::size_t in_flat = iy * lattice.omega.size() + iw;
            SampledFunction atom = shift(g.base, lattice.y[iy], lattice.omega[iw]);
            SampledFunction image = apply_fio(op, atom);
            for (std::size_t o = 0; o < out_count; ++o) {
                const double yo = lattice.y_out[o / lattice.omega_out.size()];
                const double wo = lattice.omega_out[o % lattice.omega_out.size()];
                const cplx e = inner(image, probes[o]);
                res.entries[o * in_count + in_flat] = e;

                const Vec xo = vec1(yo);
                const Vec ei = vec1(lattice.omega[iw]);
                const double gx = op.phase.grad_x(xo, ei)[0];
                const double ge = op.phase.grad_eta(xo, ei)[0];
                res.bound_factor[o * in_count + in_flat] =
                    bracket(gx - wo) * bracket(ge - lattice.y[iy]);
                res.inside_sigma[o * in_count + in_flat] =
                    detail::dist_to_symbol_support(op.symbol, yo, lattice.omega[iw],
                                                   op.taper_end * grid.nyquist()) <= 0.5 * eps;
            }
        }
    }

    // Decay order: regress log|entry| on log(bound factor), keeping entries
    // separated from the peak by at least two lattice steps and above the
    // noise floor. The floor is relative to the peak: beyond ten decades the
    // transform chain only produces roundoff, which would flatten the fit.
    double peak_mag = 0.0;
    for (const cplx& e : res.entries) peak_mag = std::max(peak_mag, std::abs(e));
    const double floor = std::max(1e-14, 1e-10 * peak_mag);
    const double ystep = lattice.y_out.size() > 1 ? lattice.y_out[1] - lattice.y_out[0] : 1.0;
    const double wstep =
        lattice.omega_out.size() > 1 ? lattice.omega_out[1] - lattice.omega_out[0] : 1.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t iy = 0; iy < lattice.y.size(); ++iy)
        for (std::size_t iw = 0; iw < lattice.omega.size(); ++iw)
            for (std::size_t o = 0; o < out_count; ++o) {
                const std::size_t idx = o * in_count + iy * lattice.omega.size() + iw;
                if (!res.inside_sigma[idx]) continue;  // exact zeros, no information
                const double yo = lattice.y_out[o / lattice.omega_out.size()];
                const double wo = lattice.omega_out[o % lattice.omega_out.size()];
                const Vec xo = vec1(yo);
                const Vec ei = vec1(lattice.omega[iw]);
                const double sep_w = std::abs(op.phase.grad_x(xo, ei)[0] - wo) / wstep;
                const double sep_y = std::abs(op.phase.grad_eta(xo, ei)[0] - lattice.y[iy]) / ystep;
                if (std::max(sep_w, sep_y) < 2.0) continue;
                const double mag = std::abs(res.entries[idx]);
                if (mag <= floor) continue;
                pts.emplace_back(std::log(res.bound_factor[idx]), std::log(mag));
            }
    for (auto [lx, ly] : pts) {
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double np = static_cast<double>(pts.size());
    if (np >= 3 && np * sxx - sx * sx > 0) {
        const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
        double rss = 0.0;
        const double icept = (sy - slope * sx) / np;
        for (auto [lx, ly] : pts) rss += (ly - slope * lx - icept) * (ly - slope * lx - icept);
        res.decay.order = -slope;
        res.decay.residual = std::sqrt(rss / np);
        res.decay.used = pts.size();
    }
    return res;
}

// ---------------------------------------------------------------------------
// Adjoint of a change-of-variables operator: for Phi(x,eta) = phi~(x).eta
// with invertible per-axis maps,
//
//   T* h(x) = |J(phi~^{-1}(x))|^{-1} sum_eta e^{2 pi i phi~^{-1}(x).eta}
//             conj(sigma(phi~^{-1}(x), eta)) taper(eta) Fh(eta) deta^d.
//
// Exact duality partner of apply_fio for symbols whose x-part rides along
// the change of variables (in particular sigma = sigma(x) and sigma = 1).
// ---------------------------------------------------------------------------

inline SampledFunction adjoint_apply(const FioOperator& op, const SampledFunction& f) {
    if (!op.phase.linear_in_eta || static_cast<int>(op.phase.tensor.size()) != op.grid.dim)
        throw std::invalid_argument("adjoint_apply: phase must be linear in eta with per-axis maps");
    for (const auto& t : op.phase.tensor)
        if (!t.inverse || !t.derivative)
            throw std::invalid_argument("adjoint_apply: missing inverse/Jacobian closures");

    const int dim = op.grid.dim;
    auto maps = std::make_shared<std::vector<TensorMap>>(op.phase.tensor);

    std::vector<TensorMap> inverse_maps(dim);
    for (int a = 0; a < dim; ++a) {
        const TensorMap& t = (*maps)[a];
        inverse_maps[a] = TensorMap{t.inverse,
                                    [t](double u) { return 1.0 / t.derivative(t.inverse(u)); },
                                    t.value};
    }

    FioOperator adj;
    adj.grid = op.grid;
    adj.taper_start = op.taper_start;
    adj.taper_end = op.taper_end;
    adj.tapered = op.tapered;
    adj.phase = tensor_linear_phase(dim, inverse_maps);

    auto pullback = [maps, dim](const Vec& x) {
        Vec u{0.0, 0.0};
        for (int a = 0; a < dim; ++a) u[a] = (*maps)[a].inverse(x[a]);
        return u;
    };
    auto inv_jacobian = [maps, dim](const Vec& u) {
        double j = 1.0;
        for (int a = 0; a < dim; ++a) j *= (*maps)[a].derivative(u[a]);
        return 1.0 / std::abs(j);
    };

    adj.symbol.order = op.symbol.order;
    adj.symbol.eta_window = op.symbol.eta_window;
    if (op.symbol.separable()) {
        adj.symbol = separable_symbol(
            op.symbol.order,
            [xf = op.symbol.x_factor, pullback, inv_jacobian](const Vec& x) {
                const Vec u = pullback(x);
                return std::conj(xf(u)) * inv_jacobian(u);
            },
            [ef = op.symbol.eta_factor](const Vec& eta) { return std::conj(ef(eta)); },
            std::numeric_limits<double>::infinity(), op.symbol.eta_window);
    } else {
        adj.symbol.eval = [ev = op.symbol.eval, pullback, inv_jacobian](const Vec& x,
                                                                        const Vec& eta) {
            const Vec u = pullback(x);
            return std::conj(ev(u, eta)) * inv_jacobian(u);
        };
    }
    return apply_fio(adj, f);
}

// ---------------------------------------------------------------------------
// sup_x || e^{2 pi i Phi(x, .)} chi ||_{FL^1} over a compact x-sample set,
// with an internal grid-doubling pass to report quadrature stability.
// ---------------------------------------------------------------------------

struct PhaseFl1Report {
    double sup_value = 0.0;
    double convergence_ratio = 0.0;  // |sup_N - sup_2N| / sup_2N
    std::vector<double> per_x;
};

inline PhaseFl1Report phase_fl1_bound(const Phase& phase,
                                      const std::function<double(const Vec&)>& chi,
                                      const std::vector<Vec>& x_samples, const GridSpec& grid) {
    if (x_samples.empty()) throw std::invalid_argument("phase_fl1_bound: empty x-sample set");
    auto sweep = [&](const GridSpec& g) {
        std::vector<double> vals;
        vals.reserve(x_samples.size());
        for (const Vec& x : x_samples) {
            auto h = sample(
                [&](const Vec& eta) {
                    const double c = chi(eta);
                    if (c == 0.0) return cplx{0.0, 0.0};
                    return std::polar(c, kTwoPi * phase.eval(x, eta));
                },
                g, Domain::frequency);
            vals.push_back(lp_norm(fourier(h, FourierDirection::forward), 1.0));
        }
        return vals;
    };

    PhaseFl1Report rep;
    rep.per_x = sweep(grid);
    for (double v : rep.per_x) rep.sup_value = std::max(rep.sup_value, v);

    GridSpec doubled(grid.dim, grid.samples * 2, grid.half_width);
    double sup2 = 0.0;
    for (double v : sweep(doubled)) sup2 = std::max(sup2, v);
    rep.convergence_ratio = sup2 > 0.0 ? std::abs(rep.sup_value - sup2) / sup2 : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Sampled symbol-class certificate: C0 bounds |sigma|/<eta>^m, C1 bounds the
// first eta-differences against <eta>^{m-1}.
// ---------------------------------------------------------------------------

struct SymbolClassReport {
    double c0 = 0.0;
    double c1 = 0.0;
};

inline SymbolClassReport check_symbol_class(const Symbol& sym, const std::vector<Vec>& x_samples,
                                            const std::vector<Vec>& eta_samples, int dim,
                                            double h = 1e-3) {
    SymbolClassReport rep;
    for (const Vec& x : x_samples) {
        for (const Vec& eta : eta_samples) {
            const double br = bracket(eta, dim);
            rep.c0 = std::max(rep.c0, std::abs(sym.eval(x, eta)) / std::pow(br, sym.order));
            for (int a = 0; a < dim; ++a) {
                Vec ep = eta, em = eta;
                ep[a] += h;
                em[a] -= h;
                const double diff = std::abs(sym.eval(x, ep) - sym.eval(x, em)) / (2.0 * h);
                rep.c1 = std::max(rep.c1, diff / std::pow(br, sym.order - 1.0));
            }
        }
    }
    return rep;
}

}  // namespace fiolab
