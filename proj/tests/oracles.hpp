#pragma once

// Independent oracles used by the test suites: adaptive quadrature,
// fixed-order composite quadrature and finite differences. These never call
// into the transform/operator code they are used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Adaptive Simpson on [a, b] with absolute tolerance tol.
template <typename Fn>
cplx simpson_rec(Fn& f, double a, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const cplx flm = f(lm), frm = f(rm);
    const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const cplx delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("adaptive_simpson: recursion limit reached");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename Fn>
cplx adaptive_simpson(Fn f, double a, double b, double tol = 1e-12, int depth = 48) {
    const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Composite Gauss-Legendre (10 point) with a fixed panel count. Used as the
// second, independent route for oscillatory integrals.
template <typename Fn>
cplx gauss_legendre(Fn f, double a, double b, int panels) {
    static const double xs[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                 0.8650633666889845, 0.9739065285171717};
    static const double ws[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                 0.1494513491505806, 0.0666713443086881};
    cplx total{0.0, 0.0};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        const double r = 0.5 * h;
        cplx acc{0.0, 0.0};
        for (int i = 0; i < 5; ++i) acc += ws[i] * (f(c + r * xs[i]) + f(c - r * xs[i]));
        total += acc * r;
    }
    return total;
}

// High-order central second derivative (9-point stencil).
template <typename Fn>
double second_derivative(Fn f, double x, double h) {
    const double c0 = -205.0 / 72.0, c1 = 8.0 / 5.0, c2 = -1.0 / 5.0, c3 = 8.0 / 315.0,
                 c4 = -1.0 / 560.0;
    return (c0 * f(x) + c1 * (f(x + h) + f(x - h)) + c2 * (f(x + 2 * h) + f(x - 2 * h)) +
            c3 * (f(x + 3 * h) + f(x - 3 * h)) + c4 * (f(x + 4 * h) + f(x - 4 * h))) /
           (h * h);
}

}  // namespace oracle
