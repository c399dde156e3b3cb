#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "fiolab/grid.hpp"
#include "fiolab/stft.hpp"
#include "oracles.hpp"

using namespace fiolab;
using Catch::Approx;

namespace {

// chi(t) e^{2 pi i n t} with the standard bump on (0,1).
SampledFunction bump_mode(const GridSpec& g, double n) {
    return sample([n](const Vec& p) { return bump01(p[0]) * std::polar(1.0, kTwoPi * n * p[0]); },
                  g, Domain::time);
}

double coeff_power(const GaborCoefficients& c, double p) {
    std::vector<double> terms(c.matrix.size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::abs(c.matrix[i]), p);
    const double cell = std::pow(c.time_step * c.freq_step, c.grid.dim);
    return std::pow(pairwise_sum(terms) * cell, 1.0 / p);
}

}  // namespace

TEST_CASE("gaussian_window: normalization, separability, self-duality, tail guard", "[stft]") {
    GridSpec g(1, 1024, 8.0);
    Window w = gaussian_window(g);
    REQUIRE(lp_norm(w.base, 2.0) == Approx(1.0).margin(1e-10));

    SECTION("self-dual: the spectrum follows the same Gaussian profile") {
        auto hat = fourier(w.base, FourierDirection::forward);
        const double peak = std::abs(w.base.values[g.samples / 2]);  // profile height at 0
        for (int j = 0; j < g.samples; ++j) {
            const double eta = g.freq_coord(j);
            REQUIRE(std::abs(hat.values[j] - cplx(peak * std::exp(-kPi * eta * eta), 0.0)) < 1e-10);
        }
    }
    SECTION("2-d window is the tensor square of the 1-d one") {
        GridSpec g2(2, 64, 8.0);
        GridSpec g1(1, 64, 8.0);
        Window w2 = gaussian_window(g2);
        Window w1 = gaussian_window(g1);
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j)
                REQUIRE(std::abs(w2.base.values[g2.flat(i, j)] -
                                 w1.base.values[i] * w1.base.values[j]) < 1e-12);
    }
    SECTION("narrow grids are rejected with advice") {
        REQUIRE_THROWS_WITH(gaussian_window(GridSpec(1, 256, 2.0)),
                            Catch::Matchers::ContainsSubstring("larger half width"));
    }
}

TEST_CASE("stft of the Gaussian against the quadrature oracle", "[stft]") {
    GridSpec g(1, 1024, 8.0);
    Window w = gaussian_window(g);
    const double a = 0.5, b = 0.5;
    GaborCoefficients c = stft(w.base, w, a, b);

    // Peak entry V_g g(0,0) = ||g||_2^2 = 1.
    std::size_t s0 = 0, k0 = 0;
    for (std::size_t s = 0; s < c.slots(); ++s)
        if (c.slot_point(s)[0] == 0.0) s0 = s;
    for (std::size_t k = 0; k < c.freqs(); ++k)
        if (c.freq_point(k)[0] == 0.0) k0 = k;
    REQUIRE(std::abs(c.matrix[s0 * c.freqs() + k0] - cplx(1.0, 0.0)) < 1e-8);

    // |V_g g(x,eta)| = exp(-pi (x^2 + eta^2)/2), checked against an
    // independent quadrature of the defining integral at a few lattice nodes.
    auto vg_oracle = [&](double x, double eta) {
        auto integrand = [&](double t) {
            const double amp = std::sqrt(2.0) * std::exp(-kPi * (t * t + (t - x) * (t - x)));
            return std::polar(amp, -kTwoPi * eta * t);
        };
        return oracle::adaptive_simpson(integrand, -8.0, 8.0, 1e-13);
    };
    for (double x : {0.0, 0.5, 1.5}) {
        for (double eta : {0.0, 1.0, 2.5}) {
            std::size_t si = 0, ki = 0;
            for (std::size_t s = 0; s < c.slots(); ++s)
                if (c.slot_point(s)[0] == x) si = s;
            for (std::size_t k = 0; k < c.freqs(); ++k)
                if (c.freq_point(k)[0] == eta) ki = k;
            const double got = std::abs(c.matrix[si * c.freqs() + ki]);
            const double closed = std::exp(-kPi * (x * x + eta * eta) / 2.0);
            REQUIRE(std::abs(got - std::abs(vg_oracle(x, eta))) < 1e-6);
            REQUIRE(std::abs(got - closed) < 1e-6);
        }
    }
}

TEST_CASE("stft covariance and unimodular invariance", "[stft]") {
    GridSpec g(1, 512, 8.0);
    Window w = gaussian_window(g);
    auto f = sample([](const Vec& p) { return cplx(std::exp(-kPi * (p[0] - 0.5) * (p[0] - 0.5)), 0.0); },
                    g, Domain::time);
    const double a = 0.5, b = 0.5;
    GaborCoefficients base = stft(f, w, a, b);

    SECTION("time-frequency shifts translate the magnitude on the lattice") {
        const double y = 2.0 * a, omega = 3.0 * b;
        GaborCoefficients moved = stft(shift(f, y, omega), w, a, b);
        const long st = static_cast<long>(base.lattice.time_indices.size());
        const long sf = static_cast<long>(base.lattice.freq_indices.size());
        for (long s = 0; s < st; ++s) {
            for (long k = 0; k < sf; ++k) {
                const long s_src = (s - 2 + st) % st;  // y = 2 slots
                const long k_src = (k - 3 + sf) % sf;  // omega = 3 lattice steps
                const double lhs = std::abs(moved.matrix[s * sf + k]);
                const double rhs = std::abs(base.matrix[s_src * sf + k_src]);
                REQUIRE(std::abs(lhs - rhs) < 1e-10);
            }
        }
    }
    SECTION("multiplying f by a unimodular constant leaves |V| unchanged") {
        SampledFunction f2 = f;
        for (auto& v : f2.values) v *= std::polar(1.0, 1.234);
        GaborCoefficients c2 = stft(f2, w, a, b);
        for (std::size_t i = 0; i < c2.matrix.size(); ++i)
            REQUIRE(std::abs(std::abs(c2.matrix[i]) - std::abs(base.matrix[i])) < 1e-14);
    }
    SECTION("non-commensurate steps are rejected") {
        REQUIRE_THROWS_AS(stft(f, w, 0.5 * g.dt() * 3.1, 0.5), std::invalid_argument);
    }
}

TEST_CASE("stft lattice Parseval on the standard family", "[stft]") {
    GridSpec g(1, 1024, 8.0);
    Window w = gaussian_window(g);
    const double a = 0.25, b = 0.25;  // a*b = 1/16 <= 1/4

    auto check = [&](const SampledFunction& f) {
        GaborCoefficients c = stft(f, w, a, b);
        std::vector<double> terms(c.matrix.size());
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::norm(c.matrix[i]);
        const double mass = pairwise_sum(terms) * a * b;
        const double want = std::pow(lp_norm(f, 2.0), 2.0);  // ||g||_2 = 1
        REQUIRE(std::abs(mass - want) <= 1e-6 * want);
    };

    check(w.base);
    check(bump_mode(g, 8.0));
    check(bump_mode(g, 12.0));
    check(sample([](const Vec& p) { return cplx(std::exp(-2.0 * kPi * p[0] * p[0]), 0.0); }, g,
                 Domain::time));
}

TEST_CASE("doubling the oversampling moves lattice norms by at most 2 percent", "[stft]") {
    GridSpec g(1, 1024, 8.0);
    Window w = gaussian_window(g);
    auto f = bump_mode(g, 8.0);
    GaborCoefficients coarse = stft(f, w, 0.5, 0.5);
    GaborCoefficients fine = stft(f, w, 0.25, 0.25);
    for (double p : {1.0, 2.0}) {
        const double c0 = coeff_power(coarse, p);
        const double c1 = coeff_power(fine, p);
        REQUIRE(std::abs(c0 - c1) <= 0.02 * std::max(c0, c1));
    }
}

TEST_CASE("istft inverts the analysis map", "[stft]") {
    GridSpec g(1, 2048, 8.0);
    Window w = gaussian_window(g);
    const double a = 0.5, b = 0.5;

    auto roundtrip = [&](const SampledFunction& f) {
        GaborCoefficients c = stft(f, w, a, b);
        SampledFunction back = istft(c, w);
        double err = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            err += std::norm(back.values[i] - f.values[i]);
        return std::sqrt(err * g.dt()) / lp_norm(f, 2.0);
    };

    REQUIRE(roundtrip(w.base) <= 1e-6);
    REQUIRE(roundtrip(bump_mode(g, 16.0)) <= 1e-6);

    SECTION("zero coefficients give the zero function") {
        GaborCoefficients c = stft(w.base, w, a, b);
        for (auto& v : c.matrix) v = cplx{0.0, 0.0};
        SampledFunction z = istft(c, w);
        REQUIRE(max_abs(z) == 0.0);
    }
    SECTION("a singular lattice frame is reported") {
        GridSpec gs(1, 256, 2.0);
        Window spike;
        spike.base = SampledFunction(gs, Domain::time);
        spike.base.values[128] = cplx(1.0 / std::sqrt(gs.dt()), 0.0);  // one-sample window
        GaborCoefficients c = stft(bump_mode(gs, 2.0), spike, 8.0 * gs.dt(), 16.0 * gs.deta());
        REQUIRE(c.time_step * c.freq_step <= 0.5 + 1e-12);
        REQUIRE_THROWS_AS(istft(c, spike), std::runtime_error);
    }
}
