#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "fiolab/decomp.hpp"
#include "fiolab/sharpness.hpp"

using namespace fiolab;
using Catch::Approx;

namespace {

// Wave packet with spectrum on a bump around `center` of half-width `width`.
SampledFunction packet(const GridSpec& g, double center, double width) {
    SampledFunction hat(g, Domain::frequency);
    for (int i = 0; i < g.samples; ++i) {
        const double eta = g.freq_coord(i);
        hat.values[i] = bump01(0.5 * ((eta - center) / width + 1.0));
    }
    return fourier(hat, FourierDirection::inverse);
}

// Default test operator: composition phase, symbol vanishing for |eta| <= 2
// with order -1/2 at infinity.
FioOperator shell_op(const GridSpec& g, const Diffeo& dif) {
    FioOperator op;
    op.grid = g;
    op.phase = tensor_linear_phase(1, {diffeo_map(dif)});
    op.symbol = separable_symbol(
        -0.5, [](const Vec& x) { return cplx(experiment_cutoff(x[0]), 0.0); },
        [](const Vec& e) {
            const double r = std::abs(e[0]);
            return cplx(smooth_step((r - 2.0) / 2.0) * std::pow(1.0 + r * r, -0.25), 0.0);
        },
        2.0, std::make_pair(2.0, 1e18));
    return op;
}

double rel_l2_diff(const SampledFunction& a, const SampledFunction& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += std::norm(a.values[i] - b.values[i]);
        den += std::norm(b.values[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("littlewood-paley system: partition, supports, self-similarity", "[decomp]") {
    GridSpec g(1, 4096, 2.0);
    LpSystem lp = lp_system(8, g);

    SECTION("psi0 + shells + tail sum to one on the whole grid") {
        double worst = 0.0;
        for (int i = 0; i < g.samples; ++i) {
            const Vec eta = g.point(Domain::frequency, i);
            double total = lp.tail(eta, 1);
            for (int j = 0; j <= lp.j_max; ++j) total += lp.psi(j, eta, 1);
            worst = std::max(worst, std::abs(total - 1.0));
        }
        REQUIRE(worst <= 1e-12);
    }
    SECTION("shell supports are exact") {
        REQUIRE(lp.psi(3, vec1(3.0), 1) == 0.0);   // below 2^2
        REQUIRE(lp.psi(3, vec1(17.0), 1) == 0.0);  // above 2^4
        REQUIRE(lp.psi(3, vec1(6.0), 1) > 0.0);
        for (int j = 1; j <= 6; ++j) {
            for (int i = 0; i < g.samples; i += 7) {
                const double r = std::abs(g.freq_coord(i));
                if (lp.psi(j, g.point(Domain::frequency, i), 1) != 0.0) {
                    REQUIRE(r >= std::ldexp(1.0, j - 1));
                    REQUIRE(r <= std::ldexp(1.0, j + 1));
                }
            }
        }
    }
    SECTION("dyadic self-similarity at the shell centers") {
        for (int j = 1; j <= 8; ++j)
            REQUIRE(lp.psi(j, vec1(std::ldexp(1.0, j)), 1) == LpSystem::psi_radial(1.0));
        REQUIRE(LpSystem::psi_radial(1.0) == 1.0);
    }
    SECTION("systems that do not fit the grid are rejected") {
        REQUIRE_THROWS_AS(lp_system(9, g), std::invalid_argument);
    }
}

TEST_CASE("apply_multiplier: annihilation, partition reassembly, L1 uniformity", "[decomp]") {
    GridSpec g(1, 1024, 0.5);
    LpSystem lp{4};

    SECTION("psi0 kills a pure mode at frequency 5") {
        auto f = sample([](const Vec& p) { return std::polar(1.0, kTwoPi * 5.0 * p[0]); }, g,
                        Domain::time);
        auto out = apply_multiplier(f, [&](const Vec& e) { return lp.psi0(e, 1); });
        REQUIRE(max_abs(out) <= 1e-12);
    }
    SECTION("the dyadic pieces reassemble the function") {
        GridSpec gg(1, 2048, 2.0);
        LpSystem lps = lp_system(7, gg);
        auto f = random_bandlimited(gg, 100.0, 17);
        SampledFunction sum(gg, Domain::time);
        for (int j = 0; j <= lps.j_max; ++j) {
            auto piece = apply_multiplier(f, [&](const Vec& e) { return lps.psi(j, e, 1); });
            for (std::size_t i = 0; i < sum.values.size(); ++i)
                sum.values[i] += piece.values[i];
        }
        const double scale = max_abs(f);
        for (std::size_t i = 0; i < sum.values.size(); ++i)
            REQUIRE(std::abs(sum.values[i] - f.values[i]) <= 1e-12 * scale);
    }
    SECTION("dilated shell multipliers have j-independent L1 mass") {
        // Truncation to the cube is the limiting error; the wide grid keeps
        // it below the 1e-6 contract.
        GridSpec wide(1, 262144, 16.0);
        double base = 0.0;
        for (int j = 1; j <= 3; ++j) {
            SampledFunction hat(wide, Domain::frequency);
            for (int i = 0; i < wide.samples; ++i)
                hat.values[i] =
                    LpSystem::psi_radial(std::ldexp(std::abs(wide.freq_coord(i)), -j));
            const double l1 = lp_norm(fourier(hat, FourierDirection::inverse), 1.0);
            if (j == 1)
                base = l1;
            else
                REQUIRE(std::abs(l1 - base) <= 1e-6 * base);
        }
    }
}

TEST_CASE("dilation indices match the exponent table", "[decomp]") {
    const double inf = std::numeric_limits<double>::infinity();
    REQUIRE(dilation_indices(2.0).mu1 == Approx(-0.5));
    REQUIRE(dilation_indices(2.0).mu2 == Approx(-0.5));
    REQUIRE(dilation_indices(1.0).mu1 == Approx(0.0));
    REQUIRE(dilation_indices(1.0).mu2 == Approx(-1.0));
    REQUIRE(dilation_indices(inf).mu1 == Approx(0.0));
    REQUIRE(dilation_indices(inf).mu2 == Approx(-1.0));
    REQUIRE(dilation_indices(4.0 / 3.0).mu1 == Approx(-0.25));
    REQUIRE(dilation_indices(4.0).mu2 == Approx(-0.75));
}

TEST_CASE("dilate: exact index paths, Fourier identity, interpolation", "[decomp]") {
    GridSpec g(1, 1024, 8.0);
    auto f = sample([](const Vec& p) { return cplx(std::exp(-kPi * p[0] * p[0]), 0.0); }, g,
                    Domain::time);

    SECTION("lambda = 1 is the identity") {
        auto out = dilate(f, 1.0);
        for (std::size_t i = 0; i < f.values.size(); ++i) REQUIRE(out.values[i] == f.values[i]);
    }
    SECTION("L2 scaling law") {
        const double base = lp_norm(f, 2.0);
        for (double lam : {2.0, 4.0, 0.5, 0.25}) {
            const double got = lp_norm(dilate(f, lam), 2.0);
            REQUIRE(std::abs(got - std::pow(lam, -0.5) * base) <= 1e-8 * base);
        }
    }
    SECTION("the spectrum dilates reciprocally") {
        auto hat_d = fourier(dilate(f, 2.0), FourierDirection::forward);
        auto hat = fourier(f, FourierDirection::forward);
        const int n = g.samples;
        for (int j = 0; j < n; ++j) {
            // (U_2 f)^(eta) = f^(eta/2)/2; eta_j/2 lands on the lattice for even offsets.
            const int off = j - n / 2;
            if ((off & 1) != 0) continue;
            const int src = off / 2 + n / 2;
            REQUIRE(std::abs(hat_d.values[j] - 0.5 * hat.values[src]) <= 1e-8);
        }
    }
    SECTION("irrational dilations invert within interpolation accuracy") {
        auto out = dilate(dilate(f, std::sqrt(2.0)), 1.0 / std::sqrt(2.0));
        REQUIRE(rel_l2_diff(out, f) <= 1e-6);
    }
    SECTION("expansions that spill out of the cube are rejected") {
        auto wide = sample(
            [](const Vec& p) { return cplx(std::exp(-kPi * p[0] * p[0] / 16.0), 0.0); }, g,
            Domain::time);
        REQUIRE_THROWS_AS(dilate(wide, 0.25), std::invalid_argument);
    }
}

TEST_CASE("dilation exponents stay within the theory bounds", "[decomp]") {
    const double inf = std::numeric_limits<double>::infinity();

    // Contractions on a fine grid, expansions on a wide one.
    GridSpec fine(1, 2048, 4.0);
    auto f = sample([](const Vec& p) { return cplx(std::exp(-kPi * p[0] * p[0]), 0.0); }, fine,
                    Domain::time);
    GridSpec wide(1, 2048, 32.0);
    auto fw = sample([](const Vec& p) { return cplx(std::exp(-kPi * p[0] * p[0]), 0.0); }, wide,
                     Domain::time);

    SECTION("p = 2 scaling is exact to 1e-4") {
        const double base = mp_norm(f, 2.0, 0.0, NormMethod::stft).value;
        for (double lam : {2.0, 4.0}) {
            const double r = mp_norm(dilate(f, lam), 2.0, 0.0, NormMethod::stft).value / base;
            REQUIRE(std::abs(r - std::pow(lam, -0.5)) <= 1e-4);
        }
    }
    SECTION("fitted exponents never beat the dilation theorem by more than 0.1") {
        for (double p : {1.0, inf}) {
            const DilationIndices idx = dilation_indices(p);
            std::vector<std::pair<double, double>> up, down;
            for (double lam : {1.0, 2.0, 4.0, 8.0, 16.0})
                up.emplace_back(lam, mp_norm(dilate(f, lam), p, 0.0, NormMethod::stft).value);
            for (double lam : {1.0, 0.5, 0.25, 0.125})
                down.emplace_back(lam, mp_norm(dilate(fw, lam), p, 0.0, NormMethod::stft).value);
            REQUIRE(fit_exponent(up).slope <= idx.mu1 + 0.1);
            REQUIRE(fit_exponent(down).slope >= idx.mu2 - 0.1);
        }
    }
}

TEST_CASE("dyadic pieces: shell selectivity and reassembly", "[decomp]") {
    GridSpec g(1, 2048, 2.0);
    Diffeo dif = default_diffeo();
    FioOperator op = shell_op(g, dif);
    LpSystem lp = lp_system(7, g);

    SECTION("requires a symbol vanishing near zero frequency") {
        FioOperator bad = op;
        bad.symbol.eta_window.reset();
        REQUIRE_THROWS_AS(dyadic_piece(bad, 3, lp), std::invalid_argument);
    }
    SECTION("only neighbor shells act on shell-limited data") {
        auto u = packet(g, 16.0, 4.0);  // spectrum in [12, 20], shell 4
        const double uscale = lp_norm(u, 2.0);
        for (int j = 1; j <= 7; ++j) {
            auto out = apply_fio(dyadic_piece(op, j, lp), u);
            const double sz = lp_norm(out, 2.0);
            if (j >= 3 && j <= 5)
                continue;  // active shells
            REQUIRE(sz <= 1e-10 * uscale);
        }
    }
    SECTION("the pieces sum back to the full operator") {
        auto u = packet(g, 20.0, 12.0);  // spectrum within [8, 32] <= 2^7
        auto want = apply_fio(op, u);
        SampledFunction sum(g, Domain::time);
        for (int j = 1; j <= lp.j_max; ++j) {
            auto part = apply_fio(dyadic_piece(op, j, lp), u);
            for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += part.values[i];
        }
        REQUIRE(rel_l2_diff(sum, want) <= 1e-8);
    }
    SECTION("piece symbols vanish off their shell") {
        FioOperator piece = dyadic_piece(op, 4, lp);
        for (double eta : {1.0, 3.9, 32.5, 100.0}) {
            REQUIRE(std::abs(piece.symbol.eval(vec1(0.5), vec1(eta))) == 0.0);
        }
        REQUIRE(std::abs(piece.symbol.eval(vec1(0.5), vec1(12.0))) > 0.0);
    }
}

TEST_CASE("conjugation by dyadic dilations is an operator identity", "[decomp]") {
    GridSpec g(1, 4096, 2.0);
    Diffeo dif = default_diffeo();
    FioOperator op = shell_op(g, dif);
    LpSystem lp = lp_system(7, g);

    SECTION("the zero shell conjugates trivially") {
        auto u = packet(g, 3.0, 1.5);
        REQUIRE(conjugation_residual(op, 0, u, lp) <= 1e-12);
    }
    SECTION("even shells match to quadrature accuracy") {
        for (int j : {2, 4, 6}) {
            const double c = 1.5 * std::ldexp(1.0, j);
            auto u = packet(g, c, std::ldexp(1.0, j - 1));
            REQUIRE(conjugation_residual(op, j, u, lp) <= 1e-6);
        }
    }
    SECTION("odd shells stay within the looser budget") {
        auto u = packet(g, 12.0, 4.0);
        REQUIRE(conjugation_residual(op, 3, u, lp) <= 1e-4);
    }
    SECTION("the residual is scale-invariant") {
        auto u = packet(g, 24.0, 8.0);
        SampledFunction u2 = u;
        for (auto& v : u2.values) v *= cplx(0.0, 170.0);
        const double a = conjugation_residual(op, 4, u, lp);
        const double b = conjugation_residual(op, 4, u2, lp);
        REQUIRE(std::abs(a - b) <= 1e-12);
    }
}

TEST_CASE("rescaled pieces have uniformly bounded operator ratios", "[decomp]") {
    GridSpec g(1, 4096, 2.0);
    Diffeo dif = default_diffeo();
    FioOperator op = shell_op(g, dif);
    LpSystem lp = lp_system(7, g);

    double lo = 1e300, hi = 0.0;
    for (int j : {2, 4, 6}) {
        FioOperator tilde = conjugated_operator(dyadic_piece(op, j, lp), j);
        const double c = 1.5 * std::ldexp(1.0, j);
        SampledFunction u = relabel(packet(g, c, std::ldexp(1.0, j - 1)), tilde.grid);
        SampledFunction out = apply_fio(tilde, u);
        const double gain = std::ldexp(1.0, j / 2);  // 2^{jd/2} normalization
        const double ratio = gain * mp_norm(out, 1.0, 0.0, NormMethod::stft).value /
                             mp_norm(u, 1.0, 0.0, NormMethod::stft).value;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    REQUIRE(hi / lo <= 10.0);
}

TEST_CASE("shell coupling is banded for bounded-slope phases", "[decomp]") {
    GridSpec g(1, 4096, 4.0);
    Diffeo dif = default_diffeo();
    LpSystem lp = lp_system(6, g);
    auto u = [&] {
        SampledFunction hat(g, Domain::frequency);
        for (int i = 0; i < g.samples; ++i) {
            const double eta = g.freq_coord(i);
            hat.values[i] = std::exp(-std::pow(eta / 96.0, 2.0));
        }
        return fourier(hat, FourierDirection::inverse);
    }();

    SECTION("frequency multipliers commute: exact banding for the linear phase") {
        FioOperator op;
        op.grid = g;
        op.phase = identity_phase(1);
        op.symbol = separable_symbol(
            -0.5, [](const Vec&) { return cplx(1.0, 0.0); },
            [](const Vec& e) {
                const double r = std::abs(e[0]);
                return cplx(smooth_step((r - 2.0) / 2.0) * std::pow(1.0 + r * r, -0.25), 0.0);
            },
            std::numeric_limits<double>::infinity(), std::make_pair(2.0, 1e18));
        auto m = almost_orthogonality(op, u, 8, lp);
        REQUIRE(m.band_width <= 1);
        double global = 0.0;
        for (double e : m.entries) global = std::max(global, e);
        for (int k = 0; k <= 8; ++k)
            for (int j = 1; j <= lp.j_max; ++j)
                if (std::abs(k - j) >= 2) REQUIRE(m.at(k, j) <= 1e-10 * global);
    }
    SECTION("the composition phase couples at most two shells away") {
        FioOperator op = shell_op(g, dif);
        auto m = almost_orthogonality(op, u, 8, lp);
        REQUIRE(m.band_width <= 2);
        // Far off-band coupling on shell-limited input.
        auto u3 = packet(g, 12.0, 4.0);
        auto m3 = almost_orthogonality(op, u3, 8, lp);
        double global = 0.0;
        for (double e : m3.entries) global = std::max(global, e);
        REQUIRE(m3.at(8, 3) <= 1e-3 * global);
    }
}
