// fiolab command-line driver: runs the operator experiments and property
// checks on configurable grids, emits CSV/JSON reports, and exits
//   0  when every enabled assertion holds,
//   1  when an assertion fails (the failing invariant is named),
//   2  on configuration errors.
//
// Flags may also come from a key=value file via --config; explicit flags
// override file values. FIO_LAB_THREADS caps worker threads.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fiolab/decomp.hpp"
#include "fiolab/fio.hpp"
#include "fiolab/grid.hpp"
#include "fiolab/norms.hpp"
#include "fiolab/report.hpp"
#include "fiolab/sharpness.hpp"
#include "fiolab/stft.hpp"

using namespace fiolab;

namespace {

std::string fmt(double v) { return detail::num12(v); }

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list: " + csv);
    return out;
}

struct Assertions {
    bool ok = true;
    std::vector<std::string> lines;

    void check(bool pass, const std::string& invariant, const std::string& detail) {
        lines.push_back(std::string(pass ? "[PASS] " : "[FAIL] ") + invariant + ": " + detail);
        ok = ok && pass;
    }
};

// Key/value report for the non-experiment commands.
struct KvReport {
    std::vector<std::pair<std::string, std::string>> items;
    void add(const std::string& k, double v) { items.emplace_back(k, fmt(v)); }
    void add(const std::string& k, const std::string& v) { items.emplace_back(k, v); }

    std::string render(ReportFormat format) const {
        std::ostringstream out;
        if (format == ReportFormat::csv) {
            out << "metric,value\n";
            for (const auto& [k, v] : items) out << k << ',' << v << '\n';
        } else {
            out << "{\n";
            for (std::size_t i = 0; i < items.size(); ++i) {
                const auto& [k, v] = items[i];
                const bool numeric = !v.empty() && (std::isdigit(static_cast<unsigned char>(v[0])) ||
                                                    v[0] == '-' || v[0] == '+');
                out << "  \"" << k << "\": ";
                if (numeric)
                    out << v;
                else
                    out << '"' << v << '"';
                out << (i + 1 < items.size() ? "," : "") << '\n';
            }
            out << "}\n";
        }
        return out.str();
    }
};

void emit(const std::string& body, const std::string& out_path) {
    std::fputs(body.c_str(), stdout);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output path " + out_path);
        f << body;
    }
}

FioOperator shell_test_operator(const GridSpec& g, const Diffeo& dif) {
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

SampledFunction wideband_probe(const GridSpec& g, std::optional<long> seed) {
    if (seed) return random_bandlimited(g, 0.5 * g.nyquist(), static_cast<std::uint64_t>(*seed));
    SampledFunction hat(g, Domain::frequency);
    for (int i = 0; i < g.samples; ++i) {
        const double eta = g.freq_coord(i);
        hat.values[i] = std::exp(-std::pow(eta / (0.2 * g.nyquist()), 2.0));
    }
    return fourier(hat, FourierDirection::inverse);
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"fiolab: oscillatory-operator norm experiments on sampled grids"};
    app.set_config("--config", "", "key=value run configuration; explicit flags override");

    std::string command;
    app.add_option("command", command,
                   "one of: sharpness vdc dilation gabor-decay equivalence orthogonality "
                   "partition-check conjugation");

    int dim = 1;
    int samples = 16384;
    double half_width = 2.0;
    double p_value = 0.0, m_value = 0.0;
    std::string n_csv = "8,16,32,64,128,256,512";
    std::string lambda_csv = "10,100,1000,10000";
    std::string j_csv = "2,4,6";
    int j_max = 8, k_max = 8;
    std::string method = "decomp";
    std::string out_path;
    std::string format_name = "csv";
    long seed_value = 0;
    std::string phi_kind = "diffeo";

    app.add_option("--d", dim, "dimension (1 or 2)");
    app.add_option("--N", samples, "samples per axis (power of two)");
    app.add_option("--L", half_width, "half width of the periodic cube");
    auto* p_opt = app.add_option("--p", p_value, "Lebesgue exponent");
    app.add_option("--m", m_value, "operator order");
    app.add_option("--n", n_csv, "comma list of modulation indices");
    app.add_option("--lambda", lambda_csv, "comma list of oscillation rates");
    app.add_option("--j", j_csv, "comma list of dyadic shells");
    app.add_option("--Jmax", j_max, "largest dyadic shell");
    app.add_option("--Kmax", k_max, "largest output shell row");
    app.add_option("--method", method, "modulation norm estimator: decomp or stft");
    app.add_option("--out", out_path, "report file path");
    app.add_option("--format", format_name, "report format: csv or json");
    auto* seed_opt = app.add_option("--seed", seed_value, "seed for randomized probe functions");
    app.add_option("--phi", phi_kind, "vdc phase: fresnel, linear or diffeo");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help is fine, anything else is a config error
    }

    Assertions checks;
    try {
        if (command.empty()) throw std::invalid_argument("no command given");
        const ReportFormat format = [&] {
            if (format_name == "csv") return ReportFormat::csv;
            if (format_name == "json") return ReportFormat::json;
            throw std::invalid_argument("unknown format " + format_name);
        }();
        const NormMethod norm_method = [&] {
            if (method == "decomp") return NormMethod::decomp;
            if (method == "stft") return NormMethod::stft;
            throw std::invalid_argument("unknown method " + method);
        }();

        if (command == "sharpness") {
            if (!*p_opt) throw std::invalid_argument("sharpness requires --p");
            GridSpec grid(dim, samples, half_width);
            std::vector<int> n_list;
            for (double v : parse_list(n_csv)) n_list.push_back(static_cast<int>(v));
            auto fam = default_family(n_list, dim);
            Diffeo dif = default_diffeo();
            ExperimentResult res =
                sharpness_experiment(p_value, m_value, fam, dif, grid, norm_method);
            emit(render_report(res, format), out_path);

            const double tol = p_value == 2.0 ? 0.05 : 0.10;
            checks.check(std::abs(res.fitted_exponent - res.theory_exponent) <= tol,
                         "sharpness exponent window",
                         "fitted " + fmt(res.fitted_exponent) + " vs theory " +
                             fmt(res.theory_exponent) + " (tol " + fmt(tol) + ")");
            if (dim == 2) {
                GridSpec grid1(1, samples, half_width);
                auto fam1 = default_family(n_list, 1);
                ExperimentResult base =
                    sharpness_experiment(p_value, m_value, fam1, dif, grid1, norm_method);
                checks.check(res.fitted_exponent >= 2.0 * base.fitted_exponent - 0.15,
                             "tensor growth doubling",
                             "2-d " + fmt(res.fitted_exponent) + " vs 1-d " +
                                 fmt(base.fitted_exponent));
            }
        } else if (command == "vdc") {
            const std::vector<double> lambdas = parse_list(lambda_csv);
            KvReport rep;
            if (phi_kind == "fresnel") {
                auto res = vdc_check([](double t) { return 0.5 * t * t; }, -1.0, 1.0, 2, lambdas);
                for (std::size_t i = 0; i < lambdas.size(); ++i)
                    rep.add("scaled_lambda_" + fmt(lambdas[i]), res.per_lambda[i]);
                rep.add("sup_scaled", res.sup_scaled);
                rep.add("doubling_change", res.doubling_change);
                emit(rep.render(format), out_path);
                checks.check(std::abs(res.per_lambda.back() - std::sqrt(kTwoPi)) <=
                                 0.02 * std::sqrt(kTwoPi),
                             "fresnel limit", fmt(res.per_lambda.back()) + " vs sqrt(2pi)");
                checks.check(res.doubling_change <= 0.05, "quadrature stability",
                             fmt(res.doubling_change));
            } else if (phi_kind == "linear") {
                auto res = vdc_check([](double t) { return t; }, 0.0, 1.0, 1, lambdas);
                for (std::size_t i = 0; i < lambdas.size(); ++i)
                    rep.add("scaled_lambda_" + fmt(lambdas[i]), res.per_lambda[i]);
                rep.add("sup_scaled", res.sup_scaled);
                emit(rep.render(format), out_path);
                checks.check(res.sup_scaled <= 2.0 + 1e-9, "linear antiderivative bound",
                             fmt(res.sup_scaled));
            } else if (phi_kind == "diffeo") {
                Diffeo dif = default_diffeo();
                auto res = vdc_check([&](double t) { return -kTwoPi * dif.phi(t); }, dif.i_lo,
                                     dif.i_hi, 2, lambdas);
                const double scaled_sup = std::sqrt(dif.rho) * res.sup_scaled;
                for (std::size_t i = 0; i < lambdas.size(); ++i)
                    rep.add("scaled_lambda_" + fmt(lambdas[i]),
                            std::sqrt(dif.rho) * res.per_lambda[i]);
                rep.add("sup_scaled", scaled_sup);
                rep.add("doubling_change", res.doubling_change);
                emit(rep.render(format), out_path);
                checks.check(scaled_sup <= 10.0, "curvature-normalized oscillatory bound",
                             fmt(scaled_sup));
                checks.check(res.doubling_change <= 0.05, "quadrature stability",
                             fmt(res.doubling_change));
            } else {
                throw std::invalid_argument("unknown --phi " + phi_kind);
            }
        } else if (command == "dilation") {
            if (!*p_opt) p_value = 1.0;
            const double p = p_value;
            GridSpec fine(1, 2048, 4.0);
            GridSpec wide(1, 2048, 32.0);
            auto gauss = [](const Vec& q) { return cplx(std::exp(-kPi * q[0] * q[0]), 0.0); };
            auto f = sample(gauss, fine, Domain::time);
            auto fw = sample(gauss, wide, Domain::time);

            const double base2 = mp_norm(f, 2.0, 0.0, NormMethod::stft).value;
            double exact_worst = 0.0;
            for (double lam : {2.0, 4.0}) {
                const double r = mp_norm(dilate(f, lam), 2.0, 0.0, NormMethod::stft).value / base2;
                exact_worst = std::max(exact_worst, std::abs(r - std::pow(lam, -0.5)));
            }
            const DilationIndices idx = dilation_indices(p);
            std::vector<std::pair<double, double>> up, down;
            for (double lam : {1.0, 2.0, 4.0, 8.0, 16.0})
                up.emplace_back(lam, mp_norm(dilate(f, lam), p, 0.0, NormMethod::stft).value);
            for (double lam : {1.0, 0.5, 0.25, 0.125})
                down.emplace_back(lam, mp_norm(dilate(fw, lam), p, 0.0, NormMethod::stft).value);
            const double slope_up = fit_exponent(up).slope;
            const double slope_down = fit_exponent(down).slope;

            KvReport rep;
            rep.add("p", p);
            rep.add("mu1", idx.mu1);
            rep.add("mu2", idx.mu2);
            rep.add("p2_exactness_error", exact_worst);
            rep.add("slope_expanding", slope_up);
            rep.add("slope_contracting", slope_down);
            emit(rep.render(format), out_path);

            checks.check(exact_worst <= 1e-4, "p=2 dilation exactness", fmt(exact_worst));
            checks.check(slope_up <= idx.mu1 + 0.1, "upper dilation exponent",
                         fmt(slope_up) + " vs mu1 " + fmt(idx.mu1));
            checks.check(slope_down >= idx.mu2 - 0.1, "lower dilation exponent",
                         fmt(slope_down) + " vs mu2 " + fmt(idx.mu2));
        } else if (command == "gabor-decay") {
            GridSpec g(1, 2048, 8.0);
            Diffeo dif = default_diffeo();
            Window gamma = bump_window(g, 1.0);
            Window gw = band_window(g, 1.0);
            FioOperator op;
            op.grid = g;
            op.phase = tensor_linear_phase(1, {diffeo_map(dif)});
            op.symbol = separable_symbol(
                0.0, [](const Vec& x) { return cplx(experiment_cutoff(x[0]), 0.0); },
                [](const Vec& e) { return cplx(smooth_plateau(e[0], 4.0, 8.0), 0.0); }, 2.0,
                std::make_pair(0.0, 8.0));
            GaborProbeLattice lat;
            for (double y = -6.0; y <= 6.01; y += 0.5) lat.y.push_back(y);
            for (double w = -8.0; w <= 8.01; w += 1.0) lat.omega.push_back(w);
            for (double y = -3.0; y <= 3.01; y += 0.5) lat.y_out.push_back(y);
            for (double w = -20.0; w <= 20.01; w += 1.0) lat.omega_out.push_back(w);
            auto res = gabor_matrix(op, gw, gamma, lat, 4.0);
            double peak = 0.0, outside = 0.0;
            for (std::size_t i = 0; i < res.entries.size(); ++i) {
                const double a = std::abs(res.entries[i]);
                peak = std::max(peak, a);
                if (!res.inside_sigma[i]) outside = std::max(outside, a);
            }
            KvReport rep;
            rep.add("decay_order", res.decay.order);
            rep.add("fit_residual", res.decay.residual);
            rep.add("entries_used", static_cast<double>(res.decay.used));
            rep.add("peak", peak);
            rep.add("outside_support_max", outside);
            emit(rep.render(format), out_path);
            checks.check(res.decay.order >= 4.0, "off-peak decay order", fmt(res.decay.order));
            checks.check(outside <= 1e-8 * peak, "support localization",
                         fmt(outside) + " vs peak " + fmt(peak));
        } else if (command == "equivalence") {
            if (!*p_opt) p_value = 1.0;
            GridSpec g(1, samples == 16384 ? 8192 : samples, half_width == 2.0 ? 4.0 : half_width);
            std::vector<SampledFunction> family;
            for (int n = 1; n <= 32; ++n) {
                family.push_back(sample(
                    [n](const Vec& q) {
                        return bump01(q[0]) * std::polar(1.0, kTwoPi * n * q[0]);
                    },
                    g, Domain::time));
            }
            auto rep_data = equivalence_report(family, p_value, SupportBox{vec1(0.0), vec1(1.0)});
            KvReport rep;
            rep.add("p", p_value);
            rep.add("min_ratio", rep_data.min_ratio);
            rep.add("max_ratio", rep_data.max_ratio);
            rep.add("spread", rep_data.spread);
            emit(rep.render(format), out_path);
            checks.check(rep_data.spread <= 10.0, "norm equivalence spread", fmt(rep_data.spread));
            if (p_value == 2.0) {
                double mean = 0.0;
                for (double r : rep_data.ratios) mean += r;
                mean /= static_cast<double>(rep_data.ratios.size());
                double dev = 0.0;
                for (double r : rep_data.ratios) dev = std::max(dev, std::abs(r - mean));
                checks.check(dev <= 1e-4, "p=2 ratio constancy", fmt(dev));
            }
        } else if (command == "orthogonality") {
            GridSpec g(1, 4096, 4.0);
            Diffeo dif = default_diffeo();
            FioOperator op = shell_test_operator(g, dif);
            LpSystem lp = lp_system(std::min(j_max, 6), g);
            SampledFunction u = wideband_probe(
                g, *seed_opt ? std::optional<long>(seed_value) : std::nullopt);
            auto matrix = almost_orthogonality(op, u, k_max, lp);
            KvReport rep;
            rep.add("band_width", static_cast<double>(matrix.band_width));
            if (*seed_opt) rep.add("seed", static_cast<double>(seed_value));
            emit(rep.render(format), out_path);
            checks.check(matrix.band_width <= 2, "shell coupling band width",
                         std::to_string(matrix.band_width));
        } else if (command == "partition-check") {
            GridSpec g(dim, samples == 16384 ? 4096 : samples, half_width);
            LpSystem lp = lp_system(j_max, g);
            double worst = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const Vec eta = g.point(Domain::frequency, i);
                double total = lp.tail(eta, g.dim);
                for (int j = 0; j <= lp.j_max; ++j) total += lp.psi(j, eta, g.dim);
                worst = std::max(worst, std::abs(total - 1.0));
            }
            KvReport rep;
            rep.add("max_deviation", worst);
            emit(rep.render(format), out_path);
            checks.check(worst <= 1e-12, "dyadic partition of unity", fmt(worst));
        } else if (command == "conjugation") {
            GridSpec g(1, samples == 16384 ? 4096 : samples, half_width);
            Diffeo dif = default_diffeo();
            FioOperator op = shell_test_operator(g, dif);
            LpSystem lp = lp_system(std::min(j_max, 7), g);
            KvReport rep;
            for (double jd : parse_list(j_csv)) {
                const int j = static_cast<int>(jd);
                const double center = 1.5 * std::ldexp(1.0, j);
                SampledFunction hat(g, Domain::frequency);
                for (int i = 0; i < g.samples; ++i) {
                    const double eta = g.freq_coord(i);
                    hat.values[i] =
                        bump01(0.5 * ((eta - center) / std::ldexp(1.0, j - 1) + 1.0));
                }
                SampledFunction u = fourier(hat, FourierDirection::inverse);
                const double res = conjugation_residual(op, j, u, lp);
                rep.add("residual_j" + std::to_string(j), res);
                const double tol = (j % 2 == 0) ? 1e-6 : 1e-4;
                checks.check(res <= tol, "dyadic conjugation residual (j=" + std::to_string(j) + ")",
                             fmt(res) + " tol " + fmt(tol));
            }
            emit(rep.render(format), out_path);
        } else {
            std::fprintf(stderr, "unknown command '%s'\n%s\n", command.c_str(),
                         app.help().c_str());
            return 2;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    for (const std::string& line : checks.lines) std::fprintf(stdout, "%s\n", line.c_str());
    return checks.ok ? 0 : 1;
}
