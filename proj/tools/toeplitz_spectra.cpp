// toeplitz-spectra: command-line front end.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure (diagnostic
// JSON on stderr), 64 usage error.

#include "toeplitz_spectra/io.hpp"
#include "toeplitz_spectra/toeplitz_spectra.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace ts = toeplitz_spectra;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUsage = 64;

struct RunConfig {
    std::string symbol_path;
    std::string out;
    int k = 0;
    int n = 20;
    int points = 400;
    int trials = 10;
    int samples = 50;
    double resolution = 5e-3;
    double tol_curve = 1e-8;
    double tol_mass = 1e-3;
    double tol_energy = 1e-8;
    double tol_tie = 1e-9;
    double tol_day = 1e-8;
    bool extended = false;
    bool json_format = false;
    bool csv_format = false;
    std::size_t workers = ts::default_workers();
    std::uint64_t seed = 20240917;

    ts::CurveOptions curve_options() const {
        ts::CurveOptions o;
        o.resolution = resolution;
        o.curve_tolerance = tol_curve;
        o.workers = workers;
        o.algebraic.tie_tolerance = tol_tie;
        return o;
    }
    ts::MeasureOptions measure_options() const {
        ts::MeasureOptions o;
        o.workers = workers;
        o.algebraic.tie_tolerance = tol_tie;
        return o;
    }
};

std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw ts::DegenerateError("cannot write " + path);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

void emit(const std::string& path, const json& j) { emit(path, j.dump(2)); }

json box_json(const ts::Box& b) {
    return json{{"re_min", b.re_min}, {"re_max", b.re_max}, {"im_min", b.im_min}, {"im_max", b.im_max}};
}

json curves_json(const ts::CurveFamily& fam) {
    json arcs = json::array();
    for (const auto& a : fam.arcs) arcs.push_back(ts::io::to_json(a.points));
    return json{{"k", fam.k},
                {"arcs", arcs},
                {"exceptional", ts::io::to_json(fam.exceptional)},
                {"branch_points_on_curve", ts::io::to_json(fam.branch_points_on_curve)},
                {"bounding_box", box_json(fam.box)},
                {"resolution", fam.resolution},
                {"grid_step", fam.step},
                {"unbounded", fam.unbounded},
                {"expansions", fam.expansions}};
}

std::string curves_csv(const ts::CurveFamily& fam) {
    std::ostringstream os;
    os << "arc_id,re,im,s\n";
    for (std::size_t a = 0; a < fam.arcs.size(); ++a) {
        const auto& arc = fam.arcs[a];
        for (std::size_t i = 0; i < arc.points.size(); ++i)
            os << a << ',' << csv_number(arc.points[i].real()) << ',' << csv_number(arc.points[i].imag()) << ','
               << csv_number(arc.s[i]) << '\n';
    }
    return os.str();
}

std::string measure_csv(const ts::DiscretizedMeasure& mu) {
    std::ostringstream os;
    os << "re,im,arclength,density,weight\n";
    for (std::size_t i = 0; i < mu.size(); ++i)
        os << csv_number(mu.points[i].real()) << ',' << csv_number(mu.points[i].imag()) << ','
           << csv_number(mu.arclength[i]) << ',' << csv_number(mu.densities[i]) << ',' << csv_number(mu.weights[i])
           << '\n';
    return os.str();
}

json measure_json(const ts::RationalSymbol& s, const ts::CurveFamily& fam, const ts::DiscretizedMeasure& mu) {
    json pts = json::array();
    for (std::size_t i = 0; i < mu.size(); ++i)
        pts.push_back(json{{"re", mu.points[i].real()},
                           {"im", mu.points[i].imag()},
                           {"arc", mu.arc[i]},
                           {"arclength", mu.arclength[i]},
                           {"density", mu.densities[i]},
                           {"weight", mu.weights[i]}});
    json diagnostics{{"resolution", fam.resolution}, {"unbounded", fam.unbounded}};
    const auto cal = ts::calibrate_potential(s, mu.k, mu, std::numeric_limits<double>::infinity());
    diagnostics["alpha"] = cal.alpha;
    diagnostics["calibration_reference"] = ts::io::to_json(cal.reference);
    diagnostics["calibration_drift"] = cal.drift;
    diagnostics["calibration_ok"] = cal.drift <= 1e-4;
    return json{{"k", mu.k},
                {"total", mu.total},
                {"expected_mass", s.masses.m(mu.k)},
                {"points", pts},
                {"mass_table", ts::io::symbol_info(s).at("masses")},
                {"diagnostics", diagnostics}};
}

json spectrum_json(const ts::RationalSymbol& s, const RunConfig& cfg, int k, int n, bool extended) {
    ts::CharPolyOptions o;
    o.extended = extended;
    o.workers = cfg.workers;
    o.circle = ts::interpolation_circle(s);
    const auto P = ts::char_poly(s, k, n, o);
    const auto report = ts::divisibility_report(s, k, n, *o.circle, o);
    json clusters = json::array();
    for (const auto& c : P.clusters)
        clusters.push_back(json{{"center", ts::io::to_json(c.center)}, {"multiplicity", c.multiplicity}});
    auto optional_int = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
    return json{{"k", k},
                {"n", n},
                {"precision", P.extended ? "extended" : "double"},
                {"eigenvalues", ts::io::to_json(P.roots)},
                {"clusters", clusters},
                {"multiplicity_at_lambda1", optional_int(report.multiplicity_lambda1)},
                {"multiplicity_at_lambda2", optional_int(report.multiplicity_lambda2)},
                {"degree", P.degree},
                {"degree_q", report.degree_q},
                {"c_needed", report.c_needed()},
                {"validation_error", P.validation_error}};
}

/// Random lambda in the interpolation disc, away from the special values and branch points.
ts::cplx random_lambda(const ts::RationalSymbol& s, const ts::InterpolationCircle& circle,
                       const ts::BranchPointSet& bps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const ts::cplx z = circle.center + circle.radius * std::sqrt(u(rng)) * std::polar(1.0, 2 * M_PI * u(rng));
        bool ok = true;
        for (const auto& c : {s.special.lambda1, s.special.lambda2})
            if (c.is_finite() && std::abs(z - c.value) < 1e-2) ok = false;
        for (const auto& b : bps.points)
            if (std::abs(z - b) < 1e-2) ok = false;
        if (ok) return z;
    }
}

int run_symbol_info(const RunConfig& cfg) {
    const auto s = ts::io::load_symbol(cfg.symbol_path);
    json j = ts::io::symbol_info(s);
    j["branch_points"] = ts::io::to_json(ts::branch_points(s).points);
    emit(cfg.out, j);
    return 0;
}

int run_curves(const RunConfig& cfg) {
    const auto s = ts::io::load_symbol(cfg.symbol_path);
    const auto fam = ts::trace_curves(s, cfg.k, cfg.curve_options());
    if (cfg.csv_format) emit(cfg.out, curves_csv(fam));
    else emit(cfg.out, curves_json(fam));
    return 0;
}

int run_measure(const RunConfig& cfg) {
    const auto s = ts::io::load_symbol(cfg.symbol_path);
    const auto fam = ts::trace_curves(s, cfg.k, cfg.curve_options());
    const auto mu = ts::discretize(s, cfg.k, fam, cfg.points, cfg.measure_options());
    if (cfg.json_format) emit(cfg.out, measure_json(s, fam, mu));
    else emit(cfg.out, measure_csv(mu));
    return 0;
}

int run_spectrum(const RunConfig& cfg) {
    const auto s = ts::io::load_symbol(cfg.symbol_path);
    emit(cfg.out, spectrum_json(s, cfg, cfg.k, cfg.n, cfg.extended));
    return 0;
}

int run_day_check(const RunConfig& cfg) {
    const auto s = ts::io::load_symbol(cfg.symbol_path);
    const auto bps = ts::branch_points(s);
    const auto circle = ts::interpolation_circle(s, bps);
    std::mt19937_64 rng(cfg.seed);
    double worst = 0, worst_w = 0;
    json per_k = json::array();
    for (int k = s.k_min(); k <= s.k_max(); ++k) {
        double kmax = 0;
        const int n_min = ts::day_min_size(s, k);
        for (int n = n_min; n <= cfg.n; ++n)
            for (int t = 0; t < cfg.trials; ++t) {
                const ts::cplx lam = random_lambda(s, circle, bps, rng);
                const auto day = ts::day_expansion(s, k, n, lam);
                const ts::cplx det = ts::direct_determinant(s, k, n, lam);
                kmax = std::max(kmax, std::abs(day.value - det) / std::abs(det));
                worst_w = std::max(worst_w, day.w_form_error);
            }
        per_k.push_back(json{{"k", k}, {"n_min", n_min}, {"max_relative_error", kmax}});
        worst = std::max(worst, kmax);
    }
    const bool pass = worst < cfg.tol_day;
    emit(cfg.out, json{{"pass", pass},
                       {"n_max", cfg.n},
                       {"trials", cfg.trials},
                       {"seed", cfg.seed},
                       {"tolerance", cfg.tol_day},
                       {"max_relative_error", worst},
                       {"max_w_form_error", worst_w},
                       {"per_k", per_k}});
    if (!pass) throw ts::InternalInconsistency("Day's identity mismatch " + ts::format_double(worst));
    return 0;
}

int run_equilibrium_check(const RunConfig& cfg) {
    const auto s = ts::io::load_symbol(cfg.symbol_path);
    const auto sol = ts::equilibrium_measures(s, cfg.points, cfg.curve_options(), cfg.measure_options());
    ts::EquilibriumOptions eo;
    eo.mass_tolerance = cfg.tol_mass;
    eo.workers = cfg.workers;
    const auto rep = ts::energy_report(s, sol, static_cast<std::size_t>(cfg.samples), eo);
    const auto probe = ts::boundedness_probe(s, sol.measures, cfg.trials, cfg.seed, eo);
    json el = json::array();
    for (const auto& e : rep.el)
        el.push_back(json{{"k", e.k}, {"mean", e.mean}, {"max_deviation", e.max_deviation}, {"samples", e.values.size()}});
    json masses = json::array();
    for (int k = s.k_min(); k <= s.k_max(); ++k)
        masses.push_back(json{{"k", k}, {"total", sol.measures.at(k).total}, {"expected", s.masses.m(k)}});
    const double scale = std::max(1.0, std::abs(rep.J_direct));
    emit(cfg.out, json{{"J_direct", rep.J_direct},
                       {"J_alternative", rep.J_alternative},
                       {"energy_agreement", std::abs(rep.J_direct - rep.J_alternative) / scale <= cfg.tol_energy},
                       {"el", el},
                       {"masses", masses},
                       {"probe",
                        json{{"trials", cfg.trials},
                             {"seed", cfg.seed},
                             {"reference", probe.reference},
                             {"minimum", probe.minimum},
                             {"dominated", cfg.trials == 0 || probe.minimum >= probe.reference - 1e-6}}}});
    return 0;
}

int run_reproduce(const RunConfig& cfg) {
    const std::string dir = cfg.out.empty() ? "example_bundle" : cfg.out;
    std::filesystem::create_directories(dir);
    const auto s = ts::parse_symbol({1.0}, {-1.0, 2.0}, {-2.0, 1.0});
    const auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };

    json info = ts::io::symbol_info(s);
    info["branch_points"] = ts::io::to_json(ts::branch_points(s).points);
    emit(path("symbol.json"), info);

    ts::CurveOptions co = cfg.curve_options();
    co.resolution = std::min(cfg.resolution, 1e-3);
    const auto fam = ts::trace_curves(s, 0, co);
    emit(path("curves.json"), curves_json(fam));

    const auto mu = ts::discretize(s, 0, fam, cfg.points, cfg.measure_options());
    emit(path("measure.csv"), measure_csv(mu));

    const json n20 = spectrum_json(s, cfg, 0, 20, false);
    emit(path("spectrum_n20.json"), n20);
    const json n60 = spectrum_json(s, cfg, 0, 60, true);
    emit(path("spectrum_n60.json"), n60);

    auto spectrum_summary = [](const json& sp) {
        int inside = 0;
        for (const auto& z : sp.at("eigenvalues")) {
            const double re = z[0].get<double>(), im = z[1].get<double>();
            if (re > -8.0 / 9.0 && re < -1e-5 && std::abs(im) < 1e-6) ++inside;
        }
        return json{{"n", sp.at("n")}, {"multiplicity_at_0", sp.at("multiplicity_at_lambda2")}, {"roots_inside", inside}};
    };
    ts::CVec ends = fam.exceptional;
    std::sort(ends.begin(), ends.end(), [](ts::cplx a, ts::cplx b) { return a.real() < b.real(); });
    const json summary{{"curve_endpoints", ts::io::to_json(ends)},
                       {"mass", mu.total},
                       {"endpoint_constants",
                        json{{"near_0", ts::endpoint_constant(s, 0, fam, {0.0, 0.0})},
                             {"near_minus_8_9", ts::endpoint_constant(s, 0, fam, {-8.0 / 9.0, 0.0})}}},
                       {"spectra", json::array({spectrum_summary(n20), spectrum_summary(n60)})},
                       {"files",
                        json::array({"symbol.json", "curves.json", "measure.csv", "spectrum_n20.json",
                                     "spectrum_n60.json"})}};
    emit(path("summary.json"), summary);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

std::string error_type(const std::string& what) {
    const auto pos = what.find(": ");
    return pos == std::string::npos ? "Error" : what.substr(0, pos);
}

int report_error(const std::exception& e, const char* category, int code) {
    const std::string what = e.what();
    std::cerr << json{{"error", category}, {"type", error_type(what)}, {"message", what}}.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Limiting spectra of Toeplitz matrices with rational symbols"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "Output file (stdout when omitted)");
        sub->add_option("--workers", cfg.workers, "Worker threads (default TOEPLITZ_SPECTRA_WORKERS or 1)")
            ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
        sub->add_option("--seed", cfg.seed, "Seed for randomized checks");
        sub->add_option("--tol-curve", cfg.tol_curve, "Curve membership tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--tol-mass", cfg.tol_mass, "Mass tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--tol-energy", cfg.tol_energy, "Energy agreement tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--tol-tie", cfg.tol_tie, "Root modulus tie tolerance")->check(CLI::PositiveNumber);
        sub->add_flag("--json", cfg.json_format, "JSON output");
        sub->add_flag("--csv", cfg.csv_format, "CSV output");
    };
    auto add_symbol = [&](CLI::App* sub) {
        sub->add_option("symbol", cfg.symbol_path, "Symbol JSON file")->required()->check(CLI::ExistingFile);
    };

    auto* info = app.add_subcommand("symbol-info", "p, q, special values and the mass table");
    add_symbol(info);
    add_common(info);

    auto* curves = app.add_subcommand("curves", "Trace Gamma_k");
    add_symbol(curves);
    add_common(curves);
    curves->add_option("--k", cfg.k, "Curve index")->required();
    curves->add_option("--resolution", cfg.resolution, "Sample spacing")->check(CLI::PositiveNumber);

    auto* measure = app.add_subcommand("measure", "Discretize mu_k");
    add_symbol(measure);
    add_common(measure);
    measure->add_option("--k", cfg.k, "Measure index")->required();
    measure->add_option("--points", cfg.points, "Quadrature nodes")->check(CLI::Range(2, 1000000));
    measure->add_option("--resolution", cfg.resolution, "Curve sample spacing")->check(CLI::PositiveNumber);

    auto* spectrum = app.add_subcommand("spectrum", "Roots of P_{k,n}");
    add_symbol(spectrum);
    add_common(spectrum);
    spectrum->add_option("--k", cfg.k, "Shift index")->required();
    spectrum->add_option("--n", cfg.n, "Matrix size")->required()->check(CLI::Range(1, 200));
    spectrum->add_flag("--extended-precision", cfg.extended, "Determinants and roots in 50-digit arithmetic");

    auto* day = app.add_subcommand("day-check", "Day's identity against direct determinants");
    add_symbol(day);
    add_common(day);
    day->add_option("--n", cfg.n, "Largest matrix size")->required()->check(CLI::Range(1, 40));
    day->add_option("--trials", cfg.trials, "Random lambda per (k, n)")->check(CLI::Range(1, 100000));
    day->add_option("--tol-day", cfg.tol_day, "Relative tolerance")->check(CLI::PositiveNumber);

    auto* eq = app.add_subcommand("equilibrium-check", "Energy forms, Euler-Lagrange constancy, dominance probe");
    add_symbol(eq);
    add_common(eq);
    eq->add_option("--points", cfg.points, "Quadrature nodes per component")->check(CLI::Range(2, 100000));
    eq->add_option("--samples", cfg.samples, "Euler-Lagrange samples per component")->check(CLI::Range(1, 100000));
    eq->add_option("--trials", cfg.trials, "Random admissible vectors")->check(CLI::Range(0, 100000));
    eq->add_option("--resolution", cfg.resolution, "Curve sample spacing")->check(CLI::PositiveNumber);

    auto* repro = app.add_subcommand("reproduce-example", "Write the 1/((2z-1)(z-2)) bundle");
    add_common(repro);
    repro->add_option("--points", cfg.points, "Quadrature nodes")->check(CLI::Range(2, 1000000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }
    if (cfg.json_format && cfg.csv_format) {
        std::cerr << "--json and --csv are exclusive\n";
        return kExitUsage;
    }

    try {
        if (*info) return run_symbol_info(cfg);
        if (*curves) return run_curves(cfg);
        if (*measure) return run_measure(cfg);
        if (*spectrum) return run_spectrum(cfg);
        if (*day) return run_day_check(cfg);
        if (*eq) return run_equilibrium_check(cfg);
        if (*repro) return run_reproduce(cfg);
    } catch (const ts::ValidationError& e) {
        return report_error(e, "validation", kExitValidation);
    } catch (const ts::NumericalError& e) {
        return report_error(e, "numerical", kExitNumerical);
    } catch (const std::exception& e) {
        return report_error(e, "numerical", kExitNumerical);
    }
    return kExitUsage;
}
