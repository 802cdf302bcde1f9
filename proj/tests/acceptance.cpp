#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace test_support;
using ts::Rational;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < budget_s;
    const bool ok = o.pass && in_time;
    if (!ok) ++failures;
    std::printf("[%s] %2d %s (%.2f s of %.0f s) %s%s\n", ok ? "PASS" : "FAIL", id, title, dt, budget_s, o.detail.c_str(),
                in_time ? "" : " over time budget");
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ts::CurveFamily trace(const ts::RationalSymbol& s, int k, double resolution) {
    ts::CurveOptions o;
    o.resolution = resolution;
    return ts::trace_curves(s, k, o);
}

double min_dist(const ts::CVec& pts, ts::cplx z) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) d = std::min(d, std::abs(p - z));
    return d;
}

int inside_segment(const ts::CVec& roots) {
    int inside = 0;
    for (const auto& z : roots)
        if (z.real() > -8.0 / 9.0 && z.real() < -1e-5 && std::abs(z.imag()) < 1e-6) ++inside;
    return inside;
}

}  // namespace

int main() {
    const auto tp = load("two_pole");

    run(1, "special values", 1, [&] {
        const auto& sp = tp.special;
        const auto& m = tp.masses.at(0);
        const bool ok = sp.lambda1.is_finite() && sp.lambda2.is_finite() && sp.lambda1.value == ts::cplx(0.5, 0) &&
                        sp.lambda2.value == ts::cplx(0, 0) && sp.k1 == 1 && sp.k2 == 2 && m.m1 == Rational(0) &&
                        m.m2 == Rational(1, 2) && m.m == Rational(1, 2);
        return Outcome{ok, "lambda1=1/2 lambda2=0 k1=1 k2=2 m=(0,1/2,1/2)"};
    });

    run(2, "Fourier coefficients", 1, [&] {
        const auto exact = ts::exact_fourier_coefficients(tp, -1, 1);
        bool ok = exact && (*exact)[0] == Rational(-1, 3) && (*exact)[1] == Rational(-1, 6) &&
                  (*exact)[2] == Rational(-1, 12);
        const auto f = ts::fourier_coefficients(tp, -1, 1);
        double err = 0;
        for (int j = -1; j <= 1; ++j) err = std::max(err, std::abs(f[static_cast<std::size_t>(j + 1)] - fourier_oracle(tp, j)));
        ok = ok && err <= 1e-12;
        return Outcome{ok, "quadrature error " + fmt("%.2e", err)};
    });

    run(3, "curve Gamma_0 is [-8/9, 0]", 30, [&] {
        const double res = 1e-3;
        const auto fam = trace(tp, 0, res);
        const double h = std::max(distance_to_segment(fam, -8.0 / 9.0, 0.0), segment_to_curve(fam, -8.0 / 9.0, 0.0));
        const auto bps = ts::branch_points(tp);
        double e = std::max(min_dist(fam.exceptional, {0, 0}), min_dist(fam.exceptional, {-8.0 / 9.0, 0}));
        bool exact = bps.exact_discriminant && bps.points.size() == 2;
        for (const auto& b : bps.exact) exact = exact && b && (*b == Rational(0) || *b == Rational(-8, 9));
        return Outcome{!fam.unbounded && h < 2 * res && e < 1e-9 && exact,
                       "hausdorff " + fmt("%.2e", h) + " endpoint error " + fmt("%.1e", e)};
    });

    run(4, "mass of mu_0", 10, [&] {
        const auto mu = ts::discretize(tp, 0, trace(tp, 0, 5e-3), 400);
        return Outcome{std::abs(mu.total - 0.5) < 1e-3, "total " + fmt("%.9f", mu.total)};
    });

    run(5, "endpoint density constants", 10, [&] {
        const auto fam = trace(tp, 0, 5e-3);
        const double c0 = ts::endpoint_constant(tp, 0, fam, {0, 0});
        const double c1 = ts::endpoint_constant(tp, 0, fam, {-8.0 / 9.0, 0});
        return Outcome{std::abs(c0 - 0.28) <= 0.02 && std::abs(c1 - 0.10) <= 0.02,
                       "near 0: " + fmt("%.5f", c0) + " near -8/9: " + fmt("%.5f", c1)};
    });

    run(6, "spectrum n=20 (double) and n=60 (extended)", 600, [&] {
        const auto P20 = ts::char_poly(tp, 0, 20);
        ts::CharPolyOptions o;
        o.extended = true;
        const auto P60 = ts::char_poly(tp, 0, 60, o);
        const bool ok = !P20.extended && P20.multiplicity_at_center == 10 && P20.count_near({0, 0}, 1e-5) == 10 &&
                        inside_segment(P20.roots) == 10 && P60.extended && P60.multiplicity_at_center == 30 &&
                        P60.count_near({0, 0}, 1e-5) == 30 && inside_segment(P60.roots) == 30;
        std::ostringstream d;
        d << "n=20: " << P20.multiplicity_at_center << " at 0, " << inside_segment(P20.roots)
          << " inside; n=60: " << P60.multiplicity_at_center << " at 0, " << inside_segment(P60.roots) << " inside";
        return Outcome{ok, d.str()};
    });

    run(7, "Day's identity", 120, [&] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0;
        int checks = 0;
        for (const auto& name : suite()) {
            const auto s = load(name);
            const auto bps = ts::branch_points(s);
            const auto circle = ts::interpolation_circle(s, bps);
            for (int k = s.k_min(); k <= s.k_max(); ++k)
                for (int n = ts::day_min_size(s, k); n <= 8; ++n)
                    for (int t = 0; t < 10;) {
                        const ts::cplx lam = circle.center + circle.radius * std::sqrt(u(rng)) * std::polar(1.0, 2 * M_PI * u(rng));
                        bool near = min_dist(bps.points, lam) < 1e-2;
                        for (const auto& e : {s.special.lambda1, s.special.lambda2})
                            if (e.is_finite() && std::abs(lam - e.value) < 1e-2) near = true;
                        if (near) continue;
                        const ts::cplx det = det_oracle(ts::build(s, n, k, lam));
                        worst = std::max(worst, std::abs(ts::day_expansion(s, k, n, lam).value - det) / std::abs(det));
                        ++checks;
                        ++t;
                    }
        }
        return Outcome{worst < 1e-8, std::to_string(checks) + " checks, max relative error " + fmt("%.2e", worst)};
    });

    run(8, "divisibility and degree bounds", 300, [&] {
        bool ok = true;
        std::ostringstream d;
        for (int n = 4; n <= 24; n += 2) {
            const auto r = ts::divisibility_report(tp, 0, n);
            ok = ok && r.multiplicity_lambda2 && *r.multiplicity_lambda2 == n / 2 && r.c_needed() == 0.0;
        }
        for (const auto& name : suite()) {
            const auto s = load(name);
            const auto circle = ts::interpolation_circle(s);
            double early = 0, late = 0;
            for (int k = s.k_min(); k <= s.k_max(); ++k)
                for (int n = 4; n <= 24; ++n) {
                    const double c = ts::divisibility_report(s, k, n, circle).c_needed();
                    (n <= 14 ? early : late) = std::max(n <= 14 ? early : late, c);
                }
            ok = ok && late <= early + 1.0;
            d << name << " c=" << fmt("%.3g", std::max(early, late)) << " ";
        }
        return Outcome{ok, d.str()};
    });

    run(9, "energy forms agree", 60, [&] {
        double worst = 0;
        for (const auto& name : suite()) {
            const auto s = load(name);
            ts::CurveOptions o;
            o.resolution = 0.1;
            o.max_expansions = 0;
            const auto like = ts::equilibrium_measures(s, 60, o).measures;
            std::mt19937_64 rng(9);
            for (int t = 0; t < 20; ++t) {
                const auto mv = ts::random_admissible(s, like, rng);
                const double a = ts::energy(s, mv), b = ts::energy_alternative(s, mv);
                worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
            }
        }
        return Outcome{worst <= 1e-8, "max relative difference " + fmt("%.2e", worst)};
    });

    run(10, "Euler-Lagrange constancy and dominance", 300, [&] {
        bool ok = true;
        std::ostringstream d;
        for (const auto& name : bounded_suite()) {
            const auto s = load(name);
            ts::CurveOptions o;
            o.resolution = 5e-3;
            const auto coarse = ts::equilibrium_measures(s, 400, o), fine = ts::equilibrium_measures(s, 800, o);
            double worst = 0;
            for (int k = s.k_min(); k <= s.k_max(); ++k) {
                const double a =
                    ts::el_residual(s, coarse.measures, k, ts::el_samples(s, coarse.curve(k), coarse.measures.at(k), 50)).max_deviation;
                const double b =
                    ts::el_residual(s, fine.measures, k, ts::el_samples(s, fine.curve(k), fine.measures.at(k), 50)).max_deviation;
                ok = ok && a < 5e-3 && b < a;
                worst = std::max(worst, a);
            }
            const auto probe = ts::boundedness_probe(s, coarse.measures, 100, 10);
            ok = ok && probe.minimum >= probe.reference - 1e-6;
            d << name << " " << fmt("%.1e", worst) << " ";
        }
        return Outcome{ok, d.str()};
    });

    run(11, "Cauchy transform convergence", 120, [&] {
        const ts::CVec candidates{{1.0, 1.0}, {-0.4, 0.5}, {2.5, 0.0},  {-3.0, 0.2}, {0.3, -0.6},
                                  {3.0, 2.0}, {-2.0, -1.5}, {0.5, 2.0}, {-1.0, -2.0}, {4.0, -1.0}};
        bool ok = true;
        double worst = 0;
        std::ostringstream d;
        for (const auto& name : {"two_pole", "banded_z_plus_inverse", "banded_p2_q1"}) {
            const auto s = load(name);
            double worst_s = 0;
            for (int k = s.k_min(); k <= s.k_max(); ++k) {
                ts::CVec points;
                for (const auto& z : candidates)
                    if (points.size() < 5 && std::abs(ts::membership_gap(s, z, k)) > 0.05) points.push_back(z);
                ok = ok && points.size() == 5;
                const auto P10 = ts::char_poly(s, k, 10), P40 = ts::char_poly(s, k, 40);
                for (const auto& z : points) {
                    const ts::cplx target = ts::cauchy_target(s, k, z);
                    const double e10 = std::abs(ts::empirical_cauchy(P10, z) - target);
                    const double e40 = std::abs(ts::empirical_cauchy(P40, z) - target);
                    ok = ok && e40 < 0.02 && e40 < e10;
                    worst_s = std::max(worst_s, e40);
                }
            }
            worst = std::max(worst, worst_s);
            d << name << " " << fmt("%.1e", worst_s) << " ";
        }
        return Outcome{ok && worst < 0.02, d.str()};
    });

    run(12, "banded reduction", 60, [&] {
        bool ok = true;
        double worst = 0;
        for (const auto& name : suite()) {
            const auto s = load(name);
            for (int k = s.k_min(); k <= s.k_max(); ++k) {
                std::vector<int> corners;
                for (const int n : {8, 16, 32}) {
                    const auto b = ts::banded_reduction_residual(s, k, n, {0.3, 0.2});
                    corners.push_back(b.corner);
                    worst = std::max(worst, b.det_relative_error);
                }
                ok = ok && corners[0] == corners[1] && corners[1] == corners[2];
            }
        }
        return Outcome{ok && worst < 1e-8, "max determinant error " + fmt("%.2e", worst)};
    });

    std::printf("%d of 12 criteria passed\n", 12 - failures);
    return failures == 0 ? 0 : 1;
}
