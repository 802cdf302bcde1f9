#include "support.hpp"

#include <gtest/gtest.h>

using namespace test_support;

namespace {

ts::CurveFamily trace(const ts::RationalSymbol& s, int k, double resolution = 5e-3) {
    ts::CurveOptions o;
    o.resolution = resolution;
    return ts::trace_curves(s, k, o);
}

/// Oracle: density on a real segment as the jump -Im C(x + i0) / pi of the closed-form transform.
double jump_density(const ts::RationalSymbol& s, int k, double x) {
    return -ts::cauchy_transform(s, k, {x, 1e-9}).imag() / M_PI;
}

}  // namespace

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
    for (const int n : {2, 5, 12, 40}) {
        const auto rule = ts::gauss_legendre(n, -1.0, 3.0);
        for (int d = 0; d <= 2 * n - 1; d += std::max(1, n / 3)) {
            double acc = 0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * std::pow(rule.nodes[i], d);
            const double exact = (std::pow(3.0, d + 1) - std::pow(-1.0, d + 1)) / (d + 1);
            EXPECT_NEAR(acc, exact, 1e-11 * std::max(1.0, std::abs(exact))) << "n=" << n << " d=" << d;
        }
    }
}

TEST(Measure, TwoPoleMassIsOneHalf) {
    const auto s = load("two_pole");
    const auto fam = trace(s, 0);
    for (const int n : {100, 400, 1600}) EXPECT_NEAR(ts::discretize(s, 0, fam, n).total, 0.5, 1e-3) << n;
}

TEST(Measure, BoundedCurvesCarryTheirMass) {
    for (const auto& name : bounded_suite()) {
        const auto s = load(name);
        for (int k = s.k_min(); k <= s.k_max(); ++k) {
            const auto fam = trace(s, k, 1e-2);
            ASSERT_FALSE(fam.unbounded) << name << " k=" << k;
            EXPECT_NEAR(ts::discretize(s, k, fam, 800).total, s.masses.m(k), 1e-3) << name << " k=" << k;
        }
    }
}

TEST(Measure, DensityMatchesCauchyJumpOracle) {
    for (const auto& name : {"two_pole", "perturbed_two_pole", "banded_z_plus_inverse"}) {
        const auto s = load(name);
        const auto fam = trace(s, 0);
        const auto mu = ts::discretize(s, 0, fam, 200);
        for (std::size_t i = 10; i + 10 < mu.size(); i += 17) {
            const double x = mu.points[i].real();
            EXPECT_NEAR(mu.densities[i], jump_density(s, 0, x), 1e-4 * jump_density(s, 0, x)) << name << " x=" << x;
        }
    }
}

TEST(Measure, DensityIgnoresTangentOrientation) {
    const auto s = load("random_2_2");
    const auto fam = trace(s, 0, 1e-2);
    const auto& arc = fam.arcs.front();
    const ts::cplx z = arc.points[arc.points.size() / 2];
    const ts::cplx t = ts::curve_tangent(s, 0, z);
    const auto a = ts::density_at(s, 0, z, t, fam), b = ts::density_at(s, 0, z, -t, fam);
    EXPECT_NEAR(a.density, b.density, 1e-10 * a.density);
    EXPECT_GT(a.density, 0);
    EXPECT_LT(a.imaginary_residual, 1e-6 * a.density);
}

TEST(Measure, TwoPoleEndpointConstants) {
    const auto s = load("two_pole");
    const auto fam = trace(s, 0);
    EXPECT_NEAR(ts::endpoint_constant(s, 0, fam, {0.0, 0.0}), 0.28, 0.02);
    EXPECT_NEAR(ts::endpoint_constant(s, 0, fam, {-8.0 / 9.0, 0.0}), 0.10, 0.02);
}

TEST(Measure, ExceptionalProximityIsRejected) {
    const auto s = load("two_pole");
    const auto fam = trace(s, 0);
    EXPECT_THROW(ts::density_at(s, 0, {-1e-7, 0.0}, {1.0, 0.0}, fam), ts::ExceptionalProximity);
}

TEST(Measure, CauchyTransformClosedFormMatchesQuadrature) {
    for (const auto& name : {"two_pole", "random_2_2"}) {
        const auto s = load(name);
        for (int k = s.k_min(); k <= s.k_max(); ++k) {
            const auto fam = trace(s, k, 1e-2);
            const auto mu = ts::discretize(s, k, fam, 2000);
            for (const ts::cplx z : {ts::cplx(3.0, 2.0), ts::cplx(-4.0, 0.5), ts::cplx(0.2, -5.0)}) {
                const ts::cplx closed = ts::cauchy_transform(s, k, z), quad = ts::cauchy_quadrature(mu, z);
                EXPECT_LT(std::abs(closed - quad), 1e-4 * std::abs(closed) + 1e-6) << name << " k=" << k << " z=" << z;
            }
        }
    }
}

TEST(Measure, CauchyTransformDecaysLikeMassOverLambda) {
    const auto s = load("random_2_2");
    const ts::cplx big(3e4, 1e4);
    for (int k = s.k_min(); k <= s.k_max(); ++k)
        EXPECT_NEAR(std::abs(big * ts::cauchy_transform(s, k, big)), s.masses.m(k), 1e-3) << k;
}

TEST(Measure, CauchyTransformIsRegularAtLambda1) {
    const auto s = load("two_pole");
    const ts::cplx at = ts::cauchy_transform(s, 0, {0.5, 0.0});
    const ts::cplx near = ts::cauchy_transform(s, 0, {0.5 + 1e-4, 0.0});
    EXPECT_LT(std::abs(at - near), 1e-3);
}

TEST(Measure, CauchyTransformRejectsPointsOnTheCurve) {
    EXPECT_THROW(ts::cauchy_transform(load("two_pole"), 0, {-0.4, 0.0}), ts::CurveProximity);
}

TEST(Measure, CalibratedLogPotentialAgreesWithQuadrature) {
    const auto s = load("two_pole");
    const auto fam = trace(s, 0);
    const auto mu = ts::discretize(s, 0, fam, 800);
    const auto cal = ts::calibrate_potential(s, 0, mu);
    EXPECT_LT(cal.drift, 1e-6);
    for (const ts::cplx z : {ts::cplx(2.0, 0.0), ts::cplx(-0.4, 0.3), ts::cplx(0.1, -1.0)})
        EXPECT_LT(ts::log_potential(s, 0, z, mu, cal).difference, 1e-5) << z;
}
