#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace test_support;

namespace {

ts::cplx random_point(const ts::RationalSymbol& s, const ts::InterpolationCircle& c, const ts::BranchPointSet& bps,
                      std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const ts::cplx z = c.center + c.radius * std::sqrt(u(rng)) * std::polar(1.0, 2 * M_PI * u(rng));
        bool ok = true;
        for (const auto& e : {s.special.lambda1, s.special.lambda2})
            if (e.is_finite() && std::abs(z - e.value) < 1e-2) ok = false;
        for (const auto& b : bps.points)
            if (std::abs(z - b) < 1e-2) ok = false;
        if (ok) return z;
    }
}

int roots_inside_two_pole_segment(const ts::DeterminantPolynomial& P) {
    int inside = 0;
    for (const auto& z : P.roots)
        if (z.real() > -8.0 / 9.0 && z.real() < -1e-5 && std::abs(z.imag()) < 1e-6) ++inside;
    return inside;
}

}  // namespace

TEST(Matrices, TwoPoleMatrixEntries) {
    const auto T = ts::build(load("two_pole"), 4, 0);
    const double row0[] = {-1.0 / 6, -1.0 / 3, -1.0 / 6, -1.0 / 12};
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(T(0, j).real(), row0[j], 1e-15);
    EXPECT_NEAR(T(1, 0).real(), -1.0 / 12, 1e-15);
}

TEST(Matrices, DirectDeterminantMatchesOracle) {
    for (const auto& name : suite()) {
        const auto s = load(name);
        for (int k = s.k_min(); k <= s.k_max(); ++k)
            for (const ts::cplx lam : {ts::cplx(0.3, 0.2), ts::cplx(-1.1, 0.7)}) {
                const ts::cplx d = ts::direct_determinant(s, k, 6, lam);
                const ts::cplx o = det_from_oracle_coefficients(s, k, 6, lam);
                EXPECT_LT(std::abs(d - o), 1e-10 * std::max(1.0, std::abs(o))) << name << " k=" << k;
            }
    }
}

TEST(Matrices, TwoPoleSpectrumAtTwenty) {
    const auto s = load("two_pole");
    const auto P = ts::char_poly(s, 0, 20);
    EXPECT_FALSE(P.extended);
    EXPECT_EQ(P.degree, 20);
    EXPECT_EQ(P.multiplicity_at_center, 10);
    EXPECT_EQ(P.count_near({0.0, 0.0}, 1e-5), 10);
    EXPECT_EQ(roots_inside_two_pole_segment(P), 10);

    // independent route: generalized eigenvalues of the pencil
    auto ev = ts::pencil_eigenvalues(s, 0, 20);
    int inside = 0;
    for (const auto& z : ev)
        if (z.real() > -8.0 / 9.0 && z.real() < -1e-5 && std::abs(z.imag()) < 1e-6) ++inside;
    EXPECT_EQ(inside, 10);
    for (const auto& r : P.roots) {
        if (std::abs(r) < 1e-5) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& z : ev) best = std::min(best, std::abs(z - r));
        // roots next to the cluster at 0 are ill-conditioned
        EXPECT_LT(best, 1e-4) << r;
    }
}

TEST(Matrices, DayIdentityAcrossSuite) {
    std::mt19937_64 rng(11);
    for (const auto& name : suite()) {
        const auto s = load(name);
        const auto bps = ts::branch_points(s);
        const auto circle = ts::interpolation_circle(s, bps);
        for (int k = s.k_min(); k <= s.k_max(); ++k)
            for (int n = ts::day_min_size(s, k); n <= 8; ++n)
                for (int t = 0; t < 10; ++t) {
                    const ts::cplx lam = random_point(s, circle, bps, rng);
                    const auto day = ts::day_expansion(s, k, n, lam);
                    const ts::cplx det = det_oracle(ts::build(s, n, k, lam));
                    EXPECT_LT(std::abs(day.value - det) / std::abs(det), 1e-8) << name << " k=" << k << " n=" << n;
                    EXPECT_LT(day.w_form_error, 1e-8) << name;
                }
    }
}

TEST(Matrices, DayIdentityRejectsSizesBelowItsRange) {
    const auto s = load("rational_a");
    EXPECT_EQ(ts::day_min_size(s, -3), 3);
    EXPECT_THROW(ts::day_expansion(s, -3, 2, {0.3, 0.2}), ts::DegenerateError);
    EXPECT_THROW(ts::day_expansion(load("two_pole"), 0, 4, {0.5, 0.0}), ts::SpecialLambdaError);
}

TEST(Matrices, TwoPoleDivisibilityWithZeroConstant) {
    const auto s = load("two_pole");
    for (int n = 4; n <= 24; n += 2) {
        const auto r = ts::divisibility_report(s, 0, n);
        ASSERT_TRUE(r.multiplicity_lambda2.has_value());
        EXPECT_EQ(*r.multiplicity_lambda2, n / 2) << n;
        EXPECT_EQ(r.c_needed(), 0.0) << n;
    }
}

TEST(Matrices, DivisibilityConstantStaysBounded) {
    for (const auto& name : suite()) {
        const auto s = load(name);
        const auto circle = ts::interpolation_circle(s);
        double early = 0, late = 0;
        for (int k = s.k_min(); k <= s.k_max(); ++k)
            for (int n = 4; n <= 24; ++n) {
                const double c = ts::divisibility_report(s, k, n, circle).c_needed();
                (n <= 14 ? early : late) = std::max(n <= 14 ? early : late, c);
            }
        EXPECT_LE(late, early + 1.0) << name;
        EXPECT_LE(std::max(early, late), 6.0) << name;
    }
}

TEST(Matrices, DoubleMultiplicityArtifactsEscalateToExtended) {
    const auto s = load("rational_b");
    const auto r = ts::divisibility_report(s, -1, 24);
    ASSERT_TRUE(r.multiplicity_lambda1.has_value());
    EXPECT_EQ(*r.multiplicity_lambda1, 0);
    EXPECT_EQ(*r.multiplicity_lambda2, 0);
}

TEST(Matrices, BandedReductionCornerIsConstant) {
    for (const auto& name : suite()) {
        const auto s = load(name);
        for (int k = s.k_min(); k <= s.k_max(); ++k) {
            std::vector<int> corners;
            for (const int n : {8, 16, 32}) {
                const auto b = ts::banded_reduction_residual(s, k, n, {0.3, 0.2});
                corners.push_back(b.corner);
                EXPECT_LT(b.det_relative_error, 1e-8) << name << " k=" << k << " n=" << n;
            }
            EXPECT_EQ(corners[0], corners[1]) << name << " k=" << k;
            EXPECT_EQ(corners[1], corners[2]) << name << " k=" << k;
            EXPECT_LE(corners[0], s.p + s.q) << name;
        }
    }
}

TEST(Matrices, BandedSymbolNeedsNoCorner) {
    const auto b = ts::banded_reduction_residual(load("banded_p2_q1"), 0, 16, {0.4, -0.1});
    EXPECT_EQ(b.corner, 0);
}

TEST(Matrices, EmpiricalCauchyConverges) {
    const ts::CVec points{{1.0, 1.0}, {-0.4, 0.5}, {2.5, 0.0}, {-3.0, 0.2}, {0.3, -0.6}};
    for (const auto& name : {"two_pole", "banded_z_plus_inverse"}) {
        const auto s = load(name);
        const auto P10 = ts::char_poly(s, 0, 10), P40 = ts::char_poly(s, 0, 40);
        for (const auto& z : points) {
            const ts::cplx target = ts::cauchy_target(s, 0, z);
            const double e10 = std::abs(ts::empirical_cauchy(P10, z) - target);
            const double e40 = std::abs(ts::empirical_cauchy(P40, z) - target);
            EXPECT_LT(e40, 0.02) << name << " " << z;
            EXPECT_LT(e40, e10) << name << " " << z;
        }
    }
}

TEST(Matrices, BandedEigenvaluesAreCosines) {
    const int n = 16;
    const auto P = ts::char_poly(load("banded_z_plus_inverse"), 0, n);
    auto roots = P.roots;
    std::sort(roots.begin(), roots.end(), [](ts::cplx a, ts::cplx b) { return a.real() < b.real(); });
    ASSERT_EQ(static_cast<int>(roots.size()), n);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(roots[static_cast<std::size_t>(j)].real(), -2 * std::cos((j + 1) * M_PI / (n + 1)), 1e-8);
}
