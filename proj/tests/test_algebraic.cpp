#include "support.hpp"

#include <gtest/gtest.h>

using namespace test_support;

namespace {

/// Oracle: moduli of the roots of A(z) - lambda B1(z) B2(z) from Eigen's companion eigenvalues, ascending.
std::vector<double> oracle_moduli(const ts::RationalSymbol& s, ts::cplx lambda) {
    ts::CVec c(s.A.size() > s.B.size() ? s.A.size() : s.B.size(), ts::cplx{});
    for (std::size_t i = 0; i < s.A.size(); ++i) c[i] += s.A[i];
    for (std::size_t i = 0; i < s.B.size(); ++i) c[i] -= lambda * s.B[i];
    while (std::abs(c.back()) == 0) c.pop_back();
    const auto n = static_cast<Eigen::Index>(c.size() - 1);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) C(i, i - 1) = 1;
    for (Eigen::Index i = 0; i < n; ++i) C(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    const Eigen::VectorXcd ev = C.eigenvalues();
    std::vector<double> out;
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(std::abs(ev(i)));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Algebraic, OrderedRootsMatchCompanionOracle) {
    for (const auto& name : suite()) {
        const auto s = load(name);
        for (const ts::cplx lambda : {ts::cplx(0.7, 0.3), ts::cplx(-1.2, 0.9), ts::cplx(2.5, -0.4)}) {
            const auto rs = ts::ordered_roots(s, lambda);
            ASSERT_EQ(rs.infinite_count, 0) << name;
            const auto ref = oracle_moduli(s, lambda);
            ASSERT_EQ(ref.size(), rs.roots.size()) << name;
            for (std::size_t j = 0; j < ref.size(); ++j)
                EXPECT_NEAR(std::abs(rs.roots[j]), ref[j], 1e-8 * (1 + ref[j])) << name << " j=" << j;
        }
    }
}

TEST(Algebraic, RootCountDropsAtLambda2) {
    const auto s = load("two_pole");
    const auto rs = ts::ordered_roots(s, {0.0, 0.0});
    EXPECT_EQ(rs.size(), s.p + s.q);
    EXPECT_EQ(rs.infinite_count, s.special.k2);
    EXPECT_FALSE(rs.root(2).is_finite());
}

TEST(Algebraic, TwoPoleMembershipGap) {
    const auto s = load("two_pole");
    for (const double x : {-0.8, -0.4, -0.1}) EXPECT_LT(std::abs(ts::membership_gap(s, {x, 0.0}, 0)), 1e-12) << x;
    for (const ts::cplx z : {ts::cplx(1.0, 0.0), ts::cplx(-0.4, 0.3), ts::cplx(-1.0, 0.0)})
        EXPECT_GT(ts::membership_gap(s, z, 0), 1e-3);
}

TEST(Algebraic, TwoPoleBranchPointsAreExact) {
    const auto s = load("two_pole");
    const auto bps = ts::branch_points(s);
    EXPECT_TRUE(bps.exact_discriminant);
    ASSERT_EQ(bps.points.size(), 2u);
    std::vector<double> xs;
    for (std::size_t i = 0; i < bps.points.size(); ++i) {
        ASSERT_TRUE(bps.exact[i].has_value());
        xs.push_back(ts::exact::to_double(*bps.exact[i]));
        EXPECT_EQ(bps.points[i].imag(), 0.0);
    }
    std::sort(xs.begin(), xs.end());
    EXPECT_EQ(*bps.exact[0] * *bps.exact[1], ts::Rational(0));
    EXPECT_NEAR(xs[0], -8.0 / 9.0, 1e-15);
    EXPECT_EQ(xs[1], 0.0);
}

TEST(Algebraic, PerturbedBranchPointsFollowClosedForm) {
    const double eps = 0.1;
    const auto s = load("perturbed_two_pole");
    auto pts = ts::branch_points(s).points;
    ASSERT_EQ(pts.size(), 2u);
    std::sort(pts.begin(), pts.end(), [](ts::cplx a, ts::cplx b) { return a.real() < b.real(); });
    const double root = 2 * std::sqrt(4 + 10 * eps + 4 * eps * eps);
    EXPECT_NEAR(pts[0].real(), (-4 - 5 * eps - root) / 9, 1e-12);
    EXPECT_NEAR(pts[1].real(), (-4 - 5 * eps + root) / 9, 1e-12);
}

TEST(Algebraic, BranchPointsAreDoubleRoots) {
    for (const auto& name : suite()) {
        const auto s = load(name);
        for (const auto& b : ts::branch_points(s).points) {
            const auto rs = ts::ordered_roots(s, b);
            if (rs.infinite_count >= 2) continue;  // the double root is at infinity
            double closest = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rs.finite_count(); ++i)
                for (int j = 0; j < i; ++j) closest = std::min(closest, std::abs(rs.roots[static_cast<std::size_t>(i)] - rs.roots[static_cast<std::size_t>(j)]));
            EXPECT_LT(closest, 1e-4) << name << " at " << b;
        }
    }
}

TEST(Algebraic, LogDerivativeMatchesFiniteDifference) {
    for (const auto& name : {"two_pole", "random_2_2", "rational_a"}) {
        const auto s = load(name);
        const ts::cplx lambda(0.37, 1.21), h(1e-6, 0.0);
        for (int k = s.k_min(); k <= s.k_max(); ++k) {
            const ts::cplx fd =
                (std::log(ts::w_k_value(s, lambda + h, k)) - std::log(ts::w_k_value(s, lambda - h, k))) / (2.0 * h);
            EXPECT_LT(std::abs(ts::w_k_log_derivative(s, lambda, k) - fd), 1e-6) << name << " k=" << k;
        }
    }
}

TEST(Algebraic, SquareRootBranchingAtTwoPoleEndpoints) {
    const auto s = load("two_pole");
    EXPECT_NEAR(ts::local_exponent(s, 0, {-8.0 / 9.0, 0.0}), 2.0, 0.05);
}
