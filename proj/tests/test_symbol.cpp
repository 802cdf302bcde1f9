#include "support.hpp"

#include <gtest/gtest.h>

using namespace test_support;
using ts::Rational;

TEST(Symbol, TwoPoleSpecialValuesAreExact) {
    const auto s = load("two_pole");
    EXPECT_EQ(s.q, 1);
    EXPECT_EQ(s.p, 1);
    ASSERT_TRUE(s.special.lambda1.is_finite());
    ASSERT_TRUE(s.special.lambda2.is_finite());
    EXPECT_EQ(s.special.lambda1.value, ts::cplx(0.5, 0.0));
    EXPECT_EQ(s.special.lambda2.value, ts::cplx(0.0, 0.0));
    EXPECT_EQ(s.special.k1, 1);
    EXPECT_EQ(s.special.k2, 2);
    EXPECT_EQ(s.masses.at(0).m1, Rational(0));
    EXPECT_EQ(s.masses.at(0).m2, Rational(1, 2));
    EXPECT_EQ(s.masses.at(0).m, Rational(1, 2));
}

TEST(Symbol, TwoPoleFourierCoefficientsAreExact) {
    const auto s = load("two_pole");
    const auto exact = ts::exact_fourier_coefficients(s, -1, 1);
    ASSERT_TRUE(exact.has_value());
    EXPECT_EQ((*exact)[0], Rational(-1, 3));
    EXPECT_EQ((*exact)[1], Rational(-1, 6));
    EXPECT_EQ((*exact)[2], Rational(-1, 12));
}

TEST(Symbol, PartialFractionCoefficientsMatchTrapezoidOracle) {
    for (const auto& name : suite()) {
        const auto s = load(name);
        const auto f = ts::fourier_coefficients(s, -12, 12);
        for (int j = -12; j <= 12; ++j)
            EXPECT_LT(std::abs(f[static_cast<std::size_t>(j + 12)] - fourier_oracle(s, j)), 1e-12) << name << " j=" << j;
    }
}

TEST(Symbol, ExactAndFloatingCoefficientsAgree) {
    const auto s = load("random_2_2");
    const auto exact = ts::exact_fourier_coefficients(s, -8, 8);
    ASSERT_TRUE(exact.has_value());
    const auto f = ts::fourier_coefficients(s, -8, 8);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i].real(), ts::exact::to_double((*exact)[i]), 1e-13);
}

TEST(Symbol, BandedMassTable) {
    const auto s = ts::parse_symbol({1.0, 0.5, 0.0, 0.3, 0.0, 1.0}, {0.0, 0.0, 1.0}, {1.0});
    ASSERT_EQ(s.q, 2);
    ASSERT_EQ(s.p, 3);
    EXPECT_FALSE(s.special.lambda1.is_finite());
    EXPECT_FALSE(s.special.lambda2.is_finite());
    EXPECT_EQ(s.special.k1, 2);
    EXPECT_EQ(s.special.k2, 3);
    for (int k = s.k_min(); k <= s.k_max(); ++k) {
        const Rational m1 = k < 0 ? Rational(-k, 2) : Rational(0);
        const Rational m2 = k > 0 ? Rational(k, 3) : Rational(0);
        EXPECT_EQ(s.masses.at(k).m1, m1) << k;
        EXPECT_EQ(s.masses.at(k).m2, m2) << k;
        EXPECT_EQ(s.masses.at(k).m, 1 - m1 - m2) << k;
    }
}

TEST(Symbol, TwoDenominatorExamplesReproduceTheirMassTables) {
    struct Expect {
        const char* name;
        int k1, k2;
        std::vector<Rational> m1, m2, m;
    };
    const std::vector<Expect> cases{
        {"rational_b", 3, 1,
         {Rational(2, 3), Rational(1, 3), 0, 0, 0},
         {0, 0, 0, 0, 0},
         {Rational(1, 3), Rational(2, 3), 1, 1, 1}},
        {"rational_a", 5, 3,
         {Rational(4, 5), Rational(3, 5), Rational(2, 5), Rational(1, 5), 0},
         {0, 0, 0, Rational(1, 3), Rational(2, 3)},
         {Rational(1, 5), Rational(2, 5), Rational(3, 5), Rational(7, 15), Rational(1, 3)}}};
    for (const auto& c : cases) {
        const auto s = load(c.name);
        ASSERT_EQ(s.q, 4) << c.name;
        ASSERT_EQ(s.p, 2) << c.name;
        EXPECT_EQ(s.special.k1, c.k1) << c.name;
        EXPECT_EQ(s.special.k2, c.k2) << c.name;
        for (int k = -3; k <= 1; ++k) {
            const auto i = static_cast<std::size_t>(k + 3);
            EXPECT_EQ(s.masses.at(k).m1, c.m1[i]) << c.name << " k=" << k;
            EXPECT_EQ(s.masses.at(k).m2, c.m2[i]) << c.name << " k=" << k;
            EXPECT_EQ(s.masses.at(k).m, c.m[i]) << c.name << " k=" << k;
        }
    }
}

TEST(Symbol, PerturbedSymbolLosesThePointMass) {
    const auto s = load("perturbed_two_pole");
    EXPECT_EQ(s.special.k1, 1);
    EXPECT_EQ(s.special.k2, 1);
    EXPECT_EQ(s.masses.at(0).m, Rational(1));
}

TEST(Symbol, MassesArePositiveAndSumToOne) {
    for (const auto& name : suite()) {
        const auto s = load(name);
        for (int k = s.k_min(); k <= s.k_max(); ++k) {
            const auto& r = s.masses.at(k);
            EXPECT_GT(r.m, 0) << name << " k=" << k;
            EXPECT_GE(r.m1, 0) << name;
            EXPECT_GE(r.m2, 0) << name;
            EXPECT_EQ(r.m1 + r.m2 + r.m, 1) << name;
        }
    }
}

TEST(Symbol, SplitDenominatorReproducesSymbolValues) {
    const ts::CVec num{1, 0, 1, 1, 0, 2, 2}, den{1, 0, 1, 1, 0, 1, 1};
    const auto s = ts::split_symbol(num, den);
    for (const double th : {0.1, 1.3, 2.9, 4.4}) {
        const ts::cplx z = std::polar(1.0, th);
        EXPECT_LT(std::abs(symbol_value(s, z) - horner(num, z) / horner(den, z)), 1e-12);
    }
}

TEST(Symbol, RejectsInvalidInput) {
    EXPECT_THROW(ts::parse_symbol({1.0}, {-1.0, 0.5}, {-2.0, 1.0}), ts::RootLocationError);
    EXPECT_THROW(ts::parse_symbol({1.0}, {-1.0, 2.0}, {-0.5, 1.0}), ts::RootLocationError);
    EXPECT_THROW(ts::parse_symbol({-1.0, 2.0}, {-1.0, 2.0}, {-2.0, 1.0}), ts::CommonRootError);
    EXPECT_THROW(ts::parse_symbol({}, {-1.0, 2.0}, {-2.0, 1.0}), ts::DegenerateError);
    EXPECT_THROW(ts::parse_symbol({1.0}, {1.0}, {-2.0, 1.0}), ts::DegenerateError);
    // f(z) = z^2 + z^{-2} has Fourier support {-2, 2}
    EXPECT_THROW(ts::parse_symbol({1.0, 0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, {1.0}), ts::GcdError);
}

TEST(Symbol, JsonLoaderAcceptsComplexCoefficients) {
    const auto j = nlohmann::json::parse(R"({"A": [[1, 0.5]], "B1": [-1, 2], "B2": [-2, 1]})");
    const auto s = ts::io::symbol_from_json(j);
    EXPECT_EQ(s.A[0], ts::cplx(1.0, 0.5));
    EXPECT_FALSE(s.real_coefficients());
    EXPECT_THROW(ts::io::symbol_from_json(nlohmann::json::parse(R"({"A": [1]})")), ts::ValidationError);
}
