/**
 * @file symbol.hpp
 * @brief Rational symbols f = A / (B1 B2), their Fourier coefficients,
 * pencil coefficients, special values and mass tables.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/exact.hpp"
#include "toeplitz_spectra/polynomial.hpp"
#include "toeplitz_spectra/roots.hpp"

#include <numeric>
#include <optional>
#include <string>

namespace toeplitz_spectra {

using exact::Rational;

struct SymbolOptions {
    /// Roots of B1 must satisfy |z| < 1 - tol, roots of B2 |z| > 1 + tol.
    double root_tolerance = 1e-9;
    /// Fourier indices |k| <= p + q + deg B2 + gcd_window_extra enter the gcd check.
    int gcd_window_extra = 8;
    /// Relative size below which a Fourier coefficient counts as zero.
    double zero_coefficient = 1e-13;
};

/// Coefficients a_k, b_k of A and B1*B2 aligned to k = -q..p.
struct PencilCoefficients {
    int q = 0;
    int p = 0;
    CVec a;
    CVec b;

    cplx a_at(int k) const { return a[static_cast<std::size_t>(k + q)]; }
    cplx b_at(int k) const { return b[static_cast<std::size_t>(k + q)]; }
};

struct SpecialValues {
    ExtendedComplex lambda1;
    ExtendedComplex lambda2;
    int k1 = 1;
    int k2 = 1;
};

struct MassRow {
    int k = 0;
    Rational m1;
    Rational m2;
    Rational m;
};

/// Point-mass weights m_{1,k}, m_{2,k} and continuous masses m_k for k = -q..p.
struct MassTable {
    int q = 0;
    int p = 0;
    std::vector<MassRow> rows;

    const MassRow& at(int k) const { return rows.at(static_cast<std::size_t>(k + q)); }
    double m1(int k) const { return static_cast<double>(at(k).m1); }
    double m2(int k) const { return static_cast<double>(at(k).m2); }
    double m(int k) const { return static_cast<double>(at(k).m); }
};

/// A pole of f with its multiplicity.
struct Pole {
    cplx location;
    int multiplicity = 1;
};

/// A validated rational symbol. Build it with parse_symbol.
struct RationalSymbol {
    CVec A;
    CVec B1;
    CVec B2;
    /// B1*B2, or the denominator exactly as given when the symbol was split from one.
    CVec B;
    int p = 0;
    int q = 0;
    std::vector<Pole> inner_poles;
    std::vector<Pole> outer_poles;
    PencilCoefficients pencil;
    SpecialValues special;
    MassTable masses;

    bool real_coefficients() const {
        auto real = [](const CVec& v) {
            return std::all_of(v.begin(), v.end(), [](const cplx& c) { return c.imag() == 0.0; });
        };
        return real(A) && real(B1) && real(B2) && real(B);
    }
    /// Leading coefficient of B1.
    cplx c1() const { return B1.back(); }
    /// Leading coefficient of B2.
    cplx c2() const { return B2.back(); }
    cplx b2_at_zero() const { return B2.front(); }
    /// Upper index bound for the generalized spectra: k in -q+1..p-1.
    int k_min() const { return -q + 1; }
    int k_max() const { return p - 1; }
};

namespace detail {

inline std::vector<Pole> cluster_poles(const CVec& roots) {
    std::vector<Pole> out;
    for (const auto& c : cluster_roots(roots, 1e-6)) out.push_back({c.center, c.multiplicity});
    return out;
}

/// Pole-by-pole principal parts: coefficient of 1/(z - beta)^m for m = 1..M.
inline CVec principal_part(const CVec& A, const std::vector<Pole>& all_poles, std::size_t index, cplx lead) {
    const Pole& pole = all_poles[index];
    const int M = pole.multiplicity;
    // g(z) = A(z) / (lead * prod_{other poles} (z - r)^mult), expanded at the pole
    CVec num = poly::taylor_shift(A, pole.location);
    num.resize(static_cast<std::size_t>(std::max<int>(M, static_cast<int>(num.size()))), cplx{});
    CVec den{lead};
    for (std::size_t i = 0; i < all_poles.size(); ++i) {
        if (i == index) continue;
        const Pole& o = all_poles[i];
        const CVec factor{pole.location - o.location, cplx{1.0}};
        for (int r = 0; r < o.multiplicity; ++r) den = poly::multiply(den, factor);
    }
    CVec g(static_cast<std::size_t>(M));
    for (std::size_t i = 0; i < g.size(); ++i) {
        cplx acc = num[i];
        for (std::size_t j = 1; j <= i && j < den.size(); ++j) acc -= den[j] * g[i - j];
        g[i] = acc / den[0];
    }
    // coefficient of (z - beta)^{-m} is g_{M - m}
    CVec c(static_cast<std::size_t>(M) + 1);
    for (int m = 1; m <= M; ++m) c[static_cast<std::size_t>(m)] = g[static_cast<std::size_t>(M - m)];
    return c;
}

inline int pencil_run(const PencilCoefficients& pc, const ExtendedComplex& lam, bool from_low) {
    const int N = pc.p + pc.q;
    double scale = 0;
    for (int i = 0; i <= N; ++i)
        scale = std::max(scale, std::abs(pc.a[static_cast<std::size_t>(i)]) +
                                    (lam.infinite ? 0.0 : std::abs(lam.value)) * std::abs(pc.b[static_cast<std::size_t>(i)]));
    int run = 0;
    for (int j = 0; j <= N; ++j) {
        const std::size_t i = static_cast<std::size_t>(from_low ? j : N - j);
        double v;
        double ref;
        if (lam.infinite) {
            v = std::abs(pc.b[i]);
            double bmax = 0;
            for (const auto& b : pc.b) bmax = std::max(bmax, std::abs(b));
            ref = bmax;
        } else {
            v = std::abs(pc.a[i] - lam.value * pc.b[i]);
            ref = scale;
        }
        if (v <= 1e-12 * ref) ++run;
        else break;
    }
    return run;
}

}  // namespace detail

/// Exact mass table from (q, p, k1, k2); boundary rows hold m = 0.
inline MassTable mass_table(int q, int p, int k1, int k2) {
    MassTable t;
    t.q = q;
    t.p = p;
    for (int k = -q; k <= p; ++k) {
        MassRow r;
        r.k = k;
        const Rational a = 1 - Rational(q + k, k1);
        const Rational b = 1 - Rational(p - k, k2);
        r.m1 = a > 0 ? a : Rational(0);
        r.m2 = b > 0 ? b : Rational(0);
        r.m = 1 - r.m1 - r.m2;
        if (k == -q || k == p) r.m = 0;
        t.rows.push_back(r);
    }
    return t;
}

inline MassTable mass_table(const RationalSymbol& s) {
    return mass_table(s.q, s.p, s.special.k1, s.special.k2);
}

/// Pencil coefficients of A and B.
inline PencilCoefficients pencil_coefficients(const RationalSymbol& s) { return s.pencil; }

inline SpecialValues special_values(const RationalSymbol& s) { return s.special; }

/// Fourier coefficients by partial fractions, k in [k_min, k_max].
inline CVec fourier_coefficients(const RationalSymbol& s, int k_min, int k_max) {
    CVec out;
    if (k_max < k_min) return out;
    out.assign(static_cast<std::size_t>(k_max - k_min + 1), cplx{});
    std::vector<Pole> all = s.inner_poles;
    all.insert(all.end(), s.outer_poles.begin(), s.outer_poles.end());
    const cplx lead = s.B.back();
    // polynomial part of A / B
    const int dA = poly::degree(s.A), dB = poly::degree(s.B);
    if (dA >= dB) {
        const auto [quot, rem] = poly::divide(s.A, s.B);
        (void)rem;
        for (std::size_t i = 0; i < quot.size(); ++i) {
            const int k = static_cast<int>(i);
            if (k >= k_min && k <= k_max) out[static_cast<std::size_t>(k - k_min)] += quot[i];
        }
    }
    for (std::size_t idx = 0; idx < all.size(); ++idx) {
        const Pole& pole = all[idx];
        const CVec c = detail::principal_part(s.A, all, idx, lead);
        const bool inside = std::abs(pole.location) < 1.0;
        for (int k = k_min; k <= k_max; ++k) {
            cplx acc{};
            for (int m = 1; m <= pole.multiplicity; ++m) {
                const cplx cm = c[static_cast<std::size_t>(m)];
                if (inside) {
                    // (z - beta)^{-m} = sum_j C(m+j-1, j) beta^j z^{-m-j}
                    if (k <= -m) {
                        const int j = -k - m;
                        acc += cm * binomial<double>(m + j - 1, j) * ipow(pole.location, j);
                    }
                } else if (k >= 0) {
                    // (z - gamma)^{-m} = (-1)^m sum_j C(m+j-1, j) gamma^{-m-j} z^j
                    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                    acc += cm * sign * binomial<double>(m + k - 1, k) * ipow(pole.location, -(m + k));
                }
            }
            out[static_cast<std::size_t>(k - k_min)] += acc;
        }
    }
    return out;
}

/// Fourier coefficients as exact rationals; available for real-coefficient symbols.
inline std::optional<std::vector<Rational>> exact_fourier_coefficients(const RationalSymbol& s, int k_min,
                                                                       int k_max) {
    const auto a = exact::from_real(s.A);
    const auto b1 = exact::from_real(s.B1);
    const auto b2 = exact::from_real(s.B2);
    if (!a || !b1 || !b2) return std::nullopt;
    return exact::laurent_coefficients(*a, *b1, *b2, k_min, k_max);
}

/// Trapezoidal rule on the unit circle with M nodes.
inline CVec quadrature_fourier_coefficients(const RationalSymbol& s, int k_min, int k_max, int M) {
    CVec vals(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        const cplx z = std::polar(1.0, 2 * M_PI * j / M);
        vals[static_cast<std::size_t>(j)] = poly::evaluate(s.A, z) / poly::evaluate(s.B, z);
    }
    CVec out;
    for (int k = k_min; k <= k_max; ++k) {
        cplx acc{};
        for (int j = 0; j < M; ++j) acc += vals[static_cast<std::size_t>(j)] * std::polar(1.0, -2 * M_PI * j * k / M);
        out.push_back(acc / static_cast<double>(M));
    }
    return out;
}

/**
 * Validates and builds a symbol.
 *
 * `denominator`, if given, is used for the pencil instead of the product
 * B1*B2 (it must equal that product up to rounding).
 */
inline RationalSymbol parse_symbol(CVec a, CVec b1, CVec b2, const SymbolOptions& opt = {},
                                   std::optional<CVec> denominator = std::nullopt) {
    if (a.empty() || b1.empty() || b2.empty()) throw DegenerateError("coefficient lists must be nonempty");
    if (a.back() == cplx{} || b1.back() == cplx{} || b2.back() == cplx{})
        throw DegenerateError("leading coefficients must be nonzero");
    RationalSymbol s;
    s.A = std::move(a);
    s.B1 = std::move(b1);
    s.B2 = std::move(b2);
    s.B = denominator ? poly::trimmed(*denominator) : poly::multiply(s.B1, s.B2);
    s.q = poly::degree(s.B1);
    const int dA = poly::degree(s.A);
    const int dB2 = poly::degree(s.B2);
    s.p = std::max(dA, s.q + dB2) - s.q;
    if (s.q < 1) throw DegenerateError("q = deg B1 must be at least 1");
    if (s.p < 1) throw DegenerateError("p must be at least 1");

    const CVec r1 = polynomial_roots<double>(s.B1);
    const CVec r2 = polynomial_roots<double>(s.B2);
    for (const auto& r : r1)
        if (std::abs(r) >= 1.0 - opt.root_tolerance)
            throw RootLocationError("B1 has a root of modulus " + std::to_string(std::abs(r)) + " (must be < 1)");
    for (const auto& r : r2)
        if (std::abs(r) <= 1.0 + opt.root_tolerance)
            throw RootLocationError("B2 has a root of modulus " + std::to_string(std::abs(r)) + " (must be > 1)");
    const CVec ra = polynomial_roots<double>(s.A);
    for (const auto& x : ra) {
        for (const auto& list : {&r1, &r2})
            for (const auto& y : *list)
                if (std::abs(x - y) <= 1e-9 * (1.0 + std::abs(y)))
                    throw CommonRootError("A vanishes at the pole " + std::to_string(y.real()) + "+" +
                                          std::to_string(y.imag()) + "i");
    }
    s.inner_poles = detail::cluster_poles(r1);
    s.outer_poles = detail::cluster_poles(r2);

    const int N = s.p + s.q;
    s.pencil.q = s.q;
    s.pencil.p = s.p;
    s.pencil.a.assign(static_cast<std::size_t>(N + 1), cplx{});
    s.pencil.b.assign(static_cast<std::size_t>(N + 1), cplx{});
    for (std::size_t i = 0; i < s.A.size() && i <= static_cast<std::size_t>(N); ++i) s.pencil.a[i] = s.A[i];
    for (std::size_t i = 0; i < s.B.size() && i <= static_cast<std::size_t>(N); ++i) s.pencil.b[i] = s.B[i];

    const cplx a_lo = s.pencil.a.front(), b_lo = s.pencil.b.front();
    const cplx a_hi = s.pencil.a.back(), b_hi = s.pencil.b.back();
    s.special.lambda1 = b_lo == cplx{} ? ExtendedComplex::infinity() : ExtendedComplex::finite(a_lo / b_lo);
    s.special.lambda2 = b_hi == cplx{} ? ExtendedComplex::infinity() : ExtendedComplex::finite(a_hi / b_hi);
    // exact quotients when the data are real
    if (s.real_coefficients()) {
        if (s.special.lambda1.is_finite())
            s.special.lambda1.value = static_cast<double>(Rational(a_lo.real()) / Rational(b_lo.real()));
        if (s.special.lambda2.is_finite())
            s.special.lambda2.value = static_cast<double>(Rational(a_hi.real()) / Rational(b_hi.real()));
    }
    s.special.k1 = std::max(1, detail::pencil_run(s.pencil, s.special.lambda1, true));
    s.special.k2 = std::max(1, detail::pencil_run(s.pencil, s.special.lambda2, false));
    if (s.special.k1 >= N && s.special.k2 >= N)
        throw InternalInconsistency("k1 and k2 both equal p + q");
    s.special.k1 = std::min(s.special.k1, N);
    s.special.k2 = std::min(s.special.k2, N);
    s.masses = mass_table(s);

    // gcd of the indices carrying nonzero Fourier coefficients
    const int W = s.p + s.q + dB2 + opt.gcd_window_extra;
    const CVec f = fourier_coefficients(s, -W, W);
    double fmax = 0;
    for (const auto& c : f) fmax = std::max(fmax, std::abs(c));
    int g = 0;
    for (int k = -W; k <= W; ++k)
        if (k != 0 && std::abs(f[static_cast<std::size_t>(k + W)]) > opt.zero_coefficient * fmax) g = std::gcd(g, std::abs(k));
    if (g != 1) throw GcdError("Fourier support has gcd " + std::to_string(g) + " on |k| <= " + std::to_string(W));
    return s;
}

/**
 * Builds a symbol from A / B, splitting B by root modulus: B1 collects the
 * roots inside the unit circle (monic), B2 the rest times the leading
 * coefficient of B.
 */
inline RationalSymbol split_symbol(const CVec& numerator, const CVec& denominator, const SymbolOptions& opt = {}) {
    const CVec B = poly::trimmed(denominator);
    if (B.empty()) throw DegenerateError("denominator is zero");
    const CVec roots = polynomial_roots<double>(B);
    CVec inner, outer;
    for (const auto& r : roots) {
        const double m = std::abs(r);
        if (std::abs(m - 1.0) <= opt.root_tolerance) throw RootLocationError("denominator has a root on the unit circle");
        (m < 1.0 ? inner : outer).push_back(r);
    }
    const bool real = std::all_of(B.begin(), B.end(), [](const cplx& c) { return c.imag() == 0.0; });
    auto clean = [&](CVec p) {
        if (real)
            for (auto& c : p) c.imag(0.0);
        return p;
    };
    CVec b1 = clean(poly::from_roots(inner));
    CVec b2 = clean(poly::scale(poly::from_roots(outer), B.back()));
    return parse_symbol(numerator, std::move(b1), std::move(b2), opt, B);
}

}  // namespace toeplitz_spectra
