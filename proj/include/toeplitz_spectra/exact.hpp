/**
 * @file exact.hpp
 * @brief Exact rational polynomial arithmetic.
 *
 * Used when a symbol has real coefficients: every double is a dyadic
 * rational, so discriminants, Laurent coefficients and branch-point checks
 * can be carried out without rounding.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace toeplitz_spectra::exact {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;
/// Ascending coefficients.
using RPoly = std::vector<Rational>;

inline RPoly trimmed(RPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

inline int degree(const RPoly& p) {
    for (std::size_t i = p.size(); i-- > 0;)
        if (p[i] != 0) return static_cast<int>(i);
    return -1;
}

/// The exact rational value of each coefficient, or nothing if any is non-real.
inline std::optional<RPoly> from_real(const CVec& p) {
    RPoly out;
    out.reserve(p.size());
    for (const auto& c : p) {
        if (c.imag() != 0.0 || !std::isfinite(c.real())) return std::nullopt;
        out.emplace_back(c.real());
    }
    return out;
}

inline Rational evaluate(const RPoly& p, const Rational& x) {
    Rational acc = 0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline RPoly multiply(const RPoly& a, const RPoly& b) {
    if (a.empty() || b.empty()) return {};
    RPoly c(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return trimmed(std::move(c));
}

inline RPoly subtract(const RPoly& a, const RPoly& b) {
    RPoly c(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
    return trimmed(std::move(c));
}

/// Quotient and remainder; b must be nonzero.
inline std::pair<RPoly, RPoly> divide(RPoly a, const RPoly& b) {
    const int db = degree(b);
    if (db < 0) throw InternalInconsistency("division by the zero polynomial");
    a = trimmed(std::move(a));
    const int da = degree(a);
    if (da < db) return {{}, a};
    RPoly q(static_cast<std::size_t>(da - db + 1), Rational(0));
    for (int i = da - db; i >= 0; --i) {
        const Rational c = a[static_cast<std::size_t>(i + db)] / b[static_cast<std::size_t>(db)];
        q[static_cast<std::size_t>(i)] = c;
        if (c == 0) continue;
        for (int j = 0; j <= db; ++j) a[static_cast<std::size_t>(i + j)] -= c * b[static_cast<std::size_t>(j)];
    }
    a.resize(static_cast<std::size_t>(db));
    return {trimmed(std::move(q)), trimmed(std::move(a))};
}

/// s, t with s*a + t*b = gcd(a, b), the gcd normalized to be monic.
struct Bezout {
    RPoly gcd, s, t;
};

inline Bezout extended_gcd(const RPoly& a, const RPoly& b) {
    RPoly r0 = trimmed(a), r1 = trimmed(b);
    RPoly s0{1}, s1{}, t0{}, t1{1};
    while (degree(r1) >= 0) {
        auto [q, r] = divide(r0, r1);
        RPoly s2 = subtract(s0, multiply(q, s1));
        RPoly t2 = subtract(t0, multiply(q, t1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    const Rational lead = r0.empty() ? Rational(1) : r0.back();
    for (auto& c : r0) c /= lead;
    for (auto& c : s0) c /= lead;
    for (auto& c : t0) c /= lead;
    return {r0, s0, t0};
}

/// First `count` coefficients of the power series num/den, den(0) != 0.
inline std::vector<Rational> series_divide(const RPoly& num, const RPoly& den, std::size_t count) {
    std::vector<Rational> out(count, Rational(0));
    for (std::size_t i = 0; i < count; ++i) {
        Rational acc = i < num.size() ? num[i] : Rational(0);
        for (std::size_t j = 1; j <= i && j < den.size(); ++j) acc -= den[j] * out[i - j];
        out[i] = acc / den[0];
    }
    return out;
}

/**
 * Laurent coefficients f_k, k in [k_min, k_max], of a/(b1*b2) on the annulus
 * separating the roots of b1 (inside) from those of b2 (outside).
 *
 * Splits a = u*b1 + v*b2 with deg v < deg b1, so that f = u/b2 + v/b1 where
 * u/b2 has only nonnegative powers and v/b1 only negative ones.
 */
inline std::vector<Rational> laurent_coefficients(const RPoly& a, const RPoly& b1, const RPoly& b2, int k_min,
                                                  int k_max) {
    const Bezout bz = extended_gcd(b1, b2);
    if (degree(bz.gcd) != 0) throw CommonRootError("B1 and B2 share a root");
    RPoly v = divide(multiply(a, bz.t), b1).second;
    auto [u, rem] = divide(subtract(a, multiply(v, b2)), b1);
    if (degree(rem) >= 0) throw InternalInconsistency("partial fraction split left a remainder");

    std::vector<Rational> out;
    if (k_max < k_min) return out;
    out.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    std::vector<Rational> pos, neg;
    if (k_max >= 0) pos = series_divide(u, trimmed(b2), static_cast<std::size_t>(k_max + 1));
    if (k_min < 0) {
        const RPoly b1t = trimmed(b1);
        const int q = degree(b1t);
        const RPoly b1_rev(b1t.rbegin(), b1t.rend());
        RPoly v_rev(static_cast<std::size_t>(q), Rational(0));
        for (std::size_t i = 0; i < v.size(); ++i) v_rev[static_cast<std::size_t>(q) - 1 - i] = v[i];
        neg = series_divide(v_rev, b1_rev, static_cast<std::size_t>(-k_min));
    }
    for (int k = k_min; k <= k_max; ++k) out.push_back(k >= 0 ? pos[static_cast<std::size_t>(k)] : neg[static_cast<std::size_t>(-k - 1)]);
    return out;
}

/// Determinant by Gaussian elimination over Q.
inline Rational determinant(std::vector<std::vector<Rational>> m) {
    const std::size_t n = m.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            const Rational f = m[r][c] / m[c][c];
            for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return det;
}

/**
 * Sylvester matrix of a (formal degree da) and b (formal degree db), so that
 * leading coefficients are allowed to vanish.
 */
template <class Field>
std::vector<std::vector<Field>> sylvester_matrix(const std::vector<Field>& a, int da, const std::vector<Field>& b,
                                                 int db) {
    const int n = da + db;
    std::vector<std::vector<Field>> s(static_cast<std::size_t>(n), std::vector<Field>(static_cast<std::size_t>(n), Field(0)));
    auto coeff = [](const std::vector<Field>& p, int i) { return i >= 0 && i < static_cast<int>(p.size()) ? p[static_cast<std::size_t>(i)] : Field(0); };
    for (int r = 0; r < db; ++r)
        for (int j = 0; j <= da; ++j) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + j)] = coeff(a, da - j);
    for (int r = 0; r < da; ++r)
        for (int j = 0; j <= db; ++j) s[static_cast<std::size_t>(db + r)][static_cast<std::size_t>(r + j)] = coeff(b, db - j);
    return s;
}

/// Polynomial through (x_i, y_i) in the monomial basis, via Newton divided differences.
inline RPoly interpolate(const std::vector<Rational>& x, std::vector<Rational> y) {
    const std::size_t n = x.size();
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) {
            y[i] = (y[i] - y[i - 1]) / (x[i] - x[i - j]);
            if (i == j) break;
        }
    RPoly p{y[n - 1]};
    for (std::size_t i = n - 1; i-- > 0;) {
        RPoly next(p.size() + 1, Rational(0));
        for (std::size_t k = 0; k < p.size(); ++k) {
            next[k + 1] += p[k];
            next[k] -= x[i] * p[k];
        }
        next[0] += y[i];
        p = std::move(next);
    }
    return trimmed(std::move(p));
}

/// Best rational approximation with denominator at most max_den (continued fractions).
inline Rational best_rational(double x, long long max_den) {
    const Rational target(x);
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    Rational rest = target;
    for (int it = 0; it < 64; ++it) {
        Integer a = numerator(rest) / denominator(rest);
        if (rest < 0 && a * denominator(rest) != numerator(rest)) a -= 1;
        const Integer h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        const Rational frac = rest - Rational(a);
        if (frac == 0) break;
        rest = 1 / frac;
    }
    return Rational(h1, k1);
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace toeplitz_spectra::exact
