/**
 * @file polynomial.hpp
 * @brief Dense univariate polynomials with complex coefficients.
 *
 * Coefficients are stored in ascending degree. Everything is templated on
 * the real type so the same code runs in double and in Extended.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

namespace toeplitz_spectra::poly {

template <class Real>
int degree(const Poly<Real>& p) {
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i] != std::complex<Real>(Real(0))) return static_cast<int>(i);
    }
    return -1;
}

/// Drops trailing coefficients that are exactly zero.
template <class Real>
Poly<Real> trimmed(Poly<Real> p) {
    while (!p.empty() && p.back() == std::complex<Real>(Real(0))) p.pop_back();
    return p;
}

template <class Real>
std::complex<Real> evaluate(const Poly<Real>& p, const std::complex<Real>& z) {
    std::complex<Real> acc(Real(0));
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
    return acc;
}

/// Value and first derivative by Horner's scheme.
template <class Real>
std::pair<std::complex<Real>, std::complex<Real>> evaluate_with_derivative(
    const Poly<Real>& p, const std::complex<Real>& z) {
    std::complex<Real> v(Real(0)), d(Real(0));
    for (std::size_t i = p.size(); i-- > 0;) {
        d = d * z + v;
        v = v * z + p[i];
    }
    return {v, d};
}

/// sum |p_i| |z|^i, the scale used by rounding-error bounds.
template <class Real>
Real magnitude_bound(const Poly<Real>& p, const Real& r) {
    using std::abs;
    Real acc(0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * r + abs(p[i]);
    return acc;
}

template <class Real>
Poly<Real> derivative(const Poly<Real>& p) {
    if (p.size() <= 1) return {};
    Poly<Real> d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * Real(static_cast<double>(i));
    return d;
}

template <class Real>
Poly<Real> multiply(const Poly<Real>& a, const Poly<Real>& b) {
    if (a.empty() || b.empty()) return {};
    Poly<Real> c(a.size() + b.size() - 1, std::complex<Real>(Real(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

template <class Real>
Poly<Real> add(const Poly<Real>& a, const Poly<Real>& b) {
    Poly<Real> c(std::max(a.size(), b.size()), std::complex<Real>(Real(0)));
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] += b[i];
    return c;
}

template <class Real>
Poly<Real> scale(Poly<Real> a, const std::complex<Real>& s) {
    for (auto& c : a) c *= s;
    return a;
}

/// Coefficients of p(x + shift) via repeated synthetic division.
template <class Real>
Poly<Real> taylor_shift(Poly<Real> p, const std::complex<Real>& shift) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = n - 1; j-- > i;) p[j] += shift * p[j + 1];
    return p;
}

/// Quotient and remainder of a / b; b must have a nonzero leading coefficient.
template <class Real>
std::pair<Poly<Real>, Poly<Real>> divide(Poly<Real> a, const Poly<Real>& b) {
    const int db = degree(b);
    const int da = degree(a);
    if (db < 0) return {{}, a};
    if (da < db) return {{std::complex<Real>(Real(0))}, a};
    Poly<Real> q(static_cast<std::size_t>(da - db + 1), std::complex<Real>(Real(0)));
    for (int i = da - db; i >= 0; --i) {
        const auto c = a[static_cast<std::size_t>(i + db)] / b[static_cast<std::size_t>(db)];
        q[static_cast<std::size_t>(i)] = c;
        for (int j = 0; j <= db; ++j) a[static_cast<std::size_t>(i + j)] -= c * b[static_cast<std::size_t>(j)];
    }
    a.resize(static_cast<std::size_t>(std::max(db, 1)));
    return {q, a};
}

/// Monic polynomial with the given roots (each listed with multiplicity).
template <class Real>
Poly<Real> from_roots(const std::vector<std::complex<Real>>& roots) {
    Poly<Real> p{std::complex<Real>(Real(1))};
    for (const auto& r : roots) p = multiply(p, Poly<Real>{-r, std::complex<Real>(Real(1))});
    return p;
}

template <class To, class From>
Poly<To> convert(const Poly<From>& p) {
    Poly<To> out;
    out.reserve(p.size());
    for (const auto& c : p) out.emplace_back(To(c.real()), To(c.imag()));
    return out;
}

}  // namespace toeplitz_spectra::poly
