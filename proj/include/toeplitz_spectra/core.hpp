/**
 * @file core.hpp
 * @brief Scalar types, the extended precision type and small numeric helpers.
 */
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdio>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace toeplitz_spectra {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// 50 decimal digits, i.e. a 166-bit significand.
using Extended = boost::multiprecision::cpp_bin_float_50;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
using Poly = std::vector<std::complex<Real>>;

template <class Real>
inline Real machine_epsilon() {
    return std::numeric_limits<Real>::epsilon();
}

template <class Real>
inline double to_double(const Real& x) {
    return static_cast<double>(x);
}

template <class Real>
inline cplx to_cplx(const std::complex<Real>& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <class Real>
inline std::complex<Real> from_cplx(const cplx& z) {
    return {Real(z.real()), Real(z.imag())};
}

template <class Real>
inline Real real_pi() {
    if constexpr (std::is_floating_point_v<Real>) {
        return static_cast<Real>(M_PI);
    } else {
        return boost::math::constants::pi<Real>();
    }
}

/// e^{i theta} in the working precision.
template <class Real>
inline std::complex<Real> unit_phase(const Real& theta) {
    using std::cos;
    using std::sin;
    return {cos(theta), sin(theta)};
}

/// Three significant digits, for error messages.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

template <class Real>
inline Real abs_value(const std::complex<Real>& z) {
    using std::abs;
    return abs(z);
}

/// z^e for an integer exponent by repeated squaring (negative e allowed).
template <class Real>
std::complex<Real> ipow(std::complex<Real> z, long long e) {
    if (e < 0) {
        return std::complex<Real>(Real(1)) / ipow(z, -e);
    }
    std::complex<Real> result(Real(1));
    while (e > 0) {
        if (e & 1) result *= z;
        z *= z;
        e >>= 1;
    }
    return result;
}

/// Binomial coefficient C(n, k) as a floating value, 0 <= k <= n.
template <class Real>
Real binomial(long long n, long long k) {
    if (k < 0 || k > n) return Real(0);
    if (k > n - k) k = n - k;
    Real r(1);
    for (long long i = 1; i <= k; ++i) {
        r *= Real(n - k + i);
        r /= Real(i);
    }
    return r;
}

/// A point of the extended complex plane C ∪ {∞}.
struct ExtendedComplex {
    cplx value{};
    bool infinite = false;

    static ExtendedComplex infinity() { return {cplx{}, true}; }
    static ExtendedComplex finite(cplx z) { return {z, false}; }

    bool is_finite() const { return !infinite; }
    double modulus() const {
        return infinite ? std::numeric_limits<double>::infinity() : std::abs(value);
    }
    friend bool operator==(const ExtendedComplex& a, const ExtendedComplex& b) {
        return a.infinite == b.infinite && (a.infinite || a.value == b.value);
    }
};

/// Axis-aligned rectangle in the complex plane.
struct Box {
    double re_min = -1, re_max = 1, im_min = -1, im_max = 1;

    static Box centered(cplx c, double half_width) {
        return {c.real() - half_width, c.real() + half_width, c.imag() - half_width,
                c.imag() + half_width};
    }
    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    cplx center() const { return {(re_min + re_max) / 2, (im_min + im_max) / 2}; }
    bool contains(cplx z) const {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
               z.imag() <= im_max;
    }
    Box expanded(double factor) const {
        const cplx c = center();
        const double hw = width() * factor / 2, hh = height() * factor / 2;
        return {c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh};
    }
};

}  // namespace toeplitz_spectra
