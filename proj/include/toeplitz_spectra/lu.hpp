/**
 * @file lu.hpp
 * @brief Dense complex LU with partial pivoting, templated on the real type.
 *
 * Eigen covers double; this version also runs in Extended, which the n = 60
 * determinant interpolation needs.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"

#include <utility>
#include <vector>

namespace toeplitz_spectra {

/// Row-major square matrix.
template <class Real>
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<std::complex<Real>> data;

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t size) : n(size), data(size * size, std::complex<Real>(Real(0))) {}

    std::complex<Real>& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    const std::complex<Real>& operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// det(m) by Gaussian elimination with partial pivoting; m is consumed.
template <class Real>
std::complex<Real> determinant(DenseMatrix<Real> m) {
    using std::abs;
    const std::size_t n = m.n;
    std::complex<Real> det(Real(1));
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        Real best = abs(m(c, c));
        for (std::size_t r = c + 1; r < n; ++r) {
            const Real v = abs(m(r, c));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == Real(0)) return std::complex<Real>(Real(0));
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        const std::complex<Real> d = m(c, c);
        det *= d;
        for (std::size_t r = c + 1; r < n; ++r) {
            const std::complex<Real> f = m(r, c) / d;
            if (f == std::complex<Real>(Real(0))) continue;
            for (std::size_t j = c + 1; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

}  // namespace toeplitz_spectra
