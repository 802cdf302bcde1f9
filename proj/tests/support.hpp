#pragma once

#include "toeplitz_spectra/io.hpp"
#include "toeplitz_spectra/toeplitz_spectra.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace test_support {

namespace ts = toeplitz_spectra;

inline std::string symbol_path(const std::string& name) {
    return std::string(TOEPLITZ_SPECTRA_SYMBOLS_DIR) + "/" + name + ".json";
}

inline ts::RationalSymbol load(const std::string& name) { return ts::io::load_symbol(symbol_path(name)); }

/// Symbols used for suite-wide checks.
inline const std::vector<std::string>& suite() {
    static const std::vector<std::string> names{"two_pole",          "rational_a",   "rational_b",
                                                "banded_z_plus_inverse", "banded_p2_q1", "random_2_2",
                                                "perturbed_two_pole"};
    return names;
}

/// Symbols whose curves are all bounded at the default box.
inline const std::vector<std::string>& bounded_suite() {
    static const std::vector<std::string> names{"two_pole", "banded_z_plus_inverse", "perturbed_two_pole",
                                                "random_2_2"};
    return names;
}

inline ts::cplx horner(const ts::CVec& p, ts::cplx z) {
    ts::cplx v{};
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * z + *it;
    return v;
}

/// f(z) = A(z) / (B1(z) B2(z)) evaluated from the raw coefficient lists.
inline ts::cplx symbol_value(const ts::RationalSymbol& s, ts::cplx z) {
    return horner(s.A, z) / (horner(s.B1, z) * horner(s.B2, z));
}

/// Oracle: f_j by the trapezoid rule on the unit circle.
inline ts::cplx fourier_oracle(const ts::RationalSymbol& s, int j, int M = 4096) {
    ts::cplx acc{};
    for (int m = 0; m < M; ++m) {
        const ts::cplx z = std::polar(1.0, 2 * M_PI * m / M);
        acc += symbol_value(s, z) * std::pow(z, -j);
    }
    return acc / static_cast<double>(M);
}

/// Oracle: determinant through Eigen's partial-pivot LU.
inline ts::cplx det_oracle(const ts::ToeplitzMatrix& T) {
    const auto n = static_cast<Eigen::Index>(T.n);
    Eigen::MatrixXcd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) = T(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return M.partialPivLu().determinant();
}

/// Oracle: T_n(z^{-k}(f - lambda)) assembled entrywise from trapezoid Fourier coefficients.
inline ts::cplx det_from_oracle_coefficients(const ts::RationalSymbol& s, int k, int n, ts::cplx lambda) {
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int idx = i - j + k;
            M(i, j) = fourier_oracle(s, idx) - (idx == 0 ? lambda : ts::cplx{});
        }
    return M.partialPivLu().determinant();
}

/// Largest distance from any traced sample to the real segment [a, b].
inline double distance_to_segment(const ts::CurveFamily& fam, double a, double b) {
    double worst = 0;
    for (const auto& arc : fam.arcs)
        for (const auto& z : arc.points) {
            const double x = std::clamp(z.real(), a, b);
            worst = std::max(worst, std::abs(z - ts::cplx(x, 0)));
        }
    return worst;
}

/// Largest distance from an evenly spaced sampling of [a, b] to the traced samples.
inline double segment_to_curve(const ts::CurveFamily& fam, double a, double b, int samples = 2001) {
    ts::CVec seg;
    for (int i = 0; i < samples; ++i) seg.emplace_back(a + (b - a) * i / (samples - 1), 0.0);
    return ts::directed_hausdorff(seg, fam.arcs);
}

}  // namespace test_support
