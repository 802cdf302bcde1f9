/**
 * @file roots.hpp
 * @brief Simultaneous polynomial root finding (Aberth–Ehrlich) and root clustering.
 *
 * Initial approximations come from the upper convex hull of (i, log|a_i|)
 * (the Newton polygon), which places starting circles at the right moduli
 * even when roots span many orders of magnitude. In double precision a
 * companion-matrix eigensolve is the fallback initialization; in extended
 * precision the double-precision roots seed the iteration.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace toeplitz_spectra {

namespace detail {

/// Newton polygon starting points for a polynomial with a_0 != 0 and a_d != 0.
template <class Real>
std::vector<std::complex<Real>> newton_polygon_start(const Poly<Real>& p) {
    using std::abs;
    using std::log;
    using std::exp;
    const int d = static_cast<int>(p.size()) - 1;
    std::vector<double> lg(p.size());
    for (int i = 0; i <= d; ++i) {
        const Real m = abs(p[static_cast<std::size_t>(i)]);
        lg[static_cast<std::size_t>(i)] =
            m == Real(0) ? -std::numeric_limits<double>::infinity() : static_cast<double>(log(m));
    }
    // upper hull of the points (i, lg[i])
    std::vector<int> hull;
    for (int i = 0; i <= d; ++i) {
        if (!std::isfinite(lg[static_cast<std::size_t>(i)])) continue;
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull.back();
            const double cross = (b - a) * (lg[static_cast<std::size_t>(i)] - lg[static_cast<std::size_t>(a)]) -
                                 (i - a) * (lg[static_cast<std::size_t>(b)] - lg[static_cast<std::size_t>(a)]);
            if (cross >= 0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    std::vector<std::complex<Real>> z;
    z.reserve(static_cast<std::size_t>(d));
    const double two_pi = 2 * M_PI;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const int i = hull[s], j = hull[s + 1];
        const int count = j - i;
        const double log_r = (lg[static_cast<std::size_t>(i)] - lg[static_cast<std::size_t>(j)]) / count;
        const Real r = exp(Real(log_r));
        const double offset = 0.7 + 1.3 * static_cast<double>(s);
        for (int m = 0; m < count; ++m) {
            const double th = two_pi * m / count + offset + 0.1 / count;
            z.push_back(r * std::complex<Real>(Real(std::cos(th)), Real(std::sin(th))));
        }
    }
    return z;
}

/// Newton ratio p/p' with reversal for |z| > 1, plus a rounding bound test.
template <class Real>
struct NewtonRatio {
    std::complex<Real> ratio;
    bool at_rounding_level;
};

template <class Real>
NewtonRatio<Real> newton_ratio(const Poly<Real>& p, const Poly<Real>& reversed,
                               const std::vector<Real>& abs_p, const std::vector<Real>& abs_rev,
                               const std::complex<Real>& z) {
    using std::abs;
    const int d = static_cast<int>(p.size()) - 1;
    const Real eps = machine_epsilon<Real>();
    const Real az = abs(z);
    if (az <= Real(1)) {
        const auto [v, dv] = poly::evaluate_with_derivative(p, z);
        Real bound(0);
        for (std::size_t i = abs_p.size(); i-- > 0;) bound = bound * az + abs_p[i];
        const bool small = abs(v) <= Real(8) * eps * bound * Real(d + 1);
        if (dv == std::complex<Real>(Real(0))) return {std::complex<Real>(Real(0)), small};
        return {v / dv, small};
    }
    const std::complex<Real> y = std::complex<Real>(Real(1)) / z;
    const auto [v, dv] = poly::evaluate_with_derivative(reversed, y);
    Real bound(0);
    const Real ay = abs(y);
    for (std::size_t i = abs_rev.size(); i-- > 0;) bound = bound * ay + abs_rev[i];
    const bool small = abs(v) <= Real(8) * eps * bound * Real(d + 1);
    const std::complex<Real> denom = Real(d) - y * dv / v;
    if (v == std::complex<Real>(Real(0)) || denom == std::complex<Real>(Real(0)))
        return {std::complex<Real>(Real(0)), true};
    return {z / denom, small};
}

template <class Real>
bool aberth_iterate(const Poly<Real>& p, std::vector<std::complex<Real>>& z, int max_iterations) {
    using std::abs;
    const std::size_t d = z.size();
    Poly<Real> rev(p.rbegin(), p.rend());
    std::vector<Real> abs_p(p.size()), abs_rev(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        abs_p[i] = abs(p[i]);
        abs_rev[i] = abs(rev[i]);
    }
    std::vector<char> done(d, 0);
    const Real tiny = machine_epsilon<Real>() * Real(4);
    for (int it = 0; it < max_iterations; ++it) {
        std::size_t active = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (done[i]) continue;
            const auto nr = newton_ratio(p, rev, abs_p, abs_rev, z[i]);
            if (nr.at_rounding_level) {
                done[i] = 1;
                continue;
            }
            ++active;
            std::complex<Real> sum(Real(0));
            for (std::size_t j = 0; j < d; ++j)
                if (j != i) sum += std::complex<Real>(Real(1)) / (z[i] - z[j]);
            const std::complex<Real> w = nr.ratio / (std::complex<Real>(Real(1)) - nr.ratio * sum);
            z[i] -= w;
            if (abs(w) <= tiny * abs(z[i])) done[i] = 1;
        }
        if (active == 0) return true;
    }
    return std::all_of(done.begin(), done.end(), [](char c) { return c != 0; });
}

inline CVec companion_eigenvalues(const CVec& p) {
    const int d = static_cast<int>(p.size()) - 1;
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) c(i, d - 1) = -p[static_cast<std::size_t>(i)] / p.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
    CVec out(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return out;
}

template <class Real>
void newton_polish(const Poly<Real>& p, std::vector<std::complex<Real>>& z) {
    using std::abs;
    for (auto& r : z) {
        const auto [v, dv] = poly::evaluate_with_derivative(p, r);
        if (dv == std::complex<Real>(Real(0))) continue;
        const std::complex<Real> cand = r - v / dv;
        if (abs(poly::evaluate(p, cand)) < abs(v)) r = cand;
    }
}

}  // namespace detail

/**
 * All roots of p (ascending coefficients), with multiplicity.
 *
 * Exact zero leading coefficients are dropped first; exact zero low-order
 * coefficients become roots at the origin.
 */
template <class Real>
std::vector<std::complex<Real>> polynomial_roots(Poly<Real> p, int max_iterations = 2000) {
    using std::abs;
    using std::sqrt;
    p = poly::trimmed(std::move(p));
    std::vector<std::complex<Real>> roots;
    if (p.size() <= 1) return roots;
    std::size_t zeros = 0;
    while (zeros < p.size() && p[zeros] == std::complex<Real>(Real(0))) ++zeros;
    roots.assign(zeros, std::complex<Real>(Real(0)));
    p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(zeros));
    const std::size_t d = p.size() - 1;
    if (d == 0) return roots;
    if (d == 1) {
        roots.push_back(-p[0] / p[1]);
        return roots;
    }
    if (d == 2) {
        const auto disc = sqrt(p[1] * p[1] - Real(4) * p[2] * p[0]);
        const auto s = (p[1].real() * disc.real() + p[1].imag() * disc.imag() >= Real(0)) ? p[1] + disc
                                                                                            : p[1] - disc;
        std::vector<std::complex<Real>> z;
        if (s == std::complex<Real>(Real(0))) {
            z = {std::complex<Real>(Real(0)), std::complex<Real>(Real(0))};
        } else {
            const auto r1 = -s / (Real(2) * p[2]);
            const auto r2 = -Real(2) * p[0] / s;
            z = {r1, r2};
        }
        detail::newton_polish(p, z);
        roots.insert(roots.end(), z.begin(), z.end());
        return roots;
    }

    std::vector<std::complex<Real>> z;
    if constexpr (!std::is_same_v<Real, double>) {
        const CVec pd = poly::convert<double>(p);
        bool usable = std::abs(pd.back()) > 0 && std::abs(pd.front()) > 0;
        for (const auto& c : pd) usable = usable && std::isfinite(c.real()) && std::isfinite(c.imag());
        if (usable) {
            const CVec zd = polynomial_roots<double>(pd, max_iterations);
            for (const auto& r : zd) z.push_back(from_cplx<Real>(r));
            // split exact coincidences so the Aberth correction stays finite
            for (std::size_t i = 0; i < z.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (z[i] == z[j]) z[i] *= std::complex<Real>(Real(1) + Real(1e-12), Real(1e-12));
        }
    }
    if (z.size() != d) z = detail::newton_polygon_start(p);
    bool ok = detail::aberth_iterate(p, z, max_iterations);
    if (!ok) {
        if constexpr (std::is_same_v<Real, double>) {
            z = detail::companion_eigenvalues(p);
            ok = detail::aberth_iterate(p, z, max_iterations);
        }
    }
    if (!ok) {
        // converged to rounding level is not certified, but the iterates are still the best available
        bool finite = true;
        for (const auto& r : z) {
            using std::isfinite;
            finite = finite && isfinite(static_cast<double>(r.real())) && isfinite(static_cast<double>(r.imag()));
        }
        if (!finite) throw ConvergenceError("Aberth iteration diverged for degree " + std::to_string(d));
    }
    detail::newton_polish(p, z);
    roots.insert(roots.end(), z.begin(), z.end());
    return roots;
}

/// A group of numerically coincident roots.
struct RootCluster {
    cplx center;
    int multiplicity = 1;
};

/**
 * Groups roots closer than rel_radius * (1 + |z|) (transitively) and
 * replaces each group by its mean.
 */
inline std::vector<RootCluster> cluster_roots(const CVec& roots, double rel_radius) {
    const std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double tol = rel_radius * (1.0 + std::max(std::abs(roots[i]), std::abs(roots[j])));
            if (std::abs(roots[i] - roots[j]) <= tol) parent[find(i)] = find(j);
        }
    std::vector<RootCluster> out;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(out.size());
            out.push_back({cplx{}, 0});
        }
        auto& c = out[static_cast<std::size_t>(slot[r])];
        c.center += roots[i];
        c.multiplicity += 1;
    }
    for (auto& c : out) c.center /= static_cast<double>(c.multiplicity);
    return out;
}

}  // namespace toeplitz_spectra
