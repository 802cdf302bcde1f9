/**
 * @file algebraic.hpp
 * @brief Roots of A_lambda(z) = A(z) - lambda B(z) ordered by modulus,
 * branch points, and the functions w_k.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/exact.hpp"
#include "toeplitz_spectra/lu.hpp"
#include "toeplitz_spectra/polynomial.hpp"
#include "toeplitz_spectra/roots.hpp"
#include "toeplitz_spectra/symbol.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace toeplitz_spectra {

struct AlgebraicOptions {
    /// Moduli closer than tie_tolerance * (1 + |z|) are tied.
    double tie_tolerance = 1e-9;
    /// Roots closer than cluster_radius * (1 + |z|) count as one multiple root.
    double cluster_radius = 1e-6;
};

/// Stand-in for log|z_{q+k+1}| - log|z_{q+k}| when one of the two is 0 or infinity.
inline constexpr double kGapSentinel = 1e300;

/// The p + q roots of A_lambda ordered by modulus; infinite roots come last.
struct RootSystem {
    cplx lambda;
    CVec roots;
    int infinite_count = 0;
    /// dz_j/dlambda; meaningful only where derivative_defined[j] is set.
    CVec derivs;
    std::vector<char> derivative_defined;
    /// Some adjacent pair of moduli is tied (lambda lies on some Gamma_k).
    bool tie = false;

    int size() const { return static_cast<int>(roots.size()); }
    int finite_count() const { return size() - infinite_count; }
    /// 1-based, as in z_j.
    bool is_infinite(int j) const { return j > finite_count(); }
    ExtendedComplex root(int j) const {
        return is_infinite(j) ? ExtendedComplex::infinity()
                              : ExtendedComplex::finite(roots[static_cast<std::size_t>(j - 1)]);
    }
    double log_modulus(int j) const {
        if (is_infinite(j)) return std::numeric_limits<double>::infinity();
        return std::log(std::abs(roots[static_cast<std::size_t>(j - 1)]));
    }
};

/// Coefficients of A_lambda, formal degree p + q.
template <class Real = double>
Poly<Real> a_lambda(const RationalSymbol& s, const std::complex<Real>& lambda) {
    const std::size_t N = s.pencil.a.size();
    Poly<Real> c(N);
    for (std::size_t i = 0; i < N; ++i)
        c[i] = from_cplx<Real>(s.pencil.a[i]) - lambda * from_cplx<Real>(s.pencil.b[i]);
    return c;
}

namespace detail {

/// A_lambda with coefficients that cancel to rounding level set to exact zero.
inline CVec snapped_a_lambda(const RationalSymbol& s, cplx lambda) {
    CVec c = a_lambda<double>(s, lambda);
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double ref = std::abs(s.pencil.a[i]) + std::abs(lambda) * std::abs(s.pencil.b[i]);
        if (std::abs(c[i]) <= 8 * eps * ref) c[i] = cplx{};
    }
    return c;
}

}  // namespace detail

inline RootSystem ordered_roots(const RationalSymbol& s, cplx lambda, const AlgebraicOptions& opt = {}) {
    const CVec c = detail::snapped_a_lambda(s, lambda);
    RootSystem rs;
    rs.lambda = lambda;
    const int N = s.p + s.q;
    const int deg = poly::degree(c);
    if (deg < 0) throw InternalInconsistency("A_lambda vanishes identically");
    rs.roots = polynomial_roots<double>(c);
    std::sort(rs.roots.begin(), rs.roots.end(), [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
    rs.infinite_count = N - deg;
    rs.roots.resize(static_cast<std::size_t>(N), cplx(std::numeric_limits<double>::infinity(), 0.0));

    const CVec dc = poly::derivative(poly::trimmed(c));
    rs.derivs.assign(static_cast<std::size_t>(N), cplx{});
    rs.derivative_defined.assign(static_cast<std::size_t>(N), 0);
    for (int j = 0; j < deg; ++j) {
        const cplx z = rs.roots[static_cast<std::size_t>(j)];
        const cplx d = poly::evaluate(dc, z);
        const double bound = poly::magnitude_bound(dc, std::abs(z));
        if (std::abs(d) > 1e-10 * bound) {
            rs.derivs[static_cast<std::size_t>(j)] = poly::evaluate(s.B, z) / d;
            rs.derivative_defined[static_cast<std::size_t>(j)] = 1;
        }
        if (j + 1 < deg) {
            const double a1 = std::abs(z), a2 = std::abs(rs.roots[static_cast<std::size_t>(j + 1)]);
            if (a2 - a1 < opt.tie_tolerance * (1.0 + a2)) rs.tie = true;
        }
    }
    return rs;
}

/// log|z_{q+k+1}| - log|z_{q+k}|, zero exactly on Gamma_k.
inline double membership_gap(const RootSystem& rs, int q, int k) {
    const int j = q + k;
    if (j < 1 || j >= rs.size()) return kGapSentinel;
    const double lo = rs.log_modulus(j), hi = rs.log_modulus(j + 1);
    // two roots at infinity (at lambda_2) or two at zero (at lambda_1) tie
    if (lo == hi) return 0.0;
    if (!std::isfinite(lo) || !std::isfinite(hi)) return kGapSentinel;
    return hi - lo;
}

inline double membership_gap(const RationalSymbol& s, cplx lambda, int k) {
    return membership_gap(ordered_roots(s, lambda), s.q, k);
}

/// Product of the q + k smallest roots; 1 for k = -q.
inline cplx w_k_value(const RootSystem& rs, int q, int k) {
    cplx w{1.0};
    for (int j = 1; j <= q + k; ++j) {
        if (rs.is_infinite(j)) throw SpecialLambdaError("w_k involves an infinite root at lambda_2");
        w *= rs.roots[static_cast<std::size_t>(j - 1)];
    }
    return w;
}

inline cplx w_k_value(const RationalSymbol& s, cplx lambda, int k) {
    return w_k_value(ordered_roots(s, lambda), s.q, k);
}

/// w_k'/w_k = sum_{j <= q+k} z_j'/z_j.
inline cplx w_k_log_derivative(const RootSystem& rs, int q, int k) {
    cplx acc{};
    for (int j = 1; j <= q + k; ++j) {
        const std::size_t i = static_cast<std::size_t>(j - 1);
        if (rs.is_infinite(j)) throw SpecialLambdaError("infinite root at lambda_2");
        if (rs.roots[i] == cplx{}) throw SpecialLambdaError("zero root at lambda_1");
        if (!rs.derivative_defined[i]) throw SingularDerivative("multiple root of A_lambda (branch point)");
        acc += rs.derivs[i] / rs.roots[i];
    }
    return acc;
}

inline cplx w_k_log_derivative(const RationalSymbol& s, cplx lambda, int k) {
    return w_k_log_derivative(ordered_roots(s, lambda), s.q, k);
}

/**
 * Follows roots from lambda0 to lambda1 along the segment, matching by
 * nearest neighbour after a first-order prediction and halving the step
 * while the match is ambiguous. Returns the roots at lambda1 in the order
 * of `start`.
 */
inline CVec track_roots(const RationalSymbol& s, const CVec& start, cplx lambda0, cplx lambda1,
                        const AlgebraicOptions& opt = {}, int depth = 0) {
    constexpr int max_depth = 14;
    const CVec dc = poly::derivative(poly::trimmed(detail::snapped_a_lambda(s, lambda0)));
    const RootSystem rs = ordered_roots(s, lambda1, opt);
    const CVec cand(rs.roots.begin(), rs.roots.begin() + rs.finite_count());
    std::vector<char> used(cand.size(), 0);
    CVec out(start.size());
    bool ambiguous = cand.size() < start.size();
    for (std::size_t i = 0; !ambiguous && i < start.size(); ++i) {
        const cplx d = poly::evaluate(dc, start[i]);
        const cplx pred =
            std::abs(d) > 0 ? start[i] + poly::evaluate(s.B, start[i]) / d * (lambda1 - lambda0) : start[i];
        std::size_t best = cand.size();
        double bd = std::numeric_limits<double>::infinity(), second = bd;
        for (std::size_t m = 0; m < cand.size(); ++m) {
            if (used[m]) continue;
            const double dist = std::abs(cand[m] - pred);
            if (dist < bd) {
                second = bd;
                bd = dist;
                best = m;
            } else if (dist < second) {
                second = dist;
            }
        }
        used[best] = 1;
        out[i] = cand[best];
        if (std::isfinite(second) && bd > 0.25 * second) ambiguous = true;
    }
    if (ambiguous && depth < max_depth) {
        const cplx mid = 0.5 * (lambda0 + lambda1);
        return track_roots(s, track_roots(s, start, lambda0, mid, opt, depth + 1), mid, lambda1, opt, depth + 1);
    }
    return out;
}

/// Multiple-root locus of A_lambda.
struct BranchPointSet {
    CVec points;
    /// Exact rational value where the point was snapped and verified.
    std::vector<std::optional<Rational>> exact;
    /// Discriminant Res_z(A_lambda, A_lambda') / lead(lambda), ascending in lambda.
    CVec discriminant;
    bool exact_discriminant = false;
};

namespace detail {

inline exact::RPoly exact_discriminant(const RationalSymbol& s) {
    const auto a = exact::from_real(s.pencil.a);
    const auto b = exact::from_real(s.pencil.b);
    if (!a || !b) return {};
    const int N = s.p + s.q;
    std::vector<Rational> xs, ys;
    for (int t = 0; t < 2 * N; ++t) {
        const Rational lam(t);
        exact::RPoly c(static_cast<std::size_t>(N + 1));
        for (int i = 0; i <= N; ++i) c[static_cast<std::size_t>(i)] = (*a)[static_cast<std::size_t>(i)] - lam * (*b)[static_cast<std::size_t>(i)];
        exact::RPoly dc(static_cast<std::size_t>(N));
        for (int i = 1; i <= N; ++i) dc[static_cast<std::size_t>(i - 1)] = c[static_cast<std::size_t>(i)] * i;
        xs.push_back(lam);
        ys.push_back(exact::determinant(exact::sylvester_matrix(c, N, dc, N - 1)));
    }
    exact::RPoly res = exact::interpolate(xs, ys);
    const exact::RPoly lead = exact::trimmed({(*a)[static_cast<std::size_t>(N)], -(*b)[static_cast<std::size_t>(N)]});
    auto [disc, rem] = exact::divide(res, lead);
    if (exact::degree(rem) >= 0) throw InternalInconsistency("resultant not divisible by the leading coefficient");
    return disc;
}

/// Same quantity in Extended, sampled on the unit circle and recovered by DFT.
inline Poly<Extended> floating_discriminant(const RationalSymbol& s) {
    using R = Extended;
    const int N = s.p + s.q;
    const int M = 2 * N;
    std::vector<std::complex<R>> vals(static_cast<std::size_t>(M));
    const R two_pi = 2 * real_pi<R>();
    for (int t = 0; t < M; ++t) {
        const std::complex<R> lam = unit_phase(two_pi * R(t) / R(M));
        Poly<R> c = a_lambda<R>(s, lam);
        Poly<R> dc(static_cast<std::size_t>(N));
        for (int i = 1; i <= N; ++i) dc[static_cast<std::size_t>(i - 1)] = c[static_cast<std::size_t>(i)] * R(i);
        const auto syl = exact::sylvester_matrix(c, N, dc, N - 1);
        DenseMatrix<R> m(syl.size());
        for (std::size_t i = 0; i < syl.size(); ++i)
            for (std::size_t j = 0; j < syl.size(); ++j) m(i, j) = syl[i][j];
        vals[static_cast<std::size_t>(t)] = determinant(std::move(m));
    }
    Poly<R> res(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        std::complex<R> acc(R(0));
        for (int t = 0; t < M; ++t) acc += vals[static_cast<std::size_t>(t)] * unit_phase(-two_pi * R(j * t % M) / R(M));
        res[static_cast<std::size_t>(j)] = acc / R(M);
    }
    const Poly<R> lead{from_cplx<R>(s.pencil.a.back()), -from_cplx<R>(s.pencil.b.back())};
    Poly<R> disc = poly::divide(res, poly::trimmed(lead)).first;
    // drop coefficients at rounding level
    R big(0);
    for (const auto& c : disc) big = std::max(big, R(abs(c)));
    for (auto& c : disc)
        if (abs(c) < big * R(1e-40)) c = std::complex<R>(R(0));
    return poly::trimmed(disc);
}

}  // namespace detail

/**
 * All finite branch points. Real-coefficient symbols get an exact rational
 * discriminant; its rational roots are recovered exactly.
 */
inline BranchPointSet branch_points(const RationalSymbol& s, const AlgebraicOptions& opt = {}) {
    BranchPointSet out;
    Poly<Extended> disc;
    exact::RPoly rdisc;
    if (s.real_coefficients()) {
        rdisc = detail::exact_discriminant(s);
        if (exact::degree(rdisc) < 0) throw DegenerateResultant("discriminant vanishes identically");
        out.exact_discriminant = true;
        for (const auto& c : rdisc) disc.emplace_back(Extended(c), Extended(0));
    } else {
        disc = detail::floating_discriminant(s);
        if (poly::degree(disc) < 0) throw DegenerateResultant("discriminant vanishes identically");
    }
    for (const auto& c : disc) out.discriminant.push_back(to_cplx(c));
    const auto roots = polynomial_roots<Extended>(disc);
    CVec approx;
    for (const auto& r : roots) approx.push_back(to_cplx(r));
    for (const auto& cl : cluster_roots(approx, opt.cluster_radius)) {
        cplx z = cl.center;
        std::optional<Rational> ex;
        if (out.exact_discriminant && std::abs(z.imag()) < 1e-7 * (1 + std::abs(z))) {
            const Rational cand = exact::best_rational(z.real(), 1000000);
            if (exact::evaluate(rdisc, cand) == 0) {
                ex = cand;
                z = cplx(static_cast<double>(cand), 0.0);
            }
        }
        if (!ex && s.real_coefficients() && std::abs(z.imag()) < 1e-12 * (1 + std::abs(z))) z.imag(0.0);
        out.points.push_back(z);
        out.exact.push_back(ex);
    }
    return out;
}

/**
 * Local exponent l with w_k'/w_k = O((lambda - lambda0)^{-1+1/l}), estimated
 * by a log-log fit along a ray. A fit, not a proof.
 */
inline double local_exponent(const RationalSymbol& s, int k, cplx lambda0, cplx direction = cplx(0.6, 0.8)) {
    const double r1 = 1e-4, r2 = 1e-6;
    const double v1 = std::abs(w_k_log_derivative(s, lambda0 + r1 * direction, k));
    const double v2 = std::abs(w_k_log_derivative(s, lambda0 + r2 * direction, k));
    const double slope = (std::log(v1) - std::log(v2)) / (std::log(r1) - std::log(r2));
    // |w'/w| ~ r^{-1 + 1/l}
    return 1.0 / std::max(1.0 + slope, 1e-12);
}

}  // namespace toeplitz_spectra
