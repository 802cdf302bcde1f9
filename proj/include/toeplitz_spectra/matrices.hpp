/**
 * @file matrices.hpp
 * @brief Finite Toeplitz matrices, the determinant polynomials P_{k,n} and their checks.
 *
 * P_{k,n}(lambda) = det T_n(z^{-k}(f - lambda)) is sampled at n + 1 points of a
 * circle and recovered by an inverse DFT, which is the exact inverse of the
 * Vandermonde system on roots of unity. Coefficients are kept in the scaled
 * variable t = (lambda - center) / radius.
 */
#pragma once

#include "toeplitz_spectra/algebraic.hpp"
#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/lu.hpp"
#include "toeplitz_spectra/measure.hpp"
#include "toeplitz_spectra/parallel.hpp"
#include "toeplitz_spectra/polynomial.hpp"
#include "toeplitz_spectra/roots.hpp"
#include "toeplitz_spectra/symbol.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <optional>
#include <vector>

namespace toeplitz_spectra {

/// T_n(z^{-k}(f - lambda)), or T_n(z^{-k} f) when lambda is absent.
struct ToeplitzMatrix {
    int n = 0;
    int shift_k = 0;
    std::optional<cplx> lambda;
    DenseMatrix<double> entries;

    cplx operator()(int i, int j) const {
        return entries(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
};

namespace detail {

/// f_j for j in [lo, hi] in the working precision; exact when the data are rational.
template <class Real>
std::vector<Complex<Real>> working_fourier(const RationalSymbol& s, int lo, int hi) {
    std::vector<Complex<Real>> out;
    if constexpr (!std::is_same_v<Real, double>) {
        if (const auto exact = exact_fourier_coefficients(s, lo, hi)) {
            for (const auto& r : *exact) {
                const Real num(boost::multiprecision::numerator(r)), den(boost::multiprecision::denominator(r));
                out.emplace_back(num / den, Real(0));
            }
            return out;
        }
    }
    for (const auto& c : fourier_coefficients(s, lo, hi)) out.push_back(from_cplx<Real>(c));
    return out;
}

/// Entries f_{i-j+k} - lambda [i - j + k = 0] from coefficients f_lo..f_hi, lo = k - n + 1.
template <class Real>
DenseMatrix<Real> shifted_pencil(const std::vector<Complex<Real>>& f, int n, int k, const Complex<Real>& lambda) {
    DenseMatrix<Real> m(static_cast<std::size_t>(n));
    const int lo = k - n + 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int idx = i - j + k;
            auto v = f[static_cast<std::size_t>(idx - lo)];
            if (idx == 0) v -= lambda;
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        }
    return m;
}

}  // namespace detail

inline ToeplitzMatrix build(const RationalSymbol& s, int n, int k, std::optional<cplx> lambda = std::nullopt) {
    if (n < 1) throw DegenerateError("matrix size must be positive");
    ToeplitzMatrix T;
    T.n = n;
    T.shift_k = k;
    T.lambda = lambda;
    const auto f = fourier_coefficients(s, k - n + 1, k + n - 1);
    T.entries = detail::shifted_pencil<double>(f, n, k, lambda.value_or(cplx{}));
    return T;
}

/// det T_n(z^{-k}(f - lambda)) by LU with partial pivoting.
inline cplx direct_determinant(const RationalSymbol& s, int k, int n, cplx lambda) {
    return determinant(build(s, n, k, lambda).entries);
}

/// Circle carrying the interpolation nodes.
struct InterpolationCircle {
    cplx center;
    double radius = 1;
};

/**
 * Centered at lambda_2 (else lambda_1, else the branch-point centroid) with
 * radius 1.5 times the largest distance to a branch point or special value.
 */
inline InterpolationCircle interpolation_circle(const RationalSymbol& s, const BranchPointSet& bps) {
    CVec pts = bps.points;
    if (s.special.lambda1.is_finite()) pts.push_back(s.special.lambda1.value);
    if (s.special.lambda2.is_finite()) pts.push_back(s.special.lambda2.value);
    InterpolationCircle c;
    if (s.special.lambda2.is_finite()) c.center = s.special.lambda2.value;
    else if (s.special.lambda1.is_finite()) c.center = s.special.lambda1.value;
    else if (!bps.points.empty()) {
        for (const auto& b : bps.points) c.center += b;
        c.center /= static_cast<double>(bps.points.size());
    }
    double r = 0;
    for (const auto& z : pts) r = std::max(r, std::abs(z - c.center));
    c.radius = std::max(1.5 * r, 0.5);
    return c;
}

inline InterpolationCircle interpolation_circle(const RationalSymbol& s) {
    return interpolation_circle(s, branch_points(s));
}

struct CharPolyOptions {
    /// Run determinants and root finding in Extended.
    bool extended = false;
    /// Repeat in Extended when double validation fails or the zero/nonzero coefficient split is ambiguous.
    bool escalate = true;
    /// Required ratio between the smallest kept and the largest discarded coefficient in double.
    double min_coefficient_gap = 1e4;
    std::optional<InterpolationCircle> circle;
    /// Coefficients below this multiple of n * eps * max|a_m| are zero; 0 picks 100.
    double zero_factor = 100;
    std::size_t workers = 1;
};

struct DeterminantPolynomial {
    int k = 0;
    int n = 0;
    cplx center;
    double radius = 1;
    /// P(lambda) = sum t_coeffs[m] t^m with t = (lambda - center) / radius.
    CVec t_coeffs;
    int degree = 0;
    /// Order of vanishing of P at the center.
    int multiplicity_at_center = 0;
    /// All roots with multiplicity; the center appears multiplicity_at_center times.
    CVec roots;
    std::vector<RootCluster> clusters;
    bool extended = false;
    /// Worst relative mismatch against direct determinants at fresh points.
    double validation_error = 0;
    /// Smallest kept boundary coefficient over the largest discarded one (infinite when none is discarded).
    double coefficient_gap = std::numeric_limits<double>::infinity();

    cplx evaluate(cplx lambda) const { return poly::evaluate(t_coeffs, (lambda - center) / radius); }

    /// P'(lambda) / P(lambda).
    cplx log_derivative(cplx lambda) const {
        const auto [v, d] = poly::evaluate_with_derivative(t_coeffs, (lambda - center) / radius);
        return d / (radius * v);
    }

    /// Ascending coefficients in lambda.
    CVec coefficients() const {
        CVec out(t_coeffs.size(), cplx{});
        // expand sum a_m ((lambda - c)/r)^m
        CVec power{cplx(1)};
        const CVec lin{-center / radius, cplx(1.0 / radius)};
        for (std::size_t m = 0; m < t_coeffs.size(); ++m) {
            for (std::size_t i = 0; i < power.size(); ++i) out[i] += t_coeffs[m] * power[i];
            power = poly::multiply(power, lin);
        }
        return out;
    }

    /// Roots within `radius` of z, with multiplicity.
    int count_near(cplx z, double r) const {
        int c = 0;
        for (const auto& x : roots)
            if (std::abs(x - z) <= r) ++c;
        return c;
    }
};

namespace detail {

template <class Real>
DeterminantPolynomial char_poly_impl(const RationalSymbol& s, int k, int n, const InterpolationCircle& circle,
                                     const CharPolyOptions& opt) {
    using std::abs;
    const auto f = working_fourier<Real>(s, k - n + 1, k + n - 1);
    const std::size_t N = static_cast<std::size_t>(n) + 1;
    const Complex<Real> c = from_cplx<Real>(circle.center);
    const Real r(circle.radius);
    std::vector<Complex<Real>> omega(N);
    for (std::size_t j = 0; j < N; ++j)
        omega[j] = unit_phase<Real>(Real(2) * real_pi<Real>() * Real(static_cast<double>(j)) / Real(static_cast<double>(N)));
    const auto values = parallel_map(
        N, [&](std::size_t j) { return determinant(shifted_pencil<Real>(f, n, k, c + r * omega[j])); }, opt.workers);

    std::vector<Complex<Real>> a(N, Complex<Real>(Real(0)));
    for (std::size_t m = 0; m < N; ++m) {
        Complex<Real> acc(Real(0));
        for (std::size_t j = 0; j < N; ++j) acc += values[j] * std::conj(omega[(j * m) % N]);
        a[m] = acc / Real(static_cast<double>(N));
    }
    Real amax(0);
    for (const auto& x : a) amax = std::max(amax, Real(abs(x)));

    DeterminantPolynomial P;
    P.k = k;
    P.n = n;
    P.center = circle.center;
    P.radius = circle.radius;
    P.extended = !std::is_same_v<Real, double>;
    if (amax == Real(0)) throw IllConditionedInterpolation("P_{k,n} vanishes at every node");
    const Real tol = Real(opt.zero_factor) * Real(n) * machine_epsilon<Real>() * amax;
    int deg = static_cast<int>(N) - 1;
    while (deg > 0 && abs(a[static_cast<std::size_t>(deg)]) <= tol) --deg;
    int mult = 0;
    while (mult < deg && abs(a[static_cast<std::size_t>(mult)]) <= tol) ++mult;
    P.degree = deg;
    P.multiplicity_at_center = mult;
    if (mult > 0 || deg + 1 < static_cast<int>(N)) {
        Real dropped = machine_epsilon<Real>() * amax;
        for (std::size_t m = 0; m < N; ++m)
            if (static_cast<int>(m) < mult || static_cast<int>(m) > deg) dropped = std::max(dropped, Real(abs(a[m])));
        const Real kept = std::min(Real(abs(a[static_cast<std::size_t>(mult)])), Real(abs(a[static_cast<std::size_t>(deg)])));
        P.coefficient_gap = static_cast<double>(Real(kept / dropped));
    }
    for (int m = 0; m <= deg; ++m) {
        const auto& x = a[static_cast<std::size_t>(m)];
        P.t_coeffs.push_back(m < mult ? cplx{} : to_cplx(x));
    }
    const std::vector<Complex<Real>> q(a.begin() + mult, a.begin() + deg + 1);
    const auto t_roots = polynomial_roots<Real>(q);
    P.roots.assign(static_cast<std::size_t>(mult), circle.center);
    for (const auto& t : t_roots) P.roots.push_back(to_cplx(Complex<Real>(c + r * t)));
    P.clusters = cluster_roots(P.roots, 1e-5);

    // validation against direct determinants between the nodes
    const double half_step = M_PI / static_cast<double>(N);
    for (const auto& probe : {std::polar(1.0, half_step), std::polar(1.0, 5 * half_step), std::polar(0.9, 1.1)}) {
        const cplx lam = circle.center + circle.radius * probe;
        const Complex<Real> direct = determinant(shifted_pencil<Real>(f, n, k, from_cplx<Real>(lam)));
        Complex<Real> interp(Real(0));
        const Complex<Real> t = from_cplx<Real>(probe);
        for (std::size_t m = static_cast<std::size_t>(deg) + 1; m-- > 0;) interp = interp * t + a[m];
        const Real scale = std::max(Real(abs(direct)), Real(1e-300));
        P.validation_error = std::max(P.validation_error, static_cast<double>(Real(abs(interp - direct) / scale)));
    }
    return P;
}

}  // namespace detail

/**
 * P_{k,n} by interpolation. When validation against direct determinants
 * fails, the circle is shrunk once and the computation retried, then the
 * whole computation is repeated in Extended if escalation is enabled. A
 * double result whose discarded coefficients are not clearly below the kept
 * ones is also repeated in Extended.
 */
inline DeterminantPolynomial char_poly(const RationalSymbol& s, int k, int n, const CharPolyOptions& opt = {}) {
    if (n < 1) throw DegenerateError("n must be positive");
    if (k < s.k_min() || k > s.k_max()) throw DegenerateError("k outside -q+1..p-1");
    InterpolationCircle circle = opt.circle ? *opt.circle : interpolation_circle(s);
    const double limit = 1e-8;
    for (int attempt = 0; attempt < 2; ++attempt) {
        DeterminantPolynomial P = opt.extended ? detail::char_poly_impl<Extended>(s, k, n, circle, opt)
                                               : detail::char_poly_impl<double>(s, k, n, circle, opt);
        const bool ambiguous = !opt.extended && opt.escalate && P.coefficient_gap < opt.min_coefficient_gap;
        if (P.validation_error <= limit && !ambiguous) return P;
        if (ambiguous) {
            CharPolyOptions o = opt;
            o.extended = true;
            return char_poly(s, k, n, o);
        }
        if (attempt == 1 && !opt.extended && opt.escalate) {
            CharPolyOptions o = opt;
            o.extended = true;
            return char_poly(s, k, n, o);
        }
        if (attempt == 1)
            throw IllConditionedInterpolation("P_{k,n} interpolation mismatch " + format_double(P.validation_error));
        circle.radius *= 0.75;
    }
    throw InternalInconsistency("unreachable");
}

/// Order of vanishing of P_{k,n} at `point`, from an interpolation centered there.
inline int multiplicity_at(const RationalSymbol& s, int k, int n, cplx point, double radius,
                           const CharPolyOptions& opt = {}) {
    CharPolyOptions o = opt;
    o.circle = InterpolationCircle{point, radius};
    return char_poly(s, k, n, o).multiplicity_at_center;
}

/**
 * Finite generalized eigenvalues of the pencil (T_n(z^{-k} f), T_n(z^{-k})),
 * an independent path to sp_k T_n(f). Complex symbols are supported for k = 0 only.
 */
inline CVec pencil_eigenvalues(const RationalSymbol& s, int k, int n) {
    const ToeplitzMatrix T = build(s, n, k);
    const auto N = static_cast<Eigen::Index>(n);
    if (k == 0) {
        Eigen::MatrixXcd M(N, N);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = T(i, j);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
        if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
        return CVec(es.eigenvalues().begin(), es.eigenvalues().end());
    }
    if (!s.real_coefficients()) throw DegenerateError("pencil cross-check needs real coefficients when k != 0");
    Eigen::MatrixXd A(N, N), B = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            A(i, j) = T(i, j).real();
            if (i - j + k == 0) B(i, j) = 1.0;
        }
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(A, B, false);
    if (ges.info() != Eigen::Success) throw ConvergenceError("generalized eigenvalue solver failed");
    CVec out;
    const auto alphas = ges.alphas();
    const auto betas = ges.betas();
    for (Eigen::Index i = 0; i < N; ++i) {
        if (std::abs(betas(i)) <= 1e-10 * std::abs(alphas(i))) continue;
        out.push_back(alphas(i) / betas(i));
    }
    return out;
}

/// Divisibility and degree bookkeeping for one (k, n).
struct DivisibilityReport {
    int k = 0;
    int n = 0;
    int degree = 0;
    std::optional<int> multiplicity_lambda1;
    std::optional<int> multiplicity_lambda2;
    /// Degree of P after removing the factors at finite lambda_1, lambda_2.
    int degree_q = 0;
    double slack_lambda1 = 0;
    double slack_lambda2 = 0;
    double slack_q = 0;

    /// Smallest c >= 0 satisfying every inequality at this n.
    double c_needed() const { return std::max({0.0, slack_lambda1, slack_lambda2, slack_q}); }
};

/**
 * Multiplicities at finite lambda_1, lambda_2, the degree of P_{k,n} and of
 * the quotient Q_{k,n}, and the slack each inequality needs:
 *   mult(lambda_1) >= m_{1,k} n - c, or deg <= (1 - m_{1,k}) n + c when lambda_1 is infinite,
 *   likewise at lambda_2, and deg Q <= m_k n + 2c.
 */
inline DivisibilityReport divisibility_report(const RationalSymbol& s, int k, int n, const InterpolationCircle& circle,
                                              const CharPolyOptions& opt = {}) {
    CharPolyOptions o = opt;
    o.circle = circle;
    const DeterminantPolynomial P = char_poly(s, k, n, o);
    DivisibilityReport r;
    r.k = k;
    r.n = n;
    r.degree = P.degree;
    const double m1 = s.masses.m1(k), m2 = s.masses.m2(k), m = s.masses.m(k);
    int removed = 0;
    auto mult_at = [&](cplx z) {
        if (std::abs(z - P.center) < 1e-14 * (1 + std::abs(z))) return P.multiplicity_at_center;
        return multiplicity_at(s, k, n, z, circle.radius, opt);
    };
    if (s.special.lambda1.is_finite()) {
        r.multiplicity_lambda1 = mult_at(s.special.lambda1.value);
        removed += *r.multiplicity_lambda1;
        r.slack_lambda1 = m1 * n - *r.multiplicity_lambda1;
    } else {
        r.slack_lambda1 = r.degree - (1 - m1) * n;
    }
    if (s.special.lambda2.is_finite()) {
        r.multiplicity_lambda2 = mult_at(s.special.lambda2.value);
        removed += *r.multiplicity_lambda2;
        r.slack_lambda2 = m2 * n - *r.multiplicity_lambda2;
    } else {
        r.slack_lambda2 = r.degree - (1 - m2) * n;
    }
    r.degree_q = r.degree - removed;
    r.slack_q = (r.degree_q - m * n) / 2.0;
    return r;
}

inline DivisibilityReport divisibility_report(const RationalSymbol& s, int k, int n, const CharPolyOptions& opt = {}) {
    return divisibility_report(s, k, n, opt.circle ? *opt.circle : interpolation_circle(s), opt);
}

/// Result of comparing L_n T_n(z^{-k}(f - lambda)) R_n with T_n(z^{-q-k} A_lambda).
struct BandedReduction {
    /// Smallest c with every entry outside the top-left c x c block below tolerance.
    int corner = 0;
    /// Product of the diagonal entries of L_n and R_n, (c_1 B_2(0))^n.
    cplx kappa;
    cplx det_product;
    cplx det_pencil;
    double det_relative_error = 0;
};

/// L_n = T_n(B_2) (lower triangular), R_n = T_n(z^{-q} B_1) (upper triangular).
inline BandedReduction banded_reduction_residual(const RationalSymbol& s, int k, int n, cplx lambda,
                                                 double tolerance = 1e-9) {
    const ToeplitzMatrix T = build(s, n, k, lambda);
    const std::size_t N = static_cast<std::size_t>(n);
    auto coeff = [](const CVec& p, int i) {
        return i >= 0 && i < static_cast<int>(p.size()) ? p[static_cast<std::size_t>(i)] : cplx{};
    };
    DenseMatrix<double> L(N), R(N), target(N);
    const CVec Al = a_lambda<double>(s, lambda);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
            L(ui, uj) = coeff(s.B2, i - j);
            R(ui, uj) = coeff(s.B1, i - j + s.q);
            target(ui, uj) = coeff(Al, i - j + s.q + k);
        }
    auto product = [N](const DenseMatrix<double>& X, const DenseMatrix<double>& Y) {
        DenseMatrix<double> Z(N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t l = 0; l < N; ++l) {
                const cplx x = X(i, l);
                if (x == cplx{}) continue;
                for (std::size_t j = 0; j < N; ++j) Z(i, j) += x * Y(l, j);
            }
        return Z;
    };
    const DenseMatrix<double> LTR = product(product(L, T.entries), R);
    BandedReduction out;
    double scale = 1;
    for (const auto& v : target.data) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (std::abs(LTR(i, j) - target(i, j)) >= tolerance * scale)
                out.corner = std::max(out.corner, static_cast<int>(std::max(i, j)) + 1);
    cplx kappa{1};
    for (std::size_t i = 0; i < N; ++i) kappa *= L(i, i) * R(i, i);
    if (kappa == cplx{}) throw NonTriangularFactor("a triangular factor is singular");
    out.kappa = kappa;
    out.det_product = determinant(LTR);
    out.det_pencil = determinant(T.entries);
    out.det_relative_error = std::abs(out.det_product - kappa * out.det_pencil) / std::abs(out.det_product);
    return out;
}

/// One term of Day's determinant identity.
struct DayTerm {
    std::vector<int> subset;
    cplx w;
    /// w_S from the alternative (leading coefficient) form.
    cplx w_alternative;
    cplx C;
};

struct DayExpansion {
    std::vector<DayTerm> terms;
    cplx value;
    /// Worst relative disagreement of the two w_S forms.
    double w_form_error = 0;
};

/// Smallest n for which Day's identity holds: max(1, -k, deg B_2 - p + k).
inline int day_min_size(const RationalSymbol& s, int k) {
    return std::max({1, -k, static_cast<int>(s.B2.size()) - 1 - s.p + k});
}

/**
 * sum_S C_S w_S^n over the (q + k)-subsets S of the roots of A_lambda, with
 *   w_S = (-1)^{q+k} (a_{-q} - b_{-q} lambda) / (kappa prod_{j in S} z_j),   kappa = c_1 B_2(0),
 *   C_S = ((-1)^s c_2 / B_2(0))^k prod_{j notin S} z_j^k prod_{j notin S, r} (z_j - beta_r)
 *         prod_{i in S, t} (gamma_t - z_i) / [prod_{i in S, j notin S} (z_j - z_i) prod_{r,t} (gamma_t - beta_r)],
 * beta the roots of B_1, gamma those of B_2 and s = deg B_2.
 * Valid for n >= day_min_size(s, k).
 */
inline DayExpansion day_expansion(const RationalSymbol& s, int k, int n, cplx lambda) {
    if (k < s.k_min() || k > s.k_max()) throw DegenerateError("k outside -q+1..p-1");
    if (n < day_min_size(s, k)) throw DegenerateError("Day's identity needs n >= " + std::to_string(day_min_size(s, k)));
    const auto& pc = s.pencil;
    const cplx low = pc.a_at(-s.q) - pc.b_at(-s.q) * lambda, lead = pc.a_at(s.p) - pc.b_at(s.p) * lambda;
    const double scale = 1e-12 * (1 + std::abs(lambda));
    if (std::abs(low) <= scale * (std::abs(pc.a_at(-s.q)) + std::abs(pc.b_at(-s.q))) ||
        std::abs(lead) <= scale * (std::abs(pc.a_at(s.p)) + std::abs(pc.b_at(s.p))))
        throw SpecialLambdaError("Day's identity needs lambda away from lambda_1 and lambda_2");
    const CVec z = polynomial_roots<double>(a_lambda<double>(s, lambda));
    const std::size_t N = z.size();
    if (static_cast<int>(N) != s.p + s.q) throw InternalInconsistency("A_lambda has the wrong degree");
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(z[i] - z[j]) < 1e-7 * (1 + std::abs(z[i])))
                throw MultipleRootError("A_lambda has a multiple root; lambda is near a branch point");
    const CVec beta = polynomial_roots<double>(s.B1), gamma = polynomial_roots<double>(s.B2);
    const cplx kappa = s.c1() * s.b2_at_zero();
    const cplx ratio = (gamma.size() % 2 == 0 ? 1.0 : -1.0) * s.c2() / s.b2_at_zero();
    cplx pole_gap{1};
    for (const auto& b : beta)
        for (const auto& g : gamma) pole_gap *= g - b;

    const int size = s.q + k;
    const double sign_low = (size % 2 == 0) ? 1.0 : -1.0;
    const double sign_lead = ((s.p - k) % 2 == 0) ? 1.0 : -1.0;
    DayExpansion out;
    std::vector<char> in(N, 0);
    std::fill(in.end() - size, in.end(), 1);
    do {
        DayTerm term;
        cplx prod_in{1}, prod_out{1}, C = std::pow(ratio, k);
        for (std::size_t j = 0; j < N; ++j) {
            if (in[j]) {
                term.subset.push_back(static_cast<int>(j) + 1);
                prod_in *= z[j];
                for (const auto& g : gamma) C *= g - z[j];
            } else {
                prod_out *= z[j];
                C *= std::pow(z[j], k);
                for (const auto& b : beta) C *= z[j] - b;
            }
        }
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (in[i] && !in[j]) C /= z[j] - z[i];
        C /= pole_gap;
        term.w = sign_low * low / (kappa * prod_in);
        term.w_alternative = sign_lead * lead * prod_out / kappa;
        term.C = C;
        out.w_form_error = std::max(out.w_form_error, std::abs(term.w - term.w_alternative) / std::abs(term.w));
        out.value += C * std::pow(term.w, n);
        out.terms.push_back(std::move(term));
    } while (std::next_permutation(in.begin(), in.end()));
    return out;
}

inline cplx day_sum(const RationalSymbol& s, int k, int n, cplx lambda) {
    return day_expansion(s, k, n, lambda).value;
}

/// Limit of the empirical transform: cauchy_transform plus the point masses at lambda_1, lambda_2.
inline cplx cauchy_target(const RationalSymbol& s, int k, cplx lambda, const AlgebraicOptions& opt = {}) {
    cplx v = cauchy_transform(s, k, lambda, opt);
    if (s.special.lambda1.is_finite()) v += s.masses.m1(k) / (lambda - s.special.lambda1.value);
    if (s.special.lambda2.is_finite()) v += s.masses.m2(k) / (lambda - s.special.lambda2.value);
    return v;
}

/// (1/n) P_{k,n}'(lambda) / P_{k,n}(lambda).
inline cplx empirical_cauchy(const DeterminantPolynomial& P, cplx lambda) {
    for (const auto& z : P.roots)
        if (std::abs(lambda - z) < 1e-12 * (1 + std::abs(z))) throw CurveProximity("lambda is a root of P_{k,n}");
    return P.log_derivative(lambda) / static_cast<double>(P.n);
}

/// (1/n) sum 1 / (lambda - x) over a spectrum given as a root list.
inline cplx empirical_cauchy(const CVec& spectrum, int n, cplx lambda) {
    cplx acc{};
    for (const auto& z : spectrum) {
        if (std::abs(lambda - z) < 1e-12 * (1 + std::abs(z))) throw CurveProximity("lambda is an eigenvalue");
        acc += 1.0 / (lambda - z);
    }
    return acc / static_cast<double>(n);
}

}  // namespace toeplitz_spectra
