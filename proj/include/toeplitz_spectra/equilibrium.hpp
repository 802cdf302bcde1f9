/**
 * @file equilibrium.hpp
 * @brief The vector equilibrium energy, its alternative form, and Euler–Lagrange checks.
 *
 * Energies are evaluated on discretized measures. The logarithmic kernel is
 * log 1/|x - y| with the value 0 for coincident atoms, so every energy is an
 * exact bilinear form in the weights and the two representations of J agree
 * to rounding.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/curves.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/measure.hpp"
#include "toeplitz_spectra/parallel.hpp"
#include "toeplitz_spectra/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace toeplitz_spectra {

/// Treatment of the diagonal in discrete self-energies.
enum class SelfEnergy {
    /// sum over i != j only.
    exclude_diagonal,
    /// adds w_i^2 (3/2 - log h_i), the energy of mass w_i spread uniformly over its span h_i.
    self_cell,
};

struct EquilibriumOptions {
    SelfEnergy self_energy = SelfEnergy::exclude_diagonal;
    /// Allowed |total - m_k| for an admissible component.
    double mass_tolerance = 1e-3;
    /// Euler–Lagrange samples keep this fraction of arc length away from exceptional ends.
    double el_margin = 0.02;
    std::size_t workers = 1;
};

/// Discretized measures nu_k for k = -q+1 .. p-1.
struct MeasureVector {
    int q = 0;
    int p = 0;
    std::vector<DiscretizedMeasure> components;

    bool has(int k) const { return k >= -q + 1 && k <= p - 1; }
    const DiscretizedMeasure& at(int k) const { return components.at(static_cast<std::size_t>(k + q - 1)); }
    DiscretizedMeasure& at(int k) { return components.at(static_cast<std::size_t>(k + q - 1)); }
};

namespace detail {

inline double log_kernel(cplx a, cplx b) {
    const double d = std::abs(a - b);
    return d == 0 ? 0.0 : -std::log(d);
}

/// A signed atomic measure.
struct Atoms {
    CVec x;
    std::vector<double> w;
    std::vector<double> h;

    void append(const DiscretizedMeasure& mu, double factor) {
        for (std::size_t i = 0; i < mu.size(); ++i) {
            x.push_back(mu.points[i]);
            w.push_back(factor * mu.weights[i]);
            h.push_back(mu.spans.empty() ? 0.0 : mu.spans[i]);
        }
    }
};

inline Atoms atoms_of(const DiscretizedMeasure& mu, double factor = 1.0) {
    Atoms a;
    a.append(mu, factor);
    return a;
}

/// Discrete I(nu) for a signed atomic measure.
inline double self_energy(const Atoms& a, SelfEnergy rule, std::size_t workers) {
    const std::size_t n = a.x.size();
    const auto rows = parallel_map(
        n,
        [&](std::size_t i) {
            double acc = 0;
            for (std::size_t j = i + 1; j < n; ++j) acc += a.w[j] * log_kernel(a.x[i], a.x[j]);
            acc *= 2 * a.w[i];
            if (rule == SelfEnergy::self_cell && a.h[i] > 0) acc += a.w[i] * a.w[i] * (1.5 - std::log(a.h[i]));
            return acc;
        },
        workers);
    double total = 0;
    for (const double r : rows) total += r;
    return total;
}

/// Discrete I(nu, mu).
inline double mutual_energy(const DiscretizedMeasure& a, const DiscretizedMeasure& b, std::size_t workers) {
    const auto rows = parallel_map(
        a.size(),
        [&](std::size_t i) {
            double acc = 0;
            for (std::size_t j = 0; j < b.size(); ++j) acc += b.weights[j] * log_kernel(a.points[i], b.points[j]);
            return a.weights[i] * acc;
        },
        workers);
    double total = 0;
    for (const double r : rows) total += r;
    return total;
}

/// int log 1/|x - c| d mu(x).
inline double point_energy(const DiscretizedMeasure& mu, cplx c) {
    double acc = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weights[i] * log_kernel(mu.points[i], c);
    return acc;
}

/// Components carrying the sinks at lambda_1 and lambda_2, when present.
struct Sinks {
    std::optional<int> k1_component;
    std::optional<int> k2_component;
};

inline Sinks sinks(const RationalSymbol& s) {
    Sinks out;
    const auto& sp = s.special;
    const int n = s.p + s.q;
    if (sp.lambda1.is_finite() && sp.k1 < n) out.k1_component = -s.q + sp.k1;
    if (sp.lambda2.is_finite() && sp.k2 < n) out.k2_component = s.p - sp.k2;
    return out;
}

inline void check_admissible(const RationalSymbol& s, const MeasureVector& mv, double tolerance) {
    if (mv.q != s.q || mv.p != s.p || static_cast<int>(mv.components.size()) != s.p + s.q - 1)
        throw AdmissibilityError("measure vector does not match the symbol's index range");
    for (int k = s.k_min(); k <= s.k_max(); ++k) {
        const auto& mu = mv.at(k);
        for (const double w : mu.weights)
            if (w < 0) throw AdmissibilityError("negative weight in component " + std::to_string(k));
        if (std::abs(mu.total - s.masses.m(k)) > tolerance)
            throw AdmissibilityError("component " + std::to_string(k) + " has mass " + format_double(mu.total) +
                                     ", expected " + format_double(s.masses.m(k)));
    }
}

}  // namespace detail

/**
 * J = sum_k I(nu_k) - sum_k I(nu_k, nu_{k+1})
 *     - (1/k_1) int log 1/|x - lambda_1| d nu_{-q+k_1} - (1/k_2) int log 1/|x - lambda_2| d nu_{p-k_2},
 * the sink terms present when lambda_i is finite and k_i < p + q.
 */
inline double energy(const RationalSymbol& s, const MeasureVector& mv, const EquilibriumOptions& opt = {}) {
    detail::check_admissible(s, mv, opt.mass_tolerance);
    double J = 0;
    for (int k = s.k_min(); k <= s.k_max(); ++k)
        J += detail::self_energy(detail::atoms_of(mv.at(k)), opt.self_energy, opt.workers);
    for (int k = s.k_min(); k < s.k_max(); ++k) J -= detail::mutual_energy(mv.at(k), mv.at(k + 1), opt.workers);
    const auto sk = detail::sinks(s);
    if (sk.k1_component)
        J -= detail::point_energy(mv.at(*sk.k1_component), s.special.lambda1.value) / s.special.k1;
    if (sk.k2_component)
        J -= detail::point_energy(mv.at(*sk.k2_component), s.special.lambda2.value) / s.special.k2;
    return J;
}

/**
 * J = sum_k (m_k m_{k+1} / 2) I(nu_k/m_k - nu_{k+1}/m_{k+1})
 *     + I(nu_{-q+k_1}) / (2 k_1 m_{-q+k_1}) + I(nu_{p-k_2}) / (2 k_2 m_{p-k_2}) - sink terms.
 */
inline double energy_alternative(const RationalSymbol& s, const MeasureVector& mv, const EquilibriumOptions& opt = {}) {
    detail::check_admissible(s, mv, opt.mass_tolerance);
    const auto& sp = s.special;
    auto mass = [&](int k) { return s.masses.m(k); };
    double J = 0;
    for (int k = s.k_min(); k < s.k_max(); ++k) {
        const double a = mass(k), b = mass(k + 1);
        if (a == 0 || b == 0) continue;
        detail::Atoms atoms = detail::atoms_of(mv.at(k), 1.0 / a);
        atoms.append(mv.at(k + 1), -1.0 / b);
        J += 0.5 * a * b * detail::self_energy(atoms, opt.self_energy, opt.workers);
    }
    const int c1 = -s.q + sp.k1, c2 = s.p - sp.k2;
    if (mv.has(c1) && mass(c1) > 0)
        J += detail::self_energy(detail::atoms_of(mv.at(c1)), opt.self_energy, opt.workers) / (2.0 * sp.k1 * mass(c1));
    if (mv.has(c2) && mass(c2) > 0)
        J += detail::self_energy(detail::atoms_of(mv.at(c2)), opt.self_energy, opt.workers) / (2.0 * sp.k2 * mass(c2));
    const auto sk = detail::sinks(s);
    if (sk.k1_component) J -= detail::point_energy(mv.at(*sk.k1_component), sp.lambda1.value) / sp.k1;
    if (sk.k2_component) J -= detail::point_energy(mv.at(*sk.k2_component), sp.lambda2.value) / sp.k2;
    return J;
}

/**
 * U(lambda) = int log|lambda - x| d mu(x). At a node the node's own
 * contribution is replaced by its cell average w (log(h/2) - 1).
 */
inline double discrete_potential(const DiscretizedMeasure& mu, cplx lambda) {
    double acc = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double d = std::abs(lambda - mu.points[i]);
        if (d <= 1e-14 * (1 + std::abs(lambda))) {
            const double h = mu.spans.empty() ? 0.0 : mu.spans[i];
            if (h > 0) acc += mu.weights[i] * (std::log(h / 2) - 1);
        } else {
            acc += mu.weights[i] * std::log(d);
        }
    }
    return acc;
}

struct ELResult {
    int k = 0;
    double mean = 0;
    double max_deviation = 0;
    std::vector<double> values;
};

/**
 * 2 U_k - U_{k+1} - U_{k-1} - (1/k_1) log|lambda - lambda_1| - (1/k_2) log|lambda - lambda_2|
 * at the samples, the sink terms entering only on their own components.
 */
inline ELResult el_residual(const RationalSymbol& s, const MeasureVector& mv, int k, const CVec& samples) {
    if (!mv.has(k)) throw DegenerateError("k outside -q+1..p-1");
    const auto sk = detail::sinks(s);
    const auto& sp = s.special;
    ELResult out;
    out.k = k;
    for (const auto& lam : samples) {
        for (const auto& c : {sp.lambda1, sp.lambda2})
            if (c.is_finite() && std::abs(lam - c.value) < 1e-12 * (1 + std::abs(lam)))
                throw SampleOnSingularity("EL sample at lambda_1 or lambda_2");
        double v = 2 * discrete_potential(mv.at(k), lam);
        if (mv.has(k + 1)) v -= discrete_potential(mv.at(k + 1), lam);
        if (mv.has(k - 1)) v -= discrete_potential(mv.at(k - 1), lam);
        if (sk.k1_component && *sk.k1_component == k) v -= std::log(std::abs(lam - sp.lambda1.value)) / sp.k1;
        if (sk.k2_component && *sk.k2_component == k) v -= std::log(std::abs(lam - sp.lambda2.value)) / sp.k2;
        out.values.push_back(v);
    }
    if (out.values.empty()) return out;
    for (const double v : out.values) out.mean += v;
    out.mean /= static_cast<double>(out.values.size());
    for (const double v : out.values) out.max_deviation = std::max(out.max_deviation, std::abs(v - out.mean));
    return out;
}

/**
 * Up to `count` nodes of mu, evenly spread by index, at least `margin` of
 * their arc's length from an exceptional end and away from lambda_1, lambda_2.
 */
inline CVec el_samples(const RationalSymbol& s, const CurveFamily& fam, const DiscretizedMeasure& mu, std::size_t count,
                       double margin = 0.02) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const Arc& arc = fam.arcs.at(static_cast<std::size_t>(mu.arc[i]));
        const double L = arc.length(), t = mu.arclength[i];
        if (arc.start_exceptional && t < margin * L) continue;
        if (arc.end_exceptional && L - t < margin * L) continue;
        bool near_special = false;
        for (const auto& c : {s.special.lambda1, s.special.lambda2})
            if (c.is_finite() && std::abs(mu.points[i] - c.value) < margin * L) near_special = true;
        if (!near_special) eligible.push_back(i);
    }
    CVec out;
    if (eligible.empty() || count == 0) return out;
    const std::size_t m = std::min(count, eligible.size());
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t pick = (m == 1) ? eligible.size() / 2 : j * (eligible.size() - 1) / (m - 1);
        out.push_back(mu.points[eligible[pick]]);
    }
    return out;
}

/// The measures mu_k together with the curves they live on.
struct EquilibriumSolution {
    MeasureVector measures;
    std::vector<CurveFamily> curves;

    const CurveFamily& curve(int k) const { return curves.at(static_cast<std::size_t>(k + measures.q - 1)); }
};

/// Traces every Gamma_k and discretizes mu_k with n_points nodes each.
inline EquilibriumSolution equilibrium_measures(const RationalSymbol& s, int n_points, const CurveOptions& copt = {},
                                                const MeasureOptions& mopt = {}) {
    EquilibriumSolution sol;
    sol.measures.q = s.q;
    sol.measures.p = s.p;
    const BranchPointSet bps = branch_points(s, copt.algebraic);
    for (int k = s.k_min(); k <= s.k_max(); ++k) {
        sol.curves.push_back(trace_curves(s, k, bps, copt));
        sol.measures.components.push_back(discretize(s, k, sol.curves.back(), n_points, mopt));
    }
    return sol;
}

/// Same supports, weights drawn from a flat Dirichlet law and scaled to m_k.
inline MeasureVector random_admissible(const RationalSymbol& s, const MeasureVector& like, std::mt19937_64& rng) {
    MeasureVector out = like;
    std::exponential_distribution<double> expo(1.0);
    for (int k = s.k_min(); k <= s.k_max(); ++k) {
        auto& mu = out.at(k);
        double sum = 0;
        for (auto& w : mu.weights) sum += (w = expo(rng));
        const double m = s.masses.m(k);
        mu.total = 0;
        for (auto& w : mu.weights) {
            w = sum > 0 ? w * m / sum : 0.0;
            mu.total += w;
        }
        mu.total = m;
    }
    return out;
}

struct ProbeResult {
    double reference = 0;
    std::vector<double> trials;
    double minimum = 0;
    std::uint64_t seed = 0;
};

/// J of `trials` random admissible vectors on the supports of mv; records J(mv) as the reference.
inline ProbeResult boundedness_probe(const RationalSymbol& s, const MeasureVector& mv, int trials, std::uint64_t seed,
                                     const EquilibriumOptions& opt = {}) {
    ProbeResult out;
    out.seed = seed;
    out.reference = energy(s, mv, opt);
    std::mt19937_64 rng(seed);
    out.minimum = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const double J = energy(s, random_admissible(s, mv, rng), opt);
        out.trials.push_back(J);
        out.minimum = std::min(out.minimum, J);
    }
    return out;
}

struct EnergyReport {
    double J_direct = 0;
    double J_alternative = 0;
    std::vector<ELResult> el;
};

inline EnergyReport energy_report(const RationalSymbol& s, const EquilibriumSolution& sol, std::size_t samples,
                                  const EquilibriumOptions& opt = {}) {
    EnergyReport r;
    r.J_direct = energy(s, sol.measures, opt);
    r.J_alternative = energy_alternative(s, sol.measures, opt);
    for (int k = s.k_min(); k <= s.k_max(); ++k) {
        const CVec pts = el_samples(s, sol.curve(k), sol.measures.at(k), samples, opt.el_margin);
        r.el.push_back(el_residual(s, sol.measures, k, pts));
    }
    return r;
}

}  // namespace toeplitz_spectra
