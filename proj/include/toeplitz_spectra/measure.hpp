/**
 * @file measure.hpp
 * @brief The limiting measures mu_k: density, discretization, Cauchy transform, log potential.
 *
 * On Gamma_k the density per unit arclength is
 *   Re[ (1/2 pi i) (F(lambda + i d tau) - F(lambda - i d tau)) tau ],  F = w_k'/w_k,
 * in the limit d -> 0, where tau is the unit tangent. The limit is taken by
 * Richardson extrapolation over three offsets proportional to the distance
 * to the nearest special point.
 */
#pragma once

#include "toeplitz_spectra/algebraic.hpp"
#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/curves.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/parallel.hpp"
#include "toeplitz_spectra/quadrature.hpp"
#include "toeplitz_spectra/symbol.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace toeplitz_spectra {

struct MeasureOptions {
    /// Densities are modelled, not evaluated, within this fraction of arc length of an exceptional end.
    double exceptional_margin = 1e-3;
    /// Base boundary-value offset relative to the local scale.
    double offset = 1e-4;
    std::size_t workers = 1;
    AlgebraicOptions algebraic;
};

struct DensitySample {
    cplx lambda;
    double density = 0;
    cplx tangent;
    /// Imaginary part of the extrapolated density formula.
    double imaginary_residual = 0;
    /// Relative disagreement of the two first-level extrapolants.
    double extrapolation_spread = 0;
};

struct DiscretizedMeasure {
    int k = 0;
    CVec points;
    std::vector<double> weights;
    /// Arclength covered by each node; the weights are density times span.
    std::vector<double> spans;
    std::vector<double> densities;
    CVec tangents;
    std::vector<int> arc;
    /// Arclength position of each node on its arc.
    std::vector<double> arclength;
    double total = 0;

    std::size_t size() const { return points.size(); }
};

/// Finite lambda_1, lambda_2 plus the exceptional and on-curve branch points of a family.
inline CVec special_points(const RationalSymbol& s, const CurveFamily& fam) {
    CVec out = fam.exceptional;
    out.insert(out.end(), fam.branch_points_on_curve.begin(), fam.branch_points_on_curve.end());
    if (s.special.lambda1.is_finite()) out.push_back(s.special.lambda1.value);
    if (s.special.lambda2.is_finite()) out.push_back(s.special.lambda2.value);
    return out;
}

/// Distance to the nearest special point, capped at 1.
inline double local_scale(const CVec& special, cplx lambda) {
    double d = 1.0;
    for (const auto& z : special) d = std::min(d, std::abs(lambda - z));
    return d;
}

/**
 * Density of mu_k at a point of Gamma_k. `scale` is the distance to the
 * nearest special point; offsets are offset * scale * {1, 1/2, 1/4}.
 */
inline DensitySample density_at(const RationalSymbol& s, int k, cplx lambda, cplx tangent, double scale = 1.0,
                                const MeasureOptions& opt = {}) {
    if (!(scale > 1e-13)) throw ExceptionalProximity("density requested at a special point");
    tangent /= std::abs(tangent);
    const cplx normal = cplx(0, 1) * tangent;
    auto jump = [&](double d) {
        const cplx plus = w_k_log_derivative(ordered_roots(s, lambda + d * normal, opt.algebraic), s.q, k);
        const cplx minus = w_k_log_derivative(ordered_roots(s, lambda - d * normal, opt.algebraic), s.q, k);
        return (plus - minus) * tangent / cplx(0, 2 * M_PI);
    };
    const double d0 = opt.offset * std::min(scale, 1.0);
    const cplx D1 = jump(d0), D2 = jump(d0 / 2), D3 = jump(d0 / 4);
    const cplx R1 = 2.0 * D2 - D1, R2 = 2.0 * D3 - D2;
    const cplx R = (4.0 * R2 - R1) / 3.0;
    DensitySample out;
    out.lambda = lambda;
    out.tangent = tangent;
    out.density = R.real();
    out.imaginary_residual = std::abs(R.imag());
    out.extrapolation_spread = std::abs(R1 - R2) / std::max(std::abs(R), 1e-300);
    if (out.density < -1e-8)
        throw NonPositiveDensity("density " + format_double(out.density) + " at (" + format_double(lambda.real()) +
                                 ", " + format_double(lambda.imag()) + ")");
    return out;
}

/// Density at a point of a traced family, using the family's special points for the scale.
inline DensitySample density_at(const RationalSymbol& s, int k, cplx lambda, cplx tangent, const CurveFamily& fam,
                                const MeasureOptions& opt = {}) {
    const double scale = local_scale(special_points(s, fam), lambda);
    if (scale < opt.exceptional_margin * fam.length())
        throw ExceptionalProximity("point within the exceptional margin");
    return density_at(s, k, lambda, tangent, scale, opt);
}

namespace detail {

/// density(d) = (c0 + c1 t + c2 t^2) / t with t = sqrt(d), d the arclength to the end.
struct EndpointModel {
    double c0 = 0, c1 = 0, c2 = 0;
    double operator()(double d) const {
        const double t = std::sqrt(d);
        return (c0 + c1 * t + c2 * t * t) / t;
    }
};

inline EndpointModel fit_endpoint(const std::vector<double>& dist, const std::vector<double>& dens) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(dist.size()), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(dist.size()));
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double t = std::sqrt(dist[i]);
        const auto r = static_cast<Eigen::Index>(i);
        M(r, 0) = 1;
        M(r, 1) = t;
        M(r, 2) = t * t;
        y(r) = dens[i] * t;
    }
    const Eigen::VectorXd c = M.colPivHouseholderQr().solve(y);
    return {c(0), c(1), c(2)};
}

/// Point at arclength `t` of an arc, pulled back onto the curve.
inline cplx arc_point(const RationalSymbol& s, int k, const Arc& arc, double t, double max_move,
                      const AlgebraicOptions& opt) {
    const cplx z = arc.at(t);
    const auto p = project_to_curve(s, k, z, 40, opt);
    if (p && std::abs(*p - z) <= max_move) return *p;
    return z;
}

inline double arc_density(const RationalSymbol& s, int k, cplx z, const CVec& special, const MeasureOptions& opt) {
    return density_at(s, k, z, curve_tangent(s, k, z, opt.algebraic), local_scale(special, z), opt).density;
}

/// Width of the endpoint-model region at `end`: margin times the smaller of L and the distance to other special points.
inline double end_margin(const CVec& special, cplx end, double arc_length, double margin) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& z : special) {
        const double r = std::abs(z - end);
        if (r > 1e-9 * (1 + std::abs(end))) d = std::min(d, r);
    }
    return margin * std::min(arc_length, d);
}

}  // namespace detail

/**
 * Limit of density * sqrt(d) at an exceptional end of an arc, d the
 * arclength to the end. Fitted from densities at d = L * 1e-4 .. 1.6e-3,
 * scaled down when another special point is close.
 */
inline double endpoint_constant(const RationalSymbol& s, int k, const CurveFamily& fam, cplx endpoint,
                                const MeasureOptions& opt = {}) {
    const Arc* best = nullptr;
    bool at_start = true;
    double bd = std::numeric_limits<double>::infinity();
    for (const auto& a : fam.arcs) {
        if (a.closed) continue;
        const double d0 = std::abs(a.points.front() - endpoint), d1 = std::abs(a.points.back() - endpoint);
        if (d0 < bd) {
            bd = d0;
            best = &a;
            at_start = true;
        }
        if (d1 < bd) {
            bd = d1;
            best = &a;
            at_start = false;
        }
    }
    if (!best) throw ExceptionalProximity("no arc ends at the requested point");
    const CVec special = special_points(s, fam);
    const double L = best->length();
    const double base = detail::end_margin(special, at_start ? best->points.front() : best->points.back(), L, 1e-4);
    std::vector<double> dist, dens;
    for (const double f : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double d = f * base;
        const cplx z = detail::arc_point(s, k, *best, at_start ? d : L - d, 2 * fam.step, opt.algebraic);
        dist.push_back(d);
        dens.push_back(detail::arc_density(s, k, z, special, opt));
    }
    return detail::fit_endpoint(dist, dens).c0;
}

/**
 * Composite Gauss–Legendre discretization of mu_k over a traced family.
 * Arcs get nodes in proportion to length. Exceptional ends are handled by
 * a cosine substitution that absorbs inverse square root growth; within the
 * exceptional margin the density comes from a fitted endpoint model.
 */
inline DiscretizedMeasure discretize(const RationalSymbol& s, int k, const CurveFamily& fam, int n_points,
                                     const MeasureOptions& opt = {}) {
    if (n_points < 2) throw DegenerateError("discretize needs at least 2 points");
    DiscretizedMeasure out;
    out.k = k;
    const double L = fam.length();
    if (fam.arcs.empty() || !(L > 0)) return out;

    // largest-remainder allocation over a per-arc floor
    const int floor_count = std::clamp(n_points / (2 * static_cast<int>(fam.arcs.size())), 2, 12);
    std::vector<int> counts(fam.arcs.size(), floor_count);
    {
        const int spare = std::max(0, n_points - floor_count * static_cast<int>(fam.arcs.size()));
        std::vector<double> share(fam.arcs.size());
        int given = 0;
        for (std::size_t a = 0; a < fam.arcs.size(); ++a) {
            share[a] = spare * fam.arcs[a].length() / L;
            const int whole = static_cast<int>(std::floor(share[a]));
            counts[a] += whole;
            share[a] -= whole;
            given += whole;
        }
        std::vector<std::size_t> order(fam.arcs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return share[x] > share[y]; });
        for (std::size_t i = 0; given < spare && i < order.size(); ++i, ++given) ++counts[order[i]];
    }

    const CVec special = special_points(s, fam);

    struct Node {
        int arc;
        double s, span, dist;
        bool near_start;
    };
    std::vector<Node> nodes;
    for (std::size_t a = 0; a < fam.arcs.size(); ++a) {
        const Arc& arc = fam.arcs[a];
        const double La = arc.length();
        const bool e0 = arc.start_exceptional, e1 = arc.end_exceptional;
        double hi = 1.0;
        if (e0 && e1) hi = M_PI;
        else if (e0 || e1) hi = M_PI / 2;
        const QuadratureRule rule = gauss_legendre(counts[a], 0.0, hi);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double th = rule.nodes[i];
            double pos = 0, jac = 0;
            if (e0 && e1) {
                pos = La * (1 - std::cos(th)) / 2;
                jac = La * std::sin(th) / 2;
            } else if (e0) {
                pos = La * (1 - std::cos(th));
                jac = La * std::sin(th);
            } else if (e1) {
                pos = La * std::cos(th);
                jac = La * std::sin(th);
            } else {
                pos = La * th;
                jac = La;
            }
            const double d0 = e0 ? pos : std::numeric_limits<double>::infinity();
            const double d1 = e1 ? La - pos : std::numeric_limits<double>::infinity();
            nodes.push_back({static_cast<int>(a), pos, rule.weights[i] * jac, std::min(d0, d1), d0 <= d1});
        }
    }

    // endpoint models, one per exceptional arc end
    std::vector<std::array<detail::EndpointModel, 2>> models(fam.arcs.size());
    std::vector<std::array<double, 2>> margins(fam.arcs.size(), {0.0, 0.0});
    for (std::size_t a = 0; a < fam.arcs.size(); ++a) {
        const Arc& arc = fam.arcs[a];
        margins[a] = {detail::end_margin(special, arc.points.front(), arc.length(), opt.exceptional_margin),
                      detail::end_margin(special, arc.points.back(), arc.length(), opt.exceptional_margin)};
    }
    {
        std::vector<std::pair<std::size_t, int>> ends;
        for (std::size_t a = 0; a < fam.arcs.size(); ++a) {
            if (fam.arcs[a].start_exceptional) ends.emplace_back(a, 0);
            if (fam.arcs[a].end_exceptional) ends.emplace_back(a, 1);
        }
        const auto fitted = parallel_map(
            ends.size(),
            [&](std::size_t e) {
                const Arc& arc = fam.arcs[ends[e].first];
                const double La = arc.length();
                const double m = detail::end_margin(special, ends[e].second == 0 ? arc.points.front() : arc.points.back(),
                                                    La, opt.exceptional_margin);
                std::vector<double> dist, dens;
                for (const double f : {1.0, 2.0, 4.0}) {
                    const double d = f * m;
                    const cplx z =
                        detail::arc_point(s, k, arc, ends[e].second == 0 ? d : La - d, 2 * fam.step, opt.algebraic);
                    dist.push_back(d);
                    dens.push_back(detail::arc_density(s, k, z, special, opt));
                }
                return detail::fit_endpoint(dist, dens);
            },
            opt.workers);
        for (std::size_t e = 0; e < ends.size(); ++e)
            models[ends[e].first][static_cast<std::size_t>(ends[e].second)] = fitted[e];
    }

    struct Evaluated {
        cplx z, tangent;
        double density;
    };
    const auto values = parallel_map(
        nodes.size(),
        [&](std::size_t i) {
            const Node& nd = nodes[i];
            const Arc& arc = fam.arcs[static_cast<std::size_t>(nd.arc)];
            const cplx z = detail::arc_point(s, k, arc, nd.s, 2 * fam.step, opt.algebraic);
            cplx tau;
            try {
                tau = curve_tangent(s, k, z, opt.algebraic);
            } catch (const SingularDerivative&) {
                const double h = 1e-3 * arc.length();
                tau = arc.at(nd.s + h) - arc.at(nd.s - h);
                tau /= std::abs(tau);
            }
            double dens;
            if (nd.dist < margins[static_cast<std::size_t>(nd.arc)][nd.near_start ? 0 : 1])
                dens = models[static_cast<std::size_t>(nd.arc)][nd.near_start ? 0 : 1](nd.dist);
            else
                dens = density_at(s, k, z, tau, local_scale(special, z), opt).density;
            return Evaluated{z, tau, std::max(dens, 0.0)};
        },
        opt.workers);

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out.points.push_back(values[i].z);
        out.tangents.push_back(values[i].tangent);
        out.densities.push_back(values[i].density);
        out.spans.push_back(nodes[i].span);
        out.weights.push_back(values[i].density * nodes[i].span);
        out.arc.push_back(nodes[i].arc);
        out.arclength.push_back(nodes[i].s);
        out.total += out.weights.back();
    }
    return out;
}

/**
 * Closed-form Cauchy transform of mu_k,
 *   -w_k'/w_k + chi (1 - m_{1,k}) / (lambda - lambda_1) - chi m_{2,k} / (lambda - lambda_2).
 * At lambda_1 and lambda_2 the removable singularity is resolved by averaging on a small circle.
 */
inline cplx cauchy_transform(const RationalSymbol& s, int k, cplx lambda, const AlgebraicOptions& opt = {}) {
    const auto& sp = s.special;
    const double m1 = s.masses.m1(k), m2 = s.masses.m2(k);
    auto raw = [&](cplx z) {
        const RootSystem rs = ordered_roots(s, z, opt);
        if (membership_gap(rs, s.q, k) < 1e-12) throw CurveProximity("lambda lies on Gamma_k");
        cplx v = -w_k_log_derivative(rs, s.q, k);
        if (sp.lambda1.is_finite()) v += (1.0 - m1) / (z - sp.lambda1.value);
        if (sp.lambda2.is_finite()) v -= m2 / (z - sp.lambda2.value);
        return v;
    };
    constexpr double near = 1e-6;
    for (const auto& c : {sp.lambda1, sp.lambda2}) {
        if (!c.is_finite() || std::abs(lambda - c.value) > near) continue;
        const double r = 1e-3;
        cplx acc{};
        constexpr int m = 16;
        for (int j = 0; j < m; ++j) acc += raw(c.value + r * std::polar(1.0, 2 * M_PI * (j + 0.5) / m));
        return acc / static_cast<double>(m);
    }
    return raw(lambda);
}

/// int dmu(x) / (lambda - x) by quadrature.
inline cplx cauchy_quadrature(const DiscretizedMeasure& mu, cplx lambda) {
    cplx acc{};
    for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weights[i] / (lambda - mu.points[i]);
    return acc;
}

/// int log|lambda - x| dmu(x) by quadrature.
inline double log_potential_quadrature(const DiscretizedMeasure& mu, cplx lambda) {
    double acc = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weights[i] * std::log(std::abs(lambda - mu.points[i]));
    return acc;
}

/// -log|w_k| + chi (1 - m_{1,k}) log|lambda - lambda_1| - chi m_{2,k} log|lambda - lambda_2|, without alpha_k.
inline double log_potential_uncalibrated(const RationalSymbol& s, int k, cplx lambda, const AlgebraicOptions& opt = {}) {
    const auto& sp = s.special;
    double v = -std::log(std::abs(w_k_value(ordered_roots(s, lambda, opt), s.q, k)));
    if (sp.lambda1.is_finite()) v += (1.0 - s.masses.m1(k)) * std::log(std::abs(lambda - sp.lambda1.value));
    if (sp.lambda2.is_finite()) v -= s.masses.m2(k) * std::log(std::abs(lambda - sp.lambda2.value));
    return v;
}

/// The constant alpha_k and where it was fixed.
struct PotentialCalibration {
    int k = 0;
    double alpha = 0;
    cplx reference;
    cplx check_point;
    /// Disagreement of the calibrated closed form with quadrature at check_point.
    double drift = 0;
};

/**
 * Fixes alpha_k at a reference point ten curve radii from the support and
 * verifies the result at a second point at the same distance.
 */
inline PotentialCalibration calibrate_potential(const RationalSymbol& s, int k, const DiscretizedMeasure& mu,
                                                double tolerance = 1e-4, const AlgebraicOptions& opt = {}) {
    if (mu.size() == 0) throw CalibrationError("empty measure");
    cplx c{};
    double wsum = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        c += mu.weights[i] * mu.points[i];
        wsum += mu.weights[i];
    }
    c /= wsum;
    double radius = 0;
    for (const auto& z : mu.points) radius = std::max(radius, std::abs(z - c));
    radius = std::max(radius, 1e-3);
    PotentialCalibration cal;
    cal.k = k;
    cal.reference = c + 10.0 * radius * std::polar(1.0, 0.3);
    cal.check_point = c + 10.0 * radius * std::polar(1.0, 2.2);
    cal.alpha = log_potential_quadrature(mu, cal.reference) - log_potential_uncalibrated(s, k, cal.reference, opt);
    cal.drift = std::abs(log_potential_uncalibrated(s, k, cal.check_point, opt) + cal.alpha -
                         log_potential_quadrature(mu, cal.check_point));
    if (cal.drift > tolerance)
        throw CalibrationError("log potential forms disagree by " + format_double(cal.drift));
    return cal;
}

struct LogPotential {
    double closed_form = 0;
    double quadrature = 0;
    double difference = 0;
};

/// Log potential of mu_k by the calibrated closed form and by quadrature.
inline LogPotential log_potential(const RationalSymbol& s, int k, cplx lambda, const DiscretizedMeasure& mu,
                                  const PotentialCalibration& cal, const AlgebraicOptions& opt = {}) {
    LogPotential out;
    out.closed_form = log_potential_uncalibrated(s, k, lambda, opt) + cal.alpha;
    out.quadrature = log_potential_quadrature(mu, lambda);
    out.difference = std::abs(out.closed_form - out.quadrature);
    return out;
}

}  // namespace toeplitz_spectra
