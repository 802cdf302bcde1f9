/**
 * @file curves.hpp
 * @brief Tracing of Gamma_k = { lambda : |z_{q+k}(lambda)| = |z_{q+k+1}(lambda)| }.
 *
 * The membership gap is nonnegative, so the curve is not a sign change of
 * any globally defined function. Crossings are instead detected per grid
 * edge: the roots are continued from one end of the edge to the other and
 * the edge crosses Gamma_k when the continued images of the q + k smallest
 * roots are no longer the q + k smallest. The crossing itself is a sign
 * change of the continued separation and is bracketed with TOMS 748.
 *
 * Candidate cells are found by quadtree refinement with a first-order
 * predicate (gap versus local slope times cell radius) and then completed
 * by flood fill along detected crossings.
 */
#pragma once

#include "toeplitz_spectra/algebraic.hpp"
#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/parallel.hpp"
#include "toeplitz_spectra/symbol.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

namespace toeplitz_spectra {

struct CurveOptions {
    /// Upper bound on the distance between consecutive traced points.
    double resolution = 5e-3;
    /// Traced points must satisfy gap < curve_tolerance.
    double curve_tolerance = 1e-8;
    /// Branch points with gap below this lie on the curve.
    double branch_tolerance = 1e-5;
    /// Tracing box; defaults to a square around the branch points.
    std::optional<Box> box;
    /// Box doublings allowed while the curve reaches the boundary.
    int max_expansions = 2;
    /// Multiplier on the first-order cell predicate.
    double predicate_safety = 4.0;
    std::size_t workers = 1;
    AlgebraicOptions algebraic;
};

/// An oriented polyline on Gamma_k; orientation is by increasing index.
struct Arc {
    CVec points;
    /// Cumulative chord length, s[0] = 0.
    std::vector<double> s;
    bool closed = false;
    bool start_exceptional = false;
    bool end_exceptional = false;
    bool start_on_boundary = false;
    bool end_on_boundary = false;

    double length() const { return s.empty() ? 0.0 : s.back(); }

    /// Point at arclength t along the polyline (linear between vertices).
    cplx at(double t) const {
        if (t <= 0) return points.front();
        if (t >= length()) return points.back();
        const auto it = std::upper_bound(s.begin(), s.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - s.begin());
        const double u = (t - s[i - 1]) / (s[i] - s[i - 1]);
        return points[i - 1] + u * (points[i] - points[i - 1]);
    }
};

struct CurveFamily {
    int k = 0;
    std::vector<Arc> arcs;
    /// Branch points on the curve and graph vertices of degree other than 2.
    CVec exceptional;
    CVec branch_points_on_curve;
    Box box;
    double resolution = 0;
    /// Fine grid step actually used.
    double step = 0;
    /// The curve still reached the box boundary after the last expansion.
    bool unbounded = false;
    int expansions = 0;

    std::size_t point_count() const {
        std::size_t n = 0;
        for (const auto& a : arcs) n += a.points.size();
        return n;
    }
    double length() const {
        double L = 0;
        for (const auto& a : arcs) L += a.length();
        return L;
    }
};

namespace detail {

/// Roots z_{q+k}, z_{q+k+1} followed continuously near a point of Gamma_k.
struct TiedPair {
    cplx za, zb;
    cplx dza, dzb;
};

inline std::optional<TiedPair> tied_pair(const RootSystem& rs, int m) {
    if (m < 1 || m >= rs.finite_count()) return std::nullopt;
    const std::size_t a = static_cast<std::size_t>(m - 1), b = static_cast<std::size_t>(m);
    if (!rs.derivative_defined[a] || !rs.derivative_defined[b]) return std::nullopt;
    return TiedPair{rs.roots[a], rs.roots[b], rs.derivs[a], rs.derivs[b]};
}

inline std::size_t nearest_index(const RootSystem& rs, cplx target) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int j = 0; j < rs.finite_count(); ++j) {
        const double d = std::abs(rs.roots[static_cast<std::size_t>(j)] - target);
        if (d < bd) {
            bd = d;
            best = static_cast<std::size_t>(j);
        }
    }
    return best;
}

}  // namespace detail

/**
 * Newton projection onto Gamma_k along the gradient of
 * G = log|z_a| - log|z_b|, the two roots followed continuously.
 */
inline std::optional<cplx> project_to_curve(const RationalSymbol& s, int k, cplx lambda, int max_iterations = 40,
                                            const AlgebraicOptions& opt = {}) {
    RootSystem rs = ordered_roots(s, lambda, opt);
    auto pair = detail::tied_pair(rs, s.q + k);
    if (!pair) return std::nullopt;
    cplx za = pair->za, zb = pair->zb;
    for (int it = 0; it < max_iterations; ++it) {
        const std::size_t ia = detail::nearest_index(rs, za), ib = detail::nearest_index(rs, zb);
        if (ia == ib || !rs.derivative_defined[ia] || !rs.derivative_defined[ib]) return std::nullopt;
        za = rs.roots[ia];
        zb = rs.roots[ib];
        const double G = std::log(std::abs(za)) - std::log(std::abs(zb));
        const cplx u = rs.derivs[ia] / za - rs.derivs[ib] / zb;
        if (std::abs(G) < 1e-14 || std::abs(u) == 0) return lambda;
        const cplx delta = -G * std::conj(u) / std::norm(u);
        za += rs.derivs[ia] * delta;
        zb += rs.derivs[ib] * delta;
        lambda += delta;
        rs = ordered_roots(s, lambda, opt);
        if (std::abs(delta) < 1e-15 * (1 + std::abs(lambda))) break;
    }
    const double gap = membership_gap(rs, s.q, k);
    if (gap > 1e-8) return std::nullopt;
    return lambda;
}

/// Unit tangent of Gamma_k at a point on it: i conj(g') / |g'|, g = log z_a - log z_b.
inline cplx curve_tangent(const RationalSymbol& s, int k, cplx lambda, const AlgebraicOptions& opt = {}) {
    const RootSystem rs = ordered_roots(s, lambda, opt);
    const auto pair = detail::tied_pair(rs, s.q + k);
    if (!pair) throw SingularDerivative("no tangent at a multiple root");
    const cplx u = pair->dza / pair->za - pair->dzb / pair->zb;
    if (std::abs(u) == 0) throw SingularDerivative("degenerate tangent");
    return cplx(0, 1) * std::conj(u) / std::abs(u);
}

namespace detail {

struct GridVertex {
    cplx lambda;
    CVec roots;
    bool valid = false;
    double gap = kGapSentinel;
    double slope = std::numeric_limits<double>::infinity();
};

inline GridVertex grid_vertex(const RationalSymbol& s, int k, cplx lambda, const AlgebraicOptions& opt) {
    GridVertex v;
    v.lambda = lambda;
    const RootSystem rs = ordered_roots(s, lambda, opt);
    v.gap = membership_gap(rs, s.q, k);
    v.valid = rs.infinite_count == 0;
    for (int j = 0; j < rs.finite_count(); ++j) {
        if (rs.roots[static_cast<std::size_t>(j)] == cplx{}) v.valid = false;
        v.roots.push_back(rs.roots[static_cast<std::size_t>(j)]);
    }
    if (const auto pair = tied_pair(rs, s.q + k)) v.slope = std::abs(pair->dza / pair->za - pair->dzb / pair->zb);
    return v;
}

/// max over the first m continued roots minus min over the rest, in log modulus.
inline double separation(const CVec& z, int m) {
    double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double l = std::log(std::abs(z[i]));
        if (static_cast<int>(i) < m) hi = std::max(hi, l);
        else lo = std::min(lo, l);
    }
    return hi - lo;
}

inline std::optional<cplx> edge_crossing(const RationalSymbol& s, int k, const GridVertex& P, const GridVertex& Q,
                                         const AlgebraicOptions& opt) {
    if (!P.valid || !Q.valid) return std::nullopt;
    const int m = s.q + k;
    const double h0 = separation(P.roots, m);
    if (!(h0 < 0)) return std::nullopt;
    const CVec end = track_roots(s, P.roots, P.lambda, Q.lambda, opt);
    const double h1 = separation(end, m);
    if (!(h1 > 0)) return std::nullopt;
    const cplx d = Q.lambda - P.lambda;
    auto h = [&](double t) { return separation(track_roots(s, P.roots, P.lambda, P.lambda + t * d, opt), m); };
    std::uintmax_t iters = 100;
    const auto bracket = boost::math::tools::toms748_solve(h, 0.0, 1.0, h0, h1,
                                                           boost::math::tools::eps_tolerance<double>(46), iters);
    const double t = 0.5 * (bracket.first + bracket.second);
    return P.lambda + t * d;
}

enum class NodeKind { crossing, branch, junction };

struct GraphNode {
    cplx z;
    NodeKind kind = NodeKind::crossing;
    bool boundary = false;
};

/// One tracing pass on a fixed square grid.
class GridTracer {
public:
    GridTracer(const RationalSymbol& s, int k, const Box& box, const CVec& on_curve_branch, const CurveOptions& opt)
        : s_(s), k_(k), opt_(opt), branch_(on_curve_branch) {
        const double target = opt.resolution / 1.5;
        double width = std::max(box.width(), box.height());
        levels_ = std::max(2, static_cast<int>(std::ceil(std::log2(width / target))));
        // an irrational offset keeps grid lines off special points
        double step = width / std::ldexp(1.0, levels_);
        origin_ = cplx(box.re_min - 0.38196601125 * step, box.im_min - 0.2360679775 * step);
        width += step;
        levels_ = std::max(2, static_cast<int>(std::ceil(std::log2(width / target))));
        cells_ = std::int64_t{1} << levels_;
        step_ = width / static_cast<double>(cells_);
        box_ = Box{origin_.real(), origin_.real() + width, origin_.imag(), origin_.imag() + width};
    }

    double step() const { return step_; }
    const Box& box() const { return box_; }
    bool touched_boundary() const { return touched_boundary_; }

    void run() {
        seed_cells();
        flood();
    }

    CurveFamily extract() const;

private:
    using Key = std::uint64_t;
    Key vkey(std::int64_t i, std::int64_t j) const { return static_cast<Key>(i * (cells_ + 1) + j); }
    cplx vpos(std::int64_t i, std::int64_t j) const {
        return origin_ + cplx(static_cast<double>(i) * step_, static_cast<double>(j) * step_);
    }

    void ensure_vertices(std::vector<std::pair<std::int64_t, std::int64_t>> need) {
        std::sort(need.begin(), need.end());
        need.erase(std::unique(need.begin(), need.end()), need.end());
        need.erase(std::remove_if(need.begin(), need.end(),
                                  [&](const auto& ij) { return vertices_.count(vkey(ij.first, ij.second)) != 0; }),
                   need.end());
        const auto computed = parallel_map(
            need.size(),
            [&](std::size_t i) { return grid_vertex(s_, k_, vpos(need[i].first, need[i].second), opt_.algebraic); },
            opt_.workers);
        for (std::size_t i = 0; i < need.size(); ++i)
            vertices_.emplace(vkey(need[i].first, need[i].second), computed[i]);
    }

    const GridVertex& vertex(std::int64_t i, std::int64_t j) const { return vertices_.at(vkey(i, j)); }

    bool contains_branch(std::int64_t i0, std::int64_t j0, std::int64_t size) const {
        const cplx lo = vpos(i0, j0);
        const double w = static_cast<double>(size) * step_;
        for (const auto& b : branch_)
            if (b.real() >= lo.real() && b.real() < lo.real() + w && b.imag() >= lo.imag() && b.imag() < lo.imag() + w)
                return true;
        return false;
    }

    void seed_cells() {
        int level = std::min(levels_ - 1, 5);
        std::int64_t size = std::int64_t{1} << (levels_ - level);
        std::vector<std::pair<std::int64_t, std::int64_t>> cells;
        const std::int64_t count = std::int64_t{1} << level;
        for (std::int64_t I = 0; I < count; ++I)
            for (std::int64_t J = 0; J < count; ++J) cells.emplace_back(I * size, J * size);
        while (size >= 2) {
            std::vector<std::pair<std::int64_t, std::int64_t>> centers;
            for (const auto& c : cells) centers.emplace_back(c.first + size / 2, c.second + size / 2);
            ensure_vertices(centers);
            std::vector<std::pair<std::int64_t, std::int64_t>> next;
            const double radius = static_cast<double>(size) * step_ * M_SQRT1_2;
            for (const auto& c : cells) {
                const GridVertex& v = vertex(c.first + size / 2, c.second + size / 2);
                const bool possible = !v.valid || v.gap <= opt_.predicate_safety * v.slope * radius ||
                                      contains_branch(c.first, c.second, size);
                if (!possible) continue;
                const std::int64_t h = size / 2;
                next.emplace_back(c.first, c.second);
                next.emplace_back(c.first + h, c.second);
                next.emplace_back(c.first, c.second + h);
                next.emplace_back(c.first + h, c.second + h);
            }
            cells = std::move(next);
            size /= 2;
        }
        for (const auto& c : cells) wave_.insert(c);
    }

    /// Edge key: dir 0 runs from (i, j) to (i + 1, j), dir 1 from (i, j) to (i, j + 1).
    struct EdgeId {
        std::int64_t i, j;
        int dir;
        bool operator<(const EdgeId& o) const { return std::tie(i, j, dir) < std::tie(o.i, o.j, o.dir); }
        bool operator==(const EdgeId& o) const { return i == o.i && j == o.j && dir == o.dir; }
    };

    static std::array<EdgeId, 4> cell_edges(std::int64_t i, std::int64_t j) {
        return {EdgeId{i, j, 0}, EdgeId{i + 1, j, 1}, EdgeId{i, j + 1, 0}, EdgeId{i, j, 1}};
    }

    bool on_boundary(const EdgeId& e) const {
        return e.dir == 0 ? (e.j == 0 || e.j == cells_) : (e.i == 0 || e.i == cells_);
    }

    void flood() {
        std::set<std::pair<std::int64_t, std::int64_t>> done;
        while (!wave_.empty()) {
            std::vector<std::pair<std::int64_t, std::int64_t>> cells(wave_.begin(), wave_.end());
            wave_.clear();
            std::vector<std::pair<std::int64_t, std::int64_t>> need;
            std::vector<EdgeId> edges;
            for (const auto& c : cells) {
                done.insert(c);
                for (int di = 0; di <= 1; ++di)
                    for (int dj = 0; dj <= 1; ++dj) need.emplace_back(c.first + di, c.second + dj);
                for (const auto& e : cell_edges(c.first, c.second))
                    if (!edges_.count(e)) edges.push_back(e);
            }
            ensure_vertices(need);
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            const auto found = parallel_map(
                edges.size(),
                [&](std::size_t n) {
                    const EdgeId& e = edges[n];
                    const GridVertex& P = vertex(e.i, e.j);
                    const GridVertex& Q = e.dir == 0 ? vertex(e.i + 1, e.j) : vertex(e.i, e.j + 1);
                    return edge_crossing(s_, k_, P, Q, opt_.algebraic);
                },
                opt_.workers);
            for (std::size_t n = 0; n < edges.size(); ++n) {
                long id = -1;
                if (found[n]) {
                    id = static_cast<long>(nodes_.size());
                    const bool bnd = on_boundary(edges[n]);
                    nodes_.push_back({*found[n], NodeKind::crossing, bnd});
                    adjacency_.emplace_back();
                    if (bnd) touched_boundary_ = true;
                }
                edges_.emplace(edges[n], id);
            }
            for (const auto& c : cells) {
                connect_cell(c.first, c.second);
                const auto ce = cell_edges(c.first, c.second);
                const std::pair<std::int64_t, std::int64_t> across[4] = {{c.first, c.second - 1},
                                                                         {c.first + 1, c.second},
                                                                         {c.first, c.second + 1},
                                                                         {c.first - 1, c.second}};
                for (int t = 0; t < 4; ++t) {
                    if (edges_.at(ce[static_cast<std::size_t>(t)]) < 0) continue;
                    const auto& nb = across[t];
                    if (nb.first < 0 || nb.second < 0 || nb.first >= cells_ || nb.second >= cells_) continue;
                    if (!done.count(nb)) wave_.insert(nb);
                }
            }
        }
    }

    void link(long a, long b) {
        if (a == b) return;
        auto& la = adjacency_[static_cast<std::size_t>(a)];
        if (std::find(la.begin(), la.end(), b) != la.end()) return;
        la.push_back(b);
        adjacency_[static_cast<std::size_t>(b)].push_back(a);
    }

    long branch_node(std::size_t index) {
        auto it = branch_nodes_.find(index);
        if (it != branch_nodes_.end()) return it->second;
        const long id = static_cast<long>(nodes_.size());
        nodes_.push_back({branch_[index], NodeKind::branch, false});
        adjacency_.emplace_back();
        branch_nodes_.emplace(index, id);
        return id;
    }

    cplx junction_location(const std::vector<long>& ids, std::int64_t i, std::int64_t j) const;

    void connect_cell(std::int64_t i, std::int64_t j) {
        std::vector<long> ids;
        for (const auto& e : cell_edges(i, j)) {
            const long id = edges_.at(e);
            if (id >= 0) ids.push_back(id);
        }
        if (ids.empty()) return;
        const cplx lo = vpos(i, j);
        for (std::size_t b = 0; b < branch_.size(); ++b) {
            const cplx z = branch_[b];
            if (z.real() >= lo.real() && z.real() < lo.real() + step_ && z.imag() >= lo.imag() &&
                z.imag() < lo.imag() + step_) {
                const long bn = branch_node(b);
                for (const long id : ids) link(id, bn);
                return;
            }
        }
        if (ids.size() == 2) {
            link(ids[0], ids[1]);
        } else if (ids.size() >= 3) {
            const long jn = static_cast<long>(nodes_.size());
            nodes_.push_back({junction_location(ids, i, j), NodeKind::junction, false});
            adjacency_.emplace_back();
            for (const long id : ids) link(id, jn);
        }
    }

    const RationalSymbol& s_;
    int k_;
    CurveOptions opt_;
    CVec branch_;
    int levels_ = 0;
    std::int64_t cells_ = 0;
    double step_ = 0;
    cplx origin_;
    Box box_;
    bool touched_boundary_ = false;
    std::unordered_map<Key, GridVertex> vertices_;
    std::map<EdgeId, long> edges_;
    std::set<std::pair<std::int64_t, std::int64_t>> wave_;
    std::vector<GraphNode> nodes_;
    std::vector<std::vector<long>> adjacency_;
    std::map<std::size_t, long> branch_nodes_;
};

/**
 * Where three root moduli coincide Gamma_k may branch away from any branch
 * point. Newton on (log|z_a| - log|z_b|, log|z_b| - log|z_c|) locates the
 * triple point; failing that the crossing centroid is projected onto the curve.
 */
inline cplx GridTracer::junction_location(const std::vector<long>& ids, std::int64_t i, std::int64_t j) const {
    cplx centroid{};
    for (const long id : ids) centroid += nodes_[static_cast<std::size_t>(id)].z;
    centroid /= static_cast<double>(ids.size());
    const cplx lo = vpos(i, j);
    const int m = s_.q + k_;
    for (int first : {m - 1, m}) {
        if (first < 1 || first + 2 > s_.p + s_.q) continue;
        cplx lambda = centroid;
        RootSystem rs = ordered_roots(s_, lambda, opt_.algebraic);
        if (rs.finite_count() < first + 2) continue;
        cplx z[3] = {rs.roots[static_cast<std::size_t>(first - 1)], rs.roots[static_cast<std::size_t>(first)],
                     rs.roots[static_cast<std::size_t>(first + 1)]};
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            std::size_t idx[3];
            cplx u[3];
            bool defined = true;
            for (int r = 0; r < 3; ++r) {
                idx[r] = nearest_index(rs, z[r]);
                z[r] = rs.roots[idx[r]];
                defined = defined && rs.derivative_defined[idx[r]];
                u[r] = defined ? rs.derivs[idx[r]] / z[r] : cplx{};
            }
            if (!defined || idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) break;
            const double F1 = std::log(std::abs(z[0])) - std::log(std::abs(z[1]));
            const double F2 = std::log(std::abs(z[1])) - std::log(std::abs(z[2]));
            if (std::abs(F1) + std::abs(F2) < 1e-13) {
                ok = true;
                break;
            }
            // d/dx Re log z = Re u, d/dy Re log z = -Im u
            const cplx g1 = u[0] - u[1], g2 = u[1] - u[2];
            const double a = g1.real(), b = -g1.imag(), c = g2.real(), d = -g2.imag();
            const double det = a * d - b * c;
            if (std::abs(det) < 1e-300) break;
            const double dx = (-F1 * d + F2 * b) / det, dy = (-a * F2 + c * F1) / det;
            const cplx delta(dx, dy);
            for (int r = 0; r < 3; ++r) z[r] += rs.derivs[idx[r]] * delta;
            lambda += delta;
            if (std::abs(lambda - centroid) > 3 * step_) break;
            rs = ordered_roots(s_, lambda, opt_.algebraic);
        }
        const bool near = lambda.real() > lo.real() - step_ && lambda.real() < lo.real() + 2 * step_ &&
                          lambda.imag() > lo.imag() - step_ && lambda.imag() < lo.imag() + 2 * step_;
        if (ok && near && membership_gap(s_, lambda, k_) < opt_.curve_tolerance) return lambda;
    }
    if (const auto p = project_to_curve(s_, k_, centroid, 40, opt_.algebraic)) {
        if (std::abs(*p - centroid) < 2 * step_) return *p;
    }
    return centroid;
}

inline CurveFamily GridTracer::extract() const {
    CurveFamily fam;
    fam.k = k_;
    fam.box = box_;
    fam.step = step_;
    fam.resolution = opt_.resolution;
    const std::size_t n = nodes_.size();
    // one geometric junction can show up as several nearby nodes; merge them,
    // preferring a branch point as the representative
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t a = 0; a < n; ++a) {
        if (nodes_[a].kind == NodeKind::crossing) continue;
        for (std::size_t b = 0; b < a; ++b) {
            if (nodes_[b].kind == NodeKind::crossing || std::abs(nodes_[a].z - nodes_[b].z) > 3 * step_) continue;
            std::size_t ra = find(a), rb = find(b);
            if (ra == rb) continue;
            if (nodes_[ra].kind == NodeKind::branch) std::swap(ra, rb);
            parent[ra] = rb;
        }
    }
    std::vector<std::vector<long>> adj(n);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t rv = find(v);
        for (const long w : adjacency_[v]) {
            const long rw = static_cast<long>(find(static_cast<std::size_t>(w)));
            if (rw == static_cast<long>(rv)) continue;
            auto& list = adj[rv];
            if (std::find(list.begin(), list.end(), rw) == list.end()) list.push_back(rw);
        }
    }
    // crossings left hanging on both sides of a merged node are remnants of a collapsed loop
    for (std::size_t v = 0; v < n; ++v) {
        if (nodes_[v].kind != NodeKind::crossing || adjacency_[v].size() != 2 || adj[v].size() != 1) continue;
        const auto w = static_cast<std::size_t>(adj[v][0]);
        adj[w].erase(std::remove(adj[w].begin(), adj[w].end(), static_cast<long>(v)), adj[w].end());
        adj[v].clear();
    }
    auto is_break = [&](std::size_t v) {
        const auto& node = nodes_[v];
        return node.kind != NodeKind::crossing || adj[v].size() != 2;
    };
    auto is_exceptional = [&](std::size_t v) {
        const auto& node = nodes_[v];
        if (node.kind != NodeKind::crossing) return true;
        return !node.boundary && adj[v].size() != 2;
    };
    std::set<std::pair<long, long>> used;
    auto edge_used = [&](long a, long b) { return used.count({std::min(a, b), std::max(a, b)}) != 0; };
    auto mark = [&](long a, long b) { used.insert({std::min(a, b), std::max(a, b)}); };
    auto finish = [&](const std::vector<long>& path, bool closed) {
        Arc arc;
        arc.closed = closed;
        for (const long v : path) arc.points.push_back(nodes_[static_cast<std::size_t>(v)].z);
        arc.s.assign(arc.points.size(), 0.0);
        for (std::size_t i = 1; i < arc.points.size(); ++i)
            arc.s[i] = arc.s[i - 1] + std::abs(arc.points[i] - arc.points[i - 1]);
        const std::size_t a = static_cast<std::size_t>(path.front()), b = static_cast<std::size_t>(path.back());
        arc.start_exceptional = !closed && is_exceptional(a);
        arc.end_exceptional = !closed && is_exceptional(b);
        arc.start_on_boundary = nodes_[a].boundary;
        arc.end_on_boundary = nodes_[b].boundary;
        if (arc.points.size() >= 2 && arc.length() > 0) fam.arcs.push_back(std::move(arc));
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (!is_break(v)) continue;
        for (const long w : adj[v]) {
            if (edge_used(static_cast<long>(v), w)) continue;
            std::vector<long> path{static_cast<long>(v), w};
            mark(static_cast<long>(v), w);
            long prev = static_cast<long>(v), cur = w;
            while (!is_break(static_cast<std::size_t>(cur))) {
                const auto& nb = adj[static_cast<std::size_t>(cur)];
                const long nxt = nb[0] == prev ? nb[1] : nb[0];
                if (edge_used(cur, nxt)) break;
                mark(cur, nxt);
                path.push_back(nxt);
                prev = cur;
                cur = nxt;
            }
            finish(path, false);
        }
    }
    // closed loops made only of ordinary crossings
    for (std::size_t v = 0; v < n; ++v) {
        for (const long w : adj[v]) {
            if (edge_used(static_cast<long>(v), w)) continue;
            std::vector<long> path{static_cast<long>(v), w};
            mark(static_cast<long>(v), w);
            long prev = static_cast<long>(v), cur = w;
            while (cur != static_cast<long>(v)) {
                const auto& nb = adj[static_cast<std::size_t>(cur)];
                const long nxt = nb[0] == prev ? nb[1] : nb[0];
                if (edge_used(cur, nxt)) break;
                mark(cur, nxt);
                path.push_back(nxt);
                prev = cur;
                cur = nxt;
            }
            finish(path, path.back() == path.front());
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (adj[v].empty()) continue;
        if (nodes_[v].kind == NodeKind::branch) fam.branch_points_on_curve.push_back(nodes_[v].z);
        if (is_exceptional(v)) fam.exceptional.push_back(nodes_[v].z);
    }
    return fam;
}

}  // namespace detail

/// Branch points within tolerance of Gamma_k.
inline CVec branch_points_on_curve(const RationalSymbol& s, int k, const BranchPointSet& bps, double tolerance) {
    CVec out;
    for (const auto& b : bps.points)
        if (membership_gap(s, b, k) < tolerance) out.push_back(b);
    return out;
}

/// Square box around the branch points: half-width max(2.5 * spread, 2).
inline Box default_box(const CVec& branch) {
    cplx c{};
    for (const auto& b : branch) c += b;
    if (!branch.empty()) c /= static_cast<double>(branch.size());
    double spread = 0;
    for (const auto& b : branch) spread = std::max(spread, std::abs(b - c));
    return Box::centered(c, std::max(2.5 * spread, 2.0));
}

inline CurveFamily trace_curves(const RationalSymbol& s, int k, const BranchPointSet& bps, const CurveOptions& opt = {}) {
    if (k < s.k_min() || k > s.k_max())
        throw DegenerateError("k = " + std::to_string(k) + " outside " + std::to_string(s.k_min()) + ".." +
                              std::to_string(s.k_max()));
    if (!(opt.resolution > 0)) throw DegenerateError("resolution must be positive");
    const CVec on_curve = branch_points_on_curve(s, k, bps, opt.branch_tolerance);
    Box box = opt.box ? *opt.box : default_box(bps.points);
    for (const auto& b : bps.points) {
        if (box.contains(b)) continue;
        const double pad = 0.1 * std::max(box.width(), box.height());
        box.re_min = std::min(box.re_min, b.real() - pad);
        box.re_max = std::max(box.re_max, b.real() + pad);
        box.im_min = std::min(box.im_min, b.imag() - pad);
        box.im_max = std::max(box.im_max, b.imag() + pad);
    }
    for (int e = 0;; ++e) {
        detail::GridTracer tracer(s, k, box, on_curve, opt);
        tracer.run();
        CurveFamily fam = tracer.extract();
        fam.expansions = e;
        if (!tracer.touched_boundary()) return fam;
        if (e >= opt.max_expansions) {
            fam.unbounded = true;
            return fam;
        }
        box = box.expanded(2.0);
    }
}

inline CurveFamily trace_curves(const RationalSymbol& s, int k, const CurveOptions& opt = {}) {
    return trace_curves(s, k, branch_points(s, opt.algebraic), opt);
}

/// Branch points on Gamma_k plus graph vertices of degree other than 2.
inline CVec exceptional_points(const CurveFamily& fam) { return fam.exceptional; }

/// Largest distance from a point of `a` to the polyline set `b`.
inline double directed_hausdorff(const CVec& a, const std::vector<Arc>& b) {
    double worst = 0;
    for (const auto& z : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& arc : b)
            for (std::size_t i = 0; i + 1 < arc.points.size(); ++i) {
                const cplx p = arc.points[i], d = arc.points[i + 1] - p;
                const double len2 = std::norm(d);
                double t = len2 > 0 ? ((z - p) * std::conj(d)).real() / len2 : 0.0;
                t = std::clamp(t, 0.0, 1.0);
                best = std::min(best, std::abs(z - (p + t * d)));
            }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace toeplitz_spectra
