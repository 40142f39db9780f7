#pragma once

// Rays of the ideal-polygon reflection group, dynamical rays of reflection
// systems traced by inverse-branch continuation, and laminations.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "angles.hpp"
#include "lamination.hpp"
#include "hyperbolic.hpp"
#include "schwarz.hpp"

namespace qdyn {

// Vertices 0, r_{s1}(0), r_{s1} r_{s2}(0), ... of the tile path with the
// given symbols.
inline std::vector<cplx> gd_ray(const NielsenMap& N, const SymbolSequence& seq, int depth) {
    seq.validate(N.degree());
    std::vector<cplx> out{0.0};
    // applied innermost first; composing matrices loses the determinant
    for (int k = 0; k < depth; ++k) {
        if (seq.finite() && k >= static_cast<int>(seq.prefix.size())) break;
        cplx z = 0.0;
        for (int i = k; i >= 0; --i) z = N.reflection(seq.at(static_cast<std::size_t>(i)))(z);
        out.push_back(z);
    }
    return out;
}

struct RayTrace {
    std::vector<cplx> points;         // polyline
    std::vector<std::size_t> nodes;   // indices of the tile-path vertices p_0, p_1, ...
    int depth = 0;
    bool landed = false;
    double residual = 0.0;            // diameter of the last ten vertices
    std::string diagnostic;

    cplx endpoint() const { return points.at(nodes.back()); }
};

// Boundary of the rank-0 tile as d+1 arcs between singular points, in the
// positive orientation; arc s joins vertex s-1 to vertex s.
struct TileArc {
    int domain;
    double t_from;   // parameters decrease along the arc
    double length;
    double t_mid() const { return t_from - 0.5 * length; }
};

class RayTracer {
public:
    // marked: index among the singular points of the one sent to angle 0
    explicit RayTracer(const SchwarzReflection& S, std::optional<cplx> base = std::nullopt, int marked = -1)
        : S_(S), tol_(S.tolerances()) {
        build_boundary(marked);
        base_ = base ? *base : default_base();
        if (!S_.in_fundamental_tile(ExtPoint(base_))) throw InvalidInput("base point is not in the rank-0 tile");
        for (int s = 1; s <= static_cast<int>(arcs_.size()); ++s) build_first_lift(s);
    }

    int degree() const { return static_cast<int>(arcs_.size()) - 1; }
    cplx base() const { return base_; }
    const Tolerances& tolerances() const { return tol_; }
    const std::vector<cplx>& vertices() const { return vertices_; }
    const std::vector<TileArc>& arcs() const { return arcs_; }

    RayTrace trace(const SymbolSequence& seq, int depth) const {
        seq.validate(degree());
        if (seq.finite()) depth = std::min(depth, static_cast<int>(seq.prefix.size()));
        std::string note;
        for (int d = depth; d >= 1; --d) {
            try {
                RayTrace r = trace_exact(seq, d);
                if (d < depth) r.diagnostic = "truncated at depth " + std::to_string(d) + ": " + note;
                return r;
            } catch (const Error& e) {
                note = e.what();
            }
        }
        RayTrace r;
        r.points = {base_};
        r.nodes = {0};
        r.diagnostic = "no lift possible: " + note;
        return r;
    }

    // Inverse branch of the arc s applied to q, continued from the base point
    // along a straight segment; used for spot checks.
    const std::vector<cplx>& first_path(int s) const { return first_paths_.at(static_cast<std::size_t>(s - 1)); }

private:
    struct Path {
        std::vector<cplx> points;
        std::vector<std::size_t> nodes;
    };

    void build_boundary(int marked) {
        const auto& sing = S_.singular_points();
        if (sing.empty()) throw InvalidInput("ray tracing needs at least one singular point");
        // (domain, param) pairs of singular points, with the index of the point
        struct Mark {
            int domain;
            double t;
            int index;
            int other_domain;
            double other_t;
        };
        std::vector<Mark> marks;
        for (int i = 0; i < static_cast<int>(sing.size()); ++i) {
            const auto& s = sing[static_cast<std::size_t>(i)];
            if (s.kind == SingularPoint::Kind::Cusp) {
                marks.push_back({s.domain, s.param, i, -1, 0.0});
            } else {
                marks.push_back({s.domain, s.param, i, s.other_domain, s.other_param});
                marks.push_back({s.other_domain, s.other_param, i, s.domain, s.param});
            }
        }
        auto on_domain = [&](int j) {
            std::vector<Mark> v;
            for (const auto& m : marks)
                if (m.domain == j) v.push_back(m);
            std::sort(v.begin(), v.end(), [](const Mark& a, const Mark& b) { return a.t < b.t; });
            return v;
        };
        for (int j = 0; j < S_.domain_count(); ++j)
            if (on_domain(j).empty()) throw InvalidInput("a domain boundary carries no singular point");
        Mark start{};
        if (marked >= 0) {
            bool found = false;
            for (const auto& m : marks)
                if (m.index == marked && !found) {
                    start = m;
                    found = true;
                }
            if (!found) throw InvalidInput("marked singular point index out of range");
        } else {
            start = on_domain(0).front();
        }
        Mark cur = start;
        for (int guard = 0; guard < 4 * static_cast<int>(marks.size()) + 4; ++guard) {
            vertices_.push_back(sing[static_cast<std::size_t>(cur.index)].point);
            auto list = on_domain(cur.domain);
            // previous mark in decreasing parameter order
            std::size_t pos = 0;
            for (std::size_t k = 0; k < list.size(); ++k)
                if (std::abs(list[k].t - cur.t) < 1e-9 && list[k].index == cur.index) pos = k;
            const Mark& next = list[(pos + list.size() - 1) % list.size()];
            double len = cur.t - next.t;
            if (len <= 1e-12) len += 1.0;
            arcs_.push_back({cur.domain, cur.t, len});
            Mark arrive = next;
            Mark after = arrive.other_domain >= 0
                             ? Mark{arrive.other_domain, arrive.other_t, arrive.index, arrive.domain, arrive.t}
                             : arrive;
            if (after.domain == start.domain && std::abs(after.t - start.t) < 1e-9 && after.index == start.index) break;
            cur = after;
        }
        if (vertices_.size() < 3) throw InvalidInput("rank-0 tile has fewer than three boundary arcs");
        if (static_cast<int>(arcs_.size()) != S_.degree() + 1)
            throw InvalidInput("boundary arcs of the rank-0 tile do not number degree + 1");
    }

    bool in_tile(cplx z) const {
        ExtPoint p(z);
        return S_.locate(p).where == Location::Where::Tiling && S_.singular_distance(p) > 1e-6;
    }

    void bounding_box(cplx& lo, cplx& hi) const {
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (int j = 0; j < S_.domain_count(); ++j)
            for (int k = 0; k < 400; ++k) {
                ExtPoint z = S_.boundary_point(j, k / 400.0);
                if (z.is_infinite()) continue;
                x0 = std::min(x0, z.value().real());
                x1 = std::max(x1, z.value().real());
                y0 = std::min(y0, z.value().imag());
                y1 = std::max(y1, z.value().imag());
            }
        double pad = 0.1 * std::max(x1 - x0, y1 - y0);
        lo = cplx(x0 - pad, y0 - pad);
        hi = cplx(x1 + pad, y1 + pad);
    }

    double boundary_distance(cplx z) const {
        double best = 1e300;
        for (int j = 0; j < S_.domain_count(); ++j)
            for (int k = 0; k < 256; ++k) {
                ExtPoint b = S_.boundary_point(j, k / 256.0);
                if (b.is_finite()) best = std::min(best, std::abs(b.value() - z));
            }
        return best;
    }

    cplx default_base() const {
        cplx lo, hi;
        bounding_box(lo, hi);
        const int n = 48;
        cplx best = 0.0;
        double best_d = -1.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx z(lo.real() + (hi.real() - lo.real()) * (i + 0.5) / n, lo.imag() + (hi.imag() - lo.imag()) * (j + 0.5) / n);
                if (!in_tile(z)) continue;
                double d = boundary_distance(z);
                if (d > best_d) {
                    best_d = d;
                    best = z;
                }
            }
        if (best_d < 0) throw InvalidInput("could not find a point of the rank-0 tile");
        return best;
    }

    bool segment_in_tile(cplx a, cplx b, int samples = 64) const {
        for (int k = 0; k <= samples; ++k)
            if (!in_tile(a + (b - a) * (static_cast<double>(k) / samples))) return false;
        return true;
    }

    // Grid search for a polyline from a to b inside the rank-0 tile.
    std::vector<cplx> tile_route(cplx a, cplx b) const {
        if (segment_in_tile(a, b)) return {a, b};
        cplx lo, hi;
        bounding_box(lo, hi);
        const int n = 160;
        auto cell_center = [&](int i, int j) {
            return cplx(lo.real() + (hi.real() - lo.real()) * (i + 0.5) / n, lo.imag() + (hi.imag() - lo.imag()) * (j + 0.5) / n);
        };
        auto cell_of = [&](cplx z) {
            int i = std::clamp(static_cast<int>((z.real() - lo.real()) / (hi.real() - lo.real()) * n), 0, n - 1);
            int j = std::clamp(static_cast<int>((z.imag() - lo.imag()) / (hi.imag() - lo.imag()) * n), 0, n - 1);
            return std::pair{i, j};
        };
        std::vector<signed char> inside(static_cast<std::size_t>(n * n), -1);
        auto ok = [&](int i, int j) {
            auto& c = inside[static_cast<std::size_t>(i * n + j)];
            if (c < 0) c = in_tile(cell_center(i, j)) ? 1 : 0;
            return c == 1;
        };
        auto [si, sj] = cell_of(a);
        auto [ti, tj] = cell_of(b);
        std::vector<int> prev(static_cast<std::size_t>(n * n), -2);
        std::vector<int> queue{si * n + sj};
        prev[static_cast<std::size_t>(si * n + sj)] = -1;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            int c = queue[h];
            if (c == ti * n + tj) break;
            int ci = c / n, cj = c % n;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    int ni = ci + di, nj = cj + dj;
                    if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                    int nc = ni * n + nj;
                    if (prev[static_cast<std::size_t>(nc)] != -2) continue;
                    if (nc != ti * n + tj && !ok(ni, nj)) continue;
                    prev[static_cast<std::size_t>(nc)] = c;
                    queue.push_back(nc);
                }
        }
        if (prev[static_cast<std::size_t>(ti * n + tj)] == -2) throw InvalidInput("no route inside the rank-0 tile");
        std::vector<cplx> route{b};
        for (int c = prev[static_cast<std::size_t>(ti * n + tj)]; c >= 0 && c != si * n + sj; c = prev[static_cast<std::size_t>(c)])
            route.push_back(cell_center(c / n, c % n));
        route.push_back(a);
        std::reverse(route.begin(), route.end());
        // shortcut where straight segments stay inside
        std::vector<cplx> out{route.front()};
        std::size_t i = 0;
        while (i + 1 < route.size()) {
            std::size_t j = route.size() - 1;
            while (j > i + 1 && !segment_in_tile(route[i], route[j], 32)) --j;
            out.push_back(route[j]);
            i = j;
        }
        return out;
    }

    static std::vector<cplx> resample(const std::vector<cplx>& poly, double spacing) {
        std::vector<cplx> out{poly.front()};
        for (std::size_t k = 1; k < poly.size(); ++k) {
            cplx a = poly[k - 1], b = poly[k];
            int m = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
            for (int i = 1; i <= m; ++i) out.push_back(a + (b - a) * (static_cast<double>(i) / m));
        }
        return out;
    }

    // Newton for R(v) = q from v0; rejects steps that leave the basin of v0.
    std::optional<cplx> newton_outer(const RationalMap& R, cplx v0, cplx q) const {
        const Poly& n = R.num();
        const Poly& d = R.den();
        auto sep = [&](cplx v) {
            auto [f, fp] = R.level_poly(q).eval_with_derivative(v);
            (void)f;
            cplx fpp = R.level_poly(q).derivative().derivative()(v);
            return std::abs(fpp) > 0 ? 2.0 * std::abs(fp) / std::abs(fpp) : 1e300;
        };
        double radius = sep(v0);
        cplx v = v0;
        for (int k = 0; k < tol_.newton_steps; ++k) {
            auto [nv, ndv] = n.eval_with_derivative(v);
            auto [dv, ddv] = d.eval_with_derivative(v);
            cplx f = nv - q * dv, fp = ndv - q * ddv;
            if (fp == cplx(0.0)) return std::nullopt;
            cplx step = f / fp;
            v -= step;
            if (std::abs(v - v0) > 0.3 * radius) return std::nullopt;
            if (std::abs(step) <= 1e-13 * (1.0 + std::abs(v))) {
                if (sep(v) < tol_.branch_ambiguity) throw Error("branch selection ambiguous near a critical value");
                return v;
            }
        }
        return std::nullopt;
    }

    cplx track(const RationalMap& R, cplx v0, cplx q0, cplx q1, int depth = 0) const {
        if (auto v = newton_outer(R, v0, q1)) return *v;
        if (depth > 40) throw Error("continuation failed to converge");
        cplx mid = 0.5 * (q0 + q1);
        cplx vm = track(R, v0, q0, mid, depth + 1);
        return track(R, vm, mid, q1, depth + 1);
    }

    // Lifts a path starting at the base point through the branch of arc s.
    Path lift(int s, const Path& path) const {
        const auto& arc = arcs_[static_cast<std::size_t>(s - 1)];
        const RationalMap& R = S_.map(arc.domain);
        Path out;
        cplx v = first_outer_[static_cast<std::size_t>(s - 1)];
        cplx q = path.points.front();
        for (std::size_t k = 0; k < path.points.size(); ++k) {
            cplx qn = path.points[k];
            if (k > 0) v = track(R, v, q, qn);
            q = qn;
            if (std::abs(v) <= 1.0) throw Error("lift left the exterior of the disk");
            ExtPoint w = R(conj_reciprocal(ExtPoint(v)));
            if (w.is_infinite()) throw Error("lifted point at infinity");
            out.points.push_back(w.value());
        }
        out.nodes = path.nodes;
        return out;
    }

    void build_first_lift(int s) {
        const auto& arc = arcs_[static_cast<std::size_t>(s - 1)];
        const RationalMap& R = S_.map(arc.domain);
        double theta = 2.0 * pi * detail::wrap01(arc.t_mid());
        cplx edge = std::polar(1.0, theta);
        cplx x = R(ExtPoint(edge)).value();
        double rho = 0.05;
        cplx y;
        for (;; rho *= 0.5) {
            if (rho < 1e-6) throw InvalidInput("no approach to boundary arc from the rank-0 tile");
            y = R(ExtPoint(edge * (1.0 + rho))).value();
            bool good = in_tile(y);
            for (int k = 1; good && k < 16; ++k)
                good = S_.locate(R(ExtPoint(edge * (1.0 + rho * k / 16.0)))).where != Location::Where::Domain;
            if (good) break;
        }
        auto route = tile_route(base_, y);
        double scale = std::abs(route.back() - route.front()) + 1e-3;
        for (std::size_t k = 1; k < route.size(); ++k) scale = std::max(scale, std::abs(route[k] - route[k - 1]));
        std::vector<cplx> pts = resample(route, scale / 48.0);
        for (int k = 15; k >= 0; --k) pts.push_back(R(ExtPoint(edge * (1.0 + rho * k / 16.0))).value());
        pts.back() = x;
        // continue the inverse branch from the arc back to the base point
        cplx v = edge;
        std::vector<cplx> lifted(pts.size());
        lifted.back() = x;
        for (std::size_t k = pts.size() - 1; k-- > 0;) {
            v = track(R, v, pts[k + 1], pts[k]);
            lifted[k] = R(conj_reciprocal(ExtPoint(v))).value();
        }
        first_outer_.push_back(v);
        // base -> arc -> lifted base
        std::vector<cplx> gamma = pts;
        for (std::size_t k = pts.size() - 1; k-- > 0;) gamma.push_back(lifted[k]);
        first_paths_.push_back(gamma);
    }

    RayTrace trace_exact(const SymbolSequence& seq, int depth) const {
        Path g{{base_}, {0}};
        for (int k = depth; k >= 1; --k) {
            int s = seq.at(static_cast<std::size_t>(k - 1));
            Path up = lift(s, g);
            const auto& gamma = first_paths_[static_cast<std::size_t>(s - 1)];
            Path next;
            next.points = gamma;
            next.nodes = {0};
            std::size_t offset = gamma.size() - 1;
            for (std::size_t i = 1; i < up.points.size(); ++i) next.points.push_back(up.points[i]);
            for (std::size_t i : up.nodes) next.nodes.push_back(offset + i);
            g = std::move(next);
        }
        RayTrace r;
        r.points = std::move(g.points);
        r.nodes = std::move(g.nodes);
        r.depth = depth;
        std::size_t m = std::min<std::size_t>(10, r.nodes.size());
        double diam = 0.0;
        for (std::size_t i = r.nodes.size() - m; i < r.nodes.size(); ++i)
            for (std::size_t j = i + 1; j < r.nodes.size(); ++j)
                diam = std::max(diam, std::abs(r.points[r.nodes[i]] - r.points[r.nodes[j]]));
        r.residual = diam;
        r.landed = diam <= tol_.landing;
        return r;
    }

    const SchwarzReflection& S_;
    Tolerances tol_;
    std::vector<cplx> vertices_;
    std::vector<TileArc> arcs_;
    cplx base_{};
    std::vector<cplx> first_outer_;
    std::vector<std::vector<cplx>> first_paths_;
};

inline RayTrace dynamical_ray(const RayTracer& tracer, const SymbolSequence& seq, int depth) {
    return tracer.trace(seq, depth);
}

struct Landing {
    cplx point;            // last tile-path vertex
    double residual;       // Cauchy tail diameter
    bool converged;
    cplx extrapolated;     // limit of a fit in 1/k to the tail, for parabolic landing
    double spread;         // disagreement between two fit windows
};

namespace detail {

// Least-squares fit p_k ~ L + a k^-2 + b k^-3 + c k^-4 over k in [lo, K].
inline cplx tail_limit(const std::vector<cplx>& p, std::size_t lo) {
    const std::size_t K = p.size() - 1;
    const Eigen::Index n = static_cast<Eigen::Index>(K - lo + 1);
    Eigen::MatrixXcd A(n, 4);
    Eigen::VectorXcd b(n);
    for (std::size_t k = lo; k <= K; ++k) {
        double x = 1.0 / static_cast<double>(k);
        auto r = static_cast<Eigen::Index>(k - lo);
        A(r, 0) = 1.0;
        A(r, 1) = x * x;
        A(r, 2) = x * x * x;
        A(r, 3) = x * x * x * x;
        b(r) = p[k];
    }
    return A.colPivHouseholderQr().solve(b)(0);
}

}  // namespace detail

inline Landing landing_point(const RayTracer& tracer, const SymbolSequence& seq, int depth) {
    RayTrace r = tracer.trace(seq, depth);
    Landing out{r.endpoint(), r.residual, r.landed, r.endpoint(), 0.0};
    std::vector<cplx> nodes;
    for (auto i : r.nodes) nodes.push_back(r.points[i]);
    if (!r.landed && nodes.size() >= 24) {
        std::size_t K = nodes.size() - 1;
        cplx a = detail::tail_limit(nodes, K / 3);
        cplx b = detail::tail_limit(nodes, K / 2);
        out.extrapolated = a;
        out.spread = std::abs(a - b);
    }
    return out;
}

struct LaminationResult {
    Lamination lamination;
    std::vector<Angle> unresolved;   // rays that did not land within budget
    std::vector<cplx> landing;       // per input angle
};

// Groups rational angles by the landing points of their rays.
inline LaminationResult rational_lamination(const RayTracer& tracer, const std::vector<Angle>& angles, int depth) {
    const int d = tracer.degree();
    const double tol = tracer.tolerances().cluster;
    LaminationResult out;
    out.lamination.degree = d;
    out.lamination.sign = -1;
    std::vector<int> ok;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        RayTrace r = tracer.trace(itinerary_of(angles[i], d), depth);
        out.landing.push_back(r.endpoint());
        if (!r.landed && r.residual > tol) out.unresolved.push_back(angles[i]);
        else ok.push_back(static_cast<int>(i));
    }
    std::vector<int> parent(angles.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        return parent[static_cast<std::size_t>(a)] == a ? a : parent[static_cast<std::size_t>(a)] = find(parent[static_cast<std::size_t>(a)]);
    };
    for (std::size_t a = 0; a < ok.size(); ++a)
        for (std::size_t b = a + 1; b < ok.size(); ++b)
            if (std::abs(out.landing[static_cast<std::size_t>(ok[a])] - out.landing[static_cast<std::size_t>(ok[b])]) <= tol)
                parent[static_cast<std::size_t>(find(ok[a]))] = find(ok[b]);
    std::map<int, std::vector<Angle>> groups;
    for (int i : ok) groups[find(i)].push_back(angles[static_cast<std::size_t>(i)]);
    for (auto& [k, v] : groups)
        if (v.size() >= 2) out.lamination.classes.push_back(v);
    out.lamination.normalize();
    if (!unlinked(out.lamination)) throw Error("computed lamination has linked classes");
    return out;
}

// Input for the coarse lamination of a B-involution: where each of the p
// marked rays lands, and which domain the rays between consecutive marked
// rays land on.
struct CoarseInput {
    int rotation_order = 1;
    std::vector<cplx> landing;     // p points
    std::vector<int> arc_domain;   // p entries, arc (i/p, (i+1)/p)
};

struct CoarseLamination {
    std::vector<std::vector<int>> classes;  // indices i of the angles i/p
    std::vector<Gap> gaps;
    std::vector<int> gap_domain;
    bool symmetric = false;       // invariant under i -> -i
    bool degrees_match = false;   // deg R_j = n deg(G_j), summing to d+1
};

inline CoarseLamination coarse_lamination(const BInvolution& B, const CoarseInput& in, double tol = 1e-5) {
    const int p = static_cast<int>(in.landing.size());
    if (p < 1 || static_cast<int>(in.arc_domain.size()) != p) throw InvalidInput("one landing point and arc domain per marked ray");
    CoarseLamination out;
    std::vector<char> taken(static_cast<std::size_t>(p), 0);
    for (int i = 0; i < p; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        std::vector<int> cls{i};
        for (int j = i + 1; j < p; ++j)
            if (!taken[static_cast<std::size_t>(j)] && std::abs(in.landing[static_cast<std::size_t>(i)] - in.landing[static_cast<std::size_t>(j)]) <= tol) {
                cls.push_back(j);
                taken[static_cast<std::size_t>(j)] = 1;
            }
        if (cls.size() > 2) throw InvalidInput("coarse lamination has a polygon class");
        if (cls.size() == 2) out.classes.push_back(cls);
    }
    out.gaps = gap_stats(out.classes, p);
    int total = 0;
    out.degrees_match = true;
    for (const auto& g : out.gaps) {
        int j = in.arc_domain[static_cast<std::size_t>(g.arcs.front())];
        for (int a : g.arcs)
            if (in.arc_domain[static_cast<std::size_t>(a)] != j) throw InvalidInput("gap spans two domains");
        if (j < 0 || j >= B.domain_count()) throw InvalidInput("arc domain index out of range");
        out.gap_domain.push_back(j);
        if (B.map(j).degree() != in.rotation_order * g.degree) out.degrees_match = false;
        total += B.map(j).degree();
    }
    if (total != B.degree() + 1 || static_cast<int>(out.gaps.size()) != B.domain_count()) out.degrees_match = false;
    std::set<std::pair<int, int>> leaves, mirrored;
    for (const auto& c : out.classes) {
        leaves.insert({c[0], c[1]});
        int a = (p - c[0]) % p, b = (p - c[1]) % p;
        mirrored.insert({std::min(a, b), std::max(a, b)});
    }
    out.symmetric = leaves == mirrored;
    return out;
}

}  // namespace qdyn
