#pragma once

// Piecewise reflection maps on unions of univalent images of Jordan disks:
// Schwarz reflections of quadrature multi-domains and B-involutions.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "numerics.hpp"

namespace qdyn {

// 1/conj(z) for Schwarz reflections, 1/z for B-involutions.
enum class Involution { Conjugate, Plain };

inline ExtPoint apply_involution(Involution kind, const ExtPoint& z) {
    return kind == Involution::Conjugate ? conj_reciprocal(z) : reciprocal(z);
}

class NotUnivalent : public InvalidInput {
public:
    NotUnivalent(const std::string& what, cplx witness_a, cplx witness_b)
        : InvalidInput(what), a_(witness_a), b_(witness_b) {}
    // two disk points (or a critical point twice) exhibiting the failure
    std::pair<cplx, cplx> witness() const { return {a_, b_}; }

private:
    cplx a_, b_;
};

struct SingularPoint {
    enum class Kind { Cusp, DoublePoint };
    Kind kind;
    cplx point;
    int domain;
    double param;            // boundary parameter in [0,1) on that domain's disk
    int other_domain = -1;   // double points only
    double other_param = 0.0;
};

struct Location {
    enum class Where { Domain, Boundary, Tiling };
    Where where = Where::Tiling;
    int domain = -1;
    ExtPoint pre;  // preimage in the domain's disk
};

struct PointClass {
    enum class Kind { Escaping, NonEscaping, Undecided };
    Kind kind = Kind::Undecided;
    int rank = 0;  // escape time, or the budget spent
    std::string reason;

    bool escaping() const { return kind == Kind::Escaping; }
};

// An S-preimage: v solves R_k(v) = q outside the disk of domain k, and the
// preimage itself is R_{partner(k)}(eta(v)).
struct ReflectionPreimage {
    int target_domain;
    ExtPoint outer;
    ExtPoint point;
};

struct DomainSpec {
    RationalMap map;
    JordanDisk disk;
};

namespace detail {

inline ExtPoint boundary_image(const DomainSpec& d, double t) { return d.map(ExtPoint(d.disk.boundary_point(t))); }

inline double orient(cplx a, cplx b, cplx c) { return ((b - a) * std::conj(c - a)).imag(); }

inline bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
    double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

inline void check_univalent(const DomainSpec& d, int index, int samples = 2000) {
    const std::string tag = "domain " + std::to_string(index) + ": ";
    for (const auto& c : critical_points(d.map)) {
        if (d.disk.signed_distance(c.point) < -1e-7) {
            cplx w = c.point.is_finite() ? c.point.value() : cplx(0.0);
            throw NotUnivalent(tag + "critical point inside the disk", w, w);
        }
    }
    int poles = 0;
    for (const auto& p : rat_preimages(d.map, ExtPoint::infinity())) {
        Side s = d.disk.side(p.point, 1e-9);
        if (s == Side::Boundary) throw InvalidInput(tag + "pole on the disk boundary");
        if (s == Side::Inside) poles += p.multiplicity;
    }
    if (poles > 1) throw NotUnivalent(tag + "more than one pole inside the disk", 0.0, 0.0);
    std::vector<cplx> pts(static_cast<std::size_t>(samples));
    std::vector<double> ts(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        double t = (k + 0.5) / samples;
        ExtPoint z = boundary_image(d, t);
        if (z.is_infinite()) throw InvalidInput(tag + "boundary passes through infinity");
        pts[static_cast<std::size_t>(k)] = z.value();
        ts[static_cast<std::size_t>(k)] = t;
    }
    // sweep over segments sorted by their left end; only x-overlapping pairs are tested
    const std::size_t n = pts.size();
    auto lo = [&](std::size_t i) { return std::min(pts[i].real(), pts[(i + 1) % n].real()); };
    auto hi = [&](std::size_t i) { return std::max(pts[i].real(), pts[(i + 1) % n].real()); };
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lo(a) < lo(b); });
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t i = order[a];
        const double right = hi(i);
        for (std::size_t b = a + 1; b < n && lo(order[b]) <= right; ++b) {
            const std::size_t j = order[b];
            const std::size_t gap = i > j ? i - j : j - i;
            if (gap < 2 || gap == n - 1) continue;
            if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
                throw NotUnivalent(tag + "boundary curve crosses itself", d.disk.boundary_point(ts[std::min(i, j)]),
                                   d.disk.boundary_point(ts[std::max(i, j)]));
        }
    }
}

// Points spread over the closed disk, for overlap checks.
inline std::vector<cplx> disk_samples(const JordanDisk& disk, int rings = 4, int per_ring = 64) {
    std::vector<cplx> out;
    static constexpr double radii[] = {0.0, 0.5, 0.9, 0.999};
    for (int r = 0; r < rings; ++r)
        for (int k = 0; k < per_ring; ++k) {
            double rho = radii[r];
            cplx u = std::polar(rho, 2.0 * pi * (k + 0.25) / per_ring);
            std::visit(
                [&](const auto& s) {
                    using T = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<T, JordanDisk::Unit>) {
                        out.push_back(u);
                    } else if constexpr (std::is_same_v<T, JordanDisk::Round>) {
                        out.push_back(s.center + s.radius * u);
                    } else if constexpr (std::is_same_v<T, JordanDisk::RoundExterior>) {
                        if (rho > 0) out.push_back(s.center + s.radius / u);
                    } else {
                        cplx b = disk.boundary_point((k + 0.25) / per_ring);
                        if (disk.side(ExtPoint(b * (1.0 - 0.01 * r)), 0.0) == Side::Inside)
                            out.push_back(b * (1.0 - 0.01 * r));
                    }
                },
                disk.shape());
        }
    return out;
}

// Golden-section minimisation of f on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 120) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iters; ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

inline double wrap01(double t) { return t - std::floor(t); }

// Points where the boundaries of two domains touch.
inline std::vector<SingularPoint> find_contacts(const DomainSpec& A, int ia, const DomainSpec& B, int ib,
                                                int samples = 1200) {
    std::vector<cplx> pa(static_cast<std::size_t>(samples)), pb(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        ExtPoint za = boundary_image(A, static_cast<double>(k) / samples);
        ExtPoint zb = boundary_image(B, static_cast<double>(k) / samples);
        pa[static_cast<std::size_t>(k)] = za.is_finite() ? za.value() : cplx(1e300);
        pb[static_cast<std::size_t>(k)] = zb.is_finite() ? zb.value() : cplx(-1e300);
    }
    double spacing = 0.0;
    for (int k = 0; k < samples; ++k) {
        spacing = std::max(spacing, std::abs(pa[static_cast<std::size_t>((k + 1) % samples)] - pa[static_cast<std::size_t>(k)]));
        spacing = std::max(spacing, std::abs(pb[static_cast<std::size_t>((k + 1) % samples)] - pb[static_cast<std::size_t>(k)]));
    }
    std::vector<double> best(static_cast<std::size_t>(samples));
    std::vector<int> arg(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double b = std::numeric_limits<double>::infinity();
        int bj = 0;
        for (int j = 0; j < samples; ++j) {
            double dd = std::abs(pa[static_cast<std::size_t>(i)] - pb[static_cast<std::size_t>(j)]);
            if (dd < b) {
                b = dd;
                bj = j;
            }
        }
        best[static_cast<std::size_t>(i)] = b;
        arg[static_cast<std::size_t>(i)] = bj;
    }
    std::vector<SingularPoint> out;
    for (int i = 0; i < samples; ++i) {
        double here = best[static_cast<std::size_t>(i)];
        if (here > 3.0 * spacing) continue;
        if (here > best[static_cast<std::size_t>((i + 1) % samples)] ||
            here > best[static_cast<std::size_t>((i + samples - 1) % samples)])
            continue;
        double s = static_cast<double>(i) / samples, t = static_cast<double>(arg[static_cast<std::size_t>(i)]) / samples;
        double h = 2.0 / samples;
        auto dist = [&](double ss, double tt) {
            ExtPoint x = boundary_image(A, wrap01(ss)), y = boundary_image(B, wrap01(tt));
            if (x.is_infinite() || y.is_infinite()) return std::numeric_limits<double>::infinity();
            return std::abs(x.value() - y.value());
        };
        for (int round = 0; round < 60; ++round) {
            t = golden_min([&](double tt) { return dist(s, tt); }, t - h, t + h);
            s = golden_min([&](double ss) { return dist(ss, t); }, s - h, s + h);
            h = std::max(h * 0.5, 1e-12);
        }
        double dmin = dist(s, t);
        if (dmin > 1e-8) continue;
        cplx z = 0.5 * (boundary_image(A, wrap01(s)).value() + boundary_image(B, wrap01(t)).value());
        bool dup = false;
        for (const auto& o : out)
            if (std::abs(o.point - z) < 1e-6) dup = true;
        if (!dup) out.push_back({SingularPoint::Kind::DoublePoint, z, ia, wrap01(s), ib, wrap01(t)});
    }
    return out;
}

}  // namespace detail

// Common machinery for maps that act on each domain as
// R_{partner(j)} o eta o (R_j restricted to its disk)^{-1}.
class ReflectionSystem {
public:
    int degree() const { return degree_; }
    int domain_count() const { return static_cast<int>(domains_.size()); }
    const RationalMap& map(int j) const { return domains_.at(static_cast<std::size_t>(j)).spec.map; }
    const JordanDisk& disk(int j) const { return domains_.at(static_cast<std::size_t>(j)).spec.disk; }
    int partner(int j) const { return domains_.at(static_cast<std::size_t>(j)).partner; }
    Involution involution() const { return involution_; }
    const std::vector<SingularPoint>& singular_points() const { return singular_; }
    const std::vector<std::pair<int, int>>& contacts() const { return contacts_; }
    const Tolerances& tolerances() const { return tol_; }

    ExtPoint eta(const ExtPoint& z) const { return apply_involution(involution_, z); }

    ExtPoint boundary_point(int j, double t) const {
        return detail::boundary_image(domains_.at(static_cast<std::size_t>(j)).spec, t);
    }

    double singular_distance(const ExtPoint& z) const {
        double best = std::numeric_limits<double>::infinity();
        if (z.is_infinite()) return best;
        for (const auto& s : singular_) best = std::min(best, std::abs(z.value() - s.point));
        return best;
    }

    // Which closed domain contains z, with its disk preimage.
    Location locate(const ExtPoint& z, const Location* hint = nullptr) const {
        Location boundary;
        bool have_boundary = false;
        for (int j = 0; j < domain_count(); ++j) {
            const auto& d = domains_[static_cast<std::size_t>(j)];
            if (d.bounded) {
                if (z.is_infinite() || std::abs(z.value() - d.center) > d.radius) continue;
            }
            std::optional<cplx> warm;
            if (hint && hint->domain == j && hint->pre.is_finite()) warm = hint->pre.value();
            auto r = univalent_inverse(d.spec.map, z, d.spec.disk, warm, tol_.disk_band, root_options());
            if (r.status == InverseStatus::Inside) return {Location::Where::Domain, j, r.point};
            if (r.status == InverseStatus::Boundary && !have_boundary) {
                boundary = {Location::Where::Boundary, j, r.point};
                have_boundary = true;
            }
        }
        if (have_boundary) return boundary;
        return {};
    }

    ExtPoint reflect(const Location& loc) const {
        if (loc.where == Location::Where::Tiling) throw OutsideDomain("point lies in the closed tiling set");
        return map(partner(loc.domain))(eta(loc.pre));
    }

    ExtPoint operator()(const ExtPoint& z) const {
        Location loc = locate(z);
        if (loc.where == Location::Where::Tiling) throw OutsideDomain("point lies outside every domain");
        return reflect(loc);
    }

    // True when z lies in the rank-0 tile: outside every closed domain and
    // away from the singular points.
    bool in_fundamental_tile(const ExtPoint& z) const {
        Location loc = locate(z);
        return loc.where != Location::Where::Domain && singular_distance(z) > tol_.singular_band;
    }

    std::vector<ReflectionPreimage> preimages(const ExtPoint& q) const {
        std::vector<ReflectionPreimage> out;
        for (int k = 0; k < domain_count(); ++k) {
            for (const auto& v : rat_preimages(map(k), q, root_options())) {
                if (disk(k).side(v.point, tol_.disk_band) != Side::Outside) continue;
                ExtPoint w = map(partner(k))(eta(v.point));
                for (int m = 0; m < v.multiplicity; ++m) out.push_back({k, v.point, w});
            }
        }
        return out;
    }

    // Critical points of the map inside the domains, with multiplicity.
    // With free_only, critical points forced into the tile are skipped: those
    // coming from a critical point of R_k at infinity when R_k(infinity) is
    // in the tile (polynomial uniformizers).
    std::vector<Preimage> critical_points(bool free_only = false) const {
        std::vector<Preimage> out;
        for (int k = 0; k < domain_count(); ++k) {
            int j = partner(k);
            for (const auto& c : qdyn::critical_points(map(k), root_options())) {
                if (free_only && c.point.is_infinite() && locate(map(k)(c.point)).where == Location::Where::Tiling) continue;
                ExtPoint w = eta(c.point);
                if (disk(j).signed_distance(w) < -1e-7) out.push_back({map(j)(w), c.multiplicity});
            }
        }
        return out;
    }

    RootOptions root_options() const {
        RootOptions o;
        o.tol = tol_.root;
        o.max_iter = tol_.root_max_iter;
        return o;
    }

    void set_tolerances(const Tolerances& t) { tol_ = t; }

protected:
    struct Domain {
        DomainSpec spec;
        int partner = 0;
        bool bounded = false;
        cplx center{};
        double radius = 0.0;
    };

    ReflectionSystem(Involution kind, std::vector<DomainSpec> specs, std::vector<int> partners,
                     std::vector<SingularPoint> singular, std::vector<std::pair<int, int>> contacts, Tolerances tol)
        : involution_(kind), singular_(std::move(singular)), contacts_(std::move(contacts)), tol_(tol) {
        degree_ = -1;
        for (std::size_t j = 0; j < specs.size(); ++j) {
            Domain d{std::move(specs[j]), partners[j]};
            degree_ += d.spec.map.degree();
            bool has_pole = false;
            for (const auto& p : rat_preimages(d.spec.map, ExtPoint::infinity()))
                if (d.spec.disk.side(p.point, 0.0) != Side::Outside) has_pole = true;
            if (!has_pole) {
                std::vector<cplx> pts;
                for (int k = 0; k < 2000; ++k) pts.push_back(detail::boundary_image(d.spec, k / 2000.0).value());
                cplx c = 0.0;
                for (auto p : pts) c += p;
                c /= static_cast<double>(pts.size());
                double r = 0.0;
                for (auto p : pts) r = std::max(r, std::abs(p - c));
                d.bounded = true;
                d.center = c;
                d.radius = r * 1.05 + 1e-9;
            }
            domains_.push_back(std::move(d));
        }
    }

private:
    Involution involution_;
    std::vector<Domain> domains_;
    std::vector<SingularPoint> singular_;
    std::vector<std::pair<int, int>> contacts_;
    Tolerances tol_;
    int degree_ = 0;
};

namespace detail {

inline bool is_tree(int vertices, const std::vector<std::pair<int, int>>& edges) {
    if (static_cast<int>(edges.size()) != vertices - 1) return false;
    std::vector<int> parent(static_cast<std::size_t>(vertices));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        return parent[static_cast<std::size_t>(a)] == a ? a : parent[static_cast<std::size_t>(a)] = find(parent[static_cast<std::size_t>(a)]);
    };
    for (auto [a, b] : edges) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[static_cast<std::size_t>(ra)] = rb;
    }
    return true;
}

// Validation and singular-point search shared by both constructions.
inline std::pair<std::vector<SingularPoint>, std::vector<std::pair<int, int>>> analyse_domains(
    const std::vector<DomainSpec>& specs) {
    for (std::size_t j = 0; j < specs.size(); ++j) check_univalent(specs[j], static_cast<int>(j));
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = 0; j < specs.size(); ++j) {
            if (i == j) continue;
            for (cplx u : disk_samples(specs[i].disk)) {
                ExtPoint z = specs[i].map(ExtPoint(u));
                auto r = univalent_inverse(specs[j].map, z, specs[j].disk);
                if (r.status == InverseStatus::Inside)
                    throw InvalidInput("domains " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
            }
        }
    std::vector<SingularPoint> singular;
    for (std::size_t j = 0; j < specs.size(); ++j) {
        for (const auto& c : critical_points(specs[j].map)) {
            if (c.point.is_infinite()) continue;
            if (std::abs(specs[j].disk.signed_distance(c.point)) > 1e-6) continue;
            // recover the boundary parameter by a local search
            double t0 = 0.0, best = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 4000; ++k) {
                double dd = std::abs(specs[j].disk.boundary_point(k / 4000.0) - c.point.value());
                if (dd < best) {
                    best = dd;
                    t0 = k / 4000.0;
                }
            }
            double t = golden_min([&](double tt) { return std::abs(specs[j].disk.boundary_point(wrap01(tt)) - c.point.value()); },
                                  t0 - 1e-3, t0 + 1e-3);
            ExtPoint z = specs[j].map(c.point);
            if (z.is_infinite()) throw InvalidInput("cusp at infinity is not supported");
            singular.push_back({SingularPoint::Kind::Cusp, z.value(), static_cast<int>(j), wrap01(t)});
        }
    }
    std::vector<std::pair<int, int>> contacts;
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = i + 1; j < specs.size(); ++j)
            for (auto& s : find_contacts(specs[i], static_cast<int>(i), specs[j], static_cast<int>(j))) {
                singular.push_back(s);
                contacts.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
    return {singular, contacts};
}

}  // namespace detail

// Disjoint quadrature domains, each the univalent image of the unit disk.
class QuadratureMultiDomain {
public:
    const std::vector<RationalMap>& maps() const { return maps_; }
    const std::vector<SingularPoint>& singular_points() const { return singular_; }
    const std::vector<std::pair<int, int>>& contacts() const { return contacts_; }
    bool tree_like() const { return detail::is_tree(static_cast<int>(maps_.size()), contacts_); }
    int degree() const {
        int d = -1;
        for (const auto& m : maps_) d += m.degree();
        return d;
    }

private:
    friend QuadratureMultiDomain build_qmd(std::vector<RationalMap>, bool);
    std::vector<RationalMap> maps_;
    std::vector<SingularPoint> singular_;
    std::vector<std::pair<int, int>> contacts_;
};

// Validates univalence and disjointness and finds cusps and double points.
inline QuadratureMultiDomain build_qmd(std::vector<RationalMap> maps, bool require_tree = true) {
    if (maps.empty()) throw InvalidInput("at least one uniformizing map is required");
    std::vector<DomainSpec> specs;
    for (auto& m : maps) specs.push_back({m, JordanDisk::unit()});
    auto [singular, contacts] = detail::analyse_domains(specs);
    QuadratureMultiDomain q;
    q.maps_ = std::move(maps);
    q.singular_ = std::move(singular);
    q.contacts_ = std::move(contacts);
    if (require_tree && !q.tree_like()) throw InvalidInput("contact graph of the domains is not a tree");
    return q;
}

class SchwarzReflection : public ReflectionSystem {
public:
    explicit SchwarzReflection(const QuadratureMultiDomain& q, Tolerances tol = {})
        : ReflectionSystem(Involution::Conjugate, specs_of(q), identity(q.maps().size()), q.singular_points(),
                           q.contacts(), tol) {}

private:
    static std::vector<DomainSpec> specs_of(const QuadratureMultiDomain& q) {
        std::vector<DomainSpec> s;
        for (const auto& m : q.maps()) s.push_back({m, JordanDisk::unit()});
        return s;
    }
    static std::vector<int> identity(std::size_t n) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return v;
    }
};

inline ExtPoint schwarz_eval(const SchwarzReflection& S, const ExtPoint& z) { return S(z); }

class BInvolution : public ReflectionSystem {
public:
    BInvolution(std::vector<DomainSpec> specs, std::vector<int> partner, Tolerances tol = {})
        : BInvolution(validated(std::move(specs), partner), partner, tol) {}

private:
    struct Checked {
        std::vector<DomainSpec> specs;
        std::vector<SingularPoint> singular;
        std::vector<std::pair<int, int>> contacts;
    };

    BInvolution(Checked c, const std::vector<int>& partner, Tolerances tol)
        : ReflectionSystem(Involution::Plain, std::move(c.specs), partner, std::move(c.singular), std::move(c.contacts),
                           tol) {}

    static Checked validated(std::vector<DomainSpec> specs, const std::vector<int>& partner) {
        const int n = static_cast<int>(specs.size());
        if (n == 0) throw InvalidInput("at least one domain is required");
        if (static_cast<int>(partner.size()) != n) throw InvalidInput("one partner index per domain required");
        for (int j = 0; j < n; ++j) {
            int k = partner[static_cast<std::size_t>(j)];
            if (k < 0 || k >= n || partner[static_cast<std::size_t>(k)] != j)
                throw InvalidInput("partner map is not an involution");
        }
        for (int j = 0; j < n; ++j) {
            const JordanDisk& mine = specs[static_cast<std::size_t>(j)].disk;
            const JordanDisk& other = specs[static_cast<std::size_t>(partner[static_cast<std::size_t>(j)])].disk;
            for (int k = 0; k < 256; ++k) {
                cplx b = mine.boundary_point((k + 0.5) / 256.0);
                ExtPoint ib = reciprocal(ExtPoint(b));
                double scale = ib.is_finite() ? 1.0 + std::abs(ib.value()) : 1.0;
                if (std::abs(other.signed_distance(ib)) > 1e-8 * scale)
                    throw InvalidInput("1/z does not carry the boundary of disk " + std::to_string(j) +
                                       " onto the boundary of its partner");
            }
            for (cplx u : detail::disk_samples(mine, 3, 16)) {
                if (mine.side(ExtPoint(u), 1e-9) != Side::Inside) continue;
                if (other.side(reciprocal(ExtPoint(u)), 1e-9) != Side::Outside)
                    throw InvalidInput("1/z does not carry disk " + std::to_string(j) +
                                       " onto the complement of its partner");
            }
        }
        auto [singular, contacts] = detail::analyse_domains(specs);
        return {std::move(specs), std::move(singular), std::move(contacts)};
    }
};

inline ExtPoint binv_eval(const BInvolution& B, const ExtPoint& z) { return B(z); }

// Escape-time classification with respect to the rank-0 tile.
inline PointClass classify_point(const ReflectionSystem& S, const ExtPoint& z0, int max_iter) {
    const Tolerances& tol = S.tolerances();
    ExtPoint z = z0;
    Location prev;
    for (int n = 0;; ++n) {
        if (S.singular_distance(z) <= tol.singular_band) return {PointClass::Kind::Undecided, n, "singular band"};
        Location loc = S.locate(z, &prev);
        if (loc.where != Location::Where::Domain) return {PointClass::Kind::Escaping, n, ""};
        if (n == max_iter) break;
        z = S.reflect(loc);
        prev = loc;
    }
    if (S.singular_distance(z) <= tol.stagnation_radius)
        return {PointClass::Kind::Undecided, max_iter, "stagnation near a singular point"};
    return {PointClass::Kind::NonEscaping, max_iter, ""};
}

struct ConnectednessReport {
    enum class Verdict { Connected, Disconnected, Undecided };
    Verdict verdict = Verdict::Undecided;
    std::vector<Preimage> critical_points;
    std::vector<PointClass> classes;
};

inline const char* to_string(ConnectednessReport::Verdict v) {
    switch (v) {
        case ConnectednessReport::Verdict::Connected: return "connected";
        case ConnectednessReport::Verdict::Disconnected: return "disconnected";
        default: return "undecided";
    }
}

// Connected iff no critical orbit reaches the tiling set.
inline ConnectednessReport connectedness_test(const ReflectionSystem& S, int max_iter, bool free_only = false) {
    ConnectednessReport r;
    r.critical_points = S.critical_points(free_only);
    bool undecided = false;
    for (const auto& c : r.critical_points) {
        r.classes.push_back(classify_point(S, c.point, max_iter));
        if (r.classes.back().kind == PointClass::Kind::Escaping) {
            r.verdict = ConnectednessReport::Verdict::Disconnected;
        } else if (r.classes.back().kind == PointClass::Kind::Undecided) {
            undecided = true;
        }
    }
    if (r.verdict != ConnectednessReport::Verdict::Disconnected)
        r.verdict = undecided ? ConnectednessReport::Verdict::Undecided : ConnectednessReport::Verdict::Connected;
    return r;
}

// Verdicts for a list of increasing budgets.
inline std::vector<ConnectednessReport::Verdict> budget_sweep(const ReflectionSystem& S, const std::vector<int>& budgets) {
    std::vector<ConnectednessReport::Verdict> out;
    for (int b : budgets) out.push_back(connectedness_test(S, b).verdict);
    return out;
}

}  // namespace qdyn
