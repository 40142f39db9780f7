#pragma once

// The lifted correspondence on the disjoint union of spheres, one sphere
// per domain: u2 follows u1 when R(u2) = R(eta(u1)) and u2 != eta(u1).

#include <algorithm>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "schwarz.hpp"

namespace qdyn {

struct SheetPoint {
    ExtPoint z;
    int sheet = 0;
};

enum class LiftClass { Tiling, NonEscaping, Undecided };

inline const char* to_string(LiftClass c) {
    switch (c) {
        case LiftClass::Tiling: return "tiling";
        case LiftClass::NonEscaping: return "non-escaping";
        default: return "undecided";
    }
}

struct ForwardImage {
    std::vector<SheetPoint> points;   // with multiplicity
    bool near_node = false;
    double residual = 0.0;            // max chordal |R_j(w) - target|
};

class Correspondence {
public:
    explicit Correspondence(const ReflectionSystem& system) : S_(system) {
        for (const auto& s : S_.singular_points()) {
            std::vector<SheetPoint> group{{ExtPoint(S_.disk(s.domain).boundary_point(s.param)), s.domain}};
            if (s.kind == SingularPoint::Kind::DoublePoint)
                group.push_back({ExtPoint(S_.disk(s.other_domain).boundary_point(s.other_param)), s.other_domain});
            welds_.push_back(group);
        }
    }

    const ReflectionSystem& system() const { return S_; }
    int sheets() const { return S_.domain_count(); }
    int degree() const { return S_.degree(); }
    bool antiholomorphic() const { return S_.involution() == Involution::Conjugate; }

    // Groups of sheet points identified by the welding.
    const std::vector<std::vector<SheetPoint>>& welds() const { return welds_; }

    ExtPoint project(const SheetPoint& u) const {
        check(u);
        return S_.map(u.sheet)(u.z);
    }

    SheetPoint eta(const SheetPoint& u) const {
        check(u);
        return {S_.eta(u.z), S_.partner(u.sheet)};
    }

    double node_distance(const SheetPoint& u) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : welds_)
            for (const auto& n : g)
                if (n.sheet == u.sheet) best = std::min(best, chordal_distance(n.z, u.z));
        return best;
    }

    bool same_point(const SheetPoint& a, const SheetPoint& b, double tol = 1e-9) const {
        if (a.sheet == b.sheet && chordal_distance(a.z, b.z) <= tol) return true;
        for (const auto& g : welds_) {
            bool ha = false, hb = false;
            for (const auto& n : g) {
                ha = ha || (n.sheet == a.sheet && chordal_distance(n.z, a.z) <= tol);
                hb = hb || (n.sheet == b.sheet && chordal_distance(n.z, b.z) <= tol);
            }
            if (ha && hb) return true;
        }
        return false;
    }

    // All sheet points over c, with multiplicity.
    std::vector<SheetPoint> fiber(const ExtPoint& c) const {
        std::vector<SheetPoint> out;
        for (int j = 0; j < sheets(); ++j)
            for (const auto& p : rat_preimages(S_.map(j), c, S_.root_options()))
                for (int m = 0; m < p.multiplicity; ++m) out.push_back({p.point, j});
        return out;
    }

    ForwardImage forward(const SheetPoint& u) const {
        SheetPoint t = eta(u);
        ExtPoint c = project(t);
        ForwardImage out;
        const double excl = S_.tolerances().node_exclusion;
        out.near_node = node_distance(u) < excl || node_distance(t) < excl;
        for (int j = 0; j < sheets(); ++j) {
            const RationalMap& R = S_.map(j);
            Poly level = c.is_finite() ? R.level_poly(c.value()).trimmed(1e-15) : R.den();
            int at_infinity = R.degree() - std::max(level.degree(), 0);
            if (j == t.sheet) {
                if (t.z.is_finite()) {
                    level = level.divide_linear(t.z.value()).first;
                } else {
                    if (at_infinity == 0) throw RootFindingFailure("trivial root at infinity missing", 0.0);
                    --at_infinity;
                }
            }
            if (level.degree() > 0)
                for (const auto& r : poly_roots(level, S_.root_options()))
                    for (int m = 0; m < r.multiplicity; ++m) out.points.push_back({ExtPoint(r.value), j});
            for (int m = 0; m < at_infinity; ++m) out.points.push_back({ExtPoint::infinity(), j});
        }
        for (const auto& p : out.points) out.residual = std::max(out.residual, chordal_distance(project(p), c));
        return out;
    }

    LiftClass classify(const SheetPoint& u, int max_iter) const {
        PointClass pc = classify_point(S_, project(u), max_iter);
        if (pc.kind == PointClass::Kind::Escaping) return LiftClass::Tiling;
        if (pc.kind == PointClass::Kind::NonEscaping) return LiftClass::NonEscaping;
        return LiftClass::Undecided;
    }

    bool in_closed_disk(const SheetPoint& u) const {
        return S_.disk(u.sheet).side(u.z, S_.tolerances().disk_band) != Side::Outside;
    }

    // The branch that stays in the closed disks; defined over the
    // non-escaping set.
    SheetPoint poly_branch(const SheetPoint& u) const {
        if (!in_closed_disk(u)) throw OutsideDomain("point is not in the closed disk of its sheet");
        ExtPoint c = project(eta(u));
        Location loc = S_.locate(c);
        if (loc.where == Location::Where::Tiling) throw OutsideDomain("image leaves the closed domains");
        return {loc.pre, loc.domain};
    }

    // Cyclic successor of u in its fiber, ordered by sheet and then by
    // argument about the centroid of the finite fiber points.
    SheetPoint tau(const SheetPoint& u) const {
        auto f = ordered_fiber(project(u));
        std::size_t i = position(f, u);
        return f[(i + 1) % f.size()];
    }

    std::vector<SheetPoint> ordered_fiber(const ExtPoint& c) const {
        auto f = fiber(c);
        if (static_cast<int>(f.size()) != degree() + 1) throw RootFindingFailure("fiber has the wrong size", 0.0);
        for (std::size_t a = 0; a < f.size(); ++a)
            for (std::size_t b = a + 1; b < f.size(); ++b)
                if (f[a].sheet == f[b].sheet && chordal_distance(f[a].z, f[b].z) < 1e-6)
                    throw InvalidInput("critical fiber: deck transformation undefined");
        cplx centroid = 0.0;
        int finite = 0;
        for (const auto& p : f)
            if (p.z.is_finite()) {
                centroid += p.z.value();
                ++finite;
            }
        if (finite) centroid /= static_cast<double>(finite);
        auto key = [&](const SheetPoint& p) {
            double a = p.z.is_finite() ? std::arg(p.z.value() - centroid) : 10.0;
            return std::pair{p.sheet, a};
        };
        std::sort(f.begin(), f.end(), [&](const SheetPoint& a, const SheetPoint& b) { return key(a) < key(b); });
        return f;
    }

private:
    void check(const SheetPoint& u) const {
        if (u.sheet < 0 || u.sheet >= sheets()) throw InvalidInput("sheet index out of range");
    }

    static std::size_t position(const std::vector<SheetPoint>& f, const SheetPoint& u) {
        std::size_t best = f.size();
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i].sheet != u.sheet) continue;
            double d = chordal_distance(f[i].z, u.z);
            if (d < dist) {
                dist = d;
                best = i;
            }
        }
        if (best == f.size() || dist > 1e-6) throw RootFindingFailure("point not found in its own fiber", dist);
        return best;
    }

    ReflectionSystem S_;
    std::vector<std::vector<SheetPoint>> welds_;
};

inline ForwardImage corr_forward(const Correspondence& C, const SheetPoint& u) { return C.forward(u); }
inline LiftClass lift_classify(const Correspondence& C, const SheetPoint& u, int max_iter) { return C.classify(u, max_iter); }
inline SheetPoint poly_branch(const Correspondence& C, const SheetPoint& u) { return C.poly_branch(u); }
inline SheetPoint deck_tau(const Correspondence& C, const SheetPoint& u) { return C.tau(u); }

struct RelationReport {
    std::size_t samples_used = 0;
    std::vector<std::string> notes;        // dropped samples
    double eta_squared = 0.0;              // max residual of eta^2
    double tau_power = 0.0;                // max residual of tau^(d+1)
    // min over sampled nontrivial reduced words of each length of the
    // displacement of the sample
    std::vector<double> min_displacement;
    bool rank_increases = true;            // (tau eta)^r sends rank 0 to rank r
};

// Random reduced words in eta and tau^k on samples from the tiling set.
inline RelationReport group_relation_check(const Correspondence& C, const std::vector<SheetPoint>& samples, int word_length,
                                           std::uint64_t seed = 1, int words_per_length = 8) {
    RelationReport rep;
    const int d = C.degree();
    rep.min_displacement.assign(static_cast<std::size_t>(word_length + 1), std::numeric_limits<double>::infinity());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> power(1, d);
    auto tau_k = [&](SheetPoint u, int k) {
        for (int i = 0; i < k; ++i) u = C.tau(u);
        return u;
    };
    for (const auto& u0 : samples) {
        try {
            SheetPoint e2 = C.eta(C.eta(u0));
            rep.eta_squared = std::max(rep.eta_squared, chordal_distance(e2.z, u0.z) + (e2.sheet != u0.sheet));
            SheetPoint t = tau_k(u0, d + 1);
            rep.tau_power = std::max(rep.tau_power, chordal_distance(t.z, u0.z) + (t.sheet != u0.sheet));
            for (int len = 1; len <= word_length; ++len)
                for (int w = 0; w < words_per_length; ++w) {
                    SheetPoint u = u0;
                    bool start_eta = std::bernoulli_distribution(0.5)(rng);
                    for (int i = 0; i < len; ++i) {
                        bool use_eta = (i % 2 == 0) == start_eta;
                        u = use_eta ? C.eta(u) : tau_k(u, power(rng));
                    }
                    double disp = u.sheet != u0.sheet ? 1.0 : chordal_distance(u.z, u0.z);
                    auto& slot = rep.min_displacement[static_cast<std::size_t>(len)];
                    slot = std::min(slot, disp);
                }
            if (C.classify(u0, 0) == LiftClass::Tiling) {
                SheetPoint u = u0;
                for (int r = 1; r <= 5; ++r) {
                    u = C.tau(C.eta(u));
                    PointClass pc = classify_point(C.system(), C.project(u), r + 5);
                    if (pc.kind != PointClass::Kind::Escaping || pc.rank != r) rep.rank_increases = false;
                }
            }
            ++rep.samples_used;
        } catch (const Error& e) {
            rep.notes.push_back(std::string("sample dropped: ") + e.what());
        }
    }
    return rep;
}

}  // namespace qdyn
