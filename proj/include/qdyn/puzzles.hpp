#pragma once

// Combinatorial puzzles: pieces are gaps of the pulled-back cut system,
// described by their circle arcs and the ray pairs between them.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "angles.hpp"
#include "lamination.hpp"

namespace qdyn {

struct PuzzleSpec {
    int level = 0;
    int degree = 2;
    int sign = -1;
    std::vector<std::vector<Angle>> cuts;   // co-landing classes cutting the depth-0 puzzle
    double equipotential = 2.0;
    // Angle in the gap of the critical value; needed to pull classes back.
    std::optional<Angle> critical_value;

    AngleMap map() const { return {degree, sign}; }

    std::set<Angle> cut_angles() const {
        std::set<Angle> out;
        for (const auto& c : cuts) out.insert(c.begin(), c.end());
        return out;
    }

    void validate() const {
        if (degree < 2 || degree > degree_cap) throw InvalidInput("puzzle degree out of range");
        if (sign != 1 && sign != -1) throw InvalidInput("puzzle sign must be +1 or -1");
        if (level < 0) throw InvalidInput("puzzle level must be nonnegative");
        if (cuts.empty()) throw InvalidInput("puzzle needs at least one cut class");
        auto all = cut_angles();
        std::size_t total = 0;
        for (const auto& c : cuts) total += c.size();
        if (total != all.size()) throw InvalidInput("cut classes overlap");
        for (const auto& a : all)
            if (!all.count(map()(a))) throw InvalidInput("cut angles are not closed under the angle map");
        Lamination L{degree, sign, cuts};
        if (!unlinked(L)) throw InvalidInput("cut classes are linked");
    }
};

struct PuzzlePiece {
    int depth = 0;
    std::vector<std::pair<Angle, Angle>> arcs;   // counterclockwise circle arcs [from, to)
    std::vector<std::pair<Angle, Angle>> rays;   // ray pair closing arc i to arc i+1

    bool contains(const Angle& a) const {
        for (const auto& [from, to] : arcs)
            if (ccw_distance(from, a) < ccw_distance(from, to)) return true;
        return false;
    }

    // every arc of this piece inside some arc of the other
    bool inside(const PuzzlePiece& other) const {
        for (const auto& [from, to] : arcs) {
            bool found = false;
            for (const auto& [a, b] : other.arcs) {
                Angle start = ccw_distance(a, from), span = ccw_distance(a, b), len = ccw_distance(from, to);
                // start + len <= span, without wrapping
                __int128 lhs = (static_cast<__int128>(start.num()) * len.den() + static_cast<__int128>(len.num()) * start.den()) * span.den();
                __int128 rhs = static_cast<__int128>(span.num()) * start.den() * len.den();
                if (a == b || (start < span && lhs <= rhs)) found = true;
            }
            if (!found) return false;
        }
        return true;
    }

    std::set<Angle> boundary_angles() const {
        std::set<Angle> out;
        for (const auto& [a, b] : arcs) {
            out.insert(a);
            out.insert(b);
        }
        return out;
    }
};

struct Puzzle {
    int depth = 0;
    std::vector<std::vector<Angle>> classes;   // non-singleton cut classes at this depth
    std::vector<PuzzlePiece> pieces;
};

namespace detail {

inline std::vector<PuzzlePiece> pieces_of(const std::vector<std::vector<Angle>>& classes, int depth) {
    std::vector<Angle> pts;
    for (const auto& c : classes) pts.insert(pts.end(), c.begin(), c.end());
    std::sort(pts.begin(), pts.end());
    std::map<Angle, int> index;
    for (std::size_t i = 0; i < pts.size(); ++i) index[pts[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> idx;
    for (const auto& c : classes) {
        std::vector<int> v;
        for (const auto& a : c) v.push_back(index.at(a));
        idx.push_back(v);
    }
    const int n = static_cast<int>(pts.size());
    std::vector<PuzzlePiece> out;
    for (const auto& g : gap_stats(idx, n)) {
        PuzzlePiece p;
        p.depth = depth;
        for (int a : g.arcs) p.arcs.emplace_back(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>((a + 1) % n)]);
        for (std::size_t k = 0; k < p.arcs.size(); ++k)
            p.rays.emplace_back(p.arcs[k].second, p.arcs[(k + 1) % p.arcs.size()].first);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace detail

inline Puzzle depth0_pieces(const PuzzleSpec& spec) {
    spec.validate();
    Puzzle P;
    for (auto c : spec.cuts) {
        if (c.size() < 2) continue;
        std::sort(c.begin(), c.end());
        P.classes.push_back(c);
    }
    if (P.classes.empty()) throw InvalidInput("every cut class is a singleton; nothing cuts the circle");
    std::sort(P.classes.begin(), P.classes.end());
    P.pieces = detail::pieces_of(P.classes, 0);
    return P;
}

// Pulls every class back through the angle map: the preimages of the
// critical value angle split the circle into `degree` sectors, each mapped
// bijectively, and each sector receives one copy of each class.
inline Puzzle refine(const Puzzle& P, const PuzzleSpec& spec) {
    if (!spec.critical_value) throw InvalidInput("refinement needs the critical value angle");
    const AngleMap m = spec.map();
    const Angle v = *spec.critical_value;
    for (const auto& c : P.classes)
        if (std::find(c.begin(), c.end(), v) != c.end()) throw InvalidInput("critical value angle lies on a cut ray");
    std::vector<Angle> sectors = m.preimages(v);
    std::sort(sectors.begin(), sectors.end());
    auto sector_of = [&](const Angle& a) {
        for (std::size_t i = sectors.size(); i-- > 0;)
            if (!(a < sectors[i])) return i;
        return sectors.size() - 1;
    };
    Puzzle out;
    out.depth = P.depth + 1;
    for (const auto& c : P.classes) {
        std::vector<std::vector<Angle>> split(sectors.size());
        for (const auto& a : c)
            for (const auto& pre : m.preimages(a)) split[sector_of(pre)].push_back(pre);
        for (auto& s : split) {
            std::sort(s.begin(), s.end());
            out.classes.push_back(s);
        }
    }
    std::sort(out.classes.begin(), out.classes.end());
    out.pieces = detail::pieces_of(out.classes, out.depth);
    return out;
}

// Angles whose k-th image is a cut angle.
inline std::set<Angle> boundary_angles(const PuzzleSpec& spec, int k) {
    std::set<Angle> cur = spec.cut_angles();
    const AngleMap m = spec.map();
    for (int i = 0; i < k; ++i) {
        std::set<Angle> next;
        for (const auto& a : cur)
            for (const auto& p : m.preimages(a)) next.insert(p);
        cur = std::move(next);
    }
    return cur;
}

namespace detail {

// class of each angle of B inside L, restricted to B
inline std::map<Angle, std::set<Angle>> restricted_classes(const Lamination& L, const std::set<Angle>& B) {
    std::map<Angle, std::set<Angle>> out;
    for (const auto& a : B) out[a] = {a};
    for (const auto& c : L.classes) {
        std::set<Angle> r;
        for (const auto& a : c)
            if (B.count(a)) r.insert(a);
        for (const auto& a : r) out[a] = r;
    }
    return out;
}

}  // namespace detail

// Every class of f among the depth-k boundary angles is also a class of g.
inline bool aligned(const Lamination& f, const Lamination& g, const PuzzleSpec& spec, int k) {
    auto B = boundary_angles(spec, k);
    return detail::restricted_classes(f, B) == detail::restricted_classes(g, B);
}

// First misaligned depth up to max_depth, or nullopt.
inline std::optional<int> first_misaligned(const Lamination& f, const Lamination& g, const PuzzleSpec& spec, int max_depth) {
    for (int k = 0; k <= max_depth; ++k)
        if (!aligned(f, g, spec, k)) return k;
    return std::nullopt;
}

struct CombDistance {
    double value = 0.0;
    double error_bound = 0.0;                 // from the depth cap and the level cap
    std::vector<std::optional<int>> misaligned;   // per level
};

// levels[m] is the puzzle of level m; the sum runs over m <= max_level.
inline CombDistance comb_distance(const Lamination& f, const Lamination& g, const std::vector<PuzzleSpec>& levels,
                                  int max_level, int max_depth = 10) {
    if (max_level < 0 || max_level >= static_cast<int>(levels.size())) throw InvalidInput("level cap outside the supplied puzzles");
    CombDistance out;
    for (int m = 0; m <= max_level; ++m) {
        auto k = first_misaligned(f, g, levels[static_cast<std::size_t>(m)], max_depth);
        out.misaligned.push_back(k);
        if (k) out.value += std::exp(-(*k + 1.0) * (m + 1.0));
        else out.error_bound += std::exp(-(max_depth + 2.0) * (m + 1.0));
    }
    out.error_bound += std::exp(-(max_level + 2.0)) / (1.0 - std::exp(-1.0));
    return out;
}

}  // namespace qdyn
