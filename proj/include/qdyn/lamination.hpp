#pragma once

// Laminations on the circle: classes of angles, unlinkedness, gap data,
// and the fixed-angle chord systems.

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include "angles.hpp"

namespace qdyn {

// Equivalence classes of angles, each class sorted, classes sorted by first angle.
struct Lamination {
    int degree = 2;
    int sign = -1;
    std::vector<std::vector<Angle>> classes;

    void normalize() {
        for (auto& c : classes) std::sort(c.begin(), c.end());
        std::sort(classes.begin(), classes.end());
    }

    // the class containing a, or {a}
    std::vector<Angle> class_of(const Angle& a) const {
        for (const auto& c : classes)
            if (std::find(c.begin(), c.end(), a) != c.end()) return c;
        return {a};
    }
};

namespace detail {

// strict interleaving of chords (a,b) and (c,e) on the circle
inline bool chords_cross(const Angle& a, const Angle& b, const Angle& c, const Angle& e) {
    auto inside = [&](const Angle& x) {
        Angle lo = std::min(a, b), hi = std::max(a, b);
        return lo < x && x < hi;
    };
    if (c == a || c == b || e == a || e == b) return false;
    return inside(c) != inside(e);
}

}  // namespace detail

inline bool unlinked(const Lamination& L) {
    std::vector<std::pair<Angle, Angle>> chords;
    std::vector<int> owner;
    for (std::size_t i = 0; i < L.classes.size(); ++i) {
        const auto& c = L.classes[i];
        for (std::size_t k = 0; c.size() >= 2 && k < c.size(); ++k) {
            if (c.size() == 2 && k == 1) break;
            chords.emplace_back(c[k], c[(k + 1) % c.size()]);
            owner.push_back(static_cast<int>(i));
        }
    }
    for (std::size_t i = 0; i < chords.size(); ++i)
        for (std::size_t j = i + 1; j < chords.size(); ++j)
            if (owner[i] != owner[j] &&
                detail::chords_cross(chords[i].first, chords[i].second, chords[j].first, chords[j].second))
                return false;
    return true;
}

// Chords on N equally spaced marked points, given as index pairs.
using Matching = std::vector<std::pair<int, int>>;

// All non-crossing sets of chords on the fixed angles j/(d+1) whose chords
// have pairwise disjoint closures.
inline std::vector<Matching> enumerate_fixed_ray_laminations(int d) {
    if (d < 1 || d > 20) throw InvalidInput("degree out of range for enumeration");
    std::function<std::vector<Matching>(int, int)> rec = [&](int lo, int hi) -> std::vector<Matching> {
        if (lo > hi) return {Matching{}};
        std::vector<Matching> out = rec(lo + 1, hi);
        for (int k = lo + 1; k <= hi; ++k)
            for (const auto& inner : rec(lo + 1, k - 1))
                for (const auto& outer : rec(k + 1, hi)) {
                    Matching m{{lo, k}};
                    m.insert(m.end(), inner.begin(), inner.end());
                    m.insert(m.end(), outer.begin(), outer.end());
                    out.push_back(m);
                }
        return out;
    };
    return rec(0, d);
}

inline Lamination to_lamination(const Matching& m, int d) {
    Lamination L;
    L.degree = d;
    for (auto [a, b] : m) L.classes.push_back({Angle(a, d + 1), Angle(b, d + 1)});
    L.normalize();
    return L;
}

struct Gap {
    std::vector<int> arcs;  // unit arcs (i, i+1) on the N marked points
    int degree = 0;         // number of unit arcs
    int cusps = 0;          // marked points interior to the ideal boundary
    int tangencies = 0;     // leaves on the boundary
};

// Gaps of a lamination whose classes live on the N points i/N.
inline std::vector<Gap> gap_stats(const std::vector<std::vector<int>>& classes, int N) {
    std::vector<int> pred(static_cast<std::size_t>(N), -1);
    std::vector<int> seen_in(static_cast<std::size_t>(N), 0);
    for (auto c : classes) {
        std::sort(c.begin(), c.end());
        if (c.size() < 2) continue;
        for (std::size_t k = 0; k < c.size(); ++k) {
            int v = c[k];
            if (v < 0 || v >= N) throw InvalidInput("class index out of range");
            if (seen_in[static_cast<std::size_t>(v)]++) throw InvalidInput("marked point in two classes");
            pred[static_cast<std::size_t>(v)] = c[(k + c.size() - 1) % c.size()];
        }
    }
    std::vector<char> used(static_cast<std::size_t>(N), 0);
    std::vector<Gap> out;
    for (int a0 = 0; a0 < N; ++a0) {
        if (used[static_cast<std::size_t>(a0)]) continue;
        Gap g;
        int cur = a0;
        for (int guard = 0; guard <= N; ++guard) {
            if (used[static_cast<std::size_t>(cur)]) throw InvalidInput("classes are linked");
            used[static_cast<std::size_t>(cur)] = 1;
            g.arcs.push_back(cur);
            int v = (cur + 1) % N;
            if (pred[static_cast<std::size_t>(v)] >= 0) {
                ++g.tangencies;
                cur = pred[static_cast<std::size_t>(v)];
            } else {
                ++g.cusps;
                cur = v;
            }
            if (cur == a0) break;
        }
        if (cur != a0) throw InvalidInput("classes are linked");
        std::sort(g.arcs.begin(), g.arcs.end());
        g.degree = static_cast<int>(g.arcs.size());
        out.push_back(g);
    }
    return out;
}

inline std::vector<Gap> gap_stats(const Matching& m, int d) {
    std::vector<std::vector<int>> classes;
    for (auto [a, b] : m) classes.push_back({a, b});
    return gap_stats(classes, d + 1);
}

}  // namespace qdyn
