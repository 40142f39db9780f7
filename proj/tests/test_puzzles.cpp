#include <gtest/gtest.h>

#include <random>

#include "qdyn/puzzles.hpp"

using namespace qdyn;

namespace {

PuzzleSpec alpha_spec() {
    PuzzleSpec s;
    s.cuts = {{Angle(1, 3), Angle(2, 3)}};
    s.critical_value = Angle(1, 2);
    return s;
}

// number of gaps of a chord system, counted by separation of unit arcs
int oracle_gap_count(const std::vector<std::vector<Angle>>& classes) {
    std::vector<Angle> pts;
    for (const auto& c : classes) pts.insert(pts.end(), c.begin(), c.end());
    std::sort(pts.begin(), pts.end());
    const std::size_t n = pts.size();
    auto inside = [&](std::size_t arc, const std::vector<Angle>& c, std::size_t side) {
        // arc (pts[arc], pts[arc+1]) lies between c[side] and c[side+1]
        Angle lo = c[side], hi = c[(side + 1) % c.size()];
        Angle mid_from = pts[arc];
        return ccw_distance(lo, mid_from) < ccw_distance(lo, hi);
    };
    std::vector<int> owner(n, -1);
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (owner[i] >= 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            bool same = true;
            for (const auto& c : classes)
                for (std::size_t s = 0; s < c.size() && same; ++s)
                    if (inside(i, c, s) != inside(j, c, s)) same = false;
            if (same) owner[j] = count;
        }
        ++count;
    }
    return count;
}

}  // namespace

TEST(Puzzle, DepthZeroExamples) {
    EXPECT_EQ(depth0_pieces(alpha_spec()).pieces.size(), 2u);
    PuzzleSpec rabbit;
    rabbit.sign = 1;
    rabbit.cuts = {{Angle(1, 7), Angle(2, 7), Angle(4, 7)}};
    EXPECT_EQ(depth0_pieces(rabbit).pieces.size(), 3u);
    PuzzleSpec extra = alpha_spec();
    extra.cuts.push_back({Angle(0, 1)});
    EXPECT_EQ(depth0_pieces(extra).pieces.size(), 2u);
}

TEST(Puzzle, DepthZeroRejectsBadCuts) {
    PuzzleSpec s;
    s.cuts = {{Angle(0, 1)}};
    EXPECT_THROW(depth0_pieces(s), InvalidInput);
    s.cuts = {{Angle(1, 5), Angle(2, 5)}};
    EXPECT_THROW(depth0_pieces(s), InvalidInput);
    s.cuts = {};
    EXPECT_THROW(depth0_pieces(s), InvalidInput);
}

TEST(Puzzle, PreimagesOfZero) {
    auto pre = AngleMap{2, -1}.preimages(Angle(0, 1));
    std::sort(pre.begin(), pre.end());
    EXPECT_EQ(pre, (std::vector<Angle>{Angle(0, 1), Angle(1, 2)}));
}

TEST(Puzzle, PieceCountsMatchOracles) {
    auto spec = alpha_spec();
    Puzzle P = depth0_pieces(spec);
    std::size_t expected = 2;
    for (int k = 0; k <= 6; ++k) {
        EXPECT_EQ(P.pieces.size(), expected) << "depth " << k;
        EXPECT_EQ(static_cast<int>(P.pieces.size()), oracle_gap_count(P.classes)) << "depth " << k;
        expected = 2 * expected - 1;
        if (k < 6) P = refine(P, spec);
    }
}

TEST(Puzzle, RefinementIsNested) {
    auto spec = alpha_spec();
    Puzzle P = depth0_pieces(spec);
    for (int k = 0; k < 5; ++k) {
        Puzzle Q = refine(P, spec);
        std::size_t angles_before = 0, angles_after = 0;
        for (const auto& c : P.classes) angles_before += c.size();
        for (const auto& c : Q.classes) angles_after += c.size();
        EXPECT_LE(angles_after, 2 * angles_before);
        for (const auto& q : Q.pieces) {
            int parents = 0;
            for (const auto& p : P.pieces) parents += q.inside(p);
            EXPECT_EQ(parents, 1);
            // the image of a piece's boundary is the boundary of a coarser piece
            std::set<Angle> image;
            for (const auto& a : q.boundary_angles()) image.insert(spec.map()(a));
            bool hit = false;
            for (const auto& p : P.pieces) hit = hit || p.boundary_angles() == image;
            EXPECT_TRUE(hit);
        }
        P = Q;
    }
}

TEST(Puzzle, RefineNeedsCriticalValueOffTheCuts) {
    auto spec = alpha_spec();
    auto P = depth0_pieces(spec);
    spec.critical_value.reset();
    EXPECT_THROW(refine(P, spec), InvalidInput);
    spec.critical_value = Angle(1, 3);
    EXPECT_THROW(refine(P, spec), InvalidInput);
}

TEST(Alignment, IdenticalAlwaysAligned) {
    auto spec = alpha_spec();
    Puzzle P = depth0_pieces(spec);
    for (int k = 0; k < 4; ++k) P = refine(P, spec);
    Lamination L{2, -1, P.classes};
    for (int k = 0; k <= 6; ++k) EXPECT_TRUE(aligned(L, L, spec, k));
}

TEST(Alignment, DifferenceAtDepthOne) {
    auto spec = alpha_spec();
    Lamination f{2, -1, {{Angle(1, 3), Angle(2, 3)}, {Angle(1, 6), Angle(5, 6)}}};
    Lamination g{2, -1, {{Angle(1, 3), Angle(2, 3)}}};
    EXPECT_TRUE(aligned(f, g, spec, 0));
    EXPECT_FALSE(aligned(f, g, spec, 1));
    EXPECT_EQ(first_misaligned(f, g, spec, 5), std::optional<int>(1));
}

TEST(Alignment, MonotoneInDepthOnRandomCorpus) {
    auto spec = alpha_spec();
    Puzzle P = depth0_pieces(spec);
    for (int k = 0; k < 5; ++k) P = refine(P, spec);
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        Lamination f{2, -1, {}}, g{2, -1, {}};
        std::bernoulli_distribution keep(0.9), split(0.15);
        for (const auto& c : P.classes) {
            if (keep(rng)) f.classes.push_back(c);
            if (split(rng)) continue;
            g.classes.push_back(c);
        }
        bool previous = true;
        for (int k = 0; k <= 6; ++k) {
            bool a = aligned(f, g, spec, k);
            if (!previous) {
                EXPECT_FALSE(a) << "trial " << trial << " depth " << k;
            }
            previous = a;
        }
    }
}

TEST(Alignment, LargerCutSetNeverDelaysMisalignment) {
    auto spec = alpha_spec();
    PuzzleSpec bigger = spec;
    bigger.cuts.push_back({Angle(1, 5), Angle(4, 5)});
    bigger.cuts.push_back({Angle(2, 5), Angle(3, 5)});
    Lamination f{2, -1, {{Angle(1, 3), Angle(2, 3)}, {Angle(1, 5), Angle(4, 5)}, {Angle(2, 5), Angle(3, 5)}, {Angle(1, 6), Angle(5, 6)}}};
    Lamination g{2, -1, {{Angle(1, 3), Angle(2, 3)}, {Angle(1, 6), Angle(5, 6)}}};
    auto small = first_misaligned(f, g, spec, 6);
    auto big = first_misaligned(f, g, bigger, 6);
    ASSERT_TRUE(big.has_value());
    if (small) {
        EXPECT_LE(*big, *small);
    }
}

TEST(CombDistance, ZeroForIdenticalAtEveryTruncation) {
    std::vector<PuzzleSpec> levels{alpha_spec(), alpha_spec(), alpha_spec()};
    levels[1].level = 1;
    levels[1].cuts = {{Angle(1, 5), Angle(4, 5)}, {Angle(2, 5), Angle(3, 5)}};
    levels[2].level = 2;
    levels[2].cuts = {{Angle(1, 9), Angle(2, 9)}, {Angle(4, 9), Angle(5, 9)}, {Angle(7, 9), Angle(8, 9)}};
    Lamination L{2, -1, {{Angle(1, 3), Angle(2, 3)}, {Angle(1, 5), Angle(4, 5)}}};
    for (int M = 0; M < 3; ++M) EXPECT_EQ(comb_distance(L, L, levels, M).value, 0.0);
}

TEST(CombDistance, GeometricSumWhenMisalignedAtDepthZero) {
    std::vector<PuzzleSpec> levels{alpha_spec(), alpha_spec(), alpha_spec()};
    levels[1].cuts = {{Angle(1, 5), Angle(4, 5)}, {Angle(2, 5), Angle(3, 5)}};
    levels[2].cuts = {{Angle(1, 9), Angle(2, 9)}, {Angle(4, 9), Angle(5, 9)}, {Angle(7, 9), Angle(8, 9)}};
    Lamination f{2, -1, {}};
    for (const auto& s : levels)
        for (const auto& c : s.cuts) f.classes.push_back(c);
    Lamination g{2, -1, {}};
    for (int M = 0; M < 3; ++M) {
        double expected = 0.0;
        for (int m = 0; m <= M; ++m) expected += std::exp(-(m + 1.0));
        auto d = comb_distance(f, g, levels, M);
        EXPECT_NEAR(d.value, expected, 1e-15);
        EXPECT_GT(d.error_bound, 0.0);
    }
    EXPECT_THROW(comb_distance(f, g, levels, 3), InvalidInput);
}
