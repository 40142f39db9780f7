#include <gtest/gtest.h>

#include "qdyn/rays.hpp"

using namespace qdyn;

namespace {

const SchwarzReflection& deltoid() {
    static const SchwarzReflection S(build_qmd({RationalMap(Poly({2.0, 0.0, 0.0, 1.0}), Poly({0.0, 2.0}))}));
    return S;
}

const RayTracer& tracer() {
    static const RayTracer T(deltoid());
    return T;
}

// Every chord set on N points with non-crossing chords and distinct endpoints,
// by brute force over subsets of all chords.
std::set<std::set<std::pair<int, int>>> oracle_matchings(int N) {
    std::vector<std::pair<int, int>> chords;
    for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b) chords.emplace_back(a, b);
    std::set<std::set<std::pair<int, int>>> out;
    for (unsigned long mask = 0; mask < (1ul << chords.size()); ++mask) {
        std::set<std::pair<int, int>> pick;
        std::vector<int> used(static_cast<std::size_t>(N), 0);
        bool ok = true;
        for (std::size_t i = 0; i < chords.size() && ok; ++i) {
            if (!(mask >> i & 1ul)) continue;
            auto [a, b] = chords[i];
            if (used[static_cast<std::size_t>(a)]++ || used[static_cast<std::size_t>(b)]++) ok = false;
            for (const auto& [c, e] : pick)
                if ((a < c && c < b) != (a < e && e < b)) ok = false;
            pick.insert(chords[i]);
        }
        if (ok) out.insert(pick);
    }
    return out;
}

// Gap data computed from separation: unit arcs i and j share a gap iff no
// chord separates them.
struct OracleGap {
    std::set<int> arcs;
    int cusps = 0;
    int tangencies = 0;
};

std::vector<OracleGap> oracle_gaps(const std::set<std::pair<int, int>>& chords, int N) {
    auto inside = [](int arc, std::pair<int, int> c) { return c.first <= arc && arc < c.second; };
    std::vector<OracleGap> gaps;
    std::vector<int> owner(static_cast<std::size_t>(N), -1);
    for (int i = 0; i < N; ++i) {
        if (owner[static_cast<std::size_t>(i)] >= 0) continue;
        OracleGap g;
        for (int j = 0; j < N; ++j) {
            bool sep = false;
            for (const auto& c : chords) sep = sep || inside(i, c) != inside(j, c);
            if (!sep) {
                g.arcs.insert(j);
                owner[static_cast<std::size_t>(j)] = static_cast<int>(gaps.size());
            }
        }
        for (int v = 0; v < N; ++v)
            if (g.arcs.count(v) && g.arcs.count((v + N - 1) % N)) ++g.cusps;
        for (const auto& c : chords)
            if (g.arcs.count(c.first) || g.arcs.count(c.second)) ++g.tangencies;
        gaps.push_back(g);
    }
    return gaps;
}

}  // namespace

TEST(TilePath, FixedSymbolsApproachVertex) {
    NielsenMap N(2);
    auto path = gd_ray(N, SymbolSequence{{}, {1, 3}}, 400);
    ASSERT_EQ(path.size(), 401u);
    EXPECT_EQ(path[0], cplx(0.0));
    for (std::size_t k = 2; k < path.size(); ++k) EXPECT_LT(std::abs(path[k] - 1.0), std::abs(path[k - 2] - 1.0) + 1e-15);
    EXPECT_LT(std::abs(path.back() - 1.0), 0.05);
}

TEST(TilePath, PeriodicSymbolsReachTheCircle) {
    NielsenMap N(2);
    auto path = gd_ray(N, itinerary_of(Angle(1, 7), 2), 60);
    EXPECT_GT(std::abs(path.back()), 1.0 - 1e-9);
    auto finite = gd_ray(N, SymbolSequence{{1, 2, 3}, {}}, 60);
    EXPECT_EQ(finite.size(), 4u);
    EXPECT_THROW(gd_ray(N, SymbolSequence{{1, 1}, {}}, 5), InvalidInput);
}

TEST(RayTracer, DeltoidBoundaryStructure) {
    const auto& T = tracer();
    EXPECT_EQ(T.degree(), 2);
    ASSERT_EQ(T.vertices().size(), 3u);
    EXPECT_NEAR(std::abs(T.vertices()[0] - cplx(1.5)), 0.0, 1e-9);
    // positive orientation of the tile boundary: vertices turn counterclockwise
    EXPECT_GT(std::arg(T.vertices()[1]), 0.0);
    EXPECT_LT(std::abs(T.base()), 0.1);
}

TEST(RayTracer, FirstLiftsJoinBaseToItsPreimages) {
    const auto& T = tracer();
    const auto& S = deltoid();
    auto pre = S.preimages(ExtPoint(T.base()));
    ASSERT_EQ(pre.size(), 3u);
    std::set<int> hit;
    for (int s = 1; s <= 3; ++s) {
        const auto& g = T.first_path(s);
        EXPECT_NEAR(std::abs(g.front() - T.base()), 0.0, 1e-12);
        EXPECT_LT(std::abs(S(ExtPoint(g.back())).value() - T.base()), 1e-9);
        for (int i = 0; i < 3; ++i)
            if (std::abs(pre[static_cast<std::size_t>(i)].point.value() - g.back()) < 1e-8) hit.insert(i);
    }
    EXPECT_EQ(hit.size(), 3u);
}

TEST(RayTracer, FixedRaysLandAtTheCusps) {
    const auto& T = tracer();
    for (int j = 0; j < 3; ++j) {
        auto L = landing_point(T, itinerary_of(Angle(j, 3), 2), 60);
        cplx cusp = T.vertices()[static_cast<std::size_t>(j)];
        EXPECT_LT(std::abs(L.point - cusp), 5e-3);
        EXPECT_LT(std::abs(L.extrapolated - cusp), 2e-4);
    }
}

TEST(RayTracer, NodesMapToTheShiftedRay) {
    const auto& T = tracer();
    const auto& S = deltoid();
    auto r = T.trace(itinerary_of(Angle(1, 4), 2), 12);
    auto shifted = T.trace(itinerary_of(Angle(1, 2), 2), 11);
    ASSERT_EQ(r.nodes.size(), 13u);
    for (std::size_t k = 1; k < r.nodes.size(); ++k) {
        ExtPoint next = S(ExtPoint(r.points[r.nodes[k]]));
        EXPECT_LT(std::abs(next.value() - shifted.points[shifted.nodes[k - 1]]), 1e-8);
    }
}

TEST(RayTracer, PeriodicRayLandsAtPeriodicPoint) {
    const auto& T = tracer();
    const auto& S = deltoid();
    auto L = landing_point(T, itinerary_of(Angle(1, 7), 2), 60);
    ASSERT_TRUE(L.converged);
    ExtPoint z(L.point);
    for (int k = 0; k < 6; ++k) z = S(z);
    EXPECT_LT(std::abs(z.value() - L.point), 1e-6);
}

TEST(RayTracer, PreperiodicRayLandsOnPreimageOfCusp) {
    const auto& T = tracer();
    const auto& S = deltoid();
    auto L = landing_point(T, itinerary_of(Angle(1, 2), 2), 60);
    EXPECT_LT(std::abs(S(ExtPoint(L.extrapolated)).value() - cplx(1.5)), 1e-3);
}

TEST(RayTracer, RejectsBaseOutsideTile) {
    EXPECT_THROW(RayTracer(deltoid(), cplx(5.0)), InvalidInput);
    SchwarzReflection card(build_qmd({RationalMap::polynomial(Poly({0.0, 1.0, 0.5}))}));
    EXPECT_THROW(RayTracer{card}, InvalidInput);
}

TEST(Lamination, DeltoidRaysLandAtDistinctPoints) {
    auto res = rational_lamination(tracer(), {Angle(1, 7), Angle(2, 7), Angle(4, 7), Angle(1, 3)}, 40);
    EXPECT_TRUE(res.unresolved.size() <= 1u);
    EXPECT_TRUE(res.lamination.classes.empty());
}

TEST(Lamination, LinkedClassesDetected) {
    Lamination L;
    L.classes = {{Angle(0, 1), Angle(1, 2)}, {Angle(1, 4), Angle(3, 4)}};
    EXPECT_FALSE(unlinked(L));
    L.classes = {{Angle(0, 1), Angle(1, 4)}, {Angle(1, 2), Angle(3, 4)}};
    EXPECT_TRUE(unlinked(L));
}

TEST(FixedRayLaminations, FourInDegreeTwo) {
    EXPECT_EQ(enumerate_fixed_ray_laminations(2).size(), 4u);
}

TEST(FixedRayLaminations, MatchBruteForceOracle) {
    const std::size_t motzkin[] = {1, 1, 2, 4, 9, 21, 51, 127};
    for (int d = 2; d <= 6; ++d) {
        const int N = d + 1;
        auto found = enumerate_fixed_ray_laminations(d);
        EXPECT_EQ(found.size(), motzkin[N]);
        std::set<std::set<std::pair<int, int>>> mine;
        for (const auto& m : found) mine.insert(std::set<std::pair<int, int>>(m.begin(), m.end()));
        auto oracle = oracle_matchings(N);
        EXPECT_EQ(mine, oracle) << d;
        for (const auto& m : found) {
            auto gaps = gap_stats(m, d);
            auto ogaps = oracle_gaps(std::set<std::pair<int, int>>(m.begin(), m.end()), N);
            ASSERT_EQ(gaps.size(), ogaps.size());
            int total = 0;
            for (const auto& g : gaps) {
                total += g.degree;
                EXPECT_EQ(g.degree, g.cusps + g.tangencies);
                bool matched = false;
                for (const auto& o : ogaps)
                    if (o.arcs == std::set<int>(g.arcs.begin(), g.arcs.end())) {
                        matched = true;
                        EXPECT_EQ(g.cusps, o.cusps);
                        EXPECT_EQ(g.tangencies, o.tangencies);
                        EXPECT_EQ(g.degree, o.cusps + o.tangencies);
                    }
                EXPECT_TRUE(matched);
            }
            EXPECT_EQ(total, d + 1);
            EXPECT_TRUE(unlinked(to_lamination(m, d)));
        }
    }
}

TEST(CoarseLamination, SwapSystemWithOneLeaf) {
    RationalMap r1 = RationalMap::polynomial(Poly({1.0, 0.0, 0.25}));
    RationalMap r2(Poly({-25.0, 84.0, -72.0}), Poly({16.0, -48.0, 36.0}));
    std::vector<DomainSpec> specs;
    specs.push_back({r1, JordanDisk::round(2.0, 1.0)});
    specs.push_back({r2, JordanDisk::exterior(2.0 / 3.0, 1.0 / 3.0)});
    BInvolution B(specs, {1, 0});
    CoarseInput in;
    in.rotation_order = 1;
    in.landing = {0.0, cplx(0, 1), 0.0, cplx(0, -1)};
    in.arc_domain = {0, 0, 1, 1};
    auto c = coarse_lamination(B, in);
    ASSERT_EQ(c.classes.size(), 1u);
    EXPECT_EQ(c.classes[0], (std::vector<int>{0, 2}));
    EXPECT_TRUE(c.symmetric);
    EXPECT_TRUE(c.degrees_match);
    in.rotation_order = 2;
    EXPECT_FALSE(coarse_lamination(B, in).degrees_match);
    in.landing = {0.0, 0.0, 0.0, cplx(0, -1)};
    EXPECT_THROW(coarse_lamination(B, in), InvalidInput);
}
