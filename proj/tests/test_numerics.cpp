#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "qdyn/numerics.hpp"

using namespace qdyn;

namespace {

std::vector<cplx> expand(const std::vector<Root>& roots) {
    std::vector<cplx> out;
    for (const auto& r : roots)
        for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
    return out;
}

// greedy matching distance between two root multisets
double match_error(std::vector<cplx> got, std::vector<cplx> want) {
    if (got.size() != want.size()) return 1e300;
    double worst = 0.0;
    for (auto w : want) {
        auto it = std::min_element(got.begin(), got.end(),
                                   [&](cplx a, cplx b) { return std::abs(a - w) < std::abs(b - w); });
        worst = std::max(worst, std::abs(*it - w));
        got.erase(it);
    }
    return worst;
}

Poly from_roots(const std::vector<cplx>& roots) {
    Poly p({1.0});
    for (auto r : roots) p = p * Poly::linear_factor(r);
    return p;
}

}  // namespace

TEST(PolyRoots, SquareRootsOfOne) {
    auto r = poly_roots(Poly({-1.0, 0.0, 1.0}));
    EXPECT_LT(match_error(expand(r), {1.0, -1.0}), 1e-12);
}

TEST(PolyRoots, CubeRootsOfUnity) {
    auto r = poly_roots(Poly({-1.0, 0.0, 0.0, 1.0}));
    std::vector<cplx> want;
    for (int k = 0; k < 3; ++k) want.push_back(std::polar(1.0, 2.0 * pi * k / 3));
    EXPECT_LT(match_error(expand(r), want), 1e-12);
}

TEST(PolyRoots, DoubleRootReportedWithMultiplicity) {
    auto r = poly_roots(from_roots({0.5, 0.5, -2.0}));
    ASSERT_EQ(r.size(), 2u);
    std::sort(r.begin(), r.end(), [](const Root& a, const Root& b) { return a.value.real() < b.value.real(); });
    EXPECT_NEAR(std::abs(r[0].value - cplx(-2.0)), 0.0, 1e-12);
    EXPECT_EQ(r[0].multiplicity, 1);
    EXPECT_NEAR(std::abs(r[1].value - cplx(0.5)), 0.0, 1e-8);
    EXPECT_EQ(r[1].multiplicity, 2);
}

TEST(PolyRoots, ZeroPolynomialRejected) { EXPECT_THROW(poly_roots(Poly()), InvalidInput); }

TEST(PolyRoots, RandomPolynomialsRecoverPlantedRoots) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + trial % 14;
        std::vector<cplx> roots;
        for (int k = 0; k < n; ++k) roots.emplace_back(u(rng), u(rng));
        auto got = expand(poly_roots(from_roots(roots)));
        EXPECT_LT(match_error(got, roots), 1e-7) << "degree " << n;
    }
}

TEST(PolyRoots, ResidualWithinBound) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<cplx> c;
        for (int k = 0; k <= 20; ++k) c.emplace_back(g(rng), g(rng));
        Poly p(c);
        for (const auto& r : poly_roots(p)) {
            double bound = 1e-12 * std::pow(1.0 + std::abs(r.value), p.degree()) * p.norm1();
            EXPECT_LE(std::abs(p(r.value)), bound);
        }
    }
}

TEST(PolyRoots, HighDegreeUnityRoots) {
    std::vector<cplx> c(33, 0.0);
    c[0] = -1.0;
    c[32] = 1.0;
    auto r = poly_roots(Poly(c));
    EXPECT_EQ(expand(r).size(), 32u);
    for (const auto& x : r) EXPECT_NEAR(std::abs(x.value), 1.0, 1e-12);
}

TEST(PolyRoots, DegreeCapEnforced) {
    std::vector<cplx> c(34, 1.0);
    EXPECT_THROW(poly_roots(Poly(c)), InvalidInput);
}

TEST(Poly, SyntheticDivisionRemainderIsValue) {
    Poly p({1.0, -2.0, 0.5, 3.0});
    auto [q, rem] = p.divide_linear(cplx(0.3, -0.7));
    EXPECT_NEAR(std::abs(rem - p(cplx(0.3, -0.7))), 0.0, 1e-14);
    Poly back = q * Poly::linear_factor(cplx(0.3, -0.7)) + Poly::constant(rem);
    for (int k = 0; k <= 3; ++k) EXPECT_NEAR(std::abs(back.coeff(k) - p.coeff(k)), 0.0, 1e-14);
}

TEST(RationalMap, EvaluationAtInfinityAndPoles) {
    RationalMap R(Poly({0.0, 1.0, 0.5}), Poly({1.0}));
    EXPECT_TRUE(R(ExtPoint::infinity()).is_infinite());
    RationalMap M(Poly({1.0, 2.0}), Poly({3.0, 4.0}));
    EXPECT_NEAR(std::abs(M(ExtPoint::infinity()).value() - 0.5), 0.0, 1e-15);
    EXPECT_TRUE(M(ExtPoint(-0.75)).is_infinite());
    RationalMap inv(Poly({1.0}), Poly({0.0, 1.0}));
    EXPECT_NEAR(std::abs(inv(ExtPoint::infinity()).value()), 0.0, 0.0);
}

TEST(RationalMap, LargeArgumentDoesNotOverflow) {
    RationalMap R(Poly({1.0, 0.0, 0.0, 1.0}), Poly({2.0, 0.0, 1.0}));
    ExtPoint v = R(ExtPoint(cplx(1e200, 0.0)));
    ASSERT_TRUE(v.is_finite());
    EXPECT_NEAR(v.value().real() / 1e200, 1.0, 1e-12);
}

TEST(RationalMap, CommonFactorRejected) {
    EXPECT_THROW(RationalMap(Poly({-1.0, 0.0, 1.0}), Poly({-1.0, 1.0})), InvalidInput);
}

TEST(RationalMap, DegreeCapEnforced) {
    std::vector<cplx> c(34, 0.0);
    c[33] = 1.0;
    EXPECT_THROW(RationalMap::polynomial(Poly(c)), InvalidInput);
}

TEST(Preimages, CardioidPolynomialOfZero) {
    auto R = RationalMap::polynomial(Poly({0.0, 1.0, 0.5}));
    auto pre = rat_preimages(R, ExtPoint(0.0));
    std::vector<cplx> pts;
    for (const auto& p : pre) {
        ASSERT_TRUE(p.point.is_finite());
        for (int k = 0; k < p.multiplicity; ++k) pts.push_back(p.point.value());
    }
    EXPECT_LT(match_error(pts, {0.0, -2.0}), 1e-12);
}

TEST(Preimages, InfinityThroughDegreeDeficiency) {
    auto R = RationalMap::polynomial(Poly({0.0, 1.0, 0.5}));
    auto pre = rat_preimages(R, ExtPoint::infinity());
    ASSERT_EQ(pre.size(), 1u);
    EXPECT_TRUE(pre[0].point.is_infinite());
    EXPECT_EQ(pre[0].multiplicity, 2);
    // a Mobius map hitting its value at infinity
    RationalMap M(Poly({1.0, 2.0}), Poly({3.0, 4.0}));
    auto q = rat_preimages(M, ExtPoint(0.5));
    ASSERT_EQ(q.size(), 1u);
    EXPECT_TRUE(q[0].point.is_infinite());
}

TEST(Preimages, CountEqualsDegreeForRandomMaps) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> a, b;
        for (int k = 0; k <= 3; ++k) a.emplace_back(g(rng), g(rng));
        for (int k = 0; k <= 2; ++k) b.emplace_back(g(rng), g(rng));
        RationalMap R{Poly(a), Poly(b)};
        ExtPoint c(cplx(g(rng), g(rng)));
        int total = 0;
        for (const auto& p : rat_preimages(R, c)) {
            total += p.multiplicity;
            if (p.point.is_finite()) {
                EXPECT_LT(chordal_distance(R(p.point), c), 1e-8);
            }
        }
        EXPECT_EQ(total, R.degree());
    }
}

TEST(CriticalPoints, CardioidPolynomial) {
    auto R = RationalMap::polynomial(Poly({0.0, 1.0, 0.5}));
    auto cps = critical_points(R);
    ASSERT_EQ(cps.size(), 2u);
    int total = 0;
    bool saw_minus_one = false, saw_inf = false;
    for (const auto& c : cps) {
        total += c.multiplicity;
        if (c.point.is_infinite()) saw_inf = true;
        else if (std::abs(c.point.value() + 1.0) < 1e-12) saw_minus_one = true;
    }
    EXPECT_TRUE(saw_minus_one);
    EXPECT_TRUE(saw_inf);
    EXPECT_EQ(total, 2);
}

TEST(CriticalPoints, TotalIsTwoDegreeMinusTwo) {
    RationalMap deltoid(Poly({2.0, 0.0, 0.0, 1.0}), Poly({0.0, 2.0}));
    int total = 0;
    for (const auto& c : critical_points(deltoid)) total += c.multiplicity;
    EXPECT_EQ(total, 4);
    RationalMap double_pole(Poly({1.0, 0.0, 0.0, 1.0}), Poly({0.0, 0.0, 1.0}));
    total = 0;
    bool zero = false;
    for (const auto& c : critical_points(double_pole)) {
        total += c.multiplicity;
        if (c.point.is_finite() && std::abs(c.point.value()) < 1e-12) zero = true;
    }
    EXPECT_EQ(total, 4);
    EXPECT_TRUE(zero);
}

TEST(UnivalentInverse, InsideBoundaryAndOutside) {
    auto R = RationalMap::polynomial(Poly({0.0, 1.0, 0.5}));
    auto in = univalent_inverse(R, R(ExtPoint(cplx(0.3, 0.2))));
    ASSERT_EQ(in.status, InverseStatus::Inside);
    EXPECT_NEAR(std::abs(in.point.value() - cplx(0.3, 0.2)), 0.0, 1e-12);
    auto on = univalent_inverse(R, R(ExtPoint(std::polar(1.0, 1.1))));
    EXPECT_EQ(on.status, InverseStatus::Boundary);
    EXPECT_EQ(univalent_inverse(R, ExtPoint(10.0)).status, InverseStatus::NotInDomain);
}

TEST(UnivalentInverse, WarmStartAgreesWithColdStart) {
    auto R = RationalMap::polynomial(Poly({0.0, 1.0, 0.4}));
    for (int k = 0; k < 50; ++k) {
        cplx w = std::polar(0.9 * (k % 7) / 7.0, 0.37 * k);
        ExtPoint z = R(ExtPoint(w));
        auto a = univalent_inverse(R, z);
        auto b = univalent_inverse(R, z, JordanDisk::unit(), w + cplx(0.05, -0.02));
        ASSERT_EQ(a.status, InverseStatus::Inside);
        ASSERT_EQ(b.status, InverseStatus::Inside);
        EXPECT_NEAR(std::abs(a.point.value() - b.point.value()), 0.0, 1e-12);
    }
}

TEST(JordanDisk, RoundDualIsComplementOfInverseImage) {
    auto D = JordanDisk::round(2.0, 1.0);
    auto E = D.dual();
    // 1/z maps D(2,1) onto D(2/3,1/3); the dual is its exterior
    EXPECT_TRUE(E.contains_infinity());
    EXPECT_EQ(E.side(ExtPoint(cplx(2.0 / 3.0)), 1e-12), Side::Outside);
    EXPECT_EQ(E.side(ExtPoint(0.0), 1e-12), Side::Inside);
    for (int k = 0; k < 16; ++k) {
        cplx b = D.boundary_point(k / 16.0);
        EXPECT_EQ(E.side(reciprocal(ExtPoint(b)), 1e-10), Side::Boundary);
    }
}

TEST(JordanDisk, PolygonDualUsesReciprocalIdentity) {
    auto P = JordanDisk::polygon({cplx(1.5, -0.5), cplx(2.5, -0.5), cplx(2.5, 0.5), cplx(1.5, 0.5)});
    auto Q = P.dual();
    EXPECT_EQ(Q.side(ExtPoint(1.0 / cplx(2.0, 0.0)), 1e-12), Side::Outside);
    EXPECT_EQ(Q.side(ExtPoint(0.0), 1e-12), Side::Inside);
    EXPECT_TRUE(Q.contains_infinity());
}
