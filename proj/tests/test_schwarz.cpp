#include <gtest/gtest.h>

#include <random>

#include "qdyn/schwarz.hpp"

using namespace qdyn;

namespace {

RationalMap cardioid() { return RationalMap::polynomial(Poly({0.0, 1.0, 0.5})); }
RationalMap deltoid() { return RationalMap(Poly({2.0, 0.0, 0.0, 1.0}), Poly({0.0, 2.0})); }
RationalMap circle_exterior(double r) { return RationalMap(Poly({r}), Poly({0.0, 1.0})); }
RationalMap disk_at(cplx c) { return RationalMap::polynomial(Poly({c, 1.0})); }

// Domain around 2 uniformized by D(2,1) via 1 + z^2/4, and its negative
// uniformized by the exterior of D(2/3,1/3); the two are swapped.
std::vector<DomainSpec> swap_specs() {
    RationalMap r1 = RationalMap::polynomial(Poly({1.0, 0.0, 0.25}));
    RationalMap r2(Poly({-25.0, 84.0, -72.0}), Poly({16.0, -48.0, 36.0}));
    return {{r1, JordanDisk::round(2.0, 1.0)}, {r2, JordanDisk::exterior(2.0 / 3.0, 1.0 / 3.0)}};
}

}  // namespace

TEST(Schwarz, CardioidFixesBoundary) {
    SchwarzReflection S(build_qmd({cardioid()}));
    EXPECT_EQ(S.degree(), 1);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        ExtPoint z = S.boundary_point(0, (k + 0.3) / 1000.0);
        worst = std::max(worst, std::abs(S(z).value() - z.value()));
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(Schwarz, CardioidSingularPointIsTheCusp) {
    auto q = build_qmd({cardioid()});
    ASSERT_EQ(q.singular_points().size(), 1u);
    const auto& s = q.singular_points()[0];
    EXPECT_EQ(s.kind, SingularPoint::Kind::Cusp);
    EXPECT_NEAR(std::abs(s.point - cplx(-0.5)), 0.0, 1e-9);
    EXPECT_NEAR(s.param, 0.5, 1e-7);
}

TEST(Schwarz, CoveringDegrees) {
    SchwarzReflection S(build_qmd({cardioid()}));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    int inside = 0, outside = 0;
    while (inside < 20 || outside < 20) {
        cplx q(U(rng), U(rng));
        Location loc = S.locate(ExtPoint(q));
        if (loc.where == Location::Where::Boundary || S.singular_distance(ExtPoint(q)) < 1e-3) continue;
        auto pre = S.preimages(ExtPoint(q));
        for (const auto& p : pre) {
            EXPECT_EQ(S.locate(p.point).where, Location::Where::Domain);
            EXPECT_LT(std::abs(S(p.point).value() - q), 1e-9);
        }
        if (loc.where == Location::Where::Domain) {
            EXPECT_EQ(static_cast<int>(pre.size()), 1);
            ++inside;
        } else {
            EXPECT_EQ(static_cast<int>(pre.size()), 2);
            ++outside;
        }
    }
}

TEST(Schwarz, DeltoidHasThreeCusps) {
    auto q = build_qmd({deltoid()});
    SchwarzReflection S(q);
    EXPECT_EQ(S.degree(), 2);
    ASSERT_EQ(q.singular_points().size(), 3u);
    for (const auto& s : q.singular_points()) {
        EXPECT_NEAR(std::abs(s.point), 1.5, 1e-9);
        EXPECT_NEAR(std::abs(std::pow(s.point / 1.5, 3) - 1.0), 0.0, 1e-8);
    }
}

TEST(Schwarz, ConnectednessVerdicts) {
    SchwarzReflection card(build_qmd({cardioid()}));
    SchwarzReflection del(build_qmd({deltoid()}));
    SchwarzReflection cc(build_qmd({cardioid(), circle_exterior(1.5)}));
    EXPECT_EQ(connectedness_test(card, 100).verdict, ConnectednessReport::Verdict::Disconnected);
    EXPECT_EQ(connectedness_test(del, 100).verdict, ConnectednessReport::Verdict::Connected);
    EXPECT_EQ(connectedness_test(cc, 100).verdict, ConnectednessReport::Verdict::Connected);
    EXPECT_EQ(static_cast<int>(card.critical_points().size()), card.degree());
    auto sweep = budget_sweep(del, {10, 50, 100});
    for (auto v : sweep) EXPECT_EQ(v, ConnectednessReport::Verdict::Connected);
}

TEST(Schwarz, CardioidAndCircleTouchOnce) {
    auto q = build_qmd({cardioid(), circle_exterior(1.5)});
    EXPECT_EQ(q.degree(), 2);
    EXPECT_TRUE(q.tree_like());
    int doubles = 0;
    for (const auto& s : q.singular_points())
        if (s.kind == SingularPoint::Kind::DoublePoint) {
            ++doubles;
            EXPECT_NEAR(std::abs(s.point - cplx(1.5)), 0.0, 1e-6);
        }
    EXPECT_EQ(doubles, 1);
}

TEST(Schwarz, ContactCycleRejected) {
    const double h = std::sqrt(3.0);
    std::vector<RationalMap> maps{disk_at(0.0), disk_at(2.0), disk_at(cplx(1.0, h))};
    EXPECT_THROW(build_qmd(maps), InvalidInput);
    auto q = build_qmd(maps, false);
    EXPECT_EQ(q.contacts().size(), 3u);
    EXPECT_FALSE(q.tree_like());
}

TEST(Schwarz, OverlapRejected) {
    EXPECT_THROW(build_qmd({disk_at(0.0), disk_at(1.0)}), InvalidInput);
}

TEST(Schwarz, NonUnivalentMapReportsWitness) {
    try {
        build_qmd({RationalMap::polynomial(Poly({0.0, 1.0, 1.0}))});
        FAIL() << "expected NotUnivalent";
    } catch (const NotUnivalent& e) {
        auto [a, b] = e.witness();
        EXPECT_NEAR(std::abs(a - cplx(-0.5)), 0.0, 1e-9);
        EXPECT_EQ(a, b);
    }
}

TEST(Schwarz, TileRejectsPointsInDomain) {
    SchwarzReflection S(build_qmd({deltoid()}));
    EXPECT_TRUE(S.in_fundamental_tile(ExtPoint(0.0)));
    EXPECT_FALSE(S.in_fundamental_tile(ExtPoint(5.0)));
    EXPECT_THROW(S(ExtPoint(0.0)), OutsideDomain);
}

TEST(Schwarz, EscapeAndNonEscape) {
    SchwarzReflection S(build_qmd({deltoid()}));
    EXPECT_EQ(classify_point(S, ExtPoint(0.1), 50).kind, PointClass::Kind::Escaping);
    EXPECT_EQ(classify_point(S, ExtPoint(0.1), 50).rank, 0);
    EXPECT_EQ(classify_point(S, ExtPoint::infinity(), 50).kind, PointClass::Kind::NonEscaping);
    EXPECT_EQ(classify_point(S, ExtPoint(1.5), 50).kind, PointClass::Kind::Undecided);
}

TEST(BInvolution, SwapSystemIsAnInvolutionOnTheBoundary) {
    BInvolution B(swap_specs(), {1, 0});
    EXPECT_EQ(B.degree(), 3);
    double worst = 0.0;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 500; ++k) {
            ExtPoint z = B.boundary_point(j, (k + 0.25) / 500.0);
            ExtPoint w = B(z);
            EXPECT_EQ(B.locate(w).where, Location::Where::Boundary);
            worst = std::max(worst, std::abs(B(w).value() - z.value()));
        }
    EXPECT_LE(worst, 1e-8);
}

TEST(BInvolution, SwapsInteriorsOntoComplements) {
    BInvolution B(swap_specs(), {1, 0});
    ExtPoint z(cplx(2.0));
    Location loc = B.locate(z);
    ASSERT_EQ(loc.where, Location::Where::Domain);
    EXPECT_EQ(loc.domain, 0);
    EXPECT_NE(B.locate(B(z)).where, Location::Where::Domain);
}

TEST(BInvolution, CorruptedPartnerRejected) {
    EXPECT_THROW(BInvolution(swap_specs(), {0, 1}), InvalidInput);
    EXPECT_THROW(BInvolution(swap_specs(), {1, 1}), InvalidInput);
    EXPECT_THROW(BInvolution(swap_specs(), {1}), InvalidInput);
}

TEST(BInvolution, SingleDomainWithIdentityPartner) {
    BInvolution B({{cardioid(), JordanDisk::unit()}}, {0});
    for (int k = 0; k < 100; ++k) {
        ExtPoint z = B.boundary_point(0, (k + 0.5) / 100.0);
        EXPECT_LT(std::abs(B(B(z)).value() - z.value()), 1e-8);
    }
}
