#include <gtest/gtest.h>

#include <sstream>

#include "qdyn/io.hpp"

using namespace qdyn;

namespace {

std::istringstream text(const std::string& s) { return std::istringstream(s); }

io::SystemDescription deltoid_description() {
    auto in = text(
        "qdyn-system 1\n"
        R"({"kind": "quadrature", "domains": [{"num": [2, 0, 0, 1], "den": [0, 2]}]})");
    return io::parse_system(in);
}

}  // namespace

TEST(Header, AcceptsKnownVersionsOnly) {
    auto a = text("qdyn-lamination 1\n");
    EXPECT_EQ(io::read_header(a, "lamination"), 1);
    auto b = text("qdyn-lamination 2\n");
    EXPECT_THROW(io::read_header(b, "lamination"), InvalidInput);
    auto c = text("qdyn-system 1\n");
    EXPECT_THROW(io::read_header(c, "lamination"), InvalidInput);
    auto d = text("");
    EXPECT_THROW(io::read_header(d, "config"), InvalidInput);
}

TEST(Coefficients, ExpressionLanguage) {
    EXPECT_EQ(eval_coefficient("1", 0.0), cplx(1.0));
    EXPECT_EQ(eval_coefficient("2i", 0.0), cplx(0.0, 2.0));
    EXPECT_EQ(eval_coefficient("0.5a", cplx(2.0, 2.0)), cplx(1.0, 1.0));
    EXPECT_EQ(eval_coefficient("-a^2 + 3", cplx(0.0, 1.0)), cplx(4.0));
    EXPECT_EQ(eval_coefficient("conj(a)*(1 - i)", cplx(0.0, 1.0)), cplx(-1.0, -1.0));
    EXPECT_EQ(eval_coefficient("1/4", 0.0), cplx(0.25));
    EXPECT_EQ(eval_coefficient("2^-1", 0.0), cplx(0.5));
    EXPECT_THROW(eval_coefficient("1 +", 0.0), InvalidInput);
    EXPECT_THROW(eval_coefficient("b", 0.0), InvalidInput);
    EXPECT_THROW(eval_coefficient("(1", 0.0), InvalidInput);
    EXPECT_THROW(eval_coefficient("1/0", 0.0), InvalidInput);
}

TEST(SystemFile, RoundTrip) {
    auto d = deltoid_description();
    ReflectionSystem S = d.build();
    EXPECT_EQ(S.degree(), 2);
    auto in = text(io::format_system(d));
    auto again = io::parse_system(in);
    EXPECT_EQ(io::format_system(again), io::format_system(d));
}

TEST(SystemFile, BInvolutionWithDisks) {
    auto in = text(
        "qdyn-system 1\n"
        R"({"kind": "b-involution", "domains": [
            {"num": [1, 0, 0.25], "disk": {"type": "round", "center": 2, "radius": 1}, "partner": 1},
            {"num": [-25, 84, -72], "den": [16, -48, 36],
             "disk": {"type": "exterior", "center": 0.6666666666666666, "radius": 0.3333333333333333}, "partner": 0}]})");
    auto d = io::parse_system(in);
    EXPECT_EQ(d.build().degree(), 3);
    d.partner = {0, 1};
    EXPECT_THROW(d.build(), InvalidInput);
}

TEST(SystemFile, Rejections) {
    auto missing = text("qdyn-system 1\n{\"kind\": \"quadrature\"}");
    EXPECT_THROW(io::parse_system(missing), InvalidInput);
    auto bad_json = text("qdyn-system 1\n{\"domains\": [");
    EXPECT_THROW(io::parse_system(bad_json), InvalidInput);
    auto no_partner = text("qdyn-system 1\n{\"kind\": \"b-involution\", \"domains\": [{\"num\": [0, 1]}]}");
    EXPECT_THROW(io::parse_system(no_partner), InvalidInput);
    auto disk = text("qdyn-system 1\n{\"domains\": [{\"num\": [0, 1], \"disk\": {\"type\": \"round\", \"center\": 0, \"radius\": 2}}]}");
    EXPECT_THROW(io::parse_system(disk), InvalidInput);
    auto tol = text("qdyn-system 1\n{\"domains\": [{\"num\": [0, 1]}], \"tolerances\": {\"bogus\": 1}}");
    EXPECT_THROW(io::parse_system(tol), InvalidInput);
}

TEST(Config, EveryToleranceIsAKeyWithItsDefault) {
    io::RunConfig c;
    std::string s = io::format_config(c);
    for (const auto& k : io::tolerance_keys()) EXPECT_NE(s.find(std::string(k.name) + " = "), std::string::npos) << k.name;
    auto in = text(s);
    auto back = io::parse_config(in);
    EXPECT_EQ(io::format_config(back), s);
}

TEST(Config, ParsesValuesAndRejectsNonsense) {
    auto in = text("qdyn-config 1\n[render]\ncenter = 1.5 -0.25\nsize = 64x32\nworkers = 3\n[tolerances]\nroot = 1e-10\nnewton_steps = 4\n");
    auto c = io::parse_config(in);
    EXPECT_EQ(c.render.center, cplx(1.5, -0.25));
    EXPECT_EQ(c.render.pixels_x, 64);
    EXPECT_EQ(c.render.pixels_y, 32);
    EXPECT_EQ(c.render.workers, 3);
    EXPECT_EQ(c.tol.root, 1e-10);
    EXPECT_EQ(c.tol.newton_steps, 4);
    for (const char* bad : {"qdyn-config 1\n[render]\nsize = 20000x10\n", "qdyn-config 1\n[render]\ncolour = red\n",
                            "qdyn-config 1\n[tolerances]\nroot = -1\n", "qdyn-config 1\n[tolerances]\nroot = abc\n",
                            "qdyn-config 1\n[render]\nmax_iter = 1.5\n"}) {
        auto b = text(bad);
        EXPECT_THROW(io::parse_config(b), InvalidInput) << bad;
    }
}

TEST(LaminationFile, RoundTrip) {
    Lamination L{2, -1, {{Angle(1, 3), Angle(2, 3)}, {Angle(1, 6), Angle(5, 6)}}};
    L.normalize();
    auto in = text(io::format_lamination(L));
    Lamination back = io::parse_lamination(in);
    EXPECT_EQ(back.classes, L.classes);
    EXPECT_EQ(back.degree, 2);
    EXPECT_EQ(back.sign, -1);
}

TEST(PuzzleSpecFile, ParsesLevels) {
    auto in = text("qdyn-puzzle-spec 1\nlevel 0\ncritical 1/2\ncut 1/3 2/3\nlevel 1\ncritical 1/2\ncut 1/5 4/5\ncut 2/5 3/5\n");
    auto specs = io::parse_puzzle_specs(in);
    ASSERT_EQ(specs.size(), 2u);
    EXPECT_EQ(specs[1].cuts.size(), 2u);
    EXPECT_EQ(depth0_pieces(specs[0]).pieces.size(), 2u);
    auto bad = text("qdyn-puzzle-spec 1\nlevel 0\ncut 1/5 2/5\n");
    EXPECT_THROW(io::parse_puzzle_specs(bad), InvalidInput);
}

TEST(Symbols, Parsing) {
    auto s = io::parse_symbols("1,3", true);
    EXPECT_TRUE(s.prefix.empty());
    EXPECT_EQ(s.period, (std::vector<int>{1, 3}));
    auto t = io::parse_symbols("2;1,3", false);
    EXPECT_EQ(t.prefix, (std::vector<int>{2}));
    EXPECT_THROW(io::parse_symbols("1,x", false), InvalidInput);
}

TEST(FundamentalDomainFile, Builtins) {
    auto in = text("qdyn-fundamental-domain 1\n{\"builtin\": \"hecke\", \"n\": 3}");
    EXPECT_EQ(io::parse_fundamental_domain(in).degree(), 2);
    auto bad = text("qdyn-fundamental-domain 1\n{\"builtin\": \"hecke\", \"n\": 2}");
    EXPECT_THROW(io::parse_fundamental_domain(bad), InvalidInput);
}

TEST(Render, AllEscapingWindowIsMonochrome) {
    ReflectionSystem S = deltoid_description().build();
    RenderConfig cfg;
    cfg.center = 0.0;
    cfg.width = 0.2;
    cfg.pixels_x = cfg.pixels_y = 16;
    auto r = render_dynamical(S, cfg);
    EXPECT_EQ(r.stats.escaping_by_rank.size(), 1u);
    EXPECT_EQ(r.stats.escaping_by_rank.at(0), 256);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) EXPECT_EQ(r.image.at(x, y), cfg.palette.escaping(0));
}

TEST(Render, DeterministicAcrossWorkerCounts) {
    ReflectionSystem S = deltoid_description().build();
    RenderConfig cfg;
    cfg.width = 4.0;
    cfg.pixels_x = 48;
    cfg.pixels_y = 40;
    cfg.max_iter = 50;
    auto one = render_dynamical(S, cfg);
    cfg.workers = 4;
    auto four = render_dynamical(S, cfg);
    EXPECT_EQ(io::format_double(0), "0");
    EXPECT_EQ(ppm_bytes(one.image), ppm_bytes(four.image));
    EXPECT_EQ(ppm_bytes(one.image), ppm_bytes(render_dynamical(S, cfg).image));
    EXPECT_GT(one.stats.non_escaping, 0);
    EXPECT_EQ(one.stats.total(), 48 * 40);
}

TEST(Render, PpmHeader) {
    Image img(3, 2);
    img.set(2, 1, {1, 2, 3});
    std::string b = ppm_bytes(img);
    EXPECT_EQ(b.substr(0, 11), "P6\n3 2\n255\n");
    EXPECT_EQ(b.size(), 11u + 18u);
    EXPECT_EQ(static_cast<int>(b.back()), 3);
}

TEST(Render, UndecidedShrinksWithBudgetNearACusp) {
    ReflectionSystem S = deltoid_description().build();
    RenderConfig cfg;
    // just outside the cusp at 3/2, where escaping orbits crawl away
    cfg.center = 1.5 + 2e-5;
    cfg.width = 2e-5;
    cfg.pixels_x = cfg.pixels_y = 12;
    cfg.max_iter = 100;
    double low = render_dynamical(S, cfg).stats.undecided_fraction();
    cfg.max_iter = 10000;
    double high = render_dynamical(S, cfg).stats.undecided_fraction();
    EXPECT_GT(low, 0.5);
    EXPECT_LT(high, low);
    EXPECT_EQ(high, 0.0);
}

TEST(RenderParameter, InvalidWindowAndConnectedCenter) {
    ParameterFamily f = ParameterFamily::anti_farey();
    RenderConfig cfg;
    cfg.center = 2.0;
    cfg.width = 0.5;
    cfg.pixels_x = cfg.pixels_y = 4;
    cfg.max_iter = 50;
    EXPECT_EQ(render_parameter(f, cfg).stats.invalid, 16);
    cfg.center = f.center;
    cfg.width = 0.04;
    auto c = render_parameter(f, cfg);
    EXPECT_GT(c.stats.non_escaping, 0);
    // direct orbit check of the center parameter
    SchwarzReflection S = f.system_at(f.center);
    auto free = S.critical_points(true);
    ASSERT_EQ(free.size(), 1u);
    ExtPoint z = free[0].point;
    for (int n = 0; n < 500; ++n) {
        ASSERT_EQ(S.locate(z).where, Location::Where::Domain) << n;
        z = S(z);
    }
    EXPECT_EQ(S.critical_points().size(), 2u);
    EXPECT_EQ(connectedness_test(S, 200).verdict, ConnectednessReport::Verdict::Disconnected);
    cfg.workers = 3;
    EXPECT_EQ(ppm_bytes(render_parameter(f, cfg).image), ppm_bytes(c.image));
}

TEST(RenderConfig, RejectsHugeImages) {
    RenderConfig cfg;
    cfg.pixels_x = 16385;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg.pixels_x = 10;
    cfg.workers = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
}
