// qdyn: command-line front end.
//
// Exit codes: 0 success, 1 a check or computation failed, 2 invalid input.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "qdyn/qdyn.hpp"

using namespace qdyn;
using io::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_invalid = 2;

// Thrown when a run completes but reports a failure.
struct CheckFailed : Error {
    using Error::Error;
};

cplx parse_complex(const std::string& s) {
    std::string t = s;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream in(t);
    double re = 0.0, im = 0.0;
    if (!(in >> re)) throw InvalidInput("expected a complex number \"re im\": " + s);
    if (!(in >> im)) im = 0.0;
    std::string rest;
    if (in >> rest) throw InvalidInput("expected a complex number \"re im\": " + s);
    return {re, im};
}

std::string num(double x) { return io::format_double(x); }

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else io::write_file(path, text);
}

// Options shared by every subcommand. Precedence for tolerances:
// --tol-* flags, then the --config file, then the system file.
struct Common {
    std::string config;
    std::string out;
    std::optional<int> workers;
    std::optional<int> max_iter;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> tol_values = std::vector<std::string>(io::tolerance_keys().size());

    void attach(CLI::App* app) {
        app->add_option("--config", config, "run configuration file")->check(CLI::ExistingFile);
        app->add_option("--out", out, "output file (stdout when omitted)");
        app->add_option("--workers", workers, "worker threads");
        app->add_option("--max-iter", max_iter, "iteration budget");
        app->add_option("--seed", seed, "random seed");
        for (std::size_t k = 0; k < io::tolerance_keys().size(); ++k) {
            std::string name = io::tolerance_keys()[k].name;
            app->add_option("--tol-" + name, tol_values[k], "tolerance " + name)->group("Tolerances");
        }
    }

    io::RunConfig run(const Tolerances* system_tol = nullptr) const {
        io::RunConfig rc;
        if (system_tol) rc.tol = *system_tol;
        if (!config.empty()) rc = io::load_config(config);
        for (std::size_t k = 0; k < tol_values.size(); ++k)
            if (!tol_values[k].empty()) io::set_tolerance(rc.tol, io::tolerance_keys()[k].name, tol_values[k]);
        if (workers) rc.render.workers = *workers;
        if (max_iter) rc.render.max_iter = *max_iter;
        if (seed) rc.seed = *seed;
        rc.render.validate();
        return rc;
    }
};

struct Loaded {
    io::SystemDescription desc;
    io::RunConfig rc;

    ReflectionSystem build() const {
        io::SystemDescription d = desc;
        d.tol = rc.tol;
        return d.build();
    }
    SchwarzReflection schwarz() const {
        if (desc.kind != io::SystemDescription::Kind::Quadrature) throw InvalidInput("this command needs a quadrature system");
        std::vector<RationalMap> maps;
        for (const auto& d : desc.domains) maps.push_back(d.map);
        return SchwarzReflection(build_qmd(std::move(maps), desc.require_tree), rc.tol);
    }
};

Loaded load(const std::string& system_file, const Common& common) {
    io::SystemDescription desc = io::load_system(system_file);
    io::RunConfig rc = common.run(&desc.tol);
    return {std::move(desc), rc};
}

// ---- rendering ----

struct Window {
    std::string center;
    std::optional<double> width;
    std::string size;

    void attach(CLI::App* app) {
        app->add_option("--center", center, "window center \"re im\"");
        app->add_option("--width", width, "window width");
        app->add_option("--size", size, "image size WxH");
    }
    void apply(RenderConfig& r) const {
        if (!center.empty()) r.center = parse_complex(center);
        if (width) r.width = *width;
        if (!size.empty()) {
            auto x = size.find('x');
            try {
                if (x == std::string::npos) throw std::invalid_argument(size);
                std::size_t a = 0, b = 0;
                r.pixels_x = std::stoi(size.substr(0, x), &a);
                r.pixels_y = std::stoi(size.substr(x + 1), &b);
                if (a != x || b != size.size() - x - 1) throw std::invalid_argument(size);
            } catch (const std::logic_error&) {
                throw InvalidInput("image size must look like 512x512: " + size);
            }
        }
        r.validate();
    }
};

void save_render(const RenderResult& r, std::string out, const std::string& fallback) {
    if (out.empty()) out = fallback;
    std::filesystem::path p(out);
    if (p.extension() != ".ppm") p += ".ppm";
    write_ppm(r.image, p.string());
    std::filesystem::path stats = p;
    stats.replace_extension(".stats");
    std::ostringstream os;
    write_stats(os, r.stats);
    io::write_file(stats.string(), os.str());
    std::cout << "wrote " << p.string();
    if (png_available()) {
        std::filesystem::path png = p;
        png.replace_extension(".png");
        write_png(r.image, png.string());
        std::cout << ", " << png.string();
    }
    std::cout << ", " << stats.string() << "\n";
    std::cout << "pixels " << r.stats.total() << " non_escaping " << r.stats.non_escaping << " undecided "
              << r.stats.undecided << " invalid " << r.stats.invalid << " max_rank " << r.stats.max_rank() << "\n";
}

// ---- verification ----

struct CheckResult {
    explicit CheckResult(std::string n = {}) : name(std::move(n)) {}

    std::string name;
    bool pass = true;
    double residual = 0.0;
    double threshold = 0.0;
    long samples = 0;
    json witness = nullptr;
    std::string note;

    json to_json() const {
        json j{{"name", name}, {"pass", pass}, {"residual", residual}, {"threshold", threshold}, {"samples", samples}};
        j["witness"] = witness;
        if (!note.empty()) j["note"] = note;
        return j;
    }
    // keeps the worst sample as the witness
    void observe(double r, const json& where) {
        ++samples;
        if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
        if (r > residual || (samples == 1 && witness.is_null())) {
            residual = r;
            witness = where;
        }
    }
    void close() {
        pass = pass && residual <= threshold;
        if (pass) witness = nullptr;
    }
};

double point_gap(const ExtPoint& a, const ExtPoint& b) {
    if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value());
    return chordal_distance(a, b);
}

json where_json(int domain, double t, const ExtPoint& z) {
    return {{"domain", domain}, {"t", t}, {"point", io::format_point(z)}};
}

ExtPoint involution_of(const io::SystemDescription& d, const ExtPoint& z) {
    return d.kind == io::SystemDescription::Kind::Quadrature ? conj_reciprocal(z) : reciprocal(z);
}

int partner_of(const io::SystemDescription& d, int j) {
    if (d.kind == io::SystemDescription::Kind::Quadrature) return j;
    return d.partner.at(static_cast<std::size_t>(j));
}

// Works on the raw data, so it runs even when the system does not build.
CheckResult check_boundary(const io::SystemDescription& d, const Tolerances& tol, int samples) {
    CheckResult c{"boundary"};
    c.threshold = tol.check;
    const int n = static_cast<int>(d.domains.size());
    for (int j = 0; j < n; ++j) {
        int k = partner_of(d, j);
        if (k < 0 || k >= n) {
            c.pass = false;
            c.witness = {{"domain", j}, {"partner", k}};
            c.note = "partner index out of range";
            return c;
        }
        const DomainSpec& mine = d.domains[static_cast<std::size_t>(j)];
        const DomainSpec& other = d.domains[static_cast<std::size_t>(k)];
        for (int s = 0; s < samples; ++s) {
            double t = (s + 0.5) / samples;
            cplx b = mine.disk.boundary_point(t);
            ExtPoint z = mine.map(ExtPoint(b));
            ExtPoint e = involution_of(d, ExtPoint(b));
            if (d.kind == io::SystemDescription::Kind::Quadrature) {
                c.observe(point_gap(other.map(e), z), where_json(j, t, z));
            } else {
                double scale = e.is_finite() ? 1.0 + std::abs(e.value()) : 1.0;
                c.observe(std::abs(other.disk.signed_distance(e)) / scale, where_json(j, t, z));
            }
        }
    }
    c.note = d.kind == io::SystemDescription::Kind::Quadrature ? "|S(z) - z| on the boundary"
                                                               : "distance of the image from the partner boundary";
    c.close();
    return c;
}

CheckResult check_involution(const io::SystemDescription& d, const std::optional<ReflectionSystem>& S,
                             const std::string& build_error, const Tolerances& tol, int samples) {
    CheckResult c{"involution"};
    c.threshold = tol.check;
    const int n = static_cast<int>(d.domains.size());
    for (int j = 0; j < n; ++j) {
        int k = partner_of(d, j);
        if (k < 0 || k >= n || partner_of(d, k) != j) {
            c.pass = false;
            c.residual = std::numeric_limits<double>::infinity();
            c.witness = {{"domain", j}, {"partner", k}};
            c.note = "partner map is not an involution";
            return c;
        }
    }
    if (!S) {
        // locate the failure on the raw data
        CheckResult raw = check_boundary(d, tol, samples);
        c.pass = false;
        c.residual = raw.pass ? std::numeric_limits<double>::infinity() : raw.residual;
        c.samples = raw.samples;
        c.witness = raw.witness;
        c.note = "system does not build: " + build_error;
        return c;
    }
    for (int j = 0; j < n; ++j)
        for (int s = 0; s < samples; ++s) {
            double t = (s + 0.5) / samples;
            ExtPoint z = S->boundary_point(j, t);
            c.observe(point_gap((*S)((*S)(z)), z), where_json(j, t, z));
        }
    c.note = "|S(S(z)) - z| on the boundary";
    c.close();
    return c;
}

CheckResult check_degree(const io::SystemDescription& d, const std::optional<ReflectionSystem>& S,
                         const std::string& build_error, std::uint64_t seed, int targets) {
    CheckResult c{"degree"};
    int expected = -1;
    for (const auto& dom : d.domains) expected += dom.map.degree();
    if (!S) {
        c.pass = false;
        c.note = "system does not build: " + build_error;
        return c;
    }
    if (S->degree() != expected) {
        c.pass = false;
        c.witness = {{"degree", S->degree()}, {"expected", expected}};
        c.note = "degree differs from the sum of uniformizer degrees minus one";
        return c;
    }
    // generic targets in a box around the boundary
    cplx lo(1e300, 1e300), hi(-1e300, -1e300);
    for (int j = 0; j < S->domain_count(); ++j)
        for (int s = 0; s < 200; ++s) {
            ExtPoint z = S->boundary_point(j, s / 200.0);
            if (!z.is_finite()) continue;
            lo = {std::min(lo.real(), z.value().real()), std::min(lo.imag(), z.value().imag())};
            hi = {std::max(hi.real(), z.value().real()), std::max(hi.imag(), z.value().imag())};
        }
    cplx mid = 0.5 * (lo + hi), half = 0.6 * (hi - lo) + cplx(0.1, 0.1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int inside = 0, tile = 0;
    for (int guard = 0; (inside < targets || tile < targets) && guard < 200 * targets; ++guard) {
        ExtPoint q(mid + cplx(U(rng) * half.real(), U(rng) * half.imag()));
        if (S->singular_distance(q) < 1e-3) continue;
        Location loc = S->locate(q);
        int want;
        if (loc.where == Location::Where::Domain && inside < targets) {
            want = S->degree();
            ++inside;
        } else if (loc.where == Location::Where::Tiling && S->in_fundamental_tile(q) && tile < targets) {
            want = S->degree() + 1;
            ++tile;
        } else {
            continue;
        }
        int got = static_cast<int>(S->preimages(q).size());
        ++c.samples;
        if (got != want && c.pass) {
            c.pass = false;
            c.residual = std::abs(got - want);
            c.witness = {{"target", io::format_point(q)}, {"preimages", got}, {"expected", want}};
        }
    }
    c.note = "preimage counts: degree inside the domains, degree + 1 in the rank-0 tile";
    if (inside < targets || tile < targets) c.note += " (fewer generic targets found than requested)";
    return c;
}

struct OrbitStep {
    SheetPoint u;
    double residual;
};

std::vector<OrbitStep> read_orbit(const std::string& path) {
    std::istringstream in(io::read_file(path));
    io::read_header(in, "orbit");
    std::vector<OrbitStep> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int step = 0, sheet = 0;
        double re = 0, im = 0, res = 0;
        if (!(ls >> step >> sheet >> re >> im >> res)) throw InvalidInput("bad orbit line: " + line);
        if (step != static_cast<int>(out.size())) throw InvalidInput("orbit steps out of order at: " + line);
        out.push_back({{ExtPoint(cplx(re, im)), sheet}, res});
    }
    if (out.empty()) throw InvalidInput("orbit file has no steps");
    return out;
}

CheckResult check_orbit(const std::optional<ReflectionSystem>& S, const std::string& path) {
    CheckResult c{"orbit"};
    c.threshold = 1e-6;
    if (!S) {
        c.pass = false;
        c.note = "system does not build";
        return c;
    }
    Correspondence C(*S);
    auto steps = read_orbit(path);
    double column_gap = 0.0;
    for (std::size_t k = 1; k < steps.size(); ++k) {
        if (steps[k].u.sheet < 0 || steps[k].u.sheet >= C.sheets()) throw InvalidInput("orbit sheet out of range");
        double r = chordal_distance(C.project(steps[k].u), (*S)(C.project(steps[k - 1].u)));
        column_gap = std::max(column_gap, std::abs(r - steps[k].residual));
        c.observe(r, {{"step", k}, {"point", io::format_point(steps[k].u.z)}});
    }
    c.note = "recomputed semiconjugacy residuals; largest disagreement with the file column " + num(column_gap);
    c.close();
    return c;
}

int cmd_verify(const std::string& system_file, std::vector<std::string> checks, const std::string& orbit_file,
               int samples, const Common& common) {
    Loaded L = load(system_file, common);
    if (checks.empty()) {
        checks = {"boundary", "degree", "involution"};
        if (!orbit_file.empty()) checks.push_back("orbit");
    }
    std::optional<ReflectionSystem> S;
    std::string build_error;
    try {
        S = L.build();
    } catch (const Error& e) {
        build_error = e.what();
    }
    json report;
    report["system"] = system_file;
    report["builds"] = S.has_value();
    if (!S) report["build_error"] = build_error;
    json list = json::array();
    bool all = true;
    for (const auto& name : checks) {
        CheckResult r;
        if (name == "boundary") r = check_boundary(L.desc, L.rc.tol, samples);
        else if (name == "involution") r = check_involution(L.desc, S, build_error, L.rc.tol, samples);
        else if (name == "degree") r = check_degree(L.desc, S, build_error, L.rc.seed, 20);
        else if (name == "orbit") {
            if (orbit_file.empty()) throw InvalidInput("the orbit check needs --orbit");
            r = check_orbit(S, orbit_file);
        } else {
            throw InvalidInput("unknown check: " + name);
        }
        all = all && r.pass;
        list.push_back(r.to_json());
    }
    report["checks"] = list;
    report["pass"] = all;
    emit(common.out, report.dump(2) + "\n");
    return all ? exit_ok : exit_check_failed;
}

// ---- rays and laminations ----

std::string ray_report(const RayTracer& T, const SymbolSequence& seq, const std::string& label, int depth) {
    RayTrace r = dynamical_ray(T, seq, depth);
    Landing land = landing_point(T, seq, depth);
    std::ostringstream os;
    os << io::header_line("ray") << "\n";
    os << "symbols " << label << "\n";
    os << "depth " << depth << "\n";
    os << "landed " << (land.converged ? 1 : 0) << " residual " << num(land.residual) << "\n";
    os << "endpoint " << num(land.point.real()) << " " << num(land.point.imag()) << "\n";
    os << "extrapolated " << num(land.extrapolated.real()) << " " << num(land.extrapolated.imag()) << " spread "
       << num(land.spread) << "\n";
    std::size_t best = 0;
    for (std::size_t k = 1; k < T.vertices().size(); ++k)
        if (std::abs(T.vertices()[k] - land.extrapolated) < std::abs(T.vertices()[best] - land.extrapolated)) best = k;
    cplx v = T.vertices()[best];
    os << "nearest_vertex " << best << " " << num(v.real()) << " " << num(v.imag()) << " distance "
       << num(std::abs(v - land.point)) << " extrapolated_distance " << num(std::abs(v - land.extrapolated)) << "\n";
    if (!r.diagnostic.empty()) os << "diagnostic " << r.diagnostic << "\n";
    for (cplx p : r.points) os << "point " << num(p.real()) << " " << num(p.imag()) << "\n";
    return os.str();
}

std::vector<Angle> parse_angles(const std::string& s) {
    std::vector<Angle> out;
    std::string t = s;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream in(t);
    for (std::string a; in >> a;) out.push_back(Angle::parse(a));
    if (out.empty()) throw InvalidInput("no angles given");
    return out;
}

int cmd_lamination_enumerate(int d, const Common& common) {
    if (d < 2 || d > 12) throw InvalidInput("degree must be between 2 and 12");
    auto all = enumerate_fixed_ray_laminations(d);
    std::ostringstream os;
    os << io::header_line("fixed-laminations") << "\n";
    os << "degree " << d << " count " << all.size() << "\n";
    bool ok = true;
    for (std::size_t i = 0; i < all.size(); ++i) {
        os << "lamination " << i << "\n";
        for (auto [a, b] : all[i]) os << "class " << Angle(a, d + 1) << " " << Angle(b, d + 1) << "\n";
        int total = 0;
        for (const auto& g : gap_stats(all[i], d)) {
            os << "gap arcs";
            for (int a : g.arcs) os << " " << a;
            os << " degree " << g.degree << " cusps " << g.cusps << " tangencies " << g.tangencies << "\n";
            ok = ok && g.degree == g.cusps + g.tangencies;
            total += g.degree;
        }
        ok = ok && total == d + 1;
    }
    emit(common.out, os.str());
    if (!ok) throw CheckFailed("gap arithmetic failed");
    return exit_ok;
}

int cmd_lamination_rays(const std::string& system_file, const std::string& angles, int depth, const Common& common) {
    Loaded L = load(system_file, common);
    SchwarzReflection S = L.schwarz();
    RayTracer T(S);
    auto res = rational_lamination(T, parse_angles(angles), depth);
    std::string out = io::format_lamination(res.lamination);
    for (const auto& a : res.unresolved) out += "# unresolved " + a.str() + "\n";
    emit(common.out, out);
    return exit_ok;
}

// ---- puzzles ----

int cmd_puzzles(const std::string& spec_file, int depth, const std::vector<std::string>& compare, const Common& common) {
    std::istringstream in(io::read_file(spec_file));
    auto specs = io::parse_puzzle_specs(in);
    if (depth < 0 || depth > 12) throw InvalidInput("depth must be between 0 and 12");
    std::ostringstream os;
    os << io::header_line("puzzle") << "\n";
    for (const auto& spec : specs) {
        os << "level " << spec.level << "\n";
        Puzzle P = depth0_pieces(spec);
        os << io::format_puzzle(P);
        for (int k = 1; k <= depth; ++k) {
            P = refine(P, spec);
            os << io::format_puzzle(P);
        }
    }
    if (!compare.empty()) {
        if (compare.size() != 2) throw InvalidInput("--compare takes two lamination files");
        std::istringstream a(io::read_file(compare[0])), b(io::read_file(compare[1]));
        Lamination f = io::parse_lamination(a), g = io::parse_lamination(b);
        CombDistance dist = comb_distance(f, g, specs, static_cast<int>(specs.size()) - 1, depth);
        os << "distance " << num(dist.value) << " error_bound " << num(dist.error_bound) << "\n";
        for (std::size_t m = 0; m < dist.misaligned.size(); ++m)
            os << "misaligned level " << m << " " << (dist.misaligned[m] ? std::to_string(*dist.misaligned[m]) : "none")
               << "\n";
    }
    emit(common.out, os.str());
    return exit_ok;
}

// ---- correspondence orbits ----

int cmd_corr_orbit(const std::string& system_file, int steps, const std::string& start, int sheet, const Common& common) {
    Loaded L = load(system_file, common);
    ReflectionSystem S = L.build();
    Correspondence C(S);
    if (steps < 0) throw InvalidInput("steps must be nonnegative");
    if (sheet < 0 || sheet >= C.sheets()) throw InvalidInput("sheet index out of range");
    SheetPoint u{ExtPoint(0.0), sheet};
    if (!start.empty()) {
        u.z = ExtPoint(parse_complex(start));
        if (!C.in_closed_disk(u)) throw InvalidInput("start point is not in the closed disk of its sheet");
    } else {
        // first non-escaping point of a seeded search
        std::mt19937_64 rng(L.rc.seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        bool found = false;
        for (int guard = 0; guard < 20000 && !found; ++guard) {
            cplx b = S.disk(sheet).boundary_point(U(rng) * 0.5 + 0.5);
            u.z = ExtPoint(b * (0.5 + 0.5 * std::abs(U(rng))));
            found = C.in_closed_disk(u) && lift_classify(C, u, L.rc.render.max_iter) == LiftClass::NonEscaping;
        }
        if (!found) throw InvalidInput("no non-escaping start point found; pass --start");
    }
    std::ostringstream os;
    os << io::header_line("orbit") << "\n# step sheet re im residual\n";
    auto line = [&](int n, const SheetPoint& p, double r) {
        cplx z = p.z.is_finite() ? p.z.value() : cplx(std::numeric_limits<double>::infinity());
        os << n << " " << p.sheet << " " << num(z.real()) << " " << num(z.imag()) << " " << num(r) << "\n";
    };
    line(0, u, 0.0);
    std::string stopped;
    for (int n = 1; n <= steps; ++n) {
        SheetPoint next;
        try {
            next = poly_branch(C, u);
        } catch (const Error& e) {
            stopped = e.what();
            break;
        }
        line(n, next, chordal_distance(C.project(next), S(C.project(u))));
        u = next;
    }
    if (!stopped.empty()) os << "# stopped: " << stopped << "\n";
    emit(common.out, os.str());
    if (!stopped.empty()) throw CheckFailed("orbit left the polynomial branch: " + stopped);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdyn: Schwarz reflections, their tiling sets, rays, puzzles and correspondences"};
    app.require_subcommand(1);
    std::function<int()> action;

    Common common;

    // render-dyn
    std::string system_file;
    Window window;
    auto* rd = app.add_subcommand("render-dyn", "render a dynamical plane");
    rd->add_option("system", system_file, "system file")->required()->check(CLI::ExistingFile);
    window.attach(rd);
    common.attach(rd);
    rd->callback([&] {
        action = [&] {
            Loaded L = load(system_file, common);
            RenderConfig cfg = L.rc.render;
            window.apply(cfg);
            ReflectionSystem S = L.build();
            save_render(render_dynamical(S, cfg), common.out, "dynamical.ppm");
            return exit_ok;
        };
    });

    // render-param
    std::string family_file, builtin;
    auto* rp = app.add_subcommand("render-param", "render a parameter plane (the family's window unless overridden)");
    rp->add_option("family", family_file, "family file")->check(CLI::ExistingFile);
    rp->add_option("--builtin", builtin, "built-in family: anti-farey, deltoid, cardioid");
    window.attach(rp);
    common.attach(rp);
    rp->callback([&] {
        action = [&] {
            if (family_file.empty() == builtin.empty()) throw InvalidInput("give either a family file or --builtin");
            ParameterFamily f = builtin.empty() ? io::load_family(family_file) : ParameterFamily::builtin(builtin);
            io::RunConfig rc = common.run();
            RenderConfig cfg = rc.render;
            cfg.center = f.center;
            cfg.width = f.width;
            window.apply(cfg);
            save_render(render_parameter(f, cfg, rc.tol), common.out, "parameter.ppm");
            return exit_ok;
        };
    });

    // ray
    std::string symbols, angle;
    bool periodic = false;
    int ray_depth = 60;
    auto* ray = app.add_subcommand("ray", "trace a dynamical ray and report where it lands");
    ray->add_option("system", system_file, "quadrature system file")->required()->check(CLI::ExistingFile);
    ray->add_option("--symbols", symbols, "reflection symbols, \"1,3\" or \"prefix;period\"");
    ray->add_flag("--period", periodic, "repeat --symbols forever");
    ray->add_option("--angle", angle, "rational angle p/q instead of symbols");
    ray->add_option("--depth", ray_depth, "lifting depth");
    common.attach(ray);
    ray->callback([&] {
        action = [&] {
            if (symbols.empty() == angle.empty()) throw InvalidInput("give either --symbols or --angle");
            if (ray_depth < 1 || ray_depth > 2000) throw InvalidInput("depth must be between 1 and 2000");
            Loaded L = load(system_file, common);
            SchwarzReflection S = L.schwarz();
            RayTracer T(S);
            SymbolSequence seq = angle.empty() ? io::parse_symbols(symbols, periodic)
                                               : itinerary_of(Angle::parse(angle), T.degree());
            std::string label = angle.empty() ? symbols + (periodic ? " periodic" : "") : "angle " + angle;
            emit(common.out, ray_report(T, seq, label, ray_depth));
            return exit_ok;
        };
    });

    // lamination
    auto* lam = app.add_subcommand("lamination", "lamination reports");
    lam->require_subcommand(1);
    int lam_degree = 2;
    auto* en = lam->add_subcommand("enumerate", "fixed-ray laminations with their gap tables");
    en->add_option("--d", lam_degree, "degree")->required();
    common.attach(en);
    en->callback([&] { action = [&] { return cmd_lamination_enumerate(lam_degree, common); }; });
    std::string lam_angles;
    int lam_depth = 40;
    auto* lr = lam->add_subcommand("rays", "group rational angles by where their rays land");
    lr->add_option("system", system_file, "quadrature system file")->required()->check(CLI::ExistingFile);
    lr->add_option("--angles", lam_angles, "comma-separated angles p/q")->required();
    lr->add_option("--depth", lam_depth, "lifting depth");
    common.attach(lr);
    lr->callback([&] { action = [&] { return cmd_lamination_rays(system_file, lam_angles, lam_depth, common); }; });

    // puzzles
    std::string spec_file;
    int puzzle_depth = 3;
    std::vector<std::string> compare;
    auto* pz = app.add_subcommand("puzzles", "puzzle pieces by depth, optionally a combinatorial distance");
    pz->add_option("spec", spec_file, "puzzle specification file")->required()->check(CLI::ExistingFile);
    pz->add_option("--depth", puzzle_depth, "deepest refinement");
    pz->add_option("--compare", compare, "two lamination files")->expected(2)->check(CLI::ExistingFile);
    common.attach(pz);
    pz->callback([&] { action = [&] { return cmd_puzzles(spec_file, puzzle_depth, compare, common); }; });

    // corr-orbit
    int orbit_steps = 50, orbit_sheet = 0;
    std::string orbit_start;
    auto* co = app.add_subcommand("corr-orbit", "orbit of the polynomial branch of the lifted correspondence");
    co->add_option("system", system_file, "system file")->required()->check(CLI::ExistingFile);
    co->add_option("--steps", orbit_steps, "number of steps");
    co->add_option("--start", orbit_start, "start point \"re im\" (searched for when omitted)");
    co->add_option("--sheet", orbit_sheet, "sheet of the start point");
    common.attach(co);
    co->callback([&] {
        action = [&] { return cmd_corr_orbit(system_file, orbit_steps, orbit_start, orbit_sheet, common); };
    });

    // verify
    std::vector<std::string> checks;
    std::string orbit_file;
    int samples = 1000;
    auto* ve = app.add_subcommand("verify", "run checks on a system; prints a JSON report");
    ve->add_option("system", system_file, "system file")->required()->check(CLI::ExistingFile);
    ve->add_option("--check", checks, "boundary, degree, involution, orbit (default: all that apply)")->delimiter(',');
    ve->add_option("--orbit", orbit_file, "orbit file written by corr-orbit")->check(CLI::ExistingFile);
    ve->add_option("--samples", samples, "boundary samples per domain")->check(CLI::Range(1, 1000000));
    common.attach(ve);
    ve->callback([&] { action = [&] { return cmd_verify(system_file, checks, orbit_file, samples, common); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_invalid;
    }
    try {
        return action ? action() : exit_invalid;
    } catch (const CheckFailed& e) {
        std::cerr << "qdyn: " << e.what() << "\n";
        return exit_check_failed;
    } catch (const InvalidInput& e) {
        std::cerr << "qdyn: invalid input: " << e.what() << "\n";
        return exit_invalid;
    } catch (const Error& e) {
        std::cerr << "qdyn: " << e.what() << "\n";
        return exit_check_failed;
    } catch (const std::exception& e) {
        std::cerr << "qdyn: " << e.what() << "\n";
        return exit_check_failed;
    }
}
