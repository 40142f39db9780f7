#pragma once

// File formats. Every file starts with a header line "qdyn-<kind> <version>".
// Structured inputs (systems, families, fundamental domains) carry a JSON
// body, run configurations an INI body, and reports whitespace tables.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "correspondence.hpp"
#include "family.hpp"
#include "hyperbolic.hpp"
#include "lamination.hpp"
#include "puzzles.hpp"
#include "render.hpp"
#include "schwarz.hpp"

namespace qdyn::io {

using json = nlohmann::json;

inline std::string header_line(const std::string& kind, int version = 1) {
    return "qdyn-" + kind + " " + std::to_string(version);
}

// Consumes the header line; returns the version.
inline int read_header(std::istream& in, const std::string& kind, int max_version = 1) {
    std::string line;
    while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {}
    std::istringstream ls(line);
    std::string tag;
    int version = 0;
    if (!(ls >> tag >> version) || tag != "qdyn-" + kind)
        throw InvalidInput("expected header \"qdyn-" + kind + " <version>\", found \"" + line + "\"");
    if (version < 1 || version > max_version)
        throw InvalidInput("unsupported " + kind + " format version " + std::to_string(version));
    return version;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path + " for writing");
    f << text;
}

inline json json_body(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
}

// ---- scalars ----

inline cplx complex_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw InvalidInput("expected a number or a [re, im] pair, found " + j.dump());
}

inline json complex_to_json(cplx z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

inline std::string format_double(double x) {
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
}

// ---- tolerances ----

struct ToleranceKey {
    const char* name;
    std::variant<double Tolerances::*, int Tolerances::*> member;
};

inline const std::vector<ToleranceKey>& tolerance_keys() {
    static const std::vector<ToleranceKey> keys{
        {"root", &Tolerances::root},
        {"root_max_iter", &Tolerances::root_max_iter},
        {"disk_band", &Tolerances::disk_band},
        {"tile_margin", &Tolerances::tile_margin},
        {"singular_band", &Tolerances::singular_band},
        {"stagnation_radius", &Tolerances::stagnation_radius},
        {"cluster", &Tolerances::cluster},
        {"branch_ambiguity", &Tolerances::branch_ambiguity},
        {"newton_steps", &Tolerances::newton_steps},
        {"landing", &Tolerances::landing},
        {"node_exclusion", &Tolerances::node_exclusion},
        {"check", &Tolerances::check},
    };
    return keys;
}

inline void set_tolerance(Tolerances& tol, const std::string& name, const std::string& value) {
    for (const auto& k : tolerance_keys()) {
        if (name != k.name) continue;
        try {
            std::size_t used = 0;
            if (auto* d = std::get_if<double Tolerances::*>(&k.member)) {
                double v = std::stod(value, &used);
                if (!(v > 0.0)) throw InvalidInput("tolerance " + name + " must be positive");
                tol.*(*d) = v;
            } else {
                int v = std::stoi(value, &used);
                if (v < 1) throw InvalidInput("tolerance " + name + " must be positive");
                tol.*std::get<int Tolerances::*>(k.member) = v;
            }
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::logic_error&) {
            throw InvalidInput("bad value for tolerance " + name + ": " + value);
        }
        return;
    }
    throw InvalidInput("unknown tolerance: " + name);
}

inline std::string tolerance_value(const Tolerances& tol, const ToleranceKey& k) {
    if (auto* d = std::get_if<double Tolerances::*>(&k.member)) return format_double(tol.*(*d));
    return std::to_string(tol.*std::get<int Tolerances::*>(k.member));
}

inline Tolerances tolerances_from_json(const json& j, Tolerances tol = {}) {
    if (!j.is_object()) throw InvalidInput("tolerances must be an object");
    for (const auto& [k, v] : j.items()) set_tolerance(tol, k, v.is_string() ? v.get<std::string>() : v.dump());
    return tol;
}

// ---- run configuration ----

struct RunConfig {
    RenderConfig render;
    Tolerances tol;
    std::uint64_t seed = 1;
};

inline RunConfig parse_config(std::istream& in) {
    read_header(in, "config");
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(in, pt);
    } catch (const boost::property_tree::ptree_error& e) {
        throw InvalidInput(std::string("malformed config: ") + e.what());
    }
    RunConfig c;
    auto number = [](const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::logic_error&) {
            throw InvalidInput("bad number for " + key + ": " + v);
        }
    };
    auto integer = [&](const std::string& key, const std::string& v) {
        double x = number(key, v);
        if (x != std::floor(x)) throw InvalidInput("expected an integer for " + key + ": " + v);
        return static_cast<long long>(x);
    };
    for (const auto& [section, tree] : pt) {
        for (const auto& [key, node] : tree) {
            const std::string v = node.get_value<std::string>();
            const std::string full = section + "." + key;
            if (section == "tolerances") {
                set_tolerance(c.tol, key, v);
            } else if (section == "render") {
                RenderConfig& r = c.render;
                if (key == "center") {
                    std::istringstream ss(v);
                    double re = 0, im = 0;
                    if (!(ss >> re >> im)) throw InvalidInput("render.center needs two numbers");
                    r.center = {re, im};
                } else if (key == "width") {
                    r.width = number(full, v);
                } else if (key == "size") {
                    auto x = v.find('x');
                    if (x == std::string::npos) throw InvalidInput("render.size must look like 512x512");
                    r.pixels_x = static_cast<int>(integer(full, v.substr(0, x)));
                    r.pixels_y = static_cast<int>(integer(full, v.substr(x + 1)));
                } else if (key == "max_iter") {
                    r.max_iter = static_cast<int>(integer(full, v));
                } else if (key == "workers") {
                    r.workers = static_cast<int>(integer(full, v));
                } else if (key == "hue_step") {
                    r.palette.hue_step = number(full, v);
                } else {
                    throw InvalidInput("unknown config key " + full);
                }
            } else if (section == "run" && key == "seed") {
                c.seed = static_cast<std::uint64_t>(integer(full, v));
            } else {
                throw InvalidInput("unknown config key " + full);
            }
        }
    }
    c.render.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::istringstream in(read_file(path));
    return parse_config(in);
}

inline std::string format_config(const RunConfig& c) {
    std::ostringstream os;
    os << header_line("config") << "\n[render]\n";
    os << "center = " << format_double(c.render.center.real()) << " " << format_double(c.render.center.imag()) << "\n";
    os << "width = " << format_double(c.render.width) << "\n";
    os << "size = " << c.render.pixels_x << "x" << c.render.pixels_y << "\n";
    os << "max_iter = " << c.render.max_iter << "\n";
    os << "workers = " << c.render.workers << "\n";
    os << "hue_step = " << format_double(c.render.palette.hue_step) << "\n";
    os << "\n[run]\nseed = " << c.seed << "\n\n[tolerances]\n";
    for (const auto& k : tolerance_keys()) os << k.name << " = " << tolerance_value(c.tol, k) << "\n";
    return os.str();
}

// ---- polynomials, disks ----

inline Poly poly_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidInput("coefficient list must be a nonempty array");
    std::vector<cplx> c;
    for (const auto& x : j) c.push_back(complex_from_json(x));
    return Poly(std::move(c));
}

inline json poly_to_json(const Poly& p) {
    json a = json::array();
    for (int k = 0; k <= std::max(p.degree(), 0); ++k) a.push_back(complex_to_json(p.coeff(k)));
    return a;
}

inline std::vector<cplx> points_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("vertex list must be an array");
    std::vector<cplx> v;
    for (const auto& x : j) v.push_back(complex_from_json(x));
    return v;
}

inline JordanDisk disk_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) throw InvalidInput("disk needs a \"type\"");
    const std::string t = j.at("type").get<std::string>();
    if (t == "unit") return JordanDisk::unit();
    if (t == "round" || t == "exterior") {
        cplx c = complex_from_json(j.at("center"));
        double r = j.at("radius").get<double>();
        return t == "round" ? JordanDisk::round(c, r) : JordanDisk::exterior(c, r);
    }
    if (t == "polygon") return JordanDisk::polygon(points_from_json(j.at("vertices")));
    if (t == "dual-polygon") return JordanDisk(JordanDisk::DualPolygon{points_from_json(j.at("vertices"))});
    throw InvalidInput("unknown disk type: " + t);
}

inline json disk_to_json(const JordanDisk& d) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            auto pts = [](const std::vector<cplx>& v) {
                json a = json::array();
                for (auto z : v) a.push_back(complex_to_json(z));
                return a;
            };
            if constexpr (std::is_same_v<T, JordanDisk::Unit>) return {{"type", "unit"}};
            else if constexpr (std::is_same_v<T, JordanDisk::Round>)
                return {{"type", "round"}, {"center", complex_to_json(s.center)}, {"radius", s.radius}};
            else if constexpr (std::is_same_v<T, JordanDisk::RoundExterior>)
                return {{"type", "exterior"}, {"center", complex_to_json(s.center)}, {"radius", s.radius}};
            else if constexpr (std::is_same_v<T, JordanDisk::Polygon>)
                return {{"type", "polygon"}, {"vertices", pts(s.vertices)}};
            else
                return {{"type", "dual-polygon"}, {"vertices", pts(s.vertices)}};
        },
        d.shape());
}

// ---- systems ----

struct SystemDescription {
    enum class Kind { Quadrature, BInvolution };
    Kind kind = Kind::Quadrature;
    std::vector<DomainSpec> domains;
    std::vector<int> partner;          // b-involutions only
    bool require_tree = true;
    Tolerances tol;

    // Throws InvalidInput (or NotUnivalent) when the data do not define a system.
    ReflectionSystem build() const {
        if (kind == Kind::Quadrature) {
            std::vector<RationalMap> maps;
            for (const auto& d : domains) maps.push_back(d.map);
            return SchwarzReflection(build_qmd(std::move(maps), require_tree), tol);
        }
        return BInvolution(domains, partner, tol);
    }
};

inline SystemDescription parse_system(std::istream& in) {
    read_header(in, "system");
    json j = json_body(in);
    SystemDescription s;
    try {
        const std::string kind = j.value("kind", "quadrature");
        if (kind == "quadrature") s.kind = SystemDescription::Kind::Quadrature;
        else if (kind == "b-involution") s.kind = SystemDescription::Kind::BInvolution;
        else throw InvalidInput("unknown system kind: " + kind);
        if (!j.contains("domains") || !j.at("domains").is_array() || j.at("domains").empty())
            throw InvalidInput("system needs a nonempty \"domains\" array");
        for (const auto& d : j.at("domains")) {
            Poly num = poly_from_json(d.at("num"));
            Poly den = d.contains("den") ? poly_from_json(d.at("den")) : Poly({1.0});
            JordanDisk disk = d.contains("disk") ? disk_from_json(d.at("disk")) : JordanDisk::unit();
            if (s.kind == SystemDescription::Kind::Quadrature && d.contains("disk") && !std::holds_alternative<JordanDisk::Unit>(disk.shape()))
                throw InvalidInput("quadrature domains are uniformized by the unit disk");
            s.domains.push_back({RationalMap(std::move(num), std::move(den)), disk});
            if (d.contains("partner")) s.partner.push_back(d.at("partner").get<int>());
        }
        if (s.kind == SystemDescription::Kind::BInvolution && s.partner.size() != s.domains.size())
            throw InvalidInput("every b-involution domain needs a \"partner\"");
        s.require_tree = j.value("tree_like", true);
        if (j.contains("tolerances")) s.tol = tolerances_from_json(j.at("tolerances"));
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed system file: ") + e.what());
    }
    return s;
}

inline SystemDescription load_system(const std::string& path) {
    std::istringstream in(read_file(path));
    return parse_system(in);
}

inline std::string format_system(const SystemDescription& s) {
    json j;
    j["kind"] = s.kind == SystemDescription::Kind::Quadrature ? "quadrature" : "b-involution";
    j["tree_like"] = s.require_tree;
    json doms = json::array();
    for (std::size_t k = 0; k < s.domains.size(); ++k) {
        json d{{"num", poly_to_json(s.domains[k].map.num())}, {"den", poly_to_json(s.domains[k].map.den())},
               {"disk", disk_to_json(s.domains[k].disk)}};
        if (k < s.partner.size()) d["partner"] = s.partner[k];
        doms.push_back(d);
    }
    j["domains"] = doms;
    return header_line("system") + "\n" + j.dump(2) + "\n";
}

// ---- families ----

inline ParameterFamily parse_family(std::istream& in) {
    read_header(in, "family");
    json j = json_body(in);
    ParameterFamily f;
    try {
        if (j.contains("builtin")) {
            f = ParameterFamily::builtin(j.at("builtin").get<std::string>());
        } else {
            f.name = j.value("name", "custom");
            for (const auto& d : j.at("domains")) {
                MapTemplate t;
                t.num = d.at("num").get<std::vector<std::string>>();
                if (d.contains("den")) t.den = d.at("den").get<std::vector<std::string>>();
                f.domains.push_back(t);
            }
        }
        if (j.contains("window")) {
            const auto& w = j.at("window");
            if (w.contains("center")) f.center = complex_from_json(w.at("center"));
            if (w.contains("width")) f.width = w.at("width").get<double>();
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed family file: ") + e.what());
    }
    f.validate();
    return f;
}

inline ParameterFamily load_family(const std::string& path) {
    std::istringstream in(read_file(path));
    return parse_family(in);
}

// ---- fundamental domains ----

inline FactorBowenSeries parse_fundamental_domain(std::istream& in) {
    read_header(in, "fundamental-domain");
    json j = json_body(in);
    try {
        if (j.contains("builtin")) {
            const std::string b = j.at("builtin").get<std::string>();
            if (b == "hecke") return FactorBowenSeries::hecke(j.at("n").get<int>());
            if (b == "punctured-sphere") return FactorBowenSeries::punctured_sphere(j.at("punctures").get<int>());
            throw InvalidInput("unknown built-in fundamental domain: " + b);
        }
        FundamentalDomain fd;
        fd.n = j.at("rotation_order").get<int>();
        fd.vertices = points_from_json(j.at("vertices"));
        fd.pairing = j.at("pairing").get<std::vector<int>>();
        for (const auto& g : j.at("generators")) {
            const auto& m = g.at("matrix");
            if (!m.is_array() || m.size() != 4) throw InvalidInput("generator matrix needs four entries");
            fd.generators.emplace_back(complex_from_json(m[0]), complex_from_json(m[1]), complex_from_json(m[2]),
                                       complex_from_json(m[3]), g.value("reversing", false));
        }
        return FactorBowenSeries(std::move(fd));
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed fundamental domain file: ") + e.what());
    }
}

// ---- laminations ----

inline std::string format_lamination(const Lamination& L) {
    std::ostringstream os;
    os << header_line("lamination") << "\n";
    os << "degree " << L.degree << " sign " << L.sign << "\n";
    for (const auto& c : L.classes) {
        for (std::size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
        os << "\n";
    }
    return os.str();
}

inline Lamination parse_lamination(std::istream& in) {
    read_header(in, "lamination");
    Lamination L;
    std::string line, word;
    bool have_degree = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!have_degree) {
            std::string s1;
            if (!(ls >> word >> L.degree >> s1 >> L.sign) || word != "degree" || s1 != "sign")
                throw InvalidInput("expected \"degree <d> sign <+1|-1>\"");
            have_degree = true;
            continue;
        }
        std::vector<Angle> c;
        while (ls >> word) c.push_back(Angle::parse(word));
        if (!c.empty()) L.classes.push_back(c);
    }
    if (!have_degree) throw InvalidInput("lamination file has no degree line");
    L.normalize();
    return L;
}

// ---- puzzle specifications ----

// Text format, one key per line; each "level" line opens a new puzzle:
//   level 0
//   degree 2
//   sign -1
//   critical 1/2
//   cut 1/3 2/3
inline std::vector<PuzzleSpec> parse_puzzle_specs(std::istream& in) {
    read_header(in, "puzzle-spec");
    std::vector<PuzzleSpec> out;
    std::string line, key;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "level") {
            out.emplace_back();
            if (!(ls >> out.back().level)) throw InvalidInput("level needs an integer");
            continue;
        }
        if (out.empty()) throw InvalidInput("puzzle spec must start with a level line");
        PuzzleSpec& s = out.back();
        std::string w;
        if (key == "degree") {
            if (!(ls >> s.degree)) throw InvalidInput("degree needs an integer");
        } else if (key == "sign") {
            if (!(ls >> s.sign)) throw InvalidInput("sign needs an integer");
        } else if (key == "critical") {
            if (!(ls >> w)) throw InvalidInput("critical needs an angle");
            s.critical_value = Angle::parse(w);
        } else if (key == "equipotential") {
            if (!(ls >> s.equipotential)) throw InvalidInput("equipotential needs a number");
        } else if (key == "cut") {
            std::vector<Angle> c;
            while (ls >> w) c.push_back(Angle::parse(w));
            if (c.empty()) throw InvalidInput("empty cut class");
            s.cuts.push_back(c);
        } else {
            throw InvalidInput("unknown puzzle key: " + key);
        }
    }
    if (out.empty()) throw InvalidInput("no puzzle levels given");
    for (const auto& s : out) s.validate();
    return out;
}

inline std::string format_puzzle(const Puzzle& P) {
    std::ostringstream os;
    os << "depth " << P.depth << " pieces " << P.pieces.size() << "\n";
    for (std::size_t i = 0; i < P.pieces.size(); ++i) {
        os << "piece " << i << " arcs";
        for (const auto& [a, b] : P.pieces[i].arcs) os << " [" << a << "," << b << ")";
        os << " rays";
        for (const auto& [a, b] : P.pieces[i].rays) os << " " << a << "~" << b;
        os << "\n";
    }
    return os.str();
}

// ---- symbols ----

// "1,3" or "1,3;2" (prefix;period). With periodic = true a list without ';'
// is read as the period.
inline SymbolSequence parse_symbols(const std::string& text, bool periodic) {
    auto list = [](const std::string& s) {
        std::vector<int> v;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.find_first_not_of(" ") == std::string::npos) continue;
            try {
                std::size_t used = 0;
                v.push_back(std::stoi(item, &used));
                if (item.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(item);
            } catch (const std::logic_error&) {
                throw InvalidInput("bad symbol: " + item);
            }
        }
        return v;
    };
    auto semi = text.find(';');
    if (semi != std::string::npos) return SymbolSequence{list(text.substr(0, semi)), list(text.substr(semi + 1))};
    if (periodic) return SymbolSequence{{}, list(text)};
    return SymbolSequence{list(text), {}};
}

inline std::string format_point(const ExtPoint& p) {
    if (p.is_infinite()) return "inf inf";
    return format_double(p.value().real()) + " " + format_double(p.value().imag());
}

}  // namespace qdyn::io
