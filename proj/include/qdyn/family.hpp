#pragma once

// One-parameter families of uniformizing maps. Coefficients are written in
// a small expression language over the complex parameter `a`:
//   numbers, i, a, + - * / ^, parentheses, conj(...), implicit products ("2i", "0.5a").

#include <cctype>
#include <string>
#include <vector>

#include "schwarz.hpp"

namespace qdyn {

namespace detail {

class ExprParser {
public:
    ExprParser(const std::string& s, cplx a) : s_(s), a_(a) {}

    cplx parse() {
        cplx v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidInput("coefficient \"" + s_ + "\": " + what + " at position " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool starts_primary() {
        skip();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 'i' || c == 'a' || c == 'c';
    }

    cplx expr() {
        cplx v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    cplx term() {
        cplx v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) {
                cplx d = unary();
                if (d == cplx(0.0)) fail("division by zero");
                v /= d;
            } else if (starts_primary()) v *= power();
            else return v;
        }
    }
    cplx unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    cplx power() {
        cplx base = primary();
        if (eat('^')) {
            cplx e = unary();
            if (e.imag() == 0.0 && e.real() == std::round(e.real()) && std::abs(e.real()) <= 64)
                return std::pow(base, static_cast<int>(e.real()));
            return std::pow(base, e);
        }
        return base;
    }
    cplx primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            cplx v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (s_.compare(pos_, 5, "conj(") == 0) {
            pos_ += 5;
            cplx v = expr();
            if (!eat(')')) fail("missing ')'");
            return std::conj(v);
        }
        if (c == 'i') {
            ++pos_;
            return {0.0, 1.0};
        }
        if (c == 'a') {
            ++pos_;
            return a_;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return v;
        }
        fail("unexpected character");
    }

    const std::string& s_;
    cplx a_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline cplx eval_coefficient(const std::string& expr, cplx a) { return detail::ExprParser(expr, a).parse(); }

struct MapTemplate {
    std::vector<std::string> num;   // ascending powers
    std::vector<std::string> den{"1"};

    RationalMap at(cplx a) const {
        auto poly = [&](const std::vector<std::string>& cs) {
            std::vector<cplx> c;
            for (const auto& s : cs) c.push_back(eval_coefficient(s, a));
            return Poly(std::move(c));
        };
        return RationalMap(poly(num), poly(den));
    }
};

struct ParameterFamily {
    std::string name;
    std::vector<MapTemplate> domains;
    cplx center = 0.0;
    double width = 1.0;

    // The quadrature system at parameter a; throws for rejected parameters.
    SchwarzReflection system_at(cplx a, const Tolerances& tol = {}) const {
        std::vector<RationalMap> maps;
        for (const auto& d : domains) maps.push_back(d.at(a));
        return SchwarzReflection(build_qmd(std::move(maps)), tol);
    }

    void validate() const {
        if (domains.empty()) throw InvalidInput("family has no domains");
        for (const auto& d : domains) {
            if (d.num.empty() || d.den.empty()) throw InvalidInput("family template needs numerator and denominator");
            for (const auto& s : d.num) eval_coefficient(s, 0.0);
            for (const auto& s : d.den) eval_coefficient(s, 0.0);
        }
        if (!(width > 0.0)) throw InvalidInput("family window width must be positive");
    }

    // 1/z + a z^2: univalent on the disk for |a| <= 1/2, the deltoid at a = 1/2.
    static ParameterFamily deltoid() { return {"deltoid", {{{"1", "0", "0", "a"}, {"0", "1"}}}, 0.0, 1.2}; }
    // z + a z^2: the cardioid at a = 1/2.
    static ParameterFamily cardioid() { return {"cardioid", {{{"0", "1", "a"}, {"1"}}}, 0.0, 1.2}; }

    // z + a z^2 - (1 + 2a) z^3 / 3: cubic with its boundary critical point at 1,
    // so the droplet has a single cusp.
    static ParameterFamily anti_farey() { return {"anti-farey", {{{"0", "1", "a", "-(1 + 2a)/3"}, {"1"}}}, -0.75, 0.6}; }

    static ParameterFamily builtin(const std::string& name) {
        if (name == "anti-farey") return anti_farey();
        if (name == "deltoid") return deltoid();
        if (name == "cardioid") return cardioid();
        throw InvalidInput("unknown built-in family: " + name);
    }
};

}  // namespace qdyn
