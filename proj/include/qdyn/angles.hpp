#pragma once

// Exact rational angles in R/Z and the itinerary coding shared by the
// ideal-polygon reflection map and the angle maps m_{+d}, m_{-d}.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace qdyn {

class Angle {
public:
    Angle() = default;
    Angle(std::int64_t num, std::int64_t den) {
        if (den <= 0) throw InvalidInput("angle denominator must be positive");
        num %= den;
        if (num < 0) num += den;
        std::int64_t g = std::gcd(num, den);
        if (g == 0) g = den;
        num_ = num / g;
        den_ = den / g;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend bool operator==(const Angle&, const Angle&) = default;
    friend bool operator<(const Angle& a, const Angle& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }

    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    static Angle parse(const std::string& s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Angle(std::stoll(s), 1);
            return Angle(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::logic_error&) {
            throw InvalidInput("bad angle '" + s + "'");
        }
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const Angle& a) { return os << a.str(); }

// Counterclockwise distance from a to b, in [0, 1).
inline Angle ccw_distance(const Angle& a, const Angle& b) {
    __int128 num = static_cast<__int128>(b.num()) * a.den() - static_cast<__int128>(a.num()) * b.den();
    __int128 den = static_cast<__int128>(a.den()) * b.den();
    __int128 g = num < 0 ? -num : num;
    for (__int128 h = den; h != 0;) {
        __int128 t = g % h;
        g = h;
        h = t;
    }
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (den > INT64_MAX || num > INT64_MAX || -num > INT64_MAX) throw InvalidInput("angle denominator overflow");
    return Angle(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

// theta -> sign * d * theta, sign = +1 (holomorphic) or -1 (anti-holomorphic)
struct AngleMap {
    int degree = 2;
    int sign = -1;

    Angle operator()(const Angle& a) const {
        __int128 n = static_cast<__int128>(a.num()) * degree * sign;
        __int128 m = n % a.den();
        if (m < 0) m += a.den();
        return Angle(static_cast<std::int64_t>(m), a.den());
    }

    std::vector<Angle> preimages(const Angle& a) const {
        std::vector<Angle> out;
        std::int64_t base = sign > 0 ? a.num() : (a.den() - a.num()) % a.den();
        for (int k = 0; k < degree; ++k) out.emplace_back(base + k * a.den(), a.den() * degree);
        return out;
    }
};

// Eventually periodic symbol sequence over {1..d+1} with no symbol repeated
// twice in a row. An empty period means the sequence is finite.
struct SymbolSequence {
    std::vector<int> prefix;
    std::vector<int> period;

    bool finite() const { return period.empty(); }

    int at(std::size_t k) const {
        if (k < prefix.size()) return prefix[k];
        if (period.empty()) throw InvalidInput("symbol index past the end of a finite sequence");
        return period[(k - prefix.size()) % period.size()];
    }

    std::vector<int> first(std::size_t n) const {
        std::vector<int> out;
        for (std::size_t k = 0; k < n; ++k) {
            if (period.empty() && k >= prefix.size()) break;
            out.push_back(at(k));
        }
        return out;
    }

    void validate(int d) const {
        auto check = [&](int s) {
            if (s < 1 || s > d + 1) throw InvalidInput("symbol out of range 1..d+1");
        };
        for (int s : prefix) check(s);
        for (int s : period) check(s);
        std::size_t n = prefix.size() + 2 * period.size() + 1;
        auto seq = first(n);
        for (std::size_t k = 1; k < seq.size(); ++k)
            if (seq[k] == seq[k - 1]) throw InvalidInput("symbol repeated immediately");
    }

    std::string str() const {
        std::ostringstream os;
        for (std::size_t k = 0; k < prefix.size(); ++k) os << (k ? "," : "") << prefix[k];
        if (!period.empty()) {
            os << (prefix.empty() ? "" : ",") << "(";
            for (std::size_t k = 0; k < period.size(); ++k) os << (k ? "," : "") << period[k];
            os << ")";
        }
        return os.str();
    }
};

// Arc index (1-based) of a non-fixed angle: s with theta in ((s-1)/(d+1), s/(d+1)).
// Returns 0 when theta is one of the fixed angles j/(d+1).
inline int arc_of(const Angle& a, int d) {
    __int128 scaled = static_cast<__int128>(a.num()) * (d + 1);
    if (scaled % a.den() == 0) return 0;
    return static_cast<int>(scaled / a.den()) + 1;
}

// The two arcs adjacent to the fixed angle j/(d+1), j in 0..d: (left, right).
inline std::pair<int, int> arcs_at_fixed(int j, int d) {
    int left = j == 0 ? d + 1 : j;
    int right = j + 1;
    return {left, right};
}

// Itinerary of a rational angle under m_{-d} with respect to the arcs
// between consecutive fixed angles. An orbit that lands on a fixed angle
// continues with the alternating tail of the two adjacent arcs.
inline SymbolSequence itinerary_of(const Angle& theta, int d) {
    AngleMap m{d, -1};
    std::vector<Angle> seen;
    std::vector<int> syms;
    Angle a = theta;
    for (;;) {
        int s = arc_of(a, d);
        if (s == 0) {
            int j = static_cast<int>(static_cast<__int128>(a.num()) * (d + 1) / a.den());
            auto [left, right] = arcs_at_fixed(j, d);
            int prev = syms.empty() ? 0 : syms.back();
            int first = prev == right ? left : right;
            int second = first == right ? left : right;
            return SymbolSequence{syms, {first, second}};
        }
        for (std::size_t k = 0; k < seen.size(); ++k)
            if (seen[k] == a)
                return SymbolSequence{std::vector<int>(syms.begin(), syms.begin() + static_cast<long>(k)),
                                      std::vector<int>(syms.begin() + static_cast<long>(k), syms.end())};
        seen.push_back(a);
        syms.push_back(s);
        a = m(a);
        if (seen.size() > 100000) throw InvalidInput("itinerary: orbit too long");
    }
}

}  // namespace qdyn
