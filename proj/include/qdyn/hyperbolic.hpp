#pragma once

// Hyperbolic-disk models: reflections in geodesics, the reflection map of the
// regular ideal polygon, its circle conjugacy to m_{-d}, the map obtained by
// folding it with z^{d+1}, and factor maps of Bowen-Series type.

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <variant>
#include <vector>

#include "angles.hpp"
#include "numerics.hpp"

namespace qdyn {

using Rational = boost::multiprecision::cpp_rational;

struct Circle {
    cplx center;
    double radius;
};

struct Line {
    cplx point;
    cplx direction;  // unit
};

using GenCircle = std::variant<Circle, Line>;

// Geodesic of the unit disk with ideal endpoints a and b.
inline GenCircle reflection_circle(cplx a, cplx b) {
    if (std::abs(std::abs(a) - 1.0) > 1e-12 || std::abs(std::abs(b) - 1.0) > 1e-12)
        throw InvalidInput("geodesic endpoints must lie on the unit circle");
    if (std::abs(a - b) < 1e-12) throw InvalidInput("geodesic endpoints coincide");
    if (std::abs(a + b) < 1e-12) return Line{0.0, a};
    cplx c = 2.0 * a * b / (a + b);
    return Circle{c, std::abs(a - c)};
}

inline ExtPoint circle_reflect(const GenCircle& g, const ExtPoint& z) {
    if (auto* c = std::get_if<Circle>(&g)) {
        if (z.is_infinite()) return ExtPoint(c->center);
        cplx dz = z.value() - c->center;
        if (dz == cplx(0.0)) return ExtPoint::infinity();
        return ExtPoint(c->center + c->radius * c->radius / std::conj(dz));
    }
    const auto& l = std::get<Line>(g);
    if (z.is_infinite()) return z;
    return ExtPoint(l.point + l.direction * l.direction * std::conj(z.value() - l.point));
}

// z -> (a z + b)/(c z + d), or the same applied to conj(z) when reversing.
class Mobius {
public:
    Mobius() = default;
    Mobius(cplx a, cplx b, cplx c, cplx d, bool reversing = false) : m_{a, b, c, d}, reversing_(reversing) {
        normalize();
    }

    static Mobius identity() { return {}; }
    static Mobius conjugation() { return Mobius(1.0, 0.0, 0.0, 1.0, true); }
    static Mobius rotation(double angle) { return Mobius(std::polar(1.0, angle), 0.0, 0.0, 1.0); }

    static Mobius reflection(const GenCircle& g) {
        if (auto* c = std::get_if<Circle>(&g)) {
            double r2 = c->radius * c->radius;
            return Mobius(c->center, r2 - std::norm(c->center), 1.0, -std::conj(c->center), true);
        }
        const auto& l = std::get<Line>(g);
        cplx u2 = l.direction * l.direction;
        return Mobius(u2, l.point - u2 * std::conj(l.point), 0.0, 1.0, true);
    }

    bool reversing() const { return reversing_; }
    const std::array<cplx, 4>& matrix() const { return m_; }

    ExtPoint operator()(const ExtPoint& p) const {
        ExtPoint z = reversing_ ? conj(p) : p;
        const auto& [a, b, c, d] = m_;
        if (z.is_infinite()) return c == cplx(0.0) ? ExtPoint::infinity() : make_point(a / c);
        cplx den = c * z.value() + d;
        if (den == cplx(0.0)) return ExtPoint::infinity();
        return make_point((a * z.value() + b) / den);
    }
    cplx operator()(cplx z) const {
        ExtPoint r = (*this)(ExtPoint(z));
        if (r.is_infinite()) throw OutsideDomain("Mobius map sends point to infinity");
        return r.value();
    }

    // (*this) after g
    Mobius after(const Mobius& g) const {
        std::array<cplx, 4> b = g.m_;
        if (reversing_)
            for (auto& x : b) x = std::conj(x);
        const auto& a = m_;
        return Mobius(a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
                      a[2] * b[1] + a[3] * b[3], reversing_ != g.reversing_);
    }

    Mobius inverse() const {
        const auto& [a, b, c, d] = m_;
        Mobius inv(d, -b, -c, a, false);
        if (reversing_) {
            for (auto& x : inv.m_) x = std::conj(x);
            inv.reversing_ = true;
        }
        return inv;
    }

    double distance_to(const Mobius& o) const {
        if (reversing_ != o.reversing_) return std::numeric_limits<double>::infinity();
        double plus = 0.0, minus = 0.0;
        for (int k = 0; k < 4; ++k) {
            plus = std::max(plus, std::abs(m_[static_cast<std::size_t>(k)] - o.m_[static_cast<std::size_t>(k)]));
            minus = std::max(minus, std::abs(m_[static_cast<std::size_t>(k)] + o.m_[static_cast<std::size_t>(k)]));
        }
        return std::min(plus, minus);
    }

private:
    void normalize() {
        cplx det = m_[0] * m_[3] - m_[1] * m_[2];
        if (std::abs(det) == 0.0) throw InvalidInput("degenerate Mobius matrix");
        cplx s = std::sqrt(det);
        for (auto& x : m_) x /= s;
    }

    std::array<cplx, 4> m_{1.0, 0.0, 0.0, 1.0};
    bool reversing_ = false;
};

inline bool in_closed_half_plane(const GenCircle& g, cplx z, double band) {
    if (auto* c = std::get_if<Circle>(&g)) return std::abs(z - c->center) <= c->radius + band;
    const auto& l = std::get<Line>(g);
    // the side to the right of the directed diameter
    return (std::conj(l.direction) * (z - l.point)).imag() <= band;
}

// Reflection map of the regular ideal (d+1)-gon with vertices at the
// (d+1)-th roots of unity: on the region cut off by the side joining
// w^{s-1} and w^s it is reflection in that side.
class NielsenMap {
public:
    explicit NielsenMap(int d) : d_(d) {
        if (d < 2 || d > degree_cap) throw InvalidInput("polygon reflection map needs 2 <= d <= cap");
        for (int k = 0; k <= d; ++k) {
            cplx a = std::polar(1.0, 2.0 * pi * k / (d + 1));
            cplx b = std::polar(1.0, 2.0 * pi * (k + 1) / (d + 1));
            sides_.push_back(reflection_circle(a, b));
            reflections_.push_back(Mobius::reflection(sides_.back()));
        }
    }

    int degree() const { return d_; }
    const GenCircle& side(int symbol) const { return sides_.at(static_cast<std::size_t>(symbol - 1)); }
    const Mobius& reflection(int symbol) const { return reflections_.at(static_cast<std::size_t>(symbol - 1)); }

    // Symbol of the closed cut-off region containing z; lowest symbol on ties.
    std::optional<int> sector(cplx z, double band = 1e-12) const {
        if (std::abs(z) > 1.0 + band) return std::nullopt;
        for (int s = 1; s <= d_ + 1; ++s)
            if (in_closed_half_plane(side(s), z, band)) return s;
        return std::nullopt;
    }

    cplx operator()(cplx z) const {
        auto s = sector(z);
        if (!s) throw OutsideDomain("point lies in the open polygon or outside the disk");
        return reflection(*s)(z);
    }

    // The induced circle map in angle coordinates, valued in [0, 1).
    double circle_angle(double theta) const {
        cplx z = std::polar(1.0, 2.0 * pi * theta);
        double t = std::arg((*this)(z)) / (2.0 * pi);
        return t < 0 ? t + 1.0 : (t >= 1.0 ? t - 1.0 : t);
    }

private:
    int d_;
    std::vector<GenCircle> sides_;
    std::vector<Mobius> reflections_;
};

// Cylinder of the m_{-d} coding with exact endpoints.
struct MinkowskiValue {
    Rational lo;
    Rational hi;
    bool landed = false;  // orbit hit a fixed angle, value is exact

    Rational mid() const { return (lo + hi) / 2; }
    double value() const { return static_cast<double>(mid()); }
    Rational width() const { return hi - lo; }
};

// Circle distance between two rationals in R/Z.
inline Rational circle_gap(const Rational& a, const Rational& b) {
    Rational t = a - b;
    using boost::multiprecision::numerator;
    using boost::multiprecision::denominator;
    boost::multiprecision::cpp_int fl = numerator(t) / denominator(t);
    if (t < 0 && fl * denominator(t) != numerator(t)) fl -= 1;
    t -= Rational(fl);
    return t > Rational(1, 2) ? Rational(1) - t : t;
}

namespace detail {

// inverse branch of m_{-d} onto the arc of the given symbol, on [lo, hi]
inline void pull_back(Rational& lo, Rational& hi, int symbol, int d) {
    Rational m = (lo + hi) / 2;
    Rational bound = m + Rational(d * symbol, d + 1);
    using boost::multiprecision::numerator;
    using boost::multiprecision::denominator;
    boost::multiprecision::cpp_int n = numerator(bound) / denominator(bound);
    if (bound < 0 && n * denominator(bound) != numerator(bound)) n -= 1;
    Rational nlo = (Rational(n) - hi) / d;
    Rational nhi = (Rational(n) - lo) / d;
    lo = nlo;
    hi = nhi;
}

}  // namespace detail

// Itinerary of a circle angle under the polygon reflection map, read off a
// floating-point orbit; stops early when the orbit lands on a fixed angle.
struct CircleItinerary {
    std::vector<int> symbols;
    int landed_at = -1;  // j when the orbit landed on j/(d+1)
};

inline CircleItinerary circle_itinerary(const NielsenMap& N, double theta, int depth) {
    const int d = N.degree();
    CircleItinerary it;
    double t = theta - std::floor(theta);
    for (int k = 0; k < depth; ++k) {
        double scaled = t * (d + 1);
        double j = std::round(scaled);
        if (std::abs(scaled - j) <= 4e-15 * (d + 1)) {
            it.landed_at = static_cast<int>(j) % (d + 1);
            return it;
        }
        it.symbols.push_back(static_cast<int>(std::floor(scaled)) + 1);
        t = N.circle_angle(t);
    }
    return it;
}

inline MinkowskiValue cylinder_of(const std::vector<int>& symbols, int landed_at, int d) {
    MinkowskiValue v;
    if (landed_at >= 0) {
        v.lo = v.hi = Rational(landed_at, d + 1);
        v.landed = true;
    } else {
        if (symbols.empty()) throw InvalidInput("empty itinerary");
        int s = symbols.back();
        v.lo = Rational(s - 1, d + 1);
        v.hi = Rational(s, d + 1);
    }
    std::size_t start = landed_at >= 0 ? symbols.size() : symbols.size() - 1;
    for (std::size_t k = start; k-- > 0;) detail::pull_back(v.lo, v.hi, symbols[k], d);
    return v;
}

// The circle conjugacy from the polygon reflection map to m_{-d}, fixing 0,
// evaluated to the given itinerary depth.
inline MinkowskiValue minkowski_E(const NielsenMap& N, double theta, int depth) {
    auto it = circle_itinerary(N, theta, depth);
    return cylinder_of(it.symbols, it.landed_at, N.degree());
}

// Conjugate of the polygon reflection map by z -> z^{d+1}.
class AntiFareyMap {
public:
    explicit AntiFareyMap(int d) : nielsen_(d) {}

    int degree() const { return nielsen_.degree(); }
    const NielsenMap& nielsen() const { return nielsen_; }

    cplx operator()(cplx z) const {
        const int q = degree() + 1;
        if (std::abs(z) > 1.0 + 1e-12) throw OutsideDomain("point outside the closed disk");
        cplx w = std::polar(std::pow(std::abs(z), 1.0 / q), std::arg(z) / q);
        auto s = nielsen_.sector(w);
        if (!s) throw OutsideDomain("point lies in the open fundamental region");
        return std::pow(nielsen_.reflection(*s)(w), q);
    }

    cplx critical_point() const { return std::pow(nielsen_.reflection(1)(cplx(0.0)), degree() + 1); }

private:
    NielsenMap nielsen_;
};

// Ideal polygon with side pairings, symmetric under rotation by 2 pi / n.
// Side k joins vertex k to vertex k+1.
struct FundamentalDomain {
    int n = 1;
    std::vector<cplx> vertices;
    std::vector<int> pairing;         // side -> partner side
    std::vector<Mobius> generators;   // side k -> side pairing[k]
};

class FactorBowenSeries {
public:
    explicit FactorBowenSeries(FundamentalDomain fd) : fd_(std::move(fd)) { validate(); }

    // Regular ideal n-gon, each side folded onto itself by the half-turn
    // about its point nearest the origin.
    static FactorBowenSeries hecke(int n) {
        if (n < 3) throw InvalidInput("half-turn example needs n >= 3");
        FundamentalDomain fd;
        fd.n = n;
        for (int k = 0; k < n; ++k) fd.vertices.push_back(std::polar(1.0, 2.0 * pi * k / n));
        for (int k = 0; k < n; ++k) {
            auto c = std::get<Circle>(reflection_circle(fd.vertices[static_cast<std::size_t>(k)],
                                                        fd.vertices[static_cast<std::size_t>((k + 1) % n)]));
            cplx q = c.center * (1.0 - c.radius / std::abs(c.center));
            Mobius to0(1.0, -q, -std::conj(q), 1.0);
            Mobius half(-1.0, 0.0, 0.0, 1.0);
            fd.pairing.push_back(k);
            fd.generators.push_back(to0.inverse().after(half).after(to0));
        }
        return FactorBowenSeries(std::move(fd));
    }

    // Regular ideal 2(p-1)-gon whose sides are paired by complex conjugation
    // after reflection; the quotient is a sphere with p punctures.
    static FactorBowenSeries punctured_sphere(int punctures) {
        if (punctures < 3) throw InvalidInput("punctured-sphere example needs at least three punctures");
        int m = 2 * (punctures - 1);
        FundamentalDomain fd;
        fd.n = 1;
        for (int k = 0; k < m; ++k) fd.vertices.push_back(std::polar(1.0, 2.0 * pi * k / m));
        for (int k = 0; k < m; ++k) {
            auto g = reflection_circle(fd.vertices[static_cast<std::size_t>(k)],
                                       fd.vertices[static_cast<std::size_t>((k + 1) % m)]);
            fd.pairing.push_back(m - 1 - k);
            fd.generators.push_back(Mobius::conjugation().after(Mobius::reflection(g)));
        }
        return FactorBowenSeries(std::move(fd));
    }

    const FundamentalDomain& domain() const { return fd_; }
    int sides() const { return static_cast<int>(fd_.vertices.size()); }
    int rotation_order() const { return fd_.n; }
    int sides_per_sector() const { return sides() / fd_.n; }
    // degree of the induced circle covering
    int degree() const { return sides() - 1; }

    std::optional<int> side_region(cplx w, double band = 1e-12) const {
        for (int s = 0; s < sides(); ++s)
            if (in_closed_half_plane(side_circles_[static_cast<std::size_t>(s)], w, band)) return s;
        return std::nullopt;
    }

    cplx operator()(cplx z) const {
        if (std::abs(z) > 1.0 + 1e-12) throw OutsideDomain("point outside the closed disk");
        cplx w = lift(z);
        auto s = side_region(w);
        if (!s) throw OutsideDomain("point lies in the open fundamental region");
        return std::pow(fd_.generators[static_cast<std::size_t>(*s)](w), fd_.n);
    }

    // One point per side in the fundamental sector, each of multiplicity n-1.
    std::vector<cplx> critical_points() const {
        std::vector<cplx> out;
        if (fd_.n < 2) return out;
        for (int s = 0; s < sides_per_sector(); ++s)
            out.push_back(std::pow(fd_.generators[static_cast<std::size_t>(s)].inverse()(cplx(0.0)), fd_.n));
        return out;
    }

    // Points of the folded boundary of the fundamental polygon.
    cplx boundary_sample(int side, double t) const {
        const auto& c = side_circles_[static_cast<std::size_t>(side)];
        cplx a = fd_.vertices[static_cast<std::size_t>(side)];
        cplx b = fd_.vertices[static_cast<std::size_t>((side + 1) % sides())];
        cplx w;
        if (auto* circ = std::get_if<Circle>(&c)) {
            double aa = std::arg(a - circ->center), ab = std::arg(b - circ->center);
            double span = std::remainder(ab - aa, 2.0 * pi);
            w = circ->center + std::polar(circ->radius, aa + t * span);
        } else {
            w = a + t * (b - a);
        }
        return std::pow(w, fd_.n);
    }

private:
    cplx lift(cplx z) const {
        double a = std::arg(z);
        if (a < 0) a += 2.0 * pi;
        return std::polar(std::pow(std::abs(z), 1.0 / fd_.n), a / fd_.n);
    }

    void validate() {
        const int m = sides();
        if (fd_.n < 1) throw InvalidInput("rotation order must be positive");
        if (m < 3) throw InvalidInput("fundamental polygon needs at least three ideal vertices");
        if (m % fd_.n != 0) throw InvalidInput("side count must be a multiple of the rotation order");
        if (static_cast<int>(fd_.pairing.size()) != m || static_cast<int>(fd_.generators.size()) != m)
            throw InvalidInput("one pairing and one generator per side required");
        if (std::abs(fd_.vertices[0] - 1.0) > 1e-9) throw InvalidInput("first vertex must be 1");
        double prev = -1.0;
        for (auto v : fd_.vertices) {
            if (std::abs(std::abs(v) - 1.0) > 1e-9) throw InvalidInput("vertices must be ideal");
            double a = std::arg(v);
            if (a < -1e-12) a += 2.0 * pi;
            if (a <= prev) throw InvalidInput("vertices must be in counterclockwise order");
            prev = a;
        }
        const int p = m / fd_.n;
        Mobius rot = Mobius::rotation(2.0 * pi / fd_.n);
        for (int k = 0; k < m; ++k) {
            cplx v = fd_.vertices[static_cast<std::size_t>(k)];
            cplx vr = fd_.vertices[static_cast<std::size_t>((k + p) % m)];
            if (std::abs(v * std::polar(1.0, 2.0 * pi / fd_.n) - vr) > 1e-9)
                throw InvalidInput("polygon is not symmetric under the rotation");
        }
        for (int k = 0; k < m; ++k)
            side_circles_.push_back(reflection_circle(fd_.vertices[static_cast<std::size_t>(k)],
                                                      fd_.vertices[static_cast<std::size_t>((k + 1) % m)]));
        for (int k = 0; k < m; ++k) {
            int j = fd_.pairing[static_cast<std::size_t>(k)];
            if (j < 0 || j >= m || fd_.pairing[static_cast<std::size_t>(j)] != k)
                throw InvalidInput("side pairing must be an involution");
            const Mobius& g = fd_.generators[static_cast<std::size_t>(k)];
            if (g.reversing()) throw InvalidInput("side pairings must preserve orientation");
            if (std::abs(g(cplx(0.0))) >= 1.0) throw InvalidInput("side pairing does not preserve the disk");
            for (int t = 0; t < 8; ++t)
                if (std::abs(std::abs(g(std::polar(1.0, 0.7 + t))) - 1.0) > 1e-9)
                    throw InvalidInput("side pairing does not preserve the unit circle");
            cplx a = fd_.vertices[static_cast<std::size_t>(k)], b = fd_.vertices[static_cast<std::size_t>((k + 1) % m)];
            cplx pa = fd_.vertices[static_cast<std::size_t>(j)], pb = fd_.vertices[static_cast<std::size_t>((j + 1) % m)];
            if (std::abs(g(a) - pb) > 1e-9 || std::abs(g(b) - pa) > 1e-9)
                throw InvalidInput("generator does not carry its side onto the paired side");
            if (g.after(fd_.generators[static_cast<std::size_t>(j)]).distance_to(Mobius::identity()) > 1e-9)
                throw InvalidInput("paired generators are not mutually inverse");
            const Mobius& gr = fd_.generators[static_cast<std::size_t>((k + p) % m)];
            if (gr.distance_to(rot.after(g).after(rot.inverse())) > 1e-9)
                throw InvalidInput("generators are not equivariant under the rotation");
            if (fd_.pairing[static_cast<std::size_t>((k + p) % m)] != (j + p) % m)
                throw InvalidInput("pairing is not equivariant under the rotation");
        }
        if (fd_.n >= 2) {
            // vertices 0 and p must lie in one vertex cycle
            std::vector<char> seen(static_cast<std::size_t>(m), 0);
            int v = 0;
            bool found = false;
            for (int step = 0; step < 2 * m && !seen[static_cast<std::size_t>(v)]; ++step) {
                seen[static_cast<std::size_t>(v)] = 1;
                if (v == p) found = true;
                // vertex v is the start of side v; its image is the end of the paired side
                int j = fd_.pairing[static_cast<std::size_t>(v)];
                v = (j + 1) % m;
            }
            if (!found) throw InvalidInput("vertices 1 and exp(2 pi i/n) must be identified");
        }
    }

    FundamentalDomain fd_;
    std::vector<GenCircle> side_circles_;
};

}  // namespace qdyn
