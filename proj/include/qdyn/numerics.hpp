#pragma once

// Complex arithmetic on the Riemann sphere, polynomials, rational maps and
// their inverse images.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qdyn {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr int degree_cap = 32;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input data.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// A point handed to a map outside the set where that map is defined.
class OutsideDomain : public Error {
public:
    using Error::Error;
};

class RootFindingFailure : public Error {
public:
    RootFindingFailure(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// A point of the extended plane.
class ExtPoint {
public:
    ExtPoint() = default;
    ExtPoint(cplx z) : z_(z) {}
    ExtPoint(double x) : z_(x, 0.0) {}

    static ExtPoint infinity() {
        ExtPoint p;
        p.inf_ = true;
        return p;
    }

    bool is_infinite() const { return inf_; }
    bool is_finite() const { return !inf_; }
    // Only meaningful for finite points.
    cplx value() const { return z_; }

private:
    cplx z_{0.0, 0.0};
    bool inf_ = false;
};

inline ExtPoint make_point(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return ExtPoint::infinity();
    return ExtPoint(z);
}

// Chordal distance on the unit sphere, in [0, 2].
inline double chordal_distance(const ExtPoint& a, const ExtPoint& b) {
    if (a.is_infinite() && b.is_infinite()) return 0.0;
    if (a.is_infinite()) return 2.0 / std::sqrt(1.0 + std::norm(b.value()));
    if (b.is_infinite()) return 2.0 / std::sqrt(1.0 + std::norm(a.value()));
    return 2.0 * std::abs(a.value() - b.value()) /
           std::sqrt((1.0 + std::norm(a.value())) * (1.0 + std::norm(b.value())));
}

// z -> 1/z
inline ExtPoint reciprocal(const ExtPoint& p) {
    if (p.is_infinite()) return ExtPoint(0.0);
    if (p.value() == cplx(0.0)) return ExtPoint::infinity();
    return make_point(1.0 / p.value());
}

// z -> 1/conj(z), reflection in the unit circle
inline ExtPoint conj_reciprocal(const ExtPoint& p) {
    if (p.is_infinite()) return ExtPoint(0.0);
    if (p.value() == cplx(0.0)) return ExtPoint::infinity();
    return make_point(1.0 / std::conj(p.value()));
}

inline ExtPoint conj(const ExtPoint& p) {
    return p.is_infinite() ? p : ExtPoint(std::conj(p.value()));
}

class Poly {
public:
    Poly() = default;
    // Coefficients from the constant term upwards.
    explicit Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim_exact(); }
    Poly(std::initializer_list<cplx> coeffs) : c_(coeffs) { trim_exact(); }

    static Poly constant(cplx a) { return Poly({a}); }
    static Poly monomial(int k, cplx a = 1.0) {
        std::vector<cplx> c(static_cast<std::size_t>(k) + 1, 0.0);
        c.back() = a;
        return Poly(std::move(c));
    }
    // (w - r)
    static Poly linear_factor(cplx r) { return Poly({-r, 1.0}); }

    bool is_zero() const { return c_.empty(); }
    // -1 for the zero polynomial
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : cplx(0.0);
    }
    cplx leading() const { return c_.empty() ? cplx(0.0) : c_.back(); }

    cplx operator()(cplx z) const {
        cplx acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    // value and first derivative in one Horner pass
    std::pair<cplx, cplx> eval_with_derivative(cplx z) const {
        cplx p = 0.0, dp = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            dp = dp * z + p;
            p = p * z + *it;
        }
        return {p, dp};
    }

    // sum |a_k| |z|^k, the scale of rounding error in evaluating at z
    double abs_eval(double r) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
        return acc;
    }

    double norm1() const {
        double s = 0.0;
        for (auto a : c_) s += std::abs(a);
        return s;
    }

    double max_abs_coeff() const {
        double s = 0.0;
        for (auto a : c_) s = std::max(s, std::abs(a));
        return s;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
        return Poly(std::move(d));
    }

    // Drops leading coefficients below rel * max|a_k|.
    Poly trimmed(double rel) const {
        std::vector<cplx> c = c_;
        double scale = max_abs_coeff();
        while (!c.empty() && std::abs(c.back()) <= rel * scale) c.pop_back();
        return Poly(std::move(c));
    }

    // Synthetic division by (w - r); returns quotient and remainder.
    std::pair<Poly, cplx> divide_linear(cplx r) const {
        if (c_.empty()) return {Poly(), 0.0};
        std::vector<cplx> q(c_.size() - 1);
        cplx acc = 0.0;
        for (std::size_t k = c_.size(); k-- > 0;) {
            acc = acc * r + c_[k];
            if (k > 0) q[k - 1] = acc;
        }
        return {Poly(std::move(q)), acc};
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
        for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + b * cplx(-1.0); }
    friend Poly operator*(const Poly& a, cplx s) {
        if (s == cplx(0.0)) return Poly();
        std::vector<cplx> c = a.c_;
        for (auto& x : c) x *= s;
        return Poly(std::move(c));
    }
    friend Poly operator*(cplx s, const Poly& a) { return a * s; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }

private:
    void trim_exact() {
        while (!c_.empty() && c_.back() == cplx(0.0)) c_.pop_back();
    }
    std::vector<cplx> c_;
};

struct RootOptions {
    double tol = 1e-12;
    int max_iter = 500;
    int restarts = 4;
    std::uint64_t seed = 0x5eed5eedULL;
};

struct Root {
    cplx value;
    int multiplicity = 1;
};

namespace detail {

inline std::vector<cplx> aberth_start(const Poly& p, double phase) {
    const int n = p.degree();
    // radius from the geometric mean of the roots
    double r = std::pow(std::abs(p.coeff(0) / p.leading()), 1.0 / n);
    if (!(r > 0.0) || !std::isfinite(r)) r = 1.0;
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = std::polar(r, 2.0 * pi * k / n + phase);
    return z;
}

// Returns true when every approximation reached the rounding-level residual.
inline bool aberth_iterate(const Poly& p, std::vector<cplx>& z, int max_iter) {
    const std::size_t n = z.size();
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<char> done(n, 0);
    std::size_t remaining = n;
    for (int it = 0; it < max_iter && remaining > 0; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            auto [v, dv] = p.eval_with_derivative(z[i]);
            if (std::abs(v) <= 8.0 * eps * p.abs_eval(std::abs(z[i]))) {
                done[i] = 1;
                --remaining;
                continue;
            }
            cplx s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            cplx delta;
            if (dv == cplx(0.0)) {
                delta = cplx(1e-3 * (1.0 + std::abs(z[i])), 1e-3);
            } else {
                cplx nr = v / dv;
                delta = nr / (1.0 - nr * s);
            }
            if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) delta = cplx(1e-3, 1e-3);
            z[i] -= delta;
            if (std::abs(delta) <= eps * std::abs(z[i])) {
                done[i] = 1;
                --remaining;
            }
        }
    }
    return remaining == 0;
}

// Connected components of the Weierstrass inclusion disks; each component
// holds as many roots as approximations, so a small component with k members
// is reported as one root of multiplicity k.
inline std::vector<Root> cluster_roots(const Poly& p, const std::vector<cplx>& z) {
    const std::size_t n = z.size();
    std::vector<double> rad(n);
    for (std::size_t i = 0; i < n; ++i) {
        double denom = std::abs(p.leading());
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) denom *= std::abs(z[i] - z[j]);
        rad[i] = denom > 0.0 ? static_cast<double>(n) * std::abs(p(z[i])) / denom
                             : std::numeric_limits<double>::infinity();
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double gap = std::abs(z[i] - z[j]);
            double cap = 1e-4 * (1.0 + std::abs(z[i]));
            if (gap <= rad[i] + rad[j] && gap <= cap) parent[find(i)] = find(j);
        }
    std::vector<Root> out;
    std::vector<int> slot(n, -1);
    std::vector<int> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(out.size());
            out.push_back({0.0, 0});
        }
        Root& root = out[static_cast<std::size_t>(slot[r])];
        root.value += z[i];
        root.multiplicity += 1;
    }
    for (auto& r : out) r.value /= static_cast<double>(r.multiplicity);
    return out;
}

}  // namespace detail

// All roots with multiplicities (Aberth-Ehrlich, restarted from randomly
// perturbed starting points when it stalls).
inline std::vector<Root> poly_roots(const Poly& p_in, const RootOptions& opt = {}) {
    if (p_in.is_zero()) throw InvalidInput("poly_roots: zero polynomial");
    if (p_in.degree() > degree_cap) throw InvalidInput("poly_roots: degree exceeds cap");
    std::vector<Root> out;
    // strip exact roots at the origin
    std::vector<cplx> c = p_in.coeffs();
    int zeros = 0;
    while (zeros < static_cast<int>(c.size()) && c[static_cast<std::size_t>(zeros)] == cplx(0.0)) ++zeros;
    if (zeros > 0) {
        out.push_back({0.0, zeros});
        c.erase(c.begin(), c.begin() + zeros);
    }
    Poly p(std::move(c));
    const int n = p.degree();
    if (n <= 0) return out;
    if (n == 1) {
        out.push_back({-p.coeff(0) / p.coeff(1), 1});
        return out;
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    std::vector<cplx> z = detail::aberth_start(p, 0.4);
    double worst = 0.0;
    for (int attempt = 0; attempt <= opt.restarts; ++attempt) {
        bool ok = detail::aberth_iterate(p, z, opt.max_iter);
        worst = 0.0;
        double pn = p.norm1();
        for (auto zi : z) {
            double bound = opt.tol * std::pow(1.0 + std::abs(zi), n) * pn;
            worst = std::max(worst, std::abs(p(zi)) / bound);
        }
        if (ok || worst <= 1.0) {
            auto clustered = detail::cluster_roots(p, z);
            out.insert(out.end(), clustered.begin(), clustered.end());
            return out;
        }
        for (auto& zi : z) zi += cplx(jitter(rng), jitter(rng)) * 0.1 * (1.0 + std::abs(zi));
    }
    throw RootFindingFailure("poly_roots: no convergence", worst);
}

struct Preimage {
    ExtPoint point;
    int multiplicity = 1;
};

class RationalMap {
public:
    RationalMap() : num_(Poly({0.0, 1.0})), den_(Poly({1.0})) {}

    RationalMap(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw InvalidInput("rational map with zero denominator");
        if (num_.is_zero()) throw InvalidInput("rational map is identically zero");
        if (degree() > degree_cap) throw InvalidInput("rational map degree exceeds cap");
        if (degree() < 1) throw InvalidInput("rational map is constant");
        if (den_.degree() >= 1 && num_.degree() >= 1) {
            double scale = num_.norm1();
            for (const auto& r : poly_roots(den_)) {
                double bound = 1e-8 * scale * std::pow(std::max(1.0, std::abs(r.value)), num_.degree());
                if (std::abs(num_(r.value)) <= bound)
                    throw InvalidInput("numerator and denominator share a root");
            }
        }
    }

    static RationalMap polynomial(Poly p) { return RationalMap(std::move(p), Poly({1.0})); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    int degree() const { return std::max(num_.degree(), den_.degree()); }

    ExtPoint operator()(const ExtPoint& p) const {
        if (p.is_infinite()) {
            int dn = num_.degree(), dd = den_.degree();
            if (dn > dd) return ExtPoint::infinity();
            if (dn < dd) return ExtPoint(0.0);
            return make_point(num_.leading() / den_.leading());
        }
        return eval(p.value());
    }

    ExtPoint eval(cplx z) const {
        if (std::abs(z) > 1.0) {
            // evaluate through the reversed polynomials to avoid overflow
            cplx u = 1.0 / z;
            int dn = num_.degree(), dd = den_.degree();
            cplx a = 0.0, b = 0.0;
            for (int k = 0; k <= dn; ++k) a = a * u + num_.coeff(k);
            for (int k = 0; k <= dd; ++k) b = b * u + den_.coeff(k);
            if (b == cplx(0.0)) return ExtPoint::infinity();
            cplx r = a / b;
            int shift = dn - dd;
            if (shift > 0) r *= std::pow(z, shift);
            if (shift < 0) r *= std::pow(u, -shift);
            return make_point(r);
        }
        cplx d = den_(z);
        cplx n = num_(z);
        if (d == cplx(0.0)) return ExtPoint::infinity();
        return make_point(n / d);
    }

    // value and derivative at a finite non-pole point
    std::pair<cplx, cplx> eval_with_derivative(cplx z) const {
        auto [n, dn] = num_.eval_with_derivative(z);
        auto [d, dd] = den_.eval_with_derivative(z);
        return {n / d, (dn * d - n * dd) / (d * d)};
    }

    // num - c den, whose roots are the finite preimages of c
    Poly level_poly(cplx c) const { return num_ - den_ * c; }

private:
    Poly num_;
    Poly den_;
};

inline ExtPoint rat_eval(const RationalMap& R, const ExtPoint& z) { return R(z); }

// Preimages with multiplicity, infinity included through degree deficiency.
inline std::vector<Preimage> rat_preimages(const RationalMap& R, const ExtPoint& c, const RootOptions& opt = {}) {
    Poly P = c.is_infinite() ? R.den() : R.level_poly(c.value()).trimmed(1e-15);
    std::vector<Preimage> out;
    if (!P.is_zero() && P.degree() >= 1)
        for (const auto& r : poly_roots(P, opt)) out.push_back({ExtPoint(r.value), r.multiplicity});
    int at_inf = R.degree() - std::max(P.degree(), 0);
    if (at_inf > 0) out.push_back({ExtPoint::infinity(), at_inf});
    return out;
}

// Critical points with multiplicity (local degree minus one); they always
// total 2 deg R - 2.
inline std::vector<Preimage> critical_points(const RationalMap& R, const RootOptions& opt = {}) {
    const Poly& n = R.num();
    const Poly& d = R.den();
    Poly W = (n.derivative() * d - n * d.derivative()).trimmed(1e-13);
    std::vector<Preimage> out;
    int finite = 0;
    if (W.degree() >= 1)
        for (const auto& r : poly_roots(W, opt)) {
            out.push_back({ExtPoint(r.value), r.multiplicity});
            finite += r.multiplicity;
        }
    int at_inf = 2 * R.degree() - 2 - finite;
    if (at_inf > 0) out.push_back({ExtPoint::infinity(), at_inf});
    return out;
}

enum class Side { Inside, Boundary, Outside };

// Closed Jordan disks used as domains of univalence.
class JordanDisk {
public:
    struct Unit {};
    struct Round {
        cplx center;
        double radius;
    };
    // complement of a closed round disk, together with infinity
    struct RoundExterior {
        cplx center;
        double radius;
    };
    // interior of a simple closed polygon
    struct Polygon {
        std::vector<cplx> vertices;
    };
    // {w : 1/w outside the closed polygon}
    struct DualPolygon {
        std::vector<cplx> vertices;
    };
    using Shape = std::variant<Unit, Round, RoundExterior, Polygon, DualPolygon>;

    JordanDisk() : shape_(Unit{}) {}
    JordanDisk(Shape s) : shape_(std::move(s)) { validate(); }

    static JordanDisk unit() { return JordanDisk(); }
    static JordanDisk round(cplx c, double r) { return JordanDisk(Round{c, r}); }
    static JordanDisk exterior(cplx c, double r) { return JordanDisk(RoundExterior{c, r}); }
    static JordanDisk polygon(std::vector<cplx> v) { return JordanDisk(Polygon{std::move(v)}); }

    const Shape& shape() const { return shape_; }
    bool is_unit() const { return std::holds_alternative<Unit>(shape_); }

    bool contains_infinity() const {
        if (std::holds_alternative<RoundExterior>(shape_)) return true;
        if (auto* d = std::get_if<DualPolygon>(&shape_)) return !polygon_closed_contains(d->vertices, 0.0);
        return false;
    }

    // Signed distance-like quantity: negative inside, positive outside.
    double signed_distance(const ExtPoint& p) const {
        return std::visit(
            [&](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Unit>) {
                    return p.is_infinite() ? std::numeric_limits<double>::infinity() : std::abs(p.value()) - 1.0;
                } else if constexpr (std::is_same_v<T, Round>) {
                    return p.is_infinite() ? std::numeric_limits<double>::infinity()
                                           : std::abs(p.value() - s.center) - s.radius;
                } else if constexpr (std::is_same_v<T, RoundExterior>) {
                    return p.is_infinite() ? -std::numeric_limits<double>::infinity()
                                           : s.radius - std::abs(p.value() - s.center);
                } else if constexpr (std::is_same_v<T, Polygon>) {
                    if (p.is_infinite()) return std::numeric_limits<double>::infinity();
                    double dist = polygon_distance(s.vertices, p.value());
                    return polygon_closed_contains(s.vertices, p.value()) ? -dist : dist;
                } else {
                    ExtPoint q = reciprocal(p);
                    if (q.is_infinite()) return -std::numeric_limits<double>::infinity();
                    double dist = polygon_distance(s.vertices, q.value());
                    // rescale to the w-plane by |dw/dq| = |w|^2
                    double scale = p.is_infinite() ? 1.0 : std::norm(p.value());
                    return polygon_closed_contains(s.vertices, q.value()) ? dist * scale : -dist * scale;
                }
            },
            shape_);
    }

    Side side(const ExtPoint& p, double band) const {
        double s = signed_distance(p);
        if (std::abs(s) <= band) return Side::Boundary;
        return s < 0 ? Side::Inside : Side::Outside;
    }

    // Boundary point at parameter t in [0,1), positively oriented for the disk.
    cplx boundary_point(double t) const {
        return std::visit(
            [&](const auto& s) -> cplx {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Unit>) {
                    return std::polar(1.0, 2.0 * pi * t);
                } else if constexpr (std::is_same_v<T, Round>) {
                    return s.center + std::polar(s.radius, 2.0 * pi * t);
                } else if constexpr (std::is_same_v<T, RoundExterior>) {
                    return s.center + std::polar(s.radius, -2.0 * pi * t);
                } else if constexpr (std::is_same_v<T, Polygon>) {
                    return polygon_point(s.vertices, t);
                } else {
                    return 1.0 / polygon_point(s.vertices, 1.0 - t);
                }
            },
            shape_);
    }

    // The disk D' with 1/z mapping this disk onto the complement of closure(D').
    JordanDisk dual() const {
        return std::visit(
            [&](const auto& s) -> JordanDisk {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Unit>) {
                    return JordanDisk();
                } else if constexpr (std::is_same_v<T, Round> || std::is_same_v<T, RoundExterior>) {
                    double den = std::norm(s.center) - s.radius * s.radius;
                    if (std::abs(den) < 1e-14) throw InvalidInput("disk boundary passes through the origin");
                    cplx c = std::conj(s.center) / den;
                    double r = s.radius / std::abs(den);
                    bool origin_inside = den < 0;
                    bool image_is_round = std::is_same_v<T, Round> ? !origin_inside : origin_inside;
                    // dual is the complement of the image
                    return image_is_round ? exterior(c, r) : round(c, r);
                } else if constexpr (std::is_same_v<T, Polygon>) {
                    return JordanDisk(DualPolygon{s.vertices});
                } else {
                    return JordanDisk(Polygon{s.vertices});
                }
            },
            shape_);
    }

private:
    void validate() const {
        std::visit(
            [](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Round> || std::is_same_v<T, RoundExterior>) {
                    if (!(s.radius > 0)) throw InvalidInput("disk radius must be positive");
                } else if constexpr (std::is_same_v<T, Polygon> || std::is_same_v<T, DualPolygon>) {
                    if (s.vertices.size() < 3) throw InvalidInput("polygon needs at least three vertices");
                }
            },
            shape_);
    }

    static double segment_distance(cplx a, cplx b, cplx z) {
        cplx ab = b - a;
        double len2 = std::norm(ab);
        double t = len2 > 0 ? std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0) : 0.0;
        return std::abs(z - (a + t * ab));
    }

    static double polygon_distance(const std::vector<cplx>& v, cplx z) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, segment_distance(v[i], v[(i + 1) % v.size()], z));
        return best;
    }

    static bool polygon_closed_contains(const std::vector<cplx>& v, cplx z) {
        bool in = false;
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            if ((v[i].imag() > z.imag()) != (v[j].imag() > z.imag())) {
                double x = (v[j].real() - v[i].real()) * (z.imag() - v[i].imag()) / (v[j].imag() - v[i].imag()) +
                           v[i].real();
                if (z.real() < x) in = !in;
            }
        }
        return in || polygon_distance(v, z) == 0.0;
    }

    static cplx polygon_point(const std::vector<cplx>& v, double t) {
        double total = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) total += std::abs(v[(i + 1) % v.size()] - v[i]);
        double target = (t - std::floor(t)) * total;
        for (std::size_t i = 0; i < v.size(); ++i) {
            cplx a = v[i], b = v[(i + 1) % v.size()];
            double len = std::abs(b - a);
            if (target <= len && len > 0) return a + (b - a) * (target / len);
            target -= len;
        }
        return v.front();
    }

    Shape shape_;
};

enum class InverseStatus { Inside, Boundary, NotInDomain };

struct InverseResult {
    InverseStatus status = InverseStatus::NotInDomain;
    ExtPoint point;
};

namespace detail {

// Newton on R(w) = z from a seed; nullopt when it fails to settle.
inline std::optional<cplx> newton_preimage(const RationalMap& R, cplx z, cplx seed, int max_steps = 40) {
    const Poly& n = R.num();
    const Poly& d = R.den();
    cplx w = seed;
    for (int k = 0; k < max_steps; ++k) {
        auto [nv, ndv] = n.eval_with_derivative(w);
        auto [dv, ddv] = d.eval_with_derivative(w);
        cplx f = nv - z * dv;
        cplx fp = ndv - z * ddv;
        if (fp == cplx(0.0)) return std::nullopt;
        cplx step = f / fp;
        w -= step;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return std::nullopt;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(w))) return w;
    }
    return std::nullopt;
}

}  // namespace detail

// The unique w in the closed disk with R(w) = z, when it exists.
// Seeds: the caller's warm start, then z itself, then a global solve.
inline InverseResult univalent_inverse(const RationalMap& R, const ExtPoint& z, const JordanDisk& disk = {},
                                       std::optional<cplx> warm = std::nullopt, double band = 1e-10,
                                       const RootOptions& opt = {}) {
    if (z.is_finite()) {
        cplx seeds[2] = {warm.value_or(z.value()), z.value()};
        int nseeds = warm ? 2 : 1;
        for (int s = 0; s < nseeds; ++s) {
            auto w = detail::newton_preimage(R, z.value(), seeds[s]);
            if (!w) continue;
            Side side = disk.side(ExtPoint(*w), band);
            if (side == Side::Inside) return {InverseStatus::Inside, ExtPoint(*w)};
            if (side == Side::Boundary) return {InverseStatus::Boundary, ExtPoint(*w)};
        }
    }
    InverseResult best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& pre : rat_preimages(R, z, opt)) {
        double sd = disk.signed_distance(pre.point);
        Side side = std::abs(sd) <= band ? Side::Boundary : (sd < 0 ? Side::Inside : Side::Outside);
        if (side == Side::Inside) return {InverseStatus::Inside, pre.point};
        if (side == Side::Boundary && std::abs(sd) < best_dist) {
            best = {InverseStatus::Boundary, pre.point};
            best_dist = std::abs(sd);
        }
    }
    return best;
}

}  // namespace qdyn
