#pragma once

// Escape-time pictures of dynamical and parameter planes. Rows are shared
// out to a fixed pool of workers and written into disjoint slots, so the
// output does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "family.hpp"
#include "schwarz.hpp"

#ifdef QDYN_HAVE_PNG
#include <png.h>
#endif

namespace qdyn {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Palette {
    double hue_step = 0.07;           // hue advance per escape rank
    Rgb non_escaping{0, 0, 0};
    Rgb undecided{255, 0, 255};
    Rgb invalid{128, 128, 128};

    Rgb escaping(int rank) const {
        double h = std::fmod(0.58 + hue_step * rank, 1.0) * 6.0;
        double v = 0.55 + 0.45 * std::exp(-0.02 * rank);
        double f = h - std::floor(h);
        auto byte = [](double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
        double p = v * 0.25, q = v * (1.0 - 0.75 * f), t = v * (0.25 + 0.75 * f);
        switch (static_cast<int>(h) % 6) {
            case 0: return {byte(v), byte(t), byte(p)};
            case 1: return {byte(q), byte(v), byte(p)};
            case 2: return {byte(p), byte(v), byte(t)};
            case 3: return {byte(p), byte(q), byte(v)};
            case 4: return {byte(t), byte(p), byte(v)};
            default: return {byte(v), byte(p), byte(q)};
        }
    }
};

struct RenderConfig {
    cplx center = 0.0;
    double width = 4.0;               // of the window, in the plane
    int pixels_x = 512;
    int pixels_y = 512;
    int max_iter = 200;
    int workers = 1;
    Palette palette;

    static constexpr int max_pixels = 16384;

    void validate() const {
        if (pixels_x < 1 || pixels_y < 1 || pixels_x > max_pixels || pixels_y > max_pixels)
            throw InvalidInput("resolution must be between 1 and 16384 in each direction");
        if (!(width > 0.0) || !std::isfinite(width)) throw InvalidInput("window width must be positive");
        if (max_iter < 0) throw InvalidInput("iteration budget must be nonnegative");
        if (workers < 1) throw InvalidInput("worker count must be positive");
    }

    // center of pixel (x, y); row 0 is the top
    cplx pixel(int x, int y) const {
        double step = width / pixels_x;
        return center + cplx((x + 0.5 - 0.5 * pixels_x) * step, (0.5 * pixels_y - y - 0.5) * step);
    }
};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}

    Rgb at(int x, int y) const {
        std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
        rgb[i] = c.r;
        rgb[i + 1] = c.g;
        rgb[i + 2] = c.b;
    }
};

enum class PixelKind { Escaping, NonEscaping, Undecided, Invalid };

struct RenderStats {
    std::map<int, std::int64_t> escaping_by_rank;
    std::int64_t non_escaping = 0;
    std::int64_t undecided = 0;
    std::int64_t invalid = 0;

    std::int64_t total() const {
        std::int64_t n = non_escaping + undecided + invalid;
        for (const auto& [r, c] : escaping_by_rank) n += c;
        return n;
    }
    int max_rank() const { return escaping_by_rank.empty() ? -1 : escaping_by_rank.rbegin()->first; }
    double undecided_fraction() const { return total() ? static_cast<double>(undecided) / static_cast<double>(total()) : 0.0; }

    void add(PixelKind k, int rank) {
        switch (k) {
            case PixelKind::Escaping: ++escaping_by_rank[rank]; break;
            case PixelKind::NonEscaping: ++non_escaping; break;
            case PixelKind::Undecided: ++undecided; break;
            case PixelKind::Invalid: ++invalid; break;
        }
    }
    void merge(const RenderStats& o) {
        for (const auto& [r, c] : o.escaping_by_rank) escaping_by_rank[r] += c;
        non_escaping += o.non_escaping;
        undecided += o.undecided;
        invalid += o.invalid;
    }
};

struct RenderResult {
    Image image;
    RenderStats stats;
};

struct PixelValue {
    PixelKind kind;
    int rank = 0;
};

// Runs classify(cplx) -> PixelValue on every pixel.
template <class Classify>
RenderResult render_pixels(const RenderConfig& cfg, Classify classify) {
    cfg.validate();
    RenderResult out{Image(cfg.pixels_x, cfg.pixels_y), {}};
    std::vector<RenderStats> row_stats(static_cast<std::size_t>(cfg.pixels_y));
    std::atomic<int> next_row{0};
    auto work = [&] {
        for (int y; (y = next_row.fetch_add(1)) < cfg.pixels_y;) {
            RenderStats& st = row_stats[static_cast<std::size_t>(y)];
            for (int x = 0; x < cfg.pixels_x; ++x) {
                PixelValue v = classify(cfg.pixel(x, y));
                st.add(v.kind, v.rank);
                Rgb c = v.kind == PixelKind::Escaping      ? cfg.palette.escaping(v.rank)
                        : v.kind == PixelKind::NonEscaping ? cfg.palette.non_escaping
                        : v.kind == PixelKind::Undecided   ? cfg.palette.undecided
                                                           : cfg.palette.invalid;
                out.image.set(x, y, c);
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < cfg.workers; ++w) pool.emplace_back(work);
        work();
    }
    for (const auto& s : row_stats) out.stats.merge(s);
    return out;
}

inline RenderResult render_dynamical(const ReflectionSystem& S, const RenderConfig& cfg) {
    return render_pixels(cfg, [&](cplx z) {
        try {
            PointClass pc = classify_point(S, ExtPoint(z), cfg.max_iter);
            switch (pc.kind) {
                case PointClass::Kind::Escaping: return PixelValue{PixelKind::Escaping, pc.rank};
                case PointClass::Kind::NonEscaping: return PixelValue{PixelKind::NonEscaping, 0};
                default: return PixelValue{PixelKind::Undecided, 0};
            }
        } catch (const Error&) {
            return PixelValue{PixelKind::Undecided, 0};
        }
    });
}

// Connected parameters are drawn as non-escaping, disconnected ones by the
// least escape rank among the critical points.
inline RenderResult render_parameter(const ParameterFamily& family, const RenderConfig& cfg, const Tolerances& tol = {}) {
    family.validate();
    return render_pixels(cfg, [&](cplx a) {
        try {
            SchwarzReflection S = family.system_at(a, tol);
            ConnectednessReport r = connectedness_test(S, cfg.max_iter, true);
            if (r.verdict == ConnectednessReport::Verdict::Connected) return PixelValue{PixelKind::NonEscaping, 0};
            if (r.verdict == ConnectednessReport::Verdict::Undecided) return PixelValue{PixelKind::Undecided, 0};
            int rank = cfg.max_iter;
            for (const auto& c : r.classes)
                if (c.kind == PointClass::Kind::Escaping) rank = std::min(rank, c.rank);
            return PixelValue{PixelKind::Escaping, rank};
        } catch (const InvalidInput&) {
            return PixelValue{PixelKind::Invalid, 0};
        } catch (const Error&) {
            return PixelValue{PixelKind::Undecided, 0};
        }
    });
}

inline std::string ppm_bytes(const Image& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(img.rgb.begin(), img.rgb.end());
    return out;
}

inline void write_ppm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path + " for writing");
    const std::string bytes = ppm_bytes(img);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline constexpr bool png_available() {
#ifdef QDYN_HAVE_PNG
    return true;
#else
    return false;
#endif
}

inline void write_png([[maybe_unused]] const Image& img, [[maybe_unused]] const std::string& path) {
#ifdef QDYN_HAVE_PNG
    png_image p{};
    p.version = PNG_IMAGE_VERSION;
    p.width = static_cast<png_uint_32>(img.width);
    p.height = static_cast<png_uint_32>(img.height);
    p.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&p, path.c_str(), 0, img.rgb.data(), 0, nullptr))
        throw InvalidInput("cannot write " + path + ": " + p.message);
#else
    throw InvalidInput("built without PNG support");
#endif
}

inline void write_stats(std::ostream& os, const RenderStats& s) {
    os << "qdyn-render-stats 1\n";
    os << "pixels " << s.total() << "\n";
    os << "non_escaping " << s.non_escaping << "\n";
    os << "undecided " << s.undecided << "\n";
    os << "invalid " << s.invalid << "\n";
    os << "max_rank " << s.max_rank() << "\n";
    os << "undecided_fraction " << s.undecided_fraction() << "\n";
    for (const auto& [r, c] : s.escaping_by_rank) os << "rank " << r << " " << c << "\n";
}

}  // namespace qdyn
