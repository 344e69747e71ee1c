#pragma once

// Test objects rendered into a world-positioned pixel grid, plus validation
// of the support hypothesis (f = 0 inside the detector disc of radius R).
// All phantoms are drawn in unit coordinates [-1,1]^2 spanning the grid and
// sampled at pixel centers; generation is deterministic.

#include <array>
#include <cmath>
#include <vector>

#include "dcart/image.hpp"

namespace dcart {

namespace phantom_detail {

struct Ellipse {
    double x0, y0, a, b, angle_deg, value;
};

// Modified (Toft) Shepp-Logan: intensities chosen so the rendered values
// lie in [0, 1].
inline constexpr std::array<Ellipse, 10> shepp_logan_ellipses{{
    {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
    {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
    {0.22, 0.0, 0.11, 0.31, -18.0, -0.2},
    {-0.22, 0.0, 0.16, 0.41, 18.0, -0.2},
    {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},
    {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
    {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
    {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
    {0.0, -0.605, 0.023, 0.023, 0.0, 0.1},
    {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
}};

// Derenzo layout (versioned constants; metrics depend on them).
// Six 60-degree sectors, one disc diameter per sector.  Within a sector,
// rows of discs on a triangular lattice with center spacing 2*d start at
// radius 0.22 and grow outward; a row is kept only if it fits inside
// radius 0.88 and inside a 28-degree half-wedge about the sector bisector.
// Resulting disc counts per sector: 6, 6, 10, 15, 21, 36 (94 total).
inline constexpr std::array<double, 6> derenzo_diameters{0.155, 0.125, 0.100,
                                                         0.080, 0.064, 0.050};
inline constexpr double derenzo_r_start = 0.22;
inline constexpr double derenzo_r_out = 0.88;
inline constexpr double derenzo_half_wedge_deg = 28.0;
inline constexpr int derenzo_disc_count = 94;

struct Disc {
    double x, y, r;
};

inline std::vector<Disc> derenzo_discs() {
    std::vector<Disc> out;
    const double wedge_tan = std::tan(derenzo_half_wedge_deg * pi / 180.0);
    for (std::size_t l = 0; l < derenzo_diameters.size(); ++l) {
        const double d = derenzo_diameters[l];
        const double th = (30.0 + 60.0 * static_cast<double>(l)) * pi / 180.0;
        const double c = std::cos(th), s = std::sin(th);
        const double spacing = 2.0 * d;
        for (int m = 0;; ++m) {
            const double rm = derenzo_r_start + m * spacing * std::numbers::sqrt3 / 2.0;
            if (rm + d / 2.0 > derenzo_r_out)
                break;
            if ((m / 2.0) * spacing + d / 2.0 > rm * wedge_tan)
                break;
            for (int i = 0; i <= m; ++i) {
                const double lat = (i - m / 2.0) * spacing;
                out.push_back({rm * c - lat * s, rm * s + lat * c, d / 2.0});
            }
        }
    }
    return out;
}

// Bars layout (versioned constants): four groups of three vertical bars,
// bar width = gap within a group, graded widths left to right, all bars
// spanning y in [-0.7, 0.7].  The pattern is symmetric under y -> -y.
inline constexpr std::array<double, 4> bar_widths{0.115, 0.085, 0.060, 0.042};
inline constexpr double bar_group_gap = 0.06;
inline constexpr double bar_half_height = 0.70;
inline constexpr double bar_x_start = -0.845;
inline constexpr int bars_per_group = 3;

}  // namespace phantom_detail

// Render pixel (u,v) centers into phantom unit coordinates.
inline Image shepp_logan(const ImageGrid& grid) {
    grid.validate();
    Image img(grid);
    const double half = grid.n * grid.pixel_size / 2.0;
    struct Rot {
        double c, s;
    };
    std::array<Rot, 10> rots;
    for (std::size_t e = 0; e < rots.size(); ++e) {
        const double th = phantom_detail::shepp_logan_ellipses[e].angle_deg * pi / 180.0;
        rots[e] = {std::cos(th), std::sin(th)};
    }
#pragma omp parallel for schedule(static)
    for (int v = 0; v < grid.n; ++v) {
        for (int u = 0; u < grid.n; ++u) {
            const Point2 w = grid.world(u, v);
            const double px = (w.x - grid.center.x) / half;
            const double py = (w.y - grid.center.y) / half;
            double val = 0.0;
            for (std::size_t e = 0; e < rots.size(); ++e) {
                const auto& el = phantom_detail::shepp_logan_ellipses[e];
                const double dx = px - el.x0, dy = py - el.y0;
                const double xr = dx * rots[e].c + dy * rots[e].s;
                const double yr = -dx * rots[e].s + dy * rots[e].c;
                if ((xr / el.a) * (xr / el.a) + (yr / el.b) * (yr / el.b) <= 1.0)
                    val += el.value;
            }
            img.at(u, v) = val > 0.0 ? val : 0.0;
        }
    }
    return img;
}

inline Image derenzo(const ImageGrid& grid) {
    grid.validate();
    Image img(grid);
    const double half = grid.n * grid.pixel_size / 2.0;
    const auto discs = phantom_detail::derenzo_discs();
#pragma omp parallel for schedule(static)
    for (int v = 0; v < grid.n; ++v) {
        for (int u = 0; u < grid.n; ++u) {
            const Point2 w = grid.world(u, v);
            const double px = (w.x - grid.center.x) / half;
            const double py = (w.y - grid.center.y) / half;
            for (const auto& d : discs) {
                const double dx = px - d.x, dy = py - d.y;
                if (dx * dx + dy * dy <= d.r * d.r) {
                    img.at(u, v) = 1.0;
                    break;
                }
            }
        }
    }
    return img;
}

inline Image bars(const ImageGrid& grid) {
    grid.validate();
    Image img(grid);
    const double half = grid.n * grid.pixel_size / 2.0;
#pragma omp parallel for schedule(static)
    for (int v = 0; v < grid.n; ++v) {
        for (int u = 0; u < grid.n; ++u) {
            const Point2 w = grid.world(u, v);
            const double px = (w.x - grid.center.x) / half;
            const double py = (w.y - grid.center.y) / half;
            if (std::abs(py) > phantom_detail::bar_half_height)
                continue;
            double x = phantom_detail::bar_x_start;
            for (double wdt : phantom_detail::bar_widths) {
                for (int b = 0; b < phantom_detail::bars_per_group; ++b) {
                    const double x0 = x + b * 2.0 * wdt;
                    if (px >= x0 && px < x0 + wdt) {
                        img.at(u, v) = 1.0;
                        break;
                    }
                }
                x += (2 * phantom_detail::bars_per_group - 1) * wdt + phantom_detail::bar_group_gap;
            }
        }
    }
    return img;
}

struct SupportReport {
    bool ok{true};
    double offending_mass{0.0};
};

// ok iff every pixel whose center lies strictly inside the disc of radius R
// has value 0; offending_mass accumulates the violating values.
inline SupportReport validate_support(const Image& img, double R) {
    SupportReport rep;
    for (int v = 0; v < img.grid.n; ++v) {
        for (int u = 0; u < img.grid.n; ++u) {
            const Point2 w = img.grid.world(u, v);
            if (w.x * w.x + w.y * w.y < R * R && img.at(u, v) != 0.0) {
                rep.ok = false;
                rep.offending_mass += img.at(u, v);
            }
        }
    }
    return rep;
}

}  // namespace dcart
