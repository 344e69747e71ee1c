#pragma once

// Square pixel grid positioned in the world frame (source at the origin).
// Pixel (u, v) maps to world point center + pixel_size*(u-(N-1)/2, v-(N-1)/2);
// u runs along +x, v along +y.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dcart/geometry.hpp"

namespace dcart {

struct ImageGrid {
    int n{0};
    double pixel_size{1.0};
    Point2 center{0.0, 0.0};

    void validate() const {
        if (n < 2)
            throw std::invalid_argument("ImageGrid: N must be >= 2");
        if (!(pixel_size > 0.0))
            throw std::invalid_argument("ImageGrid: pixel_size must be > 0");
    }

    Point2 world(double u, double v) const {
        const double off = (n - 1) / 2.0;
        return {center.x + pixel_size * (u - off), center.y + pixel_size * (v - off)};
    }

    Point2 pixel(Point2 w) const {
        const double off = (n - 1) / 2.0;
        return {(w.x - center.x) / pixel_size + off, (w.y - center.y) / pixel_size + off};
    }
};

inline bool operator==(const ImageGrid& a, const ImageGrid& b) {
    return a.n == b.n && a.pixel_size == b.pixel_size && a.center.x == b.center.x &&
           a.center.y == b.center.y;
}

// Default object placement: the whole square lies outside the detector disc
// of radius R with an 8-pixel margin, centered on the +x axis.
inline Point2 default_grid_center(double R, int n, double pixel_size = 1.0) {
    return {R + n * pixel_size * std::numbers::sqrt2 / 2.0 + 8.0, 0.0};
}

struct Image {
    ImageGrid grid;
    std::vector<double> values;  // row-major by v: values[v*n + u]

    Image() = default;
    explicit Image(const ImageGrid& g) : grid(g), values(static_cast<std::size_t>(g.n) * g.n, 0.0) {
        g.validate();
    }

    double& at(int u, int v) { return values[static_cast<std::size_t>(v) * grid.n + u]; }
    double at(int u, int v) const { return values[static_cast<std::size_t>(v) * grid.n + u]; }
};

}  // namespace dcart
