#pragma once

// File formats.
//
// Exact image format "DCIM1" (bit-exact round trip):
//   DCIM1\n N=<int>\n pixel_size=<%.17g>\n cx=<%.17g>\n cy=<%.17g>\n \n
//   then N*N float64 little-endian values, row-major by v (u fastest).
//
// Exact sinogram format "DCSG1":
//   DCSG1\n R=\n rho_max=\n N_rho=\n N_phi=\n arc_step=\n \n
//   then N_rho*N_phi float64 little-endian values, rho-major (phi fastest).
//
// Visualization export: 16-bit binary PGM (P5, maxval 65535, big-endian
// samples), min-max scaled, top image row first.
//
// Metrics reports are flat key=value text, one pair per line.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dcart/image.hpp"
#include "dcart/metrics.hpp"
#include "dcart/projector.hpp"

namespace dcart {

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

class bad_magic_error : public io_error {
public:
    explicit bad_magic_error(const std::string& what) : io_error(what) {}
};

class truncated_error : public io_error {
public:
    explicit truncated_error(const std::string& what) : io_error(what) {}
};

class header_mismatch_error : public io_error {
public:
    explicit header_mismatch_error(const std::string& what) : io_error(what) {}
};

namespace io_detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_f64_le(std::ostream& os, const std::vector<double>& v) {
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double d : v) {
            auto u = std::bit_cast<std::uint64_t>(d);
            char b[8];
            for (int i = 0; i < 8; ++i)
                b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
            os.write(b, 8);
        }
    }
}

inline void read_f64_le(std::istream& is, std::vector<double>& v, const std::string& what) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
        if (static_cast<std::size_t>(is.gcount()) != v.size() * 8)
            throw truncated_error(what + ": payload shorter than header dimensions");
    } else {
        for (double& d : v) {
            char b[8];
            is.read(b, 8);
            if (is.gcount() != 8)
                throw truncated_error(what + ": payload shorter than header dimensions");
            std::uint64_t u = 0;
            for (int i = 0; i < 8; ++i)
                u |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
            d = std::bit_cast<double>(u);
        }
    }
    // a well-formed file ends exactly at the payload
    char extra;
    if (is.read(&extra, 1), is.gcount() != 0)
        throw header_mismatch_error(what + ": payload longer than header dimensions");
}

inline std::string expect_line(std::istream& is, const std::string& what) {
    std::string line;
    if (!std::getline(is, line))
        throw truncated_error(what + ": unexpected end of header");
    return line;
}

inline std::string header_value(std::istream& is, const std::string& key, const std::string& what) {
    const std::string line = expect_line(is, what);
    if (line.rfind(key + "=", 0) != 0)
        throw header_mismatch_error(what + ": expected header line '" + key + "=', got '" + line +
                                    "'");
    return line.substr(key.size() + 1);
}

}  // namespace io_detail

inline void write_image(const Image& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw io_error("write_image: cannot open " + path);
    os << "DCIM1\n";
    os << "N=" << img.grid.n << "\n";
    os << "pixel_size=" << io_detail::fmt_double(img.grid.pixel_size) << "\n";
    os << "cx=" << io_detail::fmt_double(img.grid.center.x) << "\n";
    os << "cy=" << io_detail::fmt_double(img.grid.center.y) << "\n";
    os << "\n";
    io_detail::write_f64_le(os, img.values);
    if (!os)
        throw io_error("write_image: write failed for " + path);
}

inline Image read_image(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw io_error("read_image: cannot open " + path);
    if (io_detail::expect_line(is, "read_image") != "DCIM1")
        throw bad_magic_error("read_image: bad magic (expected DCIM1) in " + path);
    ImageGrid grid;
    grid.n = std::stoi(io_detail::header_value(is, "N", "read_image"));
    grid.pixel_size = std::stod(io_detail::header_value(is, "pixel_size", "read_image"));
    grid.center.x = std::stod(io_detail::header_value(is, "cx", "read_image"));
    grid.center.y = std::stod(io_detail::header_value(is, "cy", "read_image"));
    if (!io_detail::expect_line(is, "read_image").empty())
        throw header_mismatch_error("read_image: missing blank separator line in " + path);
    grid.validate();
    Image img(grid);
    io_detail::read_f64_le(is, img.values, "read_image");
    return img;
}

inline void write_sinogram(const Sinogram& sino, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw io_error("write_sinogram: cannot open " + path);
    os << "DCSG1\n";
    os << "R=" << io_detail::fmt_double(sino.geometry.R) << "\n";
    os << "rho_max=" << io_detail::fmt_double(sino.geometry.rho_max) << "\n";
    os << "N_rho=" << sino.geometry.n_rho << "\n";
    os << "N_phi=" << sino.geometry.n_phi << "\n";
    os << "arc_step=" << io_detail::fmt_double(sino.geometry.arc_step) << "\n";
    os << "\n";
    io_detail::write_f64_le(os, sino.values);
    if (!os)
        throw io_error("write_sinogram: write failed for " + path);
}

inline Sinogram read_sinogram(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw io_error("read_sinogram: cannot open " + path);
    if (io_detail::expect_line(is, "read_sinogram") != "DCSG1")
        throw bad_magic_error("read_sinogram: bad magic (expected DCSG1) in " + path);
    SystemGeometry g;
    g.R = std::stod(io_detail::header_value(is, "R", "read_sinogram"));
    g.rho_max = std::stod(io_detail::header_value(is, "rho_max", "read_sinogram"));
    g.n_rho = std::stoi(io_detail::header_value(is, "N_rho", "read_sinogram"));
    g.n_phi = std::stoi(io_detail::header_value(is, "N_phi", "read_sinogram"));
    g.arc_step = std::stod(io_detail::header_value(is, "arc_step", "read_sinogram"));
    if (!io_detail::expect_line(is, "read_sinogram").empty())
        throw header_mismatch_error("read_sinogram: missing blank separator line in " + path);
    g.validate();
    Sinogram sino(g);
    io_detail::read_f64_le(is, sino.values, "read_sinogram");
    return sino;
}

// Lossy visualization export: min-max scaled 16-bit grayscale PGM.
inline void write_pgm16(const Image& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw io_error("write_pgm16: cannot open " + path);
    double lo = img.values.empty() ? 0.0 : img.values[0];
    double hi = lo;
    for (double v : img.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    os << "P5\n" << img.grid.n << " " << img.grid.n << "\n65535\n";
    // top row first: v = N-1 down to 0 (world y points up)
    for (int v = img.grid.n - 1; v >= 0; --v) {
        for (int u = 0; u < img.grid.n; ++u) {
            const double t = (img.at(u, v) - lo) / span;
            const auto s = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            const char b[2] = {static_cast<char>(s >> 8), static_cast<char>(s & 0xff)};
            os.write(b, 2);
        }
    }
    if (!os)
        throw io_error("write_pgm16: write failed for " + path);
}

inline std::string metrics_to_text(const MetricsReport& rep) {
    std::ostringstream os;
    os << "nmse=" << io_detail::fmt_double(rep.nmse) << "\n";
    os << "nmae=" << io_detail::fmt_double(rep.nmae) << "\n";
    os << "grid_n=" << rep.grid_n << "\n";
    os << "R=" << io_detail::fmt_double(rep.geometry.R) << "\n";
    os << "rho_max=" << io_detail::fmt_double(rep.geometry.rho_max) << "\n";
    os << "n_rho=" << rep.geometry.n_rho << "\n";
    os << "n_phi=" << rep.geometry.n_phi << "\n";
    os << "arc_step=" << io_detail::fmt_double(rep.geometry.arc_step) << "\n";
    os << "epsilon=" << io_detail::fmt_double(rep.geometry.epsilon) << "\n";
    os << "q=" << io_detail::fmt_double(rep.q) << "\n";
    if (rep.snr_db)
        os << "snr_db=" << io_detail::fmt_double(*rep.snr_db) << "\n";
    if (rep.seed)
        os << "seed=" << *rep.seed << "\n";
    return os.str();
}

inline void write_metrics(const MetricsReport& rep, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw io_error("write_metrics: cannot open " + path);
    os << metrics_to_text(rep);
    if (!os)
        throw io_error("write_metrics: write failed for " + path);
}

}  // namespace dcart
