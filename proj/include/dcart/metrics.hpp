#pragma once

// Quantitative evaluation (NMSE, NMAE over all N^2 pixels) and the additive
// Gaussian noise protocol.  Noise is seeded and single-streamed: mt19937_64
// driving a Box-Muller transform, cell order row-major, so a (sinogram,
// snr_db, seed) triple always yields the same output.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>

#include "dcart/image.hpp"
#include "dcart/projector.hpp"

namespace dcart {

inline double nmse(const Image& f, const Image& f0) {
    if (!(f.grid.n == f0.grid.n))
        throw std::invalid_argument("nmse: image dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double d = f.values[i] - f0.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(f.values.size());
}

inline double nmae(const Image& f, const Image& f0) {
    if (!(f.grid.n == f0.grid.n))
        throw std::invalid_argument("nmae: image dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        acc += std::abs(f.values[i] - f0.values[i]);
    return acc / static_cast<double>(f.values.size());
}

// Mean of squared entries: the global signal power used for SNR.
inline double signal_power(const Sinogram& s) {
    double acc = 0.0;
    for (double v : s.values)
        acc += v * v;
    return s.values.empty() ? 0.0 : acc / static_cast<double>(s.values.size());
}

// i.i.d. zero-mean Gaussian with sigma^2 = P / 10^(snr_db/10).
inline Sinogram add_noise(const Sinogram& sino, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("add_noise: snr_db must be finite");
    const double sigma = std::sqrt(signal_power(sino) / std::pow(10.0, snr_db / 10.0));
    Sinogram out = sino;
    std::mt19937_64 rng(seed);
    // Box-Muller on uniforms in (0,1]; pairs consumed in storage order.
    const auto uniform = [&rng]() {
        // (0,1]: avoids log(0)
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    };
    double spare = 0.0;
    bool has_spare = false;
    for (double& v : out.values) {
        double z;
        if (has_spare) {
            z = spare;
            has_spare = false;
        } else {
            const double u1 = uniform();
            const double u2 = uniform();
            const double m = std::sqrt(-2.0 * std::log(u1));
            z = m * std::cos(2.0 * pi * u2);
            spare = m * std::sin(2.0 * pi * u2);
            has_spare = true;
        }
        v += sigma * z;
    }
    return out;
}

struct MetricsReport {
    double nmse{0.0};
    double nmae{0.0};
    SystemGeometry geometry;
    int grid_n{0};
    double q{0.0};  // N_rho*N_phi / N^2
    std::optional<double> snr_db;
    std::optional<std::uint64_t> seed;
};

inline MetricsReport make_report(const Image& recon, const Image& truth,
                                 const SystemGeometry& geom,
                                 std::optional<double> snr_db = std::nullopt,
                                 std::optional<std::uint64_t> seed = std::nullopt) {
    MetricsReport rep;
    rep.nmse = nmse(recon, truth);
    rep.nmae = nmae(recon, truth);
    rep.geometry = geom;
    rep.grid_n = recon.grid.n;
    rep.q = static_cast<double>(geom.n_rho) * geom.n_phi / (static_cast<double>(recon.grid.n) * recon.grid.n);
    rep.snr_db = snr_db;
    rep.seed = seed;
    return rep;
}

}  // namespace dcart
