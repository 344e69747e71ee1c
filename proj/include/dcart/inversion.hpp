#pragma once

// Production reconstruction path: rho-derivative of G, FFT-realized Hilbert
// filter along rho, and the weighted backprojection
//   f(x,y) = (1/2pi) \int (1/d) H{dG/drho * rho}(r^2/d) dphi,
// with d = x cos(phi) + y sin(phi) and r^2 = x^2 + y^2.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dcart/dft.hpp"
#include "dcart/geometry.hpp"
#include "dcart/harmonics.hpp"
#include "dcart/image.hpp"
#include "dcart/projector.hpp"

namespace dcart {

struct FilteredData {
    SystemGeometry geometry;
    std::vector<double> values;  // rho-major, same layout as Sinogram

    FilteredData() = default;
    explicit FilteredData(const SystemGeometry& g) : geometry(g), values(g.cells(), 0.0) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * geometry.n_phi + j]; }
    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * geometry.n_phi + j];
    }
};

// d/drho by central differences (one-sided 2-point at the first and last
// row), then multiplied by rho_i.
inline std::vector<double> radial_derivative(std::span<const double> g,
                                             const SystemGeometry& geom) {
    if (geom.n_rho < 3)
        throw std::invalid_argument("radial_derivative: N_rho must be >= 3");
    if (g.size() != geom.cells())
        throw std::invalid_argument("radial_derivative: matrix size mismatch");
    const int n_rho = geom.n_rho, n_phi = geom.n_phi;
    const double drho = geom.delta_rho();
    std::vector<double> out(g.size());
    const auto row = [&](int i) { return g.data() + static_cast<std::size_t>(i) * n_phi; };
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_rho; ++i) {
        double* o = out.data() + static_cast<std::size_t>(i) * n_phi;
        const double rho = geom.rho(i);
        if (i == 0) {
            const double* a = row(0);
            const double* b = row(1);
            for (int j = 0; j < n_phi; ++j)
                o[j] = rho * (b[j] - a[j]) / drho;
        } else if (i == n_rho - 1) {
            const double* a = row(n_rho - 2);
            const double* b = row(n_rho - 1);
            for (int j = 0; j < n_phi; ++j)
                o[j] = rho * (b[j] - a[j]) / drho;
        } else {
            const double* a = row(i - 1);
            const double* b = row(i + 1);
            for (int j = 0; j < n_phi; ++j)
                o[j] = rho * (b[j] - a[j]) / (2.0 * drho);
        }
    }
    return out;
}

namespace hilbert_detail {

// Multiply the spectrum by -i*sign(nu); sign(0) = 0 and the Nyquist bin
// (present only for even lengths) is zeroed, where the odd symbol has no
// consistent value.
inline void apply_symbol(cplx* f, std::size_t p) {
    f[0] = {0.0, 0.0};
    const std::size_t half = p / 2;
    for (std::size_t k = 1; k < (p + 1) / 2; ++k)
        f[k] *= cplx(0.0, -1.0);
    if (p % 2 == 0)
        f[half] = {0.0, 0.0};
    for (std::size_t k = p / 2 + 1; k < p; ++k)
        f[k] *= cplx(0.0, +1.0);
}

}  // namespace hilbert_detail

// Discrete Hilbert transform with zero padding to the next power of two
// >= 2L (linear, non-circular convolution: G(rho) is not periodic in rho).
inline std::vector<double> hilbert(std::span<const double> signal) {
    const std::size_t l = signal.size();
    if (l < 2)
        throw std::invalid_argument("hilbert: signal must have length >= 2");
    const std::size_t p = next_pow2(2 * l);
    std::vector<cplx> buf(p, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < l; ++i)
        buf[i] = signal[i];
    fft_pow2(buf.data(), p, false);
    hilbert_detail::apply_symbol(buf.data(), p);
    fft_pow2(buf.data(), p, true);
    std::vector<double> out(l);
    double sig2 = 0.0, imag2 = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        out[i] = buf[i].real() / static_cast<double>(p);
        imag2 += buf[i].imag() * buf[i].imag();
        sig2 += signal[i] * signal[i];
    }
    if (imag2 / (p * static_cast<double>(p)) > 1e-20 * sig2 && sig2 > 0.0)
        throw std::runtime_error("hilbert: imaginary residue above 1e-10 of signal norm");
    return out;
}

// Periodic variant without padding, for closed-form DFT unit tests only.
inline std::vector<double> hilbert_periodic(std::span<const double> signal) {
    const std::size_t l = signal.size();
    if (l < 2)
        throw std::invalid_argument("hilbert_periodic: signal must have length >= 2");
    std::vector<cplx> in(l), sp(l);
    for (std::size_t i = 0; i < l; ++i)
        in[i] = signal[i];
    if (is_pow2(l)) {
        sp = in;
        fft_pow2(sp.data(), l, false);
        hilbert_detail::apply_symbol(sp.data(), l);
        fft_pow2(sp.data(), l, true);
    } else {
        const DftPlan plan(l);
        plan.forward(in.data(), sp.data());
        hilbert_detail::apply_symbol(sp.data(), l);
        plan.inverse(sp.data(), in.data());
        sp = in;
    }
    std::vector<double> out(l);
    for (std::size_t i = 0; i < l; ++i)
        out[i] = sp[i].real() / static_cast<double>(l);
    return out;
}

// Hilbert filter of (dG/drho * rho) applied down every phi column.
inline FilteredData hilbert_filter_columns(std::span<const double> d, const SystemGeometry& geom) {
    if (d.size() != geom.cells())
        throw std::invalid_argument("hilbert_filter_columns: matrix size mismatch");
    FilteredData out(geom);
    const int n_rho = geom.n_rho, n_phi = geom.n_phi;
    const std::size_t p = next_pow2(2 * static_cast<std::size_t>(n_rho));
#pragma omp parallel
    {
        std::vector<cplx> buf(p);
#pragma omp for schedule(static)
        for (int j = 0; j < n_phi; ++j) {
            std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
            for (int i = 0; i < n_rho; ++i)
                buf[i] = d[static_cast<std::size_t>(i) * n_phi + j];
            fft_pow2(buf.data(), p, false);
            hilbert_detail::apply_symbol(buf.data(), p);
            fft_pow2(buf.data(), p, true);
            for (int i = 0; i < n_rho; ++i)
                out.at(i, j) = buf[i].real() / static_cast<double>(p);
        }
    }
    return out;
}

// Weighted backprojection of the filtered data.  For each pixel and angle:
// d = x cos(phi_j) + y sin(phi_j); contributions with d <= 0 or with
// rho* = (x^2+y^2)/d outside (rho_1, rho_N] are defined as 0, so the 1/d
// weight is only evaluated where d >= (x^2+y^2)/rho_max > 0.
inline Image backproject(const FilteredData& filt, const ImageGrid& grid) {
    grid.validate();
    const SystemGeometry& geom = filt.geometry;
    const int n_rho = geom.n_rho, n_phi = geom.n_phi;
    const double drho = geom.delta_rho();
    Image img(grid);
    std::vector<double> cs(n_phi), sn(n_phi);
    for (int j = 0; j < n_phi; ++j) {
        cs[j] = std::cos(geom.phi(j));
        sn[j] = std::sin(geom.phi(j));
    }
    const double scale = geom.delta_phi() / (2.0 * pi);
#pragma omp parallel for schedule(static)
    for (int v = 0; v < grid.n; ++v) {
        for (int u = 0; u < grid.n; ++u) {
            const Point2 w = grid.world(u, v);
            const double r2 = w.x * w.x + w.y * w.y;
            double acc = 0.0;
            for (int j = 0; j < n_phi; ++j) {
                const double d = w.x * cs[j] + w.y * sn[j];
                if (d <= 0.0)
                    continue;
                const double rho_star = r2 / d;
                const double s = (rho_star - geom.R) / drho - 1.0;
                if (s < 0.0 || s > n_rho - 1)
                    continue;
                int i0 = static_cast<int>(s);
                if (i0 > n_rho - 2)
                    i0 = n_rho - 2;
                const double t = s - i0;
                const double h = filt.at(i0, j) + t * (filt.at(i0 + 1, j) - filt.at(i0, j));
                acc += h / d;
            }
            img.at(u, v) = scale * acc;
        }
    }
    return img;
}

// Full pipeline: decompose -> regularized G -> recompose -> d/drho * rho
// -> Hilbert per column -> backprojection.
inline Image reconstruct(const Sinogram& sino, const ImageGrid& grid, double eps) {
    sino.geometry.validate();
    const HarmonicSpectrum spec = decompose_phi(sino);
    const HarmonicSpectrum g_spec = regularized_G(spec, eps);
    const std::vector<double> g = recompose_phi(g_spec);
    const std::vector<double> d = radial_derivative(g, sino.geometry);
    const FilteredData h = hilbert_filter_columns(d, sino.geometry);
    return backproject(h, grid);
}

inline Image reconstruct(const Sinogram& sino, const ImageGrid& grid) {
    return reconstruct(sino, grid, sino.geometry.epsilon);
}

}  // namespace dcart
