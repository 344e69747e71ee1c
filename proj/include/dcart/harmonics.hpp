#pragma once

// Circular-harmonic machinery: the phi-DFT of sinogram rows, the
// regularized G_n weighting, recomposition, range-consistency residuals,
// and the circular-harmonic inversion used as the reconstruction oracle.

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include "dcart/dft.hpp"
#include "dcart/geometry.hpp"
#include "dcart/projector.hpp"

namespace dcart {

class singular_weight_error : public std::runtime_error {
public:
    explicit singular_weight_error(const std::string& what) : std::runtime_error(what) {}
};

class symmetry_error : public std::runtime_error {
public:
    explicit symmetry_error(const std::string& what) : std::runtime_error(what) {}
};

// Complex coefficients indexed by (harmonic n, rho row i).  Row i is stored
// contiguously in DFT bin order k = 0..N_phi-1; bins map to signed n with
// n = k for k <= ceil(N_phi/2)-1 and n = k - N_phi otherwise, i.e.
// n in {-floor(N_phi/2), ..., ceil(N_phi/2)-1}.
struct HarmonicSpectrum {
    SystemGeometry geometry;
    std::vector<cplx> coeffs;  // [i*n_phi + k]

    HarmonicSpectrum() = default;
    explicit HarmonicSpectrum(const SystemGeometry& g) : geometry(g), coeffs(g.cells()) {}

    int n_of_bin(int k) const { return k <= (geometry.n_phi - 1) / 2 ? k : k - geometry.n_phi; }
    int bin_of_n(int n) const { return n >= 0 ? n : n + geometry.n_phi; }
    int n_min() const { return -(geometry.n_phi / 2); }
    int n_max() const { return (geometry.n_phi + 1) / 2 - 1; }

    cplx& at_bin(int i, int k) { return coeffs[static_cast<std::size_t>(i) * geometry.n_phi + k]; }
    cplx at_bin(int i, int k) const {
        return coeffs[static_cast<std::size_t>(i) * geometry.n_phi + k];
    }
    cplx coeff(int i, int n) const { return at_bin(i, bin_of_n(n)); }

    // G_n(rho) as a function of rho for one harmonic.
    std::vector<cplx> row_of_n(int n) const {
        std::vector<cplx> out(geometry.n_rho);
        const int k = bin_of_n(n);
        for (int i = 0; i < geometry.n_rho; ++i)
            out[i] = at_bin(i, k);
        return out;
    }
};

// Forward DFT per rho row with 1/N_phi normalization, the Riemann sum of
// (1/2pi) \int g(phi) e^{-i n phi} dphi on the grid phi_j = j*2pi/N_phi,
// j = 1..N_phi.  The grid starts at j = 1, hence the one-sample phase twist
// e^{-2 pi i k/N_phi} applied after the standard DFT of the stored row.
inline HarmonicSpectrum decompose_phi(const Sinogram& sino) {
    const int n_phi = sino.geometry.n_phi;
    const int n_rho = sino.geometry.n_rho;
    HarmonicSpectrum spec(sino.geometry);
    const DftPlan plan(static_cast<std::size_t>(n_phi));
    std::vector<cplx> twist(n_phi);
    for (int k = 0; k < n_phi; ++k) {
        const double ang = -2.0 * pi * k / n_phi;
        twist[k] = {std::cos(ang), std::sin(ang)};
    }
#pragma omp parallel
    {
        std::vector<cplx> in(n_phi), out(n_phi);
#pragma omp for schedule(static)
        for (int i = 0; i < n_rho; ++i) {
            for (int j = 0; j < n_phi; ++j)
                in[j] = sino.at(i, j);
            plan.forward(in.data(), out.data());
            for (int k = 0; k < n_phi; ++k)
                spec.at_bin(i, k) = out[k] * twist[k] / static_cast<double>(n_phi);
        }
    }
    return spec;
}

// Regularized weight of Eq.-(24) form: w(n, rho) = cos(n psi) /
// (eps^2 + cos^2(n psi)) / 2.  With eps = 0 this is the exact division
// (R_D f)_n / (2 cos(n psi)), which is singular where cos(n psi) vanishes.
inline double g_weight(double cos_npsi, double eps) {
    return cos_npsi / (eps * eps + cos_npsi * cos_npsi) / 2.0;
}

inline HarmonicSpectrum regularized_G(const HarmonicSpectrum& spec, double eps) {
    if (!(eps >= 0.0))
        throw std::invalid_argument("regularized_G: epsilon must be >= 0");
    HarmonicSpectrum out(spec.geometry);
    const int n_rho = spec.geometry.n_rho;
    const int n_phi = spec.geometry.n_phi;
    int singular_n = 0, singular_i = -1;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_rho; ++i) {
        const double psi = spec.geometry.psi(i);
        for (int k = 0; k < n_phi; ++k) {
            const double c = std::cos(spec.n_of_bin(k) * psi);
            if (eps == 0.0 && std::abs(c) < 1e-12) {
#pragma omp critical
                {
                    singular_n = spec.n_of_bin(k);
                    singular_i = i;
                }
                continue;
            }
            out.at_bin(i, k) = spec.at_bin(i, k) * g_weight(c, eps);
        }
    }
    if (singular_i >= 0)
        throw singular_weight_error("regularized_G: cos(n psi) vanishes at (n=" +
                                    std::to_string(singular_n) + ", i=" +
                                    std::to_string(singular_i) + ") and epsilon = 0");
    return out;
}

inline HarmonicSpectrum regularized_G(const HarmonicSpectrum& spec) {
    return regularized_G(spec, spec.geometry.epsilon);
}

// Largest |coeffs(-n,i) - conj(coeffs(n,i))| over the spectrum, relative to
// the largest coefficient magnitude.
inline double hermitian_defect(const HarmonicSpectrum& spec) {
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < spec.geometry.n_rho; ++i) {
        for (int k = 0; k < spec.geometry.n_phi; ++k)
            scale = std::max(scale, std::abs(spec.at_bin(i, k)));
        for (int n = 1; n <= -spec.n_min(); ++n) {
            const int kp = spec.bin_of_n(n);
            const cplx a = spec.at_bin(i, spec.bin_of_n(-n));
            // for even N_phi the bin n = -N/2 has no +N/2 partner; it must be real
            const cplx b = (n <= spec.n_max()) ? std::conj(spec.at_bin(i, kp)) : cplx(a.real(), 0.0);
            worst = std::max(worst, std::abs(a - b));
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

// Inverse DFT per row; requires a Hermitian spectrum and discards the
// imaginary residue after checking it is at rounding level.
inline std::vector<double> recompose_phi(const HarmonicSpectrum& spec) {
    if (hermitian_defect(spec) > 1e-10)
        throw symmetry_error("recompose_phi: spectrum is not Hermitian within 1e-10");
    const int n_phi = spec.geometry.n_phi;
    const int n_rho = spec.geometry.n_rho;
    std::vector<double> out(spec.geometry.cells());
    const DftPlan plan(static_cast<std::size_t>(n_phi));
    std::vector<cplx> untwist(n_phi);
    for (int k = 0; k < n_phi; ++k) {
        const double ang = 2.0 * pi * k / n_phi;
        untwist[k] = {std::cos(ang), std::sin(ang)};
    }
    bool imag_bad = false;
#pragma omp parallel
    {
        std::vector<cplx> in(n_phi), res(n_phi);
#pragma omp for schedule(static)
        for (int i = 0; i < n_rho; ++i) {
            for (int k = 0; k < n_phi; ++k)
                in[k] = spec.at_bin(i, k) * untwist[k];
            plan.inverse(in.data(), res.data());
            double norm2 = 0.0, imag2 = 0.0;
            for (int j = 0; j < n_phi; ++j) {
                norm2 += std::norm(res[j]);
                imag2 += res[j].imag() * res[j].imag();
            }
            if (imag2 > 1e-20 * norm2 && norm2 > 0.0) {
#pragma omp atomic write
                imag_bad = true;
            }
            for (int j = 0; j < n_phi; ++j)
                out[static_cast<std::size_t>(i) * n_phi + j] = res[j].real();
        }
    }
    if (imag_bad)
        throw symmetry_error("recompose_phi: imaginary residue above 1e-10 of row norm");
    return out;
}

struct ConsistencyResidual {
    int n;
    int k;
    double residual;
};

// Range-consistency residuals of the moment integrals
// \int_R^inf G_n(rho) rho^{-k} drho over the discrete grid (composite
// trapezoid, upper limit rho_max), normalized by ||G_n||_1 * R^{-k}.
// Pairs follow the Appendix-A enumeration k = n, n-2, ... > 0.
inline std::vector<ConsistencyResidual> consistency_residuals(const HarmonicSpectrum& g_spec,
                                                              int n_max) {
    const SystemGeometry& geom = g_spec.geometry;
    std::vector<ConsistencyResidual> out;
    const double drho = geom.delta_rho();
    for (int n = 1; n <= n_max && n <= g_spec.n_max(); ++n) {
        for (int k = n; k > 0; k -= 2) {
            cplx acc(0.0, 0.0);
            double l1 = 0.0;
            for (int i = 0; i < geom.n_rho; ++i) {
                const double w = (i == 0 || i == geom.n_rho - 1) ? 0.5 : 1.0;
                const cplx g = g_spec.coeff(i, n);
                const double rk = std::pow(geom.rho(i), -static_cast<double>(k));
                acc += w * g * rk;
                l1 += w * std::abs(g);
            }
            const double num = std::abs(acc) * drho;
            const double den = l1 * drho * std::pow(geom.R, -static_cast<double>(k)) + 1e-300;
            out.push_back({n, k, num / den});
        }
    }
    return out;
}

// Circular-harmonic inversion of one component (the Prop.-1 oracle):
//   f_n(r) = (1/pi) d/dr \int_R^r cosh(n acosh(r/rho)) /
//            (rho sqrt((r/rho)^2 - 1)) G_n(rho) drho.
// The substitution rho = r/cosh(t) removes the inverse-square-root
// singularity, leaving \int_0^{acosh(r/R)} cosh(n t)/cosh(t) *
// G_n(r/cosh t) dt on a uniform t-grid (4x oversampled vs N_rho);
// the r-derivative is taken by central differences on r_grid.
inline std::vector<cplx> ch_invert_component(int n, std::span<const cplx> g_n,
                                             const SystemGeometry& geom,
                                             std::span<const double> r_grid, int oversample = 4) {
    if (static_cast<int>(g_n.size()) != geom.n_rho)
        throw std::invalid_argument("ch_invert_component: G_n length must equal N_rho");
    if (r_grid.size() < 3)
        throw std::invalid_argument("ch_invert_component: need at least 3 r samples");
    for (std::size_t l = 1; l < r_grid.size(); ++l)
        if (!(r_grid[l] > r_grid[l - 1]))
            throw std::invalid_argument("ch_invert_component: r_grid must be increasing");
    if (!(r_grid.front() > geom.R))
        throw std::domain_error("ch_invert_component: r_grid must lie strictly above R");

    const double drho = geom.delta_rho();
    const auto g_at = [&](double rho) -> cplx {
        // linear interpolation on the rho grid, anchored at G(R) = 0
        const double s = (rho - geom.R) / drho - 1.0;
        if (s <= -1.0)
            return {0.0, 0.0};
        if (s < 0.0)
            return g_n[0] * (s + 1.0);
        if (s >= geom.n_rho - 1)
            return g_n[geom.n_rho - 1];
        const int i0 = static_cast<int>(s);
        const double t = s - i0;
        return g_n[i0] * (1.0 - t) + g_n[i0 + 1] * t;
    };

    const std::size_t nr = r_grid.size();
    const int m = oversample * geom.n_rho;
    std::vector<cplx> integral(nr);
    const auto nr_i = static_cast<std::int64_t>(nr);
#pragma omp parallel for schedule(static)
    for (std::int64_t l = 0; l < nr_i; ++l) {
        const double r = r_grid[l];
        const double t_max = std::acosh(r / geom.R);
        const double dt = t_max / m;
        cplx acc(0.0, 0.0);
        for (int q = 0; q <= m; ++q) {
            const double t = q * dt;
            const double ch = std::cosh(t);
            const double w = (q == 0 || q == m) ? 0.5 : 1.0;
            acc += w * (std::cosh(n * t) / ch) * g_at(r / ch);
        }
        integral[l] = acc * dt;
    }

    std::vector<cplx> f(nr);
    f[0] = (integral[1] - integral[0]) / (r_grid[1] - r_grid[0]);
    f[nr - 1] = (integral[nr - 1] - integral[nr - 2]) / (r_grid[nr - 1] - r_grid[nr - 2]);
    for (std::size_t l = 1; l + 1 < nr; ++l)
        f[l] = (integral[l + 1] - integral[l - 1]) / (r_grid[l + 1] - r_grid[l - 1]);
    for (auto& v : f)
        v /= pi;
    return f;
}

// Real-valued convenience overload for the n = 0 component.
inline std::vector<double> ch_invert_component(std::span<const double> g_0,
                                               const SystemGeometry& geom,
                                               std::span<const double> r_grid, int oversample = 4) {
    std::vector<cplx> g(g_0.begin(), g_0.end());
    const auto f = ch_invert_component(0, g, geom, r_grid, oversample);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = f[i].real();
    return out;
}

}  // namespace dcart
