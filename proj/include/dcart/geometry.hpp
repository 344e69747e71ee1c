#pragma once

// Scanning-manifold geometry for the fixed-source / rotating-detector
// Compton system: the source S sits at the origin, the detector D moves on
// the circle of radius R, and each measurement integrates over a double
// circular arc D(rho, phi) = A_C1 u A_C2 of scanning-circle diameter rho.
//
// All lengths are in pixel units, all angles in radians.  Angles are kept
// unnormalized internally; only I/O boundaries wrap to [0, 2pi).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dcart {

inline constexpr double pi = std::numbers::pi;

struct Point2 {
    double x{0.0};
    double y{0.0};
};

// Which arc of the double pair.  The sign s(m) = -(-1)^m is +1 for C1 and
// -1 for C2; the arc center sits at polar angle phi + s(m)*psi.
enum class ArcId : int { c1 = 1, c2 = 2 };

inline double arc_sign(ArcId id) { return id == ArcId::c1 ? +1.0 : -1.0; }

// Half-opening parameter psi = acos(R/rho); each arc subtends a central
// angle of 4*psi about its own center.
inline double psi_of(double rho, double R) {
    if (!(R > 0.0))
        throw std::domain_error("psi_of: R must be positive");
    if (rho < R)
        throw std::domain_error("psi_of: rho < R (scattering circle smaller than detector ring)");
    const double c = R / rho;
    return std::acos(c > 1.0 ? 1.0 : c);
}

// Scanning diameter from scattering angle, rho = R / sin(omega),
// omega in [pi/2, pi).
inline double rho_of_omega(double omega, double R) {
    if (!(omega >= pi / 2.0 && omega < pi))
        throw std::domain_error("rho_of_omega: omega outside [pi/2, pi)");
    return R / std::sin(omega);
}

inline double omega_of_rho(double rho, double R) {
    if (rho < R)
        throw std::domain_error("omega_of_rho: rho < R");
    const double s = R / rho;
    return pi - std::asin(s > 1.0 ? 1.0 : s);
}

// Compton formula: photon energy after scattering through omega.
// E0 and mc2 share any unit; the result is in the same unit.
inline double compton_energy(double e0, double omega, double mc2) {
    if (!(e0 > 0.0) || !(mc2 > 0.0))
        throw std::domain_error("compton_energy: E0 and mc2 must be positive");
    return e0 / (1.0 + (e0 / mc2) * (1.0 - std::cos(omega)));
}

// Center of arc m: (rho/2) * (cos(phi + s*psi), sin(phi + s*psi)).
inline Point2 arc_center(ArcId id, double rho, double phi, double R) {
    const double psi = psi_of(rho, R);
    const double a = phi + arc_sign(id) * psi;
    return {0.5 * rho * std::cos(a), 0.5 * rho * std::sin(a)};
}

// Parametric range of gamma: [phi-psi, phi+3psi] for C1,
// [phi-3psi, phi+psi] for C2.  Both spans equal 4*psi.
inline std::pair<double, double> gamma_range(ArcId id, double rho, double phi, double R) {
    const double psi = psi_of(rho, R);
    if (id == ArcId::c1)
        return {phi - psi, phi + 3.0 * psi};
    return {phi - 3.0 * psi, phi + psi};
}

// Point on arc m at parameter gamma (angle about the arc's own center).
inline Point2 arc_point(ArcId id, double rho, double phi, double gamma, double R) {
    const auto [g0, g1] = gamma_range(id, rho, phi, R);
    const double slack = 1e-12 * (1.0 + std::abs(g1));
    if (gamma < g0 - slack || gamma > g1 + slack)
        throw std::out_of_range("arc_point: gamma outside the arc's parametric range");
    const Point2 c = arc_center(id, rho, phi, R);
    return {c.x + 0.5 * rho * std::cos(gamma), c.y + 0.5 * rho * std::sin(gamma)};
}

// Bundled arc parameters for one (id, rho, phi).
struct ArcParams {
    ArcId id;
    double rho;
    double phi;
    double psi;
    double gamma_min;
    double gamma_max;

    static ArcParams make(ArcId id, double rho, double phi, double R) {
        ArcParams p;
        p.id = id;
        p.rho = rho;
        p.phi = phi;
        p.psi = psi_of(rho, R);
        auto [g0, g1] = gamma_range(id, rho, phi, R);
        p.gamma_min = g0;
        p.gamma_max = g1;
        return p;
    }
};

// Number of gamma steps per arc for a target spacing along the arc.
// The nominal step arc_step/(rho/2) is shrunk to divide the span 4*psi
// exactly, so samples are uniform and endpoint-inclusive.
inline std::size_t arc_step_count(double rho, double psi, double arc_step) {
    const double span = 4.0 * psi;
    const double dg_nominal = arc_step / (0.5 * rho);
    const double k = std::ceil(span / dg_nominal);
    return k >= 1.0 ? static_cast<std::size_t>(k) : 1;
}

// Visit every sample of both arcs in deterministic order: arc C1 then C2,
// ascending gamma.  f(arc, k, count, gamma, x, y) is called for
// k = 0..count with count = arc_step_count(...); sample positions use an
// incremental rotation so the cost per sample is a handful of flops.
template <typename F>
inline void for_each_arc_sample(double rho, double phi, double arc_step, double R, F&& f) {
    if (!(arc_step > 0.0))
        throw std::domain_error("arc samples: arc_step must be positive");
    if (!(rho > R))
        throw std::domain_error("arc samples: rho must exceed R");
    const double psi = psi_of(rho, R);
    const double half = 0.5 * rho;
    const std::size_t count = arc_step_count(rho, psi, arc_step);
    const double dg = 4.0 * psi / static_cast<double>(count);
    const double cs = std::cos(dg), sn = std::sin(dg);
    for (ArcId id : {ArcId::c1, ArcId::c2}) {
        const double s = arc_sign(id);
        const double cx = half * std::cos(phi + s * psi);
        const double cy = half * std::sin(phi + s * psi);
        const double g0 = id == ArcId::c1 ? phi - psi : phi - 3.0 * psi;
        double cg = std::cos(g0), sg = std::sin(g0);
        for (std::size_t k = 0; k <= count; ++k) {
            f(id, k, count, g0 + static_cast<double>(k) * dg, cx + half * cg, cy + half * sg);
            const double cg2 = cg * cs - sg * sn;
            sg = cg * sn + sg * cs;
            cg = cg2;
        }
    }
}

struct ArcSample {
    ArcId arc;
    double gamma;
    double x;
    double y;
};

struct ArcSampling {
    double delta_gamma{0.0};       // fitted uniform step, same for both arcs
    std::size_t per_arc{0};        // samples per arc (count + 1)
    std::vector<ArcSample> samples;  // C1 then C2, ascending gamma
};

inline ArcSampling arc_samples(double rho, double phi, double arc_step, double R) {
    ArcSampling out;
    const double psi = psi_of(rho, R);
    const std::size_t count = arc_step_count(rho, psi, arc_step);
    out.delta_gamma = 4.0 * psi / static_cast<double>(count);
    out.per_arc = count + 1;
    out.samples.reserve(2 * out.per_arc);
    for_each_arc_sample(rho, phi, arc_step, R,
                        [&](ArcId id, std::size_t, std::size_t, double gamma, double x, double y) {
                            out.samples.push_back({id, gamma, x, y});
                        });
    return out;
}

// Full scan configuration.  The rho grid is offset from R:
// rho_i = R + i*(rho_max-R)/N_rho for i = 1..N_rho, so every arc exists;
// phi_j = j*2pi/N_phi for j = 1..N_phi.
struct SystemGeometry {
    double R{0.0};
    double rho_max{0.0};
    int n_rho{0};
    int n_phi{0};
    double arc_step{1.0};
    double epsilon{1.0};

    void validate() const {
        if (!(R > 0.0))
            throw std::invalid_argument("SystemGeometry: R must be > 0");
        if (!(rho_max > R))
            throw std::invalid_argument("SystemGeometry: rho_max must be > R");
        if (n_rho < 1)
            throw std::invalid_argument("SystemGeometry: N_rho must be >= 1");
        if (n_phi < 1)
            throw std::invalid_argument("SystemGeometry: N_phi must be >= 1");
        if (!(arc_step > 0.0))
            throw std::invalid_argument("SystemGeometry: arc_step must be > 0");
        if (!(epsilon >= 0.0))
            throw std::invalid_argument("SystemGeometry: epsilon must be >= 0");
    }

    double delta_rho() const { return (rho_max - R) / n_rho; }
    double delta_phi() const { return 2.0 * pi / n_phi; }
    // 0-based accessors for the 1-based grids above.
    double rho(int i) const { return R + (i + 1) * delta_rho(); }
    double phi(int j) const { return (j + 1) * delta_phi(); }
    double psi(int i) const { return psi_of(rho(i), R); }

    std::size_t cells() const { return static_cast<std::size_t>(n_rho) * n_phi; }

    // N_phi = round(2*pi*R): one detector position per unit of ring arc.
    static int default_n_phi(double R) { return static_cast<int>(std::llround(2.0 * pi * R)); }

    // N_rho from the redundancy ratio Q = N_rho*N_phi / N^2.
    static int n_rho_from_q(double q, int grid_n, int n_phi) {
        const double v = q * static_cast<double>(grid_n) * grid_n / n_phi;
        const int n = static_cast<int>(std::llround(v));
        return n >= 1 ? n : 1;
    }
};

inline bool operator==(const SystemGeometry& a, const SystemGeometry& b) {
    return a.R == b.R && a.rho_max == b.rho_max && a.n_rho == b.n_rho && a.n_phi == b.n_phi &&
           a.arc_step == b.arc_step && a.epsilon == b.epsilon;
}

inline double wrap_two_pi(double a) {
    double v = std::fmod(a, 2.0 * pi);
    if (v < 0.0)
        v += 2.0 * pi;
    return v;
}

}  // namespace dcart
