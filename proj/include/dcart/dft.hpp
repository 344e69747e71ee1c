#pragma once

// Self-contained DFT utilities: an iterative radix-2 FFT for the
// power-of-two sizes used by the Hilbert filter, and a table-driven O(n^2)
// DFT for the arbitrary (often prime) angular grid sizes.  Both are exact
// inverses of each other up to rounding and fully deterministic.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dcart/geometry.hpp"

namespace dcart {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

// In-place radix-2 Cooley-Tukey, unnormalized.  inverse=true uses the
// conjugate twiddles and does NOT divide by n.
inline void fft_pow2(cplx* a, std::size_t n, bool inverse) {
    if (!is_pow2(n))
        throw std::invalid_argument("fft_pow2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * pi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx t = a[i + k + len / 2] * w;
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
                w *= wl;
            }
        }
    }
}

// Dense DFT plan for arbitrary n with a precomputed twiddle table.
// forward:  X_k = sum_j x_j e^{-2 pi i j k / n}
// inverse:  x_j = sum_k X_k e^{+2 pi i j k / n}   (unnormalized)
class DftPlan {
public:
    explicit DftPlan(std::size_t n) : n_(n), w_(n) {
        if (n == 0)
            throw std::invalid_argument("DftPlan: empty size");
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = -2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
            w_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    void forward(const cplx* in, cplx* out) const { run(in, out, false); }
    void inverse(const cplx* in, cplx* out) const { run(in, out, true); }

private:
    void run(const cplx* in, cplx* out, bool inv) const {
        for (std::size_t k = 0; k < n_; ++k) {
            cplx acc(0.0, 0.0);
            std::size_t idx = 0;
            for (std::size_t j = 0; j < n_; ++j) {
                const cplx w = inv ? std::conj(w_[idx]) : w_[idx];
                acc += in[j] * w;
                idx += k;
                if (idx >= n_)
                    idx -= n_;
            }
            out[k] = acc;
        }
    }

    std::size_t n_;
    std::vector<cplx> w_;
};

}  // namespace dcart
