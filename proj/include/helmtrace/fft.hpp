// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Trigonometric interpolation utilities on uniform 2*pi grids: FFT (radix-2
// plus Bluestein for general sizes), Fourier coefficients in the mode range
// -N/2 .. N/2-1, spectral differentiation, and diagonal Fourier multipliers.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "helmtrace/types.hpp"

namespace helmtrace {

namespace detail {

inline bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

/// In-place iterative radix-2 FFT; sign=-1 forward, +1 inverse (unnormalized).
inline void fft_pow2(std::vector<Cplx>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / double(len);
        const Cplx wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            Cplx w = 1.0;
            for (std::size_t j = 0; j < len / 2; ++j) {
                const Cplx u = a[i + j];
                const Cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Bluestein chirp-z transform for arbitrary N (unnormalized), sign as above.
inline void fft_bluestein(std::vector<Cplx>& a, int sign) {
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    std::vector<Cplx> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n avoids precision loss in the chirp phase for large j
        const std::size_t j2 = (j * j) % (2 * n);
        w[j] = std::polar(1.0, sign * pi * double(j2) / double(n));
    }
    std::vector<Cplx> x(m, Cplx(0)), y(m, Cplx(0));
    for (std::size_t j = 0; j < n; ++j) x[j] = a[j] * w[j];
    y[0] = std::conj(w[0]);
    for (std::size_t j = 1; j < n; ++j) y[j] = y[m - j] = std::conj(w[j]);
    fft_pow2(x, -1);
    fft_pow2(y, -1);
    for (std::size_t j = 0; j < m; ++j) x[j] *= y[j];
    fft_pow2(x, +1);
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * w[j] / double(m);
}

inline void fft_any(std::vector<Cplx>& a, int sign) {
    if (a.size() <= 1) return;
    if (is_pow2(a.size()))
        fft_pow2(a, sign);
    else
        fft_bluestein(a, sign);
}

} // namespace detail

/// Fourier coefficients c_l, l = -N/2 .. N/2-1, of samples f_j at
/// t_j = (j + shift) * 2*pi/N:  f(t) = sum_l c_l exp(i l t).
/// Returned in order l = -N/2, ..., -1, 0, 1, ..., N/2-1. N must be even.
inline CVector trig_coefficients(const CVector& samples, Real shift = 0.0) {
    const std::size_t n = std::size_t(samples.size());
    if (n == 0 || n % 2 != 0)
        throw std::invalid_argument("trig_coefficients: even sample count required");
    std::vector<Cplx> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = samples[Eigen::Index(j)];
    detail::fft_any(a, -1); // a[l] = sum_j f_j e^{-2 pi i j l / N}
    CVector c(n);
    const int half = int(n) / 2;
    for (int l = -half; l < half; ++l) {
        const std::size_t idx = std::size_t((l + int(n)) % int(n));
        const Cplx phase = std::polar(1.0, -double(l) * shift * 2.0 * pi / double(n));
        c[l + half] = a[idx] * phase / double(n);
    }
    return c;
}

/// Inverse of trig_coefficients: samples at t_j = (j + shift) * 2*pi/N.
inline CVector trig_samples(const CVector& coeffs, Real shift = 0.0) {
    const std::size_t n = std::size_t(coeffs.size());
    if (n == 0 || n % 2 != 0)
        throw std::invalid_argument("trig_samples: even coefficient count required");
    const int half = int(n) / 2;
    std::vector<Cplx> a(n, Cplx(0));
    for (int l = -half; l < half; ++l) {
        const std::size_t idx = std::size_t((l + int(n)) % int(n));
        const Cplx phase = std::polar(1.0, double(l) * shift * 2.0 * pi / double(n));
        a[idx] = coeffs[l + half] * phase;
    }
    detail::fft_any(a, +1);
    CVector f(n);
    for (std::size_t j = 0; j < n; ++j) f[Eigen::Index(j)] = a[j];
    return f;
}

/// Apply a Fourier multiplier with symbol p(l) on a (possibly shifted) grid.
template <typename Symbol>
CVector fourier_multiplier(const CVector& samples, Real shift, Symbol&& p) {
    CVector c = trig_coefficients(samples, shift);
    const int half = int(c.size()) / 2;
    for (int l = -half; l < half; ++l) c[l + half] *= p(l);
    return trig_samples(c, shift);
}

/// Spectral derivative d/dt of samples on a shifted uniform grid.
/// The l = -N/2 mode is dropped (standard odd-derivative convention).
inline CVector spectral_derivative(const CVector& samples, Real shift = 0.0) {
    const int half = int(samples.size()) / 2;
    return fourier_multiplier(samples, shift, [half](int l) -> Cplx {
        if (l == -half) return Cplx(0.0);
        return iu * Real(l);
    });
}

/// Dense N x N spectral differentiation matrix for the shifted grid.
inline CMatrix spectral_derivative_matrix(int n, Real shift = 0.0) {
    CMatrix d(n, n);
    CVector e = CVector::Zero(n);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        d.col(j) = spectral_derivative(e, shift);
        e[j] = 0.0;
    }
    return d;
}

/// Resampling matrix from an n_from-grid to an n_to-grid (both shifted by the
/// same fraction of their own step). Upsampling zero-pads the spectrum;
/// downsampling keeps the central bins (projection, no aliasing).
inline CMatrix trig_resample_matrix(int n_from, int n_to, Real shift = 0.5) {
    CMatrix m(n_to, n_from);
    CVector e = CVector::Zero(n_from);
    for (int j = 0; j < n_from; ++j) {
        e[j] = 1.0;
        const CVector c = trig_coefficients(e, shift);
        e[j] = 0.0;
        CVector bins = CVector::Zero(n_to);
        if (n_to >= n_from)
            bins.segment((n_to - n_from) / 2, n_from) = c;
        else
            bins = c.segment((n_from - n_to) / 2, n_to);
        m.col(j) = trig_samples(bins, shift);
    }
    return m;
}

} // namespace helmtrace
