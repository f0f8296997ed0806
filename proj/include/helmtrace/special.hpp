// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Bessel and Hankel functions of order 0 and 1 for complex arguments in the
// closed upper half plane. The ascending series loses roughly |z|*log10(e)
// digits to cancellation, so sums are accumulated in double-double arithmetic
// up to |z| = 20; beyond that the Hankel asymptotic expansion has terms that
// bottom out below 1e-17. Target absolute accuracy is 1e-12 for |z| <= 1e3.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "helmtrace/types.hpp"

namespace helmtrace {

namespace detail {

/// Unevaluated double-double value hi + lo.
struct DD {
    double hi = 0.0, lo = 0.0;
    DD() = default;
    DD(double h) : hi(h), lo(0.0) {}
    DD(double h, double l) : hi(h), lo(l) {}
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DD dd_add(const DD& a, const DD& b) {
    DD s = two_sum(a.hi, b.hi);
    DD t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD dd_sub(const DD& a, const DD& b) { return dd_add(a, {-b.hi, -b.lo}); }

inline DD dd_mul(const DD& a, const DD& b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline DD dd_mul_d(const DD& a, double b) {
    DD p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline DD dd_div_d(const DD& a, double b) {
    double q1 = a.hi / b;
    DD p = two_prod(q1, b);
    double r = ((a.hi - p.hi) - p.lo + a.lo) / b;
    return quick_two_sum(q1, r);
}

/// Complex double-double.
struct CDD {
    DD re, im;
    CDD() = default;
    CDD(const Cplx& z) : re(z.real()), im(z.imag()) {}
    CDD(DD r, DD i) : re(r), im(i) {}
    Cplx to_cplx() const { return {re.hi + re.lo, im.hi + im.lo}; }
};

inline CDD cdd_add(const CDD& a, const CDD& b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }

inline CDD cdd_mul(const CDD& a, const CDD& b) {
    DD re = dd_sub(dd_mul(a.re, b.re), dd_mul(a.im, b.im));
    DD im = dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re));
    return {re, im};
}

inline CDD cdd_mul_d(const CDD& a, double s) { return {dd_mul_d(a.re, s), dd_mul_d(a.im, s)}; }

inline CDD cdd_mul_dd(const CDD& a, const DD& s) { return {dd_mul(a.re, s), dd_mul(a.im, s)}; }

inline CDD cdd_div_d(const CDD& a, double s) { return {dd_div_d(a.re, s), dd_div_d(a.im, s)}; }

inline double cdd_abs(const CDD& a) { return std::hypot(a.re.hi, a.im.hi); }

inline constexpr double euler_gamma = 0.57721566490153286060651209;

/// All four series values at once; valid for |z| <= ~20 at full accuracy.
/// The h-fields carry H = J + iY combined before the final rounding: the
/// combination cancels like exp(2 Im z), so it has to happen in dd.
struct SeriesJY {
    Cplx j0, j1, y0, y1;
    Cplx h0, h1;
};

inline SeriesJY bessel_jy01_series(const Cplx& z) {
    const CDD q = cdd_mul_d(cdd_mul(CDD(z), CDD(z)), 0.25); // z^2/4
    // J0 = sum (-1)^m q^m / (m!)^2,  partial sums for the h_m-weighted variants.
    CDD t0(Cplx(1.0, 0.0));          // current J0 term
    CDD t1(Cplx(1.0, 0.0));          // current J1 term (without z/2 prefactor)
    CDD s_j0 = t0, s_j1 = t1;
    CDD s_y0(Cplx(0.0, 0.0));        // sum (-1)^{m+1} h_m q^m/(m!)^2
    CDD s_y1(Cplx(0.0, 0.0));        // sum (-1)^m (h_m + h_{m+1}) q^m/(m!(m+1)!)
    DD h(0.0);                       // h_m kept in double-double: it scales huge terms
    s_y1 = cdd_add(s_y1, t1);        // m=0 term: h_0 + h_1 = 1
    const int max_m = 400;
    for (int m = 1; m <= max_m; ++m) {
        t0 = cdd_div_d(cdd_mul(t0, q), double(m) * double(m));
        t0 = cdd_mul_d(t0, -1.0);
        t1 = cdd_div_d(cdd_mul(t1, q), double(m) * double(m + 1));
        t1 = cdd_mul_d(t1, -1.0);
        h = dd_add(h, dd_div_d(DD(1.0), double(m)));
        s_j0 = cdd_add(s_j0, t0);
        s_j1 = cdd_add(s_j1, t1);
        s_y0 = cdd_add(s_y0, cdd_mul_dd(t0, DD(-h.hi, -h.lo)));
        const DD w = dd_add(dd_mul_d(h, 2.0), dd_div_d(DD(1.0), double(m + 1)));
        s_y1 = cdd_add(s_y1, cdd_mul_dd(t1, w));
        if (cdd_abs(t0) < 1e-40 * (cdd_abs(s_j0) + 1e-300) && m > 4) break;
    }
    const CDD j0 = s_j0;
    const CDD j1 = cdd_mul(CDD(0.5 * z), s_j1);
    const Cplx lg = std::log(0.5 * z) + euler_gamma;
    const CDD y0 = cdd_mul_d(cdd_add(cdd_mul(CDD(lg), j0), s_y0), 2.0 / pi);
    const CDD y1 = cdd_mul_d(
        cdd_add(cdd_add(cdd_mul(CDD(lg), j1), CDD(-1.0 / z)),
                cdd_mul(CDD(-0.25 * z), s_y1)),
        2.0 / pi);
    const CDD ic(Cplx(0.0, 1.0));
    const CDD h0 = cdd_add(j0, cdd_mul(ic, y0));
    const CDD h1 = cdd_add(j1, cdd_mul(ic, y1));
    return {j0.to_cplx(), j1.to_cplx(), y0.to_cplx(), y1.to_cplx(),
            h0.to_cplx(), h1.to_cplx()};
}

/// Hankel asymptotic expansion, |z| >= ~17, |arg z| < pi.
inline Cplx hankel1_asymptotic(int nu, const Cplx& z) {
    const double mu = 4.0 * nu * nu;
    Cplx sum = 1.0, term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 60; ++k) {
        const double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= iu * num / (8.0 * k * z);
        const double a = std::abs(term);
        if (a > prev) break; // divergence onset: stop at smallest term
        sum += term;
        prev = a;
        if (a < 1e-17) break;
    }
    const Cplx phase = z - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * z)) * std::exp(iu * phase) * sum;
}

inline constexpr double series_asymptotic_split = 20.0;

} // namespace detail

/// H0^(1) and H1^(1) together (the common case in kernel evaluation).
/// Requires z != 0; the supported half plane is Im z >= 0. Absolute accuracy
/// is ~1e-12 or better for |z| <= 1e3 with Im z <= 11, which covers kernel
/// arguments (k + i sigma)|x - y| with sigma <= k^(1/3) on radius-1 geometry.
struct Hankel01 {
    Cplx h0, h1;
};

inline Hankel01 hankel_h0_h1(const Cplx& z) {
    if (z == Cplx(0.0, 0.0)) throw std::domain_error("hankel_h0_h1: argument must be nonzero");
    if (std::abs(z) <= detail::series_asymptotic_split) {
        const auto s = detail::bessel_jy01_series(z);
        return {s.h0, s.h1};
    }
    return {detail::hankel1_asymptotic(0, z), detail::hankel1_asymptotic(1, z)};
}

/// J0, J1 for complex argument.
inline Cplx bessel_j0(const Cplx& z) {
    if (std::abs(z) <= detail::series_asymptotic_split) return detail::bessel_jy01_series(z).j0;
    // J = (H1 + H2)/2 with H2(z) = conj-type series e^{-i phase}; assemble directly.
    const Cplx h1 = detail::hankel1_asymptotic(0, z);
    // H2 asymptotics: conjugate structure of H1 (valid for moderate Im z).
    Cplx sum = 1.0, term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 60; ++k) {
        const double num = -(2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -iu * num / (8.0 * k * z);
        const double a = std::abs(term);
        if (a > prev) break;
        sum += term;
        prev = a;
        if (a < 1e-17) break;
    }
    const Cplx h2 = std::sqrt(2.0 / (pi * z)) * std::exp(-iu * (z - 0.25 * pi)) * sum;
    return 0.5 * (h1 + h2);
}

inline Cplx bessel_j1(const Cplx& z) {
    if (std::abs(z) <= detail::series_asymptotic_split) return detail::bessel_jy01_series(z).j1;
    const Cplx h1 = detail::hankel1_asymptotic(1, z);
    Cplx sum = 1.0, term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 60; ++k) {
        const double num = 4.0 - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -iu * num / (8.0 * k * z);
        const double a = std::abs(term);
        if (a > prev) break;
        sum += term;
        prev = a;
        if (a < 1e-17) break;
    }
    const Cplx h2 = std::sqrt(2.0 / (pi * z)) * std::exp(-iu * (z - 0.75 * pi)) * sum;
    return 0.5 * (h1 + h2);
}

inline Cplx bessel_y0(const Cplx& z) {
    if (std::abs(z) <= detail::series_asymptotic_split) return detail::bessel_jy01_series(z).y0;
    return (hankel_h0_h1(z).h0 - bessel_j0(z)) / iu;
}

inline Cplx bessel_y1(const Cplx& z) {
    if (std::abs(z) <= detail::series_asymptotic_split) return detail::bessel_jy01_series(z).y1;
    return (hankel_h0_h1(z).h1 - bessel_j1(z)) / iu;
}

/// Integer-order J_n(z), H_n^(1)(z) by forward recurrence from orders 0, 1.
/// Used by the separation-of-variables oracles on the unit circle, where the
/// orders stay small (|n| <~ k + 40) and forward recurrence for H is stable.
/// J_n by forward recurrence is unstable for n >> |z|; hold n <= |z| + small
/// or use bessel_jn_backward below.
inline Cplx hankel_h1n(int n, const Cplx& z) {
    const auto [h0, h1] = hankel_h0_h1(z);
    if (n == 0) return h0;
    const int m = std::abs(n);
    Cplx prev = h0, cur = h1;
    for (int k = 1; k < m; ++k) {
        const Cplx next = (2.0 * k / z) * cur - prev;
        prev = cur;
        cur = next;
    }
    if (n < 0 && (m % 2 == 1)) return -cur;
    return cur;
}

/// J_n via Miller backward recurrence with J-sum normalization; stable for all n.
inline Cplx bessel_jn(int n, const Cplx& z) {
    const int m = std::abs(n);
    if (m == 0) return bessel_j0(z);
    if (m == 1) {
        const Cplx j1 = bessel_j1(z);
        return n < 0 ? -j1 : j1;
    }
    const double az = std::abs(z);
    if (double(m) <= az) { // forward recurrence is stable up to the turning point
        Cplx prev = bessel_j0(z), cur = bessel_j1(z);
        for (int k = 1; k < m; ++k) {
            const Cplx next = (2.0 * k / z) * cur - prev;
            prev = cur;
            cur = next;
        }
        return (n < 0 && m % 2 == 1) ? -cur : cur;
    }
    const int start = m + 15 + int(2.0 * std::sqrt(double(m) + az));
    Cplx jp1 = 0.0, jcur = 1e-290; // trial J_{start+1}, J_{start}
    Cplx target = (m == start) ? jcur : Cplx(0.0);
    Cplx norm = (start % 2 == 0) ? 2.0 * jcur : Cplx(0.0); // J_0 + 2 sum_{k even>0} J_k = 1
    for (int k = start; k >= 1; --k) {
        const Cplx jm1 = (2.0 * k / z) * jcur - jp1;
        jp1 = jcur;
        jcur = jm1; // J_{k-1}
        if (k - 1 == m) target = jcur;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jcur;
        if (std::abs(jcur) > 1e260) {
            const double s = 1e-260;
            jcur *= s;
            jp1 *= s;
            target *= s;
            norm *= s;
        }
    }
    norm += jcur; // add J_0
    const Cplx jn = target / norm;
    return (n < 0 && m % 2 == 1) ? -jn : jn;
}

/// d/dz J_n(z).
inline Cplx bessel_jn_prime(int n, const Cplx& z) {
    if (n == 0) return -bessel_jn(1, z);
    return 0.5 * (bessel_jn(n - 1, z) - bessel_jn(n + 1, z));
}

/// d/dz H_n^(1)(z).
inline Cplx hankel_h1n_prime(int n, const Cplx& z) {
    if (n == 0) return -hankel_h1n(1, z);
    return 0.5 * (hankel_h1n(n - 1, z) - hankel_h1n(n + 1, z));
}

/// 2D Helmholtz free-space Green's function G_k(x) = (i/4) H0^(1)(k|x|).
inline Cplx greens_function(const Cplx& k, const Vec2& d) {
    return 0.25 * iu * hankel_h0_h1(k * d.norm()).h0;
}

/// Gradient of G_k with respect to the first argument (at x, source at 0).
inline std::pair<Cplx, Cplx> greens_gradient(const Cplx& k, const Vec2& d) {
    const Real r = d.norm();
    const Cplx f = -0.25 * iu * k * hankel_h0_h1(k * r).h1 / r;
    return {f * d.x, f * d.y};
}

} // namespace helmtrace
