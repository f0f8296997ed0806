// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Nystrom collocation of the four Helmholtz boundary integral operators on a
// closed graded curve, plus layer-potential, near-field and far-field
// evaluation. Kernels are split into a smooth part and a product of
// log(4 sin^2((t-tau)/2)) with an analytic coefficient; the log factor is
// integrated exactly against trigonometric interpolation (Kussmaul-Martensen
// weights) and the smooth part by the trapezoid rule.
//
// Matrix conventions on a curve with canonical node weights U (= what):
//   single_layer        : U-weighted density     -> pointwise (S phi)(x_i)
//   double_layer        : nodal density          -> pointwise (K phi)(x_i)
//   adjoint_double_layer: U-weighted density     -> U-weighted (K^T phi)
//   hypersingular       : nodal density          -> U-weighted (N phi)
// With these typings the Calderon block [[K, -eps S],[N/eps, -K^T]] acts on
// (u, eps^{-1} U du/dn) without any further weight juggling.

#include <map>
#include <vector>

#include "helmtrace/fft.hpp"
#include "helmtrace/geometry.hpp"
#include "helmtrace/special.hpp"
#include "helmtrace/types.hpp"

namespace helmtrace {

enum class BioKind { single_layer, double_layer, adjoint_double_layer, hypersingular };

/// Dense collocation matrix tagged with its operator kind and meshes.
struct OperatorMatrix {
    BioKind kind;
    Cplx wavenumber;
    int domain = -1; // curve it was assembled on
    CMatrix mat;
};

namespace detail {

inline constexpr double euler_gamma_bio = 0.57721566490153286060651209;

/// Quadrature weights R_d for the 2*pi-periodic log kernel against the
/// trigonometric interpolant; d is the node-index difference. Valid on
/// shifted grids since only differences t_i - t_j enter.
inline const std::vector<Real>& km_log_weights(int n) {
    static std::map<int, std::vector<Real>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<Real> r(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
        Real sum = 0.0;
        for (int l = 1; l < n / 2; ++l) sum += std::cos(2.0 * pi * l * d / n) / l;
        r[std::size_t(d)] = -(4.0 * pi / n) * sum - (4.0 * pi / (n * n)) * (d % 2 == 0 ? 1.0 : -1.0);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

inline Real log4sin2(Real dt) {
    const Real s = std::sin(0.5 * dt);
    return std::log(4.0 * s * s);
}

struct Bessel01 {
    Cplx j0, j1, h0, h1;
};

inline Bessel01 bessel01(const Cplx& z) {
    if (std::abs(z) <= detail::series_asymptotic_split) {
        const auto s = detail::bessel_jy01_series(z);
        return {s.j0, s.j1, s.h0, s.h1};
    }
    return {bessel_j0(z), bessel_j1(z), detail::hankel1_asymptotic(0, z),
            detail::hankel1_asymptotic(1, z)};
}

} // namespace detail

/// All four operators assembled in one sweep sharing kernel evaluations.
struct BoundaryOperators {
    Cplx k;
    CMatrix S, K, KT, N;
};

namespace detail {

/// Quadrature matrix of the kernel (i/4) H0(k r(t,tau)) d tau alone.
inline CMatrix km_h0_matrix(const Curve& c, Cplx k) {
    const int n = c.size();
    const Real dt = c.grid_step();
    const auto& R = km_log_weights(n);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Real rw = R[std::size_t(std::abs(i - j))];
            if (i == j) {
                const Cplx m2 = 0.25 * iu - euler_gamma_bio / (2.0 * pi) -
                                std::log(0.5 * k * c.w[std::size_t(i)]) / (2.0 * pi);
                m(i, j) = rw * (-1.0 / (4.0 * pi)) + dt * m2;
                continue;
            }
            const Vec2 d = c.x[std::size_t(i)] - c.x[std::size_t(j)];
            const Real r = d.norm();
            const auto b = bessel01(k * r);
            const Real lg = log4sin2(c.t(i) - c.t(j));
            const Cplx m1 = -b.j0 / (4.0 * pi);
            m(i, j) = rw * m1 + dt * (0.25 * iu * b.h0 - m1 * lg);
        }
    }
    return m;
}

} // namespace detail

/// Assemble on a curve; `fine` must be the same curve at doubled node count.
/// The hypersingular derivative sandwich runs on the fine grid so that the
/// coarse Nyquist mode is treated consistently (it is invisible to an N-point
/// derivative on the shifted grid, which would leave an O(1) defect in the
/// Calderon identity).
inline BoundaryOperators assemble_operators(const Curve& c, Cplx k, const Curve* fine = nullptr) {
    const int n = c.size();
    const Real lambda = c.lambda;
    const Real dt = c.grid_step();
    const auto& R = detail::km_log_weights(n);

    CMatrix km_h0(n, n);   // quadrature of (i/4) H0(k r) d tau
    CMatrix km_h0nn(n, n); // quadrature of (i/4) H0(k r) <nu_i, nu_j> d tau
    CMatrix Kmat(n, n), KTmat(n, n);

    for (int i = 0; i < n; ++i) {
        const Vec2 xi = c.x[std::size_t(i)];
        const Vec2 nui = c.xp[std::size_t(i)].rot_m90();
        for (int j = 0; j < n; ++j) {
            const Real rw = R[std::size_t(std::abs(i - j))];
            if (i == j) {
                const Cplx m2 = 0.25 * iu - detail::euler_gamma_bio / (2.0 * pi) -
                                std::log(0.5 * k * c.w[std::size_t(i)]) / (2.0 * pi);
                const Real m1 = -1.0 / (4.0 * pi);
                km_h0(i, j) = rw * m1 + dt * m2;
                km_h0nn(i, j) = (rw * m1 + dt * m2) * (c.w[std::size_t(i)] * c.w[std::size_t(i)]);
                // <d, nu(tau)> ~ +(dt^2/2) <x'', nu> as tau -> t, so both the
                // double layer and its adjoint share the diagonal below
                // (Laplace circle check: -1/(4 pi), giving K 1 = -1/2).
                const Real curv =
                    c.xpp[std::size_t(i)].x * c.xp[std::size_t(i)].y -
                    c.xpp[std::size_t(i)].y * c.xp[std::size_t(i)].x; // <x'', nu>, nu = rot_m90(x')
                const Real ldiag = curv / (4.0 * pi * c.w[std::size_t(i)] * c.w[std::size_t(i)]);
                Kmat(i, j) = dt * ldiag;
                KTmat(i, j) = dt * ldiag;
                continue;
            }
            const Vec2 xj = c.x[std::size_t(j)];
            const Vec2 d = xi - xj;
            const Real r = d.norm();
            const auto b = detail::bessel01(k * r);
            const Real lg = detail::log4sin2(c.t(i) - c.t(j));

            // single layer: M = (i/4) H0, M1 = -(1/4pi) J0
            const Cplx m1 = -b.j0 / (4.0 * pi);
            const Cplx m = 0.25 * iu * b.h0;
            km_h0(i, j) = rw * m1 + dt * (m - m1 * lg);

            // vector single layer for the hypersingular term
            const Vec2 nuj = c.xp[std::size_t(j)].rot_m90();
            const Real nn = nui.dot(nuj);
            km_h0nn(i, j) = km_h0(i, j) * nn;

            // double layer: L = (i k/4) H1 <d, nu_j>/r, L1 = -(k/4pi) J1 <d, nu_j>/r
            const Real qj = d.dot(nuj);
            const Cplx l1 = -k * b.j1 * qj / (4.0 * pi * r);
            const Cplx l = 0.25 * iu * k * b.h1 * qj / r;
            Kmat(i, j) = rw * l1 + dt * (l - l1 * lg);

            // adjoint: normal at the target, opposite sign
            const Real qi = d.dot(nui);
            const Cplx lt1 = k * b.j1 * qi / (4.0 * pi * r);
            const Cplx lt = -0.25 * iu * k * b.h1 * qi / r;
            KTmat(i, j) = rw * lt1 + dt * (lt - lt1 * lg);
        }
    }

    BoundaryOperators ops;
    ops.k = k;
    ops.S = km_h0 / lambda;
    ops.K = Kmat;
    ops.KT = KTmat;
    if (fine) {
        const int nf = fine->size();
        const CMatrix up = trig_resample_matrix(n, nf, 0.5);
        const CMatrix down = trig_resample_matrix(nf, n, 0.5);
        const CMatrix df = spectral_derivative_matrix(nf, 0.5);
        const CMatrix km_fine = detail::km_h0_matrix(*fine, k);
        ops.N = lambda * (down * (df * (km_fine * (df * up))) + (k * k) * km_h0nn);
    } else {
        const CMatrix d = spectral_derivative_matrix(n, 0.5);
        ops.N = lambda * (d * km_h0 * d + (k * k) * km_h0nn);
    }
    return ops;
}

/// Convenience overload building the fine curve via the geometry.
inline BoundaryOperators assemble_operators(const Geometry& g, int domain, Cplx k) {
    return assemble_operators(g.curves[std::size_t(domain)], k,
                              &g.curves_fine[std::size_t(domain)]);
}

inline OperatorMatrix assemble_bio(BioKind kind, const Geometry& g, int domain, Cplx k) {
    if (k == Cplx(0.0)) throw std::invalid_argument("assemble_bio: k = 0 unsupported");
    const Curve& c = g.curves[std::size_t(domain)];
    const BoundaryOperators ops = assemble_operators(g, domain, k);
    OperatorMatrix out;
    out.kind = kind;
    out.wavenumber = k;
    out.domain = c.domain;
    switch (kind) {
        case BioKind::single_layer: out.mat = ops.S; break;
        case BioKind::double_layer: out.mat = ops.K; break;
        case BioKind::adjoint_double_layer: out.mat = ops.KT; break;
        case BioKind::hypersingular: out.mat = ops.N; break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Potentials at off-curve points

/// Single-layer potential of a U-weighted density at a point off the curve.
inline Cplx sl_potential(const Curve& c, Cplx k, const CVector& density_w, const Vec2& z) {
    Cplx acc = 0.0;
    const Real q = c.grid_step() / c.lambda;
    for (int j = 0; j < c.size(); ++j) {
        const Vec2 d = z - c.x[std::size_t(j)];
        acc += 0.25 * iu * hankel_h0_h1(k * d.norm()).h0 * density_w[j];
    }
    return acc * q;
}

/// Double-layer potential of a nodal density at a point off the curve.
inline Cplx dl_potential(const Curve& c, Cplx k, const CVector& density, const Vec2& z) {
    Cplx acc = 0.0;
    const Real q = c.grid_step();
    for (int j = 0; j < c.size(); ++j) {
        const Vec2 d = z - c.x[std::size_t(j)];
        const Real r = d.norm();
        const Vec2 nuj = c.xp[std::size_t(j)].rot_m90();
        acc += 0.25 * iu * k * hankel_h0_h1(k * r).h1 * d.dot(nuj) / r * density[j];
    }
    return acc * q;
}

/// Field of the representation u = -DL(u) + SL(du/dn) from Cauchy data
/// (dirichlet nodal, neumann U-weighted, both unscaled by permittivity).
inline Cplx field_from_cauchy(const Curve& c, Cplx k, const CVector& dirichlet,
                              const CVector& neumann_w, const Vec2& z) {
    return sl_potential(c, k, neumann_w, z) - dl_potential(c, k, dirichlet, z);
}

// ---------------------------------------------------------------------------
// Far fields: u ~ e^{ik|x|}/sqrt(|x|) u_inf(xhat), c(k) = e^{i pi/4}/sqrt(8 pi k)

inline Cplx farfield_constant(Real k) {
    return std::polar(1.0, 0.25 * pi) / std::sqrt(8.0 * pi * k);
}

inline std::vector<Vec2> farfield_directions(int count) {
    if (count < 1) throw std::invalid_argument("far field needs at least one direction");
    std::vector<Vec2> d(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const Real a = 2.0 * pi * i / count;
        d[std::size_t(i)] = {std::cos(a), std::sin(a)};
    }
    return d;
}

/// Far field of SL(neumann_w) - DL(dirichlet) on the given directions.
inline CVector farfield_from_cauchy(const Curve& c, Real k, const CVector& dirichlet,
                                    const CVector& neumann_w, const std::vector<Vec2>& dirs) {
    const Cplx cst = farfield_constant(k);
    CVector out = CVector::Zero(Eigen::Index(dirs.size()));
    const Real q = c.grid_step();
    for (std::size_t m = 0; m < dirs.size(); ++m) {
        const Vec2 xh = dirs[m];
        Cplx acc = 0.0;
        for (int j = 0; j < c.size(); ++j) {
            const Cplx ph = std::exp(-iu * k * xh.dot(c.x[std::size_t(j)]));
            const Vec2 nuj = c.xp[std::size_t(j)].rot_m90();
            acc += ph * (neumann_w[j] / c.lambda + iu * k * xh.dot(nuj) * dirichlet[j]);
        }
        out[Eigen::Index(m)] = cst * q * acc;
    }
    return out;
}

/// Far field of a single-layer density alone (U-weighted).
inline CVector farfield_sl(const Curve& c, Real k, const CVector& density_w,
                           const std::vector<Vec2>& dirs) {
    return farfield_from_cauchy(c, k, CVector::Zero(c.size()), density_w, dirs);
}

/// Max far-field discrepancy normalized by the reference maximum.
inline Real farfield_error(const CVector& u, const CVector& ref) {
    const Real scale = ref.cwiseAbs().maxCoeff();
    return (u - ref).cwiseAbs().maxCoeff() / scale;
}

// ---------------------------------------------------------------------------
// Green's identity self test

struct GreensResidual {
    Real residual = 0.0;
    bool probes_near_boundary = false;
};

/// With u = G_k(. - y) for y outside the subdomain, the interior identity
/// u = -DL(u|) + SL(du/dn|) is exact; returns the max mismatch over probes.
inline GreensResidual greens_identity_residual(const Curve& c, Cplx k, const Vec2& y,
                                               const std::vector<Vec2>& probes) {
    const int n = c.size();
    CVector dir(n), neu(n);
    for (int j = 0; j < n; ++j) {
        const Vec2 d = c.x[std::size_t(j)] - y;
        dir[j] = greens_function(k, d);
        const auto [gx, gy] = greens_gradient(k, d);
        neu[j] = (gx * c.normal[std::size_t(j)].x + gy * c.normal[std::size_t(j)].y) *
                 c.what[std::size_t(j)];
    }
    GreensResidual out;
    Real minsep = std::numeric_limits<Real>::max();
    for (const Vec2& z : probes) {
        for (int j = 0; j < n; ++j) minsep = std::min(minsep, (z - c.x[std::size_t(j)]).norm());
        const Cplx u = greens_function(k, z - y);
        const Cplx rep = field_from_cauchy(c, k, dir, neu, z);
        out.residual = std::max(out.residual, std::abs(u - rep));
    }
    out.probes_near_boundary = minsep < 3.0 * 2.0 * pi / n; // under ~3 mesh spacings
    return out;
}

} // namespace helmtrace
