// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "helmtrace/bio.hpp"
#include "oracles.hpp"

using namespace helmtrace;

namespace {

/// Apply an assembled operator to a Fourier mode on the unit circle and
/// return the Rayleigh quotient (the discrete eigenvalue).
Cplx circle_eigenvalue(const Curve& c, const CMatrix& op, int m, bool weighted_in,
                       bool weighted_out) {
    const int n = c.size();
    CVector phi(n);
    for (int i = 0; i < n; ++i) {
        const Real theta = std::atan2(c.x[std::size_t(i)].y, c.x[std::size_t(i)].x);
        phi[i] = std::polar(1.0, m * theta);
        if (weighted_in) phi[i] *= c.what[std::size_t(i)];
    }
    CVector out = op * phi;
    Cplx num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        Cplx mode = phi[i];
        if (weighted_in && !weighted_out) mode /= c.what[std::size_t(i)];
        if (!weighted_in && weighted_out) mode *= c.what[std::size_t(i)];
        num += std::conj(mode) * out[i];
        den += std::conj(mode) * mode;
    }
    return num / den;
}

} // namespace

TEST_SUITE("bio") {

TEST_CASE("circle spectra of all four operators match separation of variables") {
    const int n = 128;
    Geometry g = build_geometry(GeometryKind::single_disk, n, 3);
    const Curve& c = g.curves[1];
    const Real k = 1.0;
    const auto ops = assemble_operators(g, 1, Cplx(k));
    for (int m = 0; m <= 8; ++m) {
        const Cplx jm = bessel_jn(m, Cplx(k)), hm = hankel_h1n(m, Cplx(k));
        const Cplx jmp = bessel_jn_prime(m, Cplx(k)), hmp = hankel_h1n_prime(m, Cplx(k));
        const Cplx s_ref = 0.5 * iu * pi * jm * hm;
        const Cplx k_ref = 0.5 * iu * pi * k * jmp * hm - 0.5;
        const Cplx n_ref = 0.5 * iu * pi * k * k * jmp * hmp;
        CHECK(std::abs(circle_eigenvalue(c, ops.S, m, true, false) - s_ref) < 1e-8);
        CHECK(std::abs(circle_eigenvalue(c, ops.K, m, false, false) - k_ref) < 1e-8);
        CHECK(std::abs(circle_eigenvalue(c, ops.KT, m, true, true) - k_ref) < 1e-8);
        CHECK(std::abs(circle_eigenvalue(c, ops.N, m, false, true) - n_ref) < 1e-8);
    }
}

TEST_CASE("K equals K^T on the circle (kernel symmetry)") {
    const int n = 96;
    Geometry g = build_geometry(GeometryKind::single_disk, n, 3);
    const Curve& c = g.curves[1];
    const auto ops = assemble_operators(g, 1, Cplx(2.0));
    CHECK((ops.K - ops.KT).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("weighted and unweighted conventions differ by the diagonal weight") {
    const int n = 24;
    Geometry g = build_geometry(GeometryKind::three_subdomain_halfdisks, n, 3);
    const Curve& c = g.curves[1];
    const auto ops = assemble_operators(g, 1, Cplx(2.0));
    CVector phi(c.size());
    for (int i = 0; i < c.size(); ++i) phi[i] = Cplx(std::sin(0.37 * i), std::cos(0.21 * i));
    CVector wdiag(c.size());
    for (int i = 0; i < c.size(); ++i) wdiag[i] = c.what[std::size_t(i)];
    const CMatrix d = wdiag.asDiagonal();
    const CVector wphi = d * phi;
    CHECK(((ops.S * wphi) - (ops.S * d) * phi).norm() < 1e-13 * wphi.norm());
}

TEST_CASE("Green's identity on the half disk converges spectrally") {
    const Vec2 y{0.5, 2.0}; // outside the upper half disk
    const std::vector<Vec2> probes = {{0.0, 0.5}, {-0.3, 0.3}, {0.4, 0.2}, {0.0, 0.15}};
    const Cplx k(4.0, 0.0);
    Real prev = 1e9;
    for (int n : {32, 64, 128, 256}) {
        Geometry g = build_geometry(GeometryKind::three_subdomain_halfdisks, n, 3);
        const auto res = greens_identity_residual(g.curves[1], k, y, probes);
        CHECK(res.residual < prev);
        if (n >= 64) CHECK(prev / res.residual > 10.0);
        prev = res.residual;
        if (n == 256) CHECK(res.residual < 1e-8);
    }
    Geometry g = build_geometry(GeometryKind::three_subdomain_halfdisks, 256, 3);
    const auto res = greens_identity_residual(g.curves[1], Cplx(4.0, 0.5), y, probes);
    CHECK(res.residual < 1e-8);
    const auto near = greens_identity_residual(g.curves[1], k, y, {{0.0, 0.999}});
    CHECK(near.probes_near_boundary);
}

TEST_CASE("Green's identity on the exterior curve (radiating case)") {
    const Vec2 y{0.2, -0.1}; // inside the disk = outside the exterior domain
    const std::vector<Vec2> probes = {{1.7, 0.4}, {0.0, -2.5}, {-3.0, 1.0}};
    Geometry g = build_geometry(GeometryKind::three_subdomain_halfdisks, 128, 3);
    const auto res = greens_identity_residual(g.curves[0], Cplx(2.0), y, probes);
    CHECK(res.residual < 1e-9);
}

TEST_CASE("monopole far field is isotropic") {
    const int n = 64;
    Geometry g = build_geometry(GeometryKind::single_disk, n, 3);
    const Curve& c0 = g.curves[0];
    const Real k = 2.0;
    CVector dir(c0.size()), neu(c0.size());
    for (int j = 0; j < c0.size(); ++j) {
        const Vec2 x = c0.x[std::size_t(j)];
        dir[j] = greens_function(Cplx(k), x);
        const auto [gx, gy] = greens_gradient(Cplx(k), x);
        neu[j] = (gx * c0.normal[std::size_t(j)].x + gy * c0.normal[std::size_t(j)].y) *
                 c0.what[std::size_t(j)];
    }
    const CVector ff = farfield_from_cauchy(c0, k, dir, neu, farfield_directions(64));
    const Real mean = ff.cwiseAbs().mean();
    for (int i = 0; i < ff.size(); ++i) CHECK(std::abs(std::abs(ff[i]) - mean) < 1e-10);
}

TEST_CASE("rotating a density rotates the far field") {
    const int n = 128, shift = 4;
    Geometry g = build_geometry(GeometryKind::single_disk, n, 3);
    const Curve& c = g.curves[1];
    CVector rho(n), rho_rot(n);
    rho_rot.setZero();
    for (int j = 0; j < n; ++j) {
        const Real t = c.t(j);
        rho[j] = std::exp(std::sin(t)) + iu * std::cos(2.0 * t);
    }
    for (int j = 0; j < n; ++j) rho_rot[(j + shift) % n] = rho[j];
    const Real k = 3.0;
    const CVector f1 = farfield_sl(c, k, rho, farfield_directions(n));
    const CVector f2 = farfield_sl(c, k, rho_rot, farfield_directions(n));
    Real dev = 0.0;
    for (int m = 0; m < n; ++m) dev = std::max(dev, std::abs(f2[(m + shift) % n] - f1[m]));
    CHECK(dev < 1e-9);
}

TEST_CASE("disk transmission far field matches the series oracle") {
    const int n = 128;
    Geometry g = build_geometry(GeometryKind::single_disk, n, 3);
    const Curve& c0 = g.curves[0];
    testing::DiskSeries mie(1.0, 1.0, 4.0, {1.0, 0.0}, 30);
    CVector dir(c0.size()), neu(c0.size());
    for (int j = 0; j < c0.size(); ++j) {
        const Vec2 x = c0.x[std::size_t(j)];
        dir[j] = mie.scattered(x);
        neu[j] = -mie.scattered_dr(x) * c0.what[std::size_t(j)]; // n0 = -radial
    }
    const int nd = 256;
    const CVector ff = farfield_from_cauchy(c0, mie.k0, dir, neu, farfield_directions(nd));
    const CVector ref = mie.farfield_grid(nd);
    CHECK(farfield_error(ff, ref) < 1e-6);
}

TEST_CASE("near field from Cauchy data matches the series oracle off the disk") {
    const int n = 128;
    Geometry g = build_geometry(GeometryKind::single_disk, n, 3);
    const Curve &c0 = g.curves[0], &c1 = g.curves[1];
    testing::DiskSeries mie(1.0, 1.0, 4.0, {1.0, 0.0}, 30);
    CVector d0(c0.size()), q0(c0.size());
    for (int j = 0; j < c0.size(); ++j) {
        const Vec2 x = c0.x[std::size_t(j)];
        d0[j] = mie.scattered(x);
        q0[j] = -mie.scattered_dr(x) * c0.what[std::size_t(j)];
    }
    for (const Vec2 z : {Vec2{1.5, 0.3}, Vec2{-0.2, 1.9}, Vec2{2.5, -2.0}}) {
        const Cplx u = field_from_cauchy(c0, Cplx(mie.k0), d0, q0, z);
        CHECK(std::abs(u - mie.scattered(z)) < 1e-6);
    }
    CVector d1(c1.size()), q1(c1.size());
    for (int j = 0; j < c1.size(); ++j) {
        const Vec2 x = c1.x[std::size_t(j)];
        d1[j] = mie.interior(x);
        q1[j] = mie.interior_dr(x) * c1.what[std::size_t(j)];
    }
    for (const Vec2 z : {Vec2{0.3, 0.2}, Vec2{-0.5, 0.1}, Vec2{0.0, -0.6}}) {
        const Cplx u = field_from_cauchy(c1, Cplx(mie.k1), d1, q1, z);
        CHECK(std::abs(u - mie.interior(z)) < 1e-6);
    }
}

TEST_CASE("k = 0 is rejected") {
    Geometry g = build_geometry(GeometryKind::single_disk, 16, 3);
    CHECK_THROWS_AS((void)assemble_bio(BioKind::single_layer, g, 1, Cplx(0.0)),
                    std::invalid_argument);
}

} // TEST_SUITE
