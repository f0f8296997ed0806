// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Calderon block operators per subdomain and the trace-exchange maps between
// adjacent subdomain boundaries. Cauchy data is stored as (u, eps^{-1} U du/dn)
// with the canonical interface weight U, so exchanging data across matched
// meshes is a pure signed index map.

#include <utility>
#include <vector>

#include "helmtrace/bio.hpp"
#include "helmtrace/geometry.hpp"
#include "helmtrace/scenario.hpp"

namespace helmtrace {

/// Paired Dirichlet / weighted scaled-Neumann samples on one curve.
struct CauchyTrace {
    CVector dirichlet; // u at nodes
    CVector neumann_w; // eps^{-1} U du/dn at nodes

    CVector stacked() const {
        CVector v(dirichlet.size() + neumann_w.size());
        v << dirichlet, neumann_w;
        return v;
    }
    static CauchyTrace split(const CVector& v) {
        const Eigen::Index n = v.size() / 2;
        return {v.head(n), v.tail(n)};
    }
};

/// Incident plane-wave Cauchy data on a curve, in the curve's own normal.
inline CauchyTrace plane_wave_trace(const Scenario& s, const Curve& c) {
    const int n = c.size();
    CauchyTrace t;
    t.dirichlet.resize(n);
    t.neumann_w.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 x = c.x[std::size_t(i)];
        t.dirichlet[i] = plane_wave_value(s, x);
        const auto [gx, gy] = plane_wave_gradient(s, x);
        t.neumann_w[i] = (gx * c.normal[std::size_t(i)].x + gy * c.normal[std::size_t(i)].y) *
                         c.what[std::size_t(i)] / s.eps(0);
    }
    return t;
}

/// 2N x 2N Calderon block [[K, -eps S], [N/eps, -K^T]] acting on stacked
/// Cauchy data; squares to I/4 up to discretization error.
struct CalderonBlock {
    int domain = -1;
    Real eps = 1.0;
    CMatrix C;
};

inline CalderonBlock calderon_block(const Geometry& g, int domain, const Medium& medium,
                                    const BoundaryOperators* precomputed = nullptr) {
    const Curve& c = g.curves[std::size_t(domain)];
    BoundaryOperators local;
    if (!precomputed) {
        local = assemble_operators(g, domain, Cplx(medium.wavenumber));
        precomputed = &local;
    }
    const int n = c.size();
    CalderonBlock b;
    b.domain = c.domain;
    b.eps = medium.epsilon;
    b.C.resize(2 * n, 2 * n);
    b.C.topLeftCorner(n, n) = precomputed->K;
    b.C.topRightCorner(n, n) = -medium.epsilon * precomputed->S;
    b.C.bottomLeftCorner(n, n) = precomputed->N / medium.epsilon;
    b.C.bottomRightCorner(n, n) = -precomputed->KT;
    return b;
}

/// Aligned node pairs (node index in curve j, node index in curve l) over all
/// interfaces the two subdomains share.
inline std::vector<std::pair<int, int>> exchange_pairs(const Geometry& g, int j, int l) {
    const Interface& f = g.iface(j, l);
    const auto& sj = f.side(j);
    const auto& sl = f.side(l);
    std::vector<std::pair<int, int>> out;
    out.reserve(sj.size());
    for (std::size_t k = 0; k < sj.size(); ++k) out.emplace_back(sj[k], sl[k]);
    return out;
}

/// Dirichlet restriction-extension X_{jl}: data on curve l -> curve j,
/// supported on the shared interface, zero elsewhere.
inline CMatrix exchange_dirichlet_matrix(const Geometry& g, int j, int l) {
    CMatrix x = CMatrix::Zero(g.curves[std::size_t(j)].size(), g.curves[std::size_t(l)].size());
    for (const auto& [dj, sl] : exchange_pairs(g, j, l)) x(dj, sl) = 1.0;
    return x;
}

/// Full exchange block on stacked Cauchy data: Dirichlet copied, weighted
/// Neumann negated (opposite normals on the shared interface).
inline CMatrix exchange_block(const Geometry& g, int j, int l) {
    const int nj = g.curves[std::size_t(j)].size();
    const int nl = g.curves[std::size_t(l)].size();
    CMatrix x = CMatrix::Zero(2 * nj, 2 * nl);
    for (const auto& [dj, sl] : exchange_pairs(g, j, l)) {
        x(dj, sl) = 1.0;
        x(nj + dj, nl + sl) = -1.0;
    }
    return x;
}

/// Apply the exchange without materializing the matrix.
inline CauchyTrace exchange_apply(const Geometry& g, int j, int l, const CauchyTrace& data_l) {
    const int nj = g.curves[std::size_t(j)].size();
    CauchyTrace out;
    out.dirichlet = CVector::Zero(nj);
    out.neumann_w = CVector::Zero(nj);
    for (const auto& [dj, sl] : exchange_pairs(g, j, l)) {
        out.dirichlet[dj] = data_l.dirichlet[sl];
        out.neumann_w[dj] = -data_l.neumann_w[sl];
    }
    return out;
}

} // namespace helmtrace
