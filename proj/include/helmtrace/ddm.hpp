// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Non-overlapping domain decomposition with classical or generalized Robin
// transmission data. The global fixed-point system (I + A) f = g couples
// per-subdomain Robin-to-Robin maps through interface index maps; unknowns
// are interface-ordered canonical-weighted Robin data
//   f_j = eps_j^{-1} U du/dn_j + T_j u_j   on each subdomain boundary piece.
// The classical variant additionally supports direct hierarchical Schur
// elimination of interior-interface pairs: merging two subdomain RtR maps
// costs one dense inverse of I - B_gg A_gg on the shared interface, and the
// merged object is itself an RtR map. The reduced exterior equation
// (I - S_int S_0) f_0 = ... is solved by GMRES or dense LU.

#include <memory>
#include <vector>

#include "helmtrace/gmres.hpp"
#include "helmtrace/rtr.hpp"

namespace helmtrace {

enum class DdmVariant { classical, dtnr, gsqr };

inline ImpedanceKind impedance_of(DdmVariant v) {
    switch (v) {
        case DdmVariant::classical: return ImpedanceKind::classical;
        case DdmVariant::dtnr: return ImpedanceKind::dtn_blend;
        case DdmVariant::gsqr: return ImpedanceKind::sqrt_blend;
    }
    throw std::logic_error("unknown ddm variant");
}

/// Interface-ordered unknown layout. Interior pairs come first, then the
/// exterior-facing data of each interior subdomain, then the full exterior
/// vector f_0 in curve-0 node order.
struct DdmLayout {
    struct Block {
        int domain;       // whose Robin data
        int iface;        // -1 for the full exterior block
        int offset, size;
    };
    std::vector<Block> blocks;
    int dim = 0;

    int block_index(int domain, int iface) const {
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (blocks[b].domain == domain && blocks[b].iface == iface) return int(b);
        throw std::logic_error("no ddm block for domain " + std::to_string(domain));
    }
};

inline DdmLayout make_ddm_layout(const Geometry& g) {
    DdmLayout layout;
    std::vector<std::pair<int, int>> order; // (domain, iface)
    const int m = int(g.curves.size());
    if (g.kind == GeometryKind::five_subdomain_quadrants) {
        const int g12 = g.interface_index(InterfaceId(1, 2)),
                  g34 = g.interface_index(InterfaceId(3, 4)),
                  g23 = g.interface_index(InterfaceId(2, 3)),
                  g14 = g.interface_index(InterfaceId(1, 4));
        order = {{1, g12}, {2, g12}, {3, g34}, {4, g34},
                 {2, g23}, {1, g14}, {3, g23}, {4, g14}};
        for (int j = 1; j <= 4; ++j) order.emplace_back(j, g.interface_index(InterfaceId(0, j)));
    } else {
        for (std::size_t gi = 0; gi < g.interfaces.size(); ++gi) {
            const Interface& f = g.interfaces[gi];
            if (f.id.lo == 0) continue; // interior pairs first
            order.emplace_back(f.id.lo, int(gi));
            order.emplace_back(f.id.hi, int(gi));
        }
        for (int j = 1; j < m; ++j) order.emplace_back(j, g.interface_index(InterfaceId(0, j)));
    }
    int off = 0;
    for (auto [dom, gi] : order) {
        layout.blocks.push_back({dom, gi, off, g.interfaces[std::size_t(gi)].size()});
        off += g.interfaces[std::size_t(gi)].size();
    }
    layout.blocks.push_back({0, -1, off, g.curves[0].size()});
    layout.dim = off + g.curves[0].size();
    return layout;
}

struct DdmSystem {
    Scenario scen;
    const Geometry* geom = nullptr;
    DdmVariant variant = DdmVariant::classical;
    DdmLayout layout;
    std::vector<SubdomainSolver> solvers;
    CVector rhs;

    /// Full-curve Robin data of one subdomain gathered from the f-vector.
    CVector gather(int domain, const CVector& f) const {
        const Geometry& g = *geom;
        const Curve& c = g.curves[std::size_t(domain)];
        CVector psi = CVector::Zero(c.size());
        if (domain == 0) {
            const auto& blk = layout.blocks.back();
            psi = f.segment(blk.offset, blk.size);
            return psi;
        }
        for (const auto& blk : layout.blocks) {
            if (blk.domain != domain || blk.iface < 0) continue;
            const auto& side = g.interfaces[std::size_t(blk.iface)].side(domain);
            for (int r = 0; r < blk.size; ++r) psi[side[std::size_t(r)]] = f[blk.offset + r];
        }
        return psi;
    }

    /// Apply (I + A) matrix-free through the per-subdomain dense maps.
    CVector apply(const CVector& f) const {
        const Geometry& g = *geom;
        const int m = int(g.curves.size());
        CVector out = f;
        std::vector<CVector> trace(static_cast<std::size_t>(m));
        std::vector<CVector> lift(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            const CVector psi = gather(j, f);
            if (variant == DdmVariant::classical) {
                lift[std::size_t(j)] = solvers[std::size_t(j)].Srtr * psi;
            } else {
                trace[std::size_t(j)] = solvers[std::size_t(j)].W * psi;
                lift[std::size_t(j)] =
                    solvers[std::size_t(j)].impedance.That * trace[std::size_t(j)] - psi;
            }
        }
        for (const auto& blk : layout.blocks) {
            if (blk.iface < 0) {
                // exterior rows couple to every interior neighbor
                for (std::size_t gi = 0; gi < g.interfaces.size(); ++gi) {
                    const Interface& fc = g.interfaces[gi];
                    if (fc.id.lo != 0) continue;
                    const int j = fc.id.hi;
                    const auto& side0 = fc.side(0);
                    const auto& sidej = fc.side(j);
                    for (std::size_t r = 0; r < side0.size(); ++r) {
                        if (variant == DdmVariant::classical) {
                            out[blk.offset + side0[r]] += lift[std::size_t(j)][sidej[r]];
                        } else {
                            out[blk.offset + side0[r]] -= lift[std::size_t(j)][sidej[r]];
                        }
                    }
                    if (variant != DdmVariant::classical) {
                        // receiver-side impedance acting on the neighbor trace
                        CVector udir = CVector::Zero(g.curves[0].size());
                        for (std::size_t r = 0; r < side0.size(); ++r)
                            udir[side0[r]] = trace[std::size_t(j)][sidej[r]];
                        const CVector t0 = solvers[0].impedance.That * udir;
                        for (std::size_t r = 0; r < side0.size(); ++r)
                            out[blk.offset + side0[r]] -= t0[side0[r]];
                    }
                }
                continue;
            }
            const Interface& fc = g.interfaces[std::size_t(blk.iface)];
            const int mdom = blk.domain;
            const int j = fc.other(mdom);
            const auto& sidem = fc.side(mdom);
            const auto& sidej = fc.side(j);
            if (variant == DdmVariant::classical) {
                for (int r = 0; r < blk.size; ++r)
                    out[blk.offset + r] += lift[std::size_t(j)][sidej[std::size_t(r)]];
            } else {
                CVector udir = CVector::Zero(g.curves[std::size_t(mdom)].size());
                for (int r = 0; r < blk.size; ++r)
                    udir[sidem[std::size_t(r)]] = trace[std::size_t(j)][sidej[std::size_t(r)]];
                const CVector tm = solvers[std::size_t(mdom)].impedance.That * udir;
                for (int r = 0; r < blk.size; ++r)
                    out[blk.offset + r] -=
                        lift[std::size_t(j)][sidej[std::size_t(r)]] + tm[sidem[std::size_t(r)]];
            }
        }
        return out;
    }

    /// Dense matrix of (I + A); for oracle comparisons at small sizes.
    CMatrix dense() const {
        CMatrix a(layout.dim, layout.dim);
        CVector e = CVector::Zero(layout.dim);
        for (int j = 0; j < layout.dim; ++j) {
            e[j] = 1.0;
            a.col(j) = apply(e);
            e[j] = 0.0;
        }
        return a;
    }
};

inline DdmSystem assemble_ddm(const Scenario& s, const Geometry& g, DdmVariant variant) {
    DdmSystem sys;
    sys.scen = s;
    sys.geom = &g;
    sys.variant = variant;
    sys.layout = make_ddm_layout(g);
    std::map<int, DtnMap> dtn_cache;
    for (int j = 0; j < int(g.curves.size()); ++j)
        sys.solvers.push_back(
            build_subdomain_solver(s, g, j, impedance_of(variant), &dtn_cache));

    // right-hand side from the incident plane wave on the exterior curve
    const CauchyTrace uinc = plane_wave_trace(s, g.curves[0]);
    sys.rhs = CVector::Zero(sys.layout.dim);
    const CMatrix& t0 = sys.solvers[0].impedance.That;
    const CVector t0u = t0 * uinc.dirichlet;
    for (const auto& blk : sys.layout.blocks) {
        if (blk.iface < 0) {
            // f_0 rows: -(eps0^{-1} du_inc + T_0 u_inc)
            for (int r = 0; r < blk.size; ++r)
                sys.rhs[blk.offset + r] = -uinc.neumann_w[r] - t0u[r];
            continue;
        }
        const Interface& fc = g.interfaces[std::size_t(blk.iface)];
        if (fc.id.lo != 0) continue; // interior pairs have zero data
        const int mdom = blk.domain;
        const auto& side0 = fc.side(0);
        const auto& sidem = fc.side(mdom);
        // -X(eps0^{-1} du_inc) + T_m(X u_inc)
        CVector udir = CVector::Zero(g.curves[std::size_t(mdom)].size());
        for (int r = 0; r < blk.size; ++r)
            udir[sidem[std::size_t(r)]] = uinc.dirichlet[side0[std::size_t(r)]];
        const CVector tm = sys.solvers[std::size_t(mdom)].impedance.That * udir;
        for (int r = 0; r < blk.size; ++r)
            sys.rhs[blk.offset + r] =
                -uinc.neumann_w[side0[std::size_t(r)]] + tm[sidem[std::size_t(r)]];
    }
    return sys;
}

struct DdmSolution {
    CVector f;
    std::vector<CauchyTrace> traces; // recovered per-subdomain Cauchy data
    GmresReport report;
};

/// Recover boundary traces from solved Robin data.
inline std::vector<CauchyTrace> ddm_recover(const DdmSystem& sys, const CVector& f) {
    const Geometry& g = *sys.geom;
    std::vector<CauchyTrace> out;
    for (int j = 0; j < int(g.curves.size()); ++j) {
        const CVector psi = sys.gather(j, f);
        CauchyTrace t;
        t.dirichlet = sys.solvers[std::size_t(j)].trace(psi);
        // psi - T u = eps^{-1} U du/dn, which is the stored Neumann convention
        t.neumann_w = psi - sys.solvers[std::size_t(j)].impedance.That * t.dirichlet;
        out.push_back(std::move(t));
    }
    return out;
}

inline DdmSolution solve_ddm_iterative(const DdmSystem& sys, Real tol, int maxit) {
    DdmSolution sol;
    sol.report = gmres([&](const CVector& v) { return sys.apply(v); }, sys.rhs, tol, maxit);
    sol.f = sol.report.solution;
    sol.traces = ddm_recover(sys, sol.f);
    return sol;
}

/// Scattered far field from the recovered exterior Cauchy data.
inline CVector ddm_farfield(const DdmSystem& sys, const DdmSolution& sol, int ndirs) {
    const Curve& c0 = sys.geom->curves[0];
    return farfield_from_cauchy(c0, sys.scen.k(0), sol.traces[0].dirichlet,
                                sys.scen.eps(0) * sol.traces[0].neumann_w,
                                farfield_directions(ndirs));
}

inline Cplx ddm_field(const DdmSystem& sys, const DdmSolution& sol, const Vec2& z) {
    const int j = subdomain_of_point(*sys.geom, z);
    const Curve& c = sys.geom->curves[std::size_t(j)];
    return field_from_cauchy(c, Cplx(sys.scen.k(j)), sol.traces[std::size_t(j)].dirichlet,
                             sys.scen.eps(j) * sol.traces[std::size_t(j)].neumann_w, z);
}

// ---------------------------------------------------------------------------
// Hierarchical Schur elimination (classical variant)

/// A merged Robin-to-Robin map on a union of subdomains: dense map from
/// stacked incoming data on the retained interfaces to outgoing data, plus
/// the back-substitution records of the merge that produced it.
struct MergedRtR {
    std::vector<std::pair<int, int>> blocks; // (domain, iface) retained
    std::vector<int> off;
    int dim = 0;
    CMatrix S;

    std::unique_ptr<MergedRtR> child_a, child_b;
    // merge records: indices of eliminated blocks in each child and the
    // solve pieces for back-substitution
    std::vector<int> elim_a, elim_b;
    CMatrix Mga, Mgb; // psi_a_g = Mga psi_a_r + Mgb psi_b_r
    CMatrix Agg, Agr; // psi_b_g = -(Agg psi_a_g + Agr psi_a_r)

    int block_index(int domain, int iface) const {
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (blocks[b].first == domain && blocks[b].second == iface) return int(b);
        throw std::logic_error("merged map: block not found");
    }
};

/// Leaf: one interior subdomain's RtR map partitioned by its interfaces.
inline std::unique_ptr<MergedRtR> rtr_leaf(const Geometry& g, const SubdomainSolver& sv) {
    auto node = std::make_unique<MergedRtR>();
    const int dom = sv.domain;
    std::vector<int> gids = g.interfaces_of(dom);
    int off = 0;
    std::vector<int> nodes;
    for (int gi : gids) {
        node->blocks.emplace_back(dom, gi);
        node->off.push_back(off);
        off += g.interfaces[std::size_t(gi)].size();
        for (int n : g.interfaces[std::size_t(gi)].side(dom)) nodes.push_back(n);
    }
    node->off.push_back(off);
    node->dim = off;
    node->S.resize(off, off);
    for (int r = 0; r < off; ++r)
        for (int c = 0; c < off; ++c)
            node->S(r, c) = sv.Srtr(nodes[std::size_t(r)], nodes[std::size_t(c)]);
    return node;
}

namespace detail {

inline CMatrix stack_rows(const MergedRtR& n, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
    int nr = 0, nc = 0;
    for (int b : rows) nr += n.off[std::size_t(b) + 1] - n.off[std::size_t(b)];
    for (int b : cols) nc += n.off[std::size_t(b) + 1] - n.off[std::size_t(b)];
    CMatrix out(nr, nc);
    int ro = 0;
    for (int rb : rows) {
        const int rs = n.off[std::size_t(rb)], rl = n.off[std::size_t(rb) + 1] - rs;
        int co = 0;
        for (int cb : cols) {
            const int cs = n.off[std::size_t(cb)], cl = n.off[std::size_t(cb) + 1] - cs;
            out.block(ro, co, rl, cl) = n.S.block(rs, cs, rl, cl);
            co += cl;
        }
        ro += rl;
    }
    return out;
}

inline std::vector<int> complement(int count, const std::vector<int>& elim) {
    std::vector<int> keep;
    for (int b = 0; b < count; ++b) {
        bool gone = false;
        for (int e : elim) gone |= (e == b);
        if (!gone) keep.push_back(b);
    }
    return keep;
}

} // namespace detail

/// Inverse policy for the merge: exact dense inverse or a truncated Neumann
/// series sum_{m<=n_trunc} (B_gg A_gg)^m.
struct MergeInverse {
    bool neumann = false;
    int n_trunc = 0;
};

/// Merge two maps by eliminating the Robin pairs on their shared interfaces.
inline std::unique_ptr<MergedRtR> merge_rtr(std::unique_ptr<MergedRtR> a,
                                            std::unique_ptr<MergedRtR> b,
                                            const std::vector<std::pair<int, int>>& shared_ab,
                                            const MergeInverse& inv = {}) {
    auto node = std::make_unique<MergedRtR>();
    for (auto [ba, bb] : shared_ab) {
        node->elim_a.push_back(ba);
        node->elim_b.push_back(bb);
    }
    const std::vector<int> keep_a = detail::complement(int(a->blocks.size()), node->elim_a);
    const std::vector<int> keep_b = detail::complement(int(b->blocks.size()), node->elim_b);

    const CMatrix agg = detail::stack_rows(*a, node->elim_a, node->elim_a);
    const CMatrix agr = detail::stack_rows(*a, node->elim_a, keep_a);
    const CMatrix arg = detail::stack_rows(*a, keep_a, node->elim_a);
    const CMatrix arr = detail::stack_rows(*a, keep_a, keep_a);
    const CMatrix bgg = detail::stack_rows(*b, node->elim_b, node->elim_b);
    const CMatrix bgr = detail::stack_rows(*b, node->elim_b, keep_b);
    const CMatrix brg = detail::stack_rows(*b, keep_b, node->elim_b);
    const CMatrix brr = detail::stack_rows(*b, keep_b, keep_b);

    const int gdim = int(agg.rows());
    const CMatrix coupling = bgg * agg; // S^b_gg S^a_gg on the shared data
    CMatrix dinv;
    if (inv.neumann) {
        dinv = CMatrix::Identity(gdim, gdim);
        CMatrix pw = CMatrix::Identity(gdim, gdim);
        for (int m = 1; m <= inv.n_trunc; ++m) {
            pw = coupling * pw;
            dinv += pw;
        }
    } else {
        try {
            dinv = dense_inverse(CMatrix::Identity(gdim, gdim) - coupling);
        } catch (const SingularMatrixError& e) {
            throw std::runtime_error(
                "merge_rtr: I - S S on the shared interface is numerically singular "
                "(rcond ~ " +
                std::to_string(e.rcond_estimate) + "), contradicting injectivity");
        }
    }
    node->Mga = dinv * (bgg * agr);
    node->Mgb = -dinv * bgr;
    node->Agg = agg;
    node->Agr = agr;

    // merged outgoing map on [retained_a ; retained_b]
    const int ra = int(arr.rows()), rb = int(brr.rows());
    node->S.resize(ra + rb, ra + rb);
    node->S.block(0, 0, ra, ra) = arr + arg * node->Mga;
    node->S.block(0, ra, ra, rb) = arg * node->Mgb;
    node->S.block(ra, 0, rb, ra) = -brg * (node->Agg * node->Mga + node->Agr);
    node->S.block(ra, ra, rb, rb) = brr - brg * (node->Agg * node->Mgb);

    int off = 0;
    for (int kb : keep_a) {
        node->blocks.push_back(a->blocks[std::size_t(kb)]);
        node->off.push_back(off);
        off += a->off[std::size_t(kb) + 1] - a->off[std::size_t(kb)];
    }
    for (int kb : keep_b) {
        node->blocks.push_back(b->blocks[std::size_t(kb)]);
        node->off.push_back(off);
        off += b->off[std::size_t(kb) + 1] - b->off[std::size_t(kb)];
    }
    node->off.push_back(off);
    node->dim = off;
    node->child_a = std::move(a);
    node->child_b = std::move(b);
    return node;
}

/// Back-substitute: from the merged node's incoming data, produce incoming
/// data for every (domain, iface) block in the subtree.
inline void backsubstitute(const MergedRtR& node, const CVector& psi,
                           std::vector<std::pair<std::pair<int, int>, CVector>>& out) {
    if (!node.child_a) {
        int off = 0;
        for (std::size_t b = 0; b < node.blocks.size(); ++b) {
            const int sz = node.off[b + 1] - node.off[b];
            out.emplace_back(node.blocks[b], psi.segment(off, sz));
            off += sz;
        }
        return;
    }
    const MergedRtR& a = *node.child_a;
    const MergedRtR& b = *node.child_b;
    const std::vector<int> keep_a = detail::complement(int(a.blocks.size()), node.elim_a);
    const std::vector<int> keep_b = detail::complement(int(b.blocks.size()), node.elim_b);
    int ra = 0;
    for (int kb : keep_a) ra += a.off[std::size_t(kb) + 1] - a.off[std::size_t(kb)];
    const CVector psi_ar = psi.head(ra);
    const CVector psi_br = psi.tail(psi.size() - ra);
    const CVector psi_ag = node.Mga * psi_ar + node.Mgb * psi_br;
    const CVector psi_bg = -(node.Agg * psi_ag + node.Agr * psi_ar);

    auto reassemble = [](const MergedRtR& child, const std::vector<int>& keep,
                         const std::vector<int>& elim, const CVector& retained,
                         const CVector& shared) {
        CVector full(child.dim);
        int roff = 0;
        for (int kb : keep) {
            const int sz = child.off[std::size_t(kb) + 1] - child.off[std::size_t(kb)];
            full.segment(child.off[std::size_t(kb)], sz) = retained.segment(roff, sz);
            roff += sz;
        }
        int goff = 0;
        for (int eb : elim) {
            const int sz = child.off[std::size_t(eb) + 1] - child.off[std::size_t(eb)];
            full.segment(child.off[std::size_t(eb)], sz) = shared.segment(goff, sz);
            goff += sz;
        }
        return full;
    };
    backsubstitute(a, reassemble(a, keep_a, node.elim_a, psi_ar, psi_ag), out);
    backsubstitute(b, reassemble(b, keep_b, node.elim_b, psi_br, psi_bg), out);
}

/// Merge all interior subdomains into one interior RtR map following the
/// preset elimination order; returns the tree root with exterior-facing
/// retained blocks.
inline std::unique_ptr<MergedRtR> schur_eliminate(const DdmSystem& sys,
                                                  const MergeInverse& inv = {},
                                                  bool alternate_order = false) {
    if (sys.variant != DdmVariant::classical)
        throw std::invalid_argument("schur elimination applies to the classical variant");
    const Geometry& g = *sys.geom;
    const int m = int(g.curves.size());
    if (m == 2) return rtr_leaf(g, sys.solvers[1]);
    if (m == 3) {
        auto n1 = rtr_leaf(g, sys.solvers[1]);
        auto n2 = rtr_leaf(g, sys.solvers[2]);
        const int g12 = g.interface_index(InterfaceId(1, 2));
        const std::vector<std::pair<int, int>> shared = {
            {n1->block_index(1, g12), n2->block_index(2, g12)}};
        return merge_rtr(std::move(n1), std::move(n2), shared, inv);
    }
    if (m == 5) {
        auto n1 = rtr_leaf(g, sys.solvers[1]);
        auto n2 = rtr_leaf(g, sys.solvers[2]);
        auto n3 = rtr_leaf(g, sys.solvers[3]);
        auto n4 = rtr_leaf(g, sys.solvers[4]);
        const int g12 = g.interface_index(InterfaceId(1, 2)),
                  g34 = g.interface_index(InterfaceId(3, 4)),
                  g23 = g.interface_index(InterfaceId(2, 3)),
                  g14 = g.interface_index(InterfaceId(1, 4));
        if (!alternate_order) {
            // pairs (1,2) and (3,4) first, then top against bottom
            std::vector<std::pair<int, int>> s12 = {
                {n1->block_index(1, g12), n2->block_index(2, g12)}};
            std::vector<std::pair<int, int>> s34 = {
                {n3->block_index(3, g34), n4->block_index(4, g34)}};
            auto i12 = merge_rtr(std::move(n1), std::move(n2), s12, inv);
            auto i34 = merge_rtr(std::move(n3), std::move(n4), s34, inv);
            const std::vector<std::pair<int, int>> shared = {
                {i12->block_index(2, g23), i34->block_index(3, g23)},
                {i12->block_index(1, g14), i34->block_index(4, g14)}};
            return merge_rtr(std::move(i12), std::move(i34), shared, inv);
        }
        // alternate association: left/right pairs first, then the vertical cut
        std::vector<std::pair<int, int>> s14 = {
            {n1->block_index(1, g14), n4->block_index(4, g14)}};
        std::vector<std::pair<int, int>> s23 = {
            {n2->block_index(2, g23), n3->block_index(3, g23)}};
        auto i14 = merge_rtr(std::move(n1), std::move(n4), s14, inv);
        auto i23 = merge_rtr(std::move(n2), std::move(n3), s23, inv);
        const std::vector<std::pair<int, int>> shared = {
            {i14->block_index(1, g12), i23->block_index(2, g12)},
            {i14->block_index(4, g34), i23->block_index(3, g34)}};
        return merge_rtr(std::move(i14), std::move(i23), shared, inv);
    }
    throw std::invalid_argument("schur elimination expects a preset geometry");
}

/// Outer reduced solve on the exterior Robin data. The exterior-facing data
/// of the merged interior map and the exterior RtR map close the system
/// (I - S_int S_0) f_0 = g_0 - S_int g_int.
struct SchurSolution {
    CVector f;                        // full interface-ordered solution
    GmresReport report;               // outer GMRES report (empty for direct)
    std::unique_ptr<MergedRtR> tree;  // merged interior map
};

inline SchurSolution solve_ddm_schur(const DdmSystem& sys, Real tol, int maxit,
                                     const MergeInverse& inv = {}, bool direct_outer = false,
                                     bool alternate_order = false) {
    const Geometry& g = *sys.geom;
    SchurSolution sol;
    sol.tree = schur_eliminate(sys, inv, alternate_order);
    const MergedRtR& sint = *sol.tree;

    // index maps between the merged blocks and curve-0 nodes
    const int n0 = g.curves[0].size();
    std::vector<int> to_curve0(std::size_t(sint.dim), -1);
    for (std::size_t b = 0; b < sint.blocks.size(); ++b) {
        const auto [dom, gi] = sint.blocks[b];
        const Interface& fc = g.interfaces[std::size_t(gi)];
        const auto& side0 = fc.side(0);
        for (int r = 0; r < fc.size(); ++r)
            to_curve0[std::size_t(sint.off[b] + r)] = side0[std::size_t(r)];
    }

    const auto& blk0 = sys.layout.blocks.back();
    const CVector rhs0 = sys.rhs.segment(blk0.offset, blk0.size);
    CVector rhs_int(sint.dim);
    for (std::size_t b = 0; b < sint.blocks.size(); ++b) {
        const auto [dom, gi] = sint.blocks[b];
        const int bi = sys.layout.block_index(dom, gi);
        rhs_int.segment(sint.off[b], sys.layout.blocks[std::size_t(bi)].size) =
            sys.rhs.segment(sys.layout.blocks[std::size_t(bi)].offset,
                            sys.layout.blocks[std::size_t(bi)].size);
    }

    const CMatrix& s0 = sys.solvers[0].Srtr;
    auto gather0 = [&](const CVector& v0) { // rows of S0 f0 at the interior blocks
        const CVector w = s0 * v0;
        CVector out(sint.dim);
        for (int i = 0; i < sint.dim; ++i) out[i] = w[to_curve0[std::size_t(i)]];
        return out;
    };
    auto scatter0 = [&](const CVector& vint) { // merged outputs onto curve 0
        CVector out = CVector::Zero(n0);
        for (int i = 0; i < sint.dim; ++i) out[to_curve0[std::size_t(i)]] = vint[i];
        return out;
    };

    auto outer_apply = [&](const CVector& f0) {
        return CVector(f0 - scatter0(sint.S * gather0(f0)));
    };
    const CVector outer_rhs = rhs0 - scatter0(sint.S * rhs_int);

    CVector f0;
    if (direct_outer) {
        CMatrix a(n0, n0);
        CVector e = CVector::Zero(n0);
        for (int j = 0; j < n0; ++j) {
            e[j] = 1.0;
            a.col(j) = outer_apply(e);
            e[j] = 0.0;
        }
        f0 = dense_solve(a, outer_rhs);
        sol.report.converged = true;
    } else {
        sol.report = gmres(outer_apply, outer_rhs, tol, maxit);
        f0 = sol.report.solution;
    }

    // back substitution: f_int = g_int - S0-rows f0, then down the tree
    const CVector fint = rhs_int - gather0(f0);
    std::vector<std::pair<std::pair<int, int>, CVector>> per_block;
    backsubstitute(sint, fint, per_block);

    sol.f = CVector::Zero(sys.layout.dim);
    sol.f.segment(blk0.offset, blk0.size) = f0;
    for (const auto& [key, data] : per_block) {
        const int bi = sys.layout.block_index(key.first, key.second);
        sol.f.segment(sys.layout.blocks[std::size_t(bi)].offset,
                      sys.layout.blocks[std::size_t(bi)].size) = data;
    }
    return sol;
}

} // namespace helmtrace
