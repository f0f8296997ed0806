// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Non-restarted GMRES with modified Gram-Schmidt orthogonalization.
// Iteration counts are part of the reported results, so there is no
// restarting and no right-preconditioning indirection: callers compose
// preconditioners into the operator callback.

#include <functional>
#include <vector>

#include "helmtrace/types.hpp"

namespace helmtrace {

struct GmresReport {
    CVector solution;
    int iterations = 0;
    double final_residual = 0.0;            // relative to ||rhs||
    std::vector<double> residual_history;   // one entry per iteration
    bool converged = false;
};

using LinearOperator = std::function<CVector(const CVector&)>;

inline GmresReport gmres(const LinearOperator& apply, const CVector& rhs, double tol, int maxit) {
    const Eigen::Index n = rhs.size();
    GmresReport rep;
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        rep.solution = CVector::Zero(n);
        rep.converged = true;
        return rep;
    }

    std::vector<CVector> basis;
    basis.push_back(rhs / bnorm);
    std::vector<std::vector<Cplx>> h; // h[j] holds column j, length j+2
    std::vector<Cplx> cs, sn;         // Givens rotations
    std::vector<Cplx> g;              // rotated rhs of the least-squares problem
    g.push_back(Cplx(bnorm));

    double res = 1.0;
    int j = 0;
    for (; j < maxit; ++j) {
        CVector w = apply(basis[std::size_t(j)]);
        std::vector<Cplx> hj(std::size_t(j) + 2, Cplx(0));
        for (int i = 0; i <= j; ++i) {
            const Cplx hij = basis[std::size_t(i)].dot(w); // conjugated dot
            hj[std::size_t(i)] = hij;
            w -= hij * basis[std::size_t(i)];
        }
        const double wnorm = w.norm();
        hj[std::size_t(j) + 1] = wnorm;

        // apply accumulated rotations to the new column
        for (int i = 0; i < j; ++i) {
            const Cplx t = std::conj(cs[std::size_t(i)]) * hj[std::size_t(i)] +
                           std::conj(sn[std::size_t(i)]) * hj[std::size_t(i) + 1];
            hj[std::size_t(i) + 1] =
                -sn[std::size_t(i)] * hj[std::size_t(i)] + cs[std::size_t(i)] * hj[std::size_t(i) + 1];
            hj[std::size_t(i)] = t;
        }
        // new rotation annihilating the subdiagonal entry
        const Cplx a = hj[std::size_t(j)], b = hj[std::size_t(j) + 1];
        const double rr = std::sqrt(std::norm(a) + std::norm(b));
        Cplx c, s;
        if (rr == 0.0) {
            c = 1.0;
            s = 0.0;
        } else {
            c = a / rr;
            s = b / rr;
        }
        cs.push_back(c);
        sn.push_back(s);
        hj[std::size_t(j)] = std::conj(c) * a + std::conj(s) * b;
        hj[std::size_t(j) + 1] = 0.0;
        h.push_back(std::move(hj));

        g.push_back(-s * g[std::size_t(j)]);
        g[std::size_t(j)] = std::conj(c) * g[std::size_t(j)];

        res = std::abs(g[std::size_t(j) + 1]) / bnorm;
        rep.residual_history.push_back(res);
        if (res <= tol) {
            ++j;
            break;
        }
        if (wnorm == 0.0) { // happy breakdown: exact solution in the Krylov space
            ++j;
            break;
        }
        basis.push_back(w / wnorm);
    }

    const int m = j;
    // back substitution on the m x m triangular system
    std::vector<Cplx> y(std::size_t(m), Cplx(0));
    for (int i = m - 1; i >= 0; --i) {
        Cplx sum = g[std::size_t(i)];
        for (int k = i + 1; k < m; ++k) sum -= h[std::size_t(k)][std::size_t(i)] * y[std::size_t(k)];
        y[std::size_t(i)] = sum / h[std::size_t(i)][std::size_t(i)];
    }
    CVector x = CVector::Zero(n);
    for (int i = 0; i < m; ++i) x += y[std::size_t(i)] * basis[std::size_t(i)];

    rep.solution = x;
    rep.iterations = m;
    rep.final_residual = res;
    rep.converged = res <= tol;
    return rep;
}

inline GmresReport gmres(const CMatrix& a, const CVector& rhs, double tol, int maxit) {
    return gmres([&a](const CVector& v) { return CVector(a * v); }, rhs, tol, maxit);
}

} // namespace helmtrace
