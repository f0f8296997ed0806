// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense complex linear algebra used throughout: direct solves, inverses,
// spectra, and 2-norm helpers. Backed by Eigen; every routine keeps the
// contract (residual checks, condition errors) independent of the backend.

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "helmtrace/types.hpp"

namespace helmtrace {

/// Raised when a matrix is numerically singular; carries the estimate.
struct SingularMatrixError : std::runtime_error {
    double rcond_estimate;
    explicit SingularMatrixError(double rcond)
        : std::runtime_error("numerically singular matrix, rcond ~ " + std::to_string(rcond)),
          rcond_estimate(rcond) {}
};

/// LU factorization wrapper with a cheap singularity guard.
class DenseLu {
public:
    explicit DenseLu(const CMatrix& a) : lu_(a) {
        const auto& u = lu_.matrixLU();
        double dmin = std::numeric_limits<double>::max(), dmax = 0.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double d = std::abs(u(i, i));
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        rcond_ = dmax > 0.0 ? dmin / dmax : 0.0;
        if (!(rcond_ > 1e-14)) throw SingularMatrixError(rcond_);
    }

    CVector solve(const CVector& b) const { return lu_.solve(b); }
    CMatrix solve(const CMatrix& b) const { return lu_.solve(b); }
    double rcond_estimate() const { return rcond_; }

private:
    Eigen::PartialPivLU<CMatrix> lu_;
    double rcond_ = 0.0;
};

inline CVector dense_solve(const CMatrix& a, const CVector& b) { return DenseLu(a).solve(b); }

inline CMatrix dense_inverse(const CMatrix& a) {
    const CMatrix id = CMatrix::Identity(a.rows(), a.cols());
    return DenseLu(a).solve(id);
}

/// Full complex spectrum of a general square matrix.
inline CVector eigenvalues(const CMatrix& a) {
    Eigen::ComplexEigenSolver<CMatrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration failed");
    return es.eigenvalues();
}

/// Largest singular value (spectral norm) by power iteration on A^H A.
inline double matrix_norm2(const CMatrix& a) {
    const Eigen::Index n = a.cols();
    if (n == 0) return 0.0;
    CVector v = CVector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] += Cplx(0.3 * std::sin(1.7 * double(i)), 0.1);
    v /= v.norm();
    double s = 0.0, prev = -1.0;
    for (int it = 0; it < 300; ++it) {
        CVector w = a.adjoint() * (a * v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        s = std::sqrt(nw);
        v = w / nw;
        if (std::abs(s - prev) < 1e-10 * s + 1e-300) break;
        prev = s;
    }
    return s;
}

/// Smallest singular value via inverse power iteration with an LU solve.
inline double smallest_singular_value(const CMatrix& a) {
    Eigen::PartialPivLU<CMatrix> lu(a);
    // detect exact singularity first
    double dmin = std::numeric_limits<double>::max();
    for (Eigen::Index i = 0; i < a.rows(); ++i) dmin = std::min(dmin, std::abs(lu.matrixLU()(i, i)));
    if (dmin == 0.0) return 0.0;
    const Eigen::Index n = a.cols();
    CVector v = CVector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] += Cplx(0.2 * std::cos(2.3 * double(i)), 0.15);
    v /= v.norm();
    double s = 0.0, prev = -1.0;
    for (int it = 0; it < 300; ++it) {
        CVector w = lu.solve(v);
        w = lu.adjoint().solve(w); // (A^H A)^{-1} v
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        s = 1.0 / std::sqrt(nw);
        v = w / nw;
        if (std::abs(s - prev) < 1e-10 * s + 1e-300) break;
        prev = s;
    }
    return s;
}

/// Numerical rank at a relative threshold (full SVD; keep inputs modest).
inline int numerical_rank(const CMatrix& a, double rel_tol = 1e-10) {
    Eigen::BDCSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double thresh = rel_tol * s(0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thresh) ++r;
    return r;
}

} // namespace helmtrace
