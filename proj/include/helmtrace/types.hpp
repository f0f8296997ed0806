// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>
#include <Eigen/Dense>

namespace helmtrace {

using Real = double;
using Cplx = std::complex<Real>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr Real pi = 3.14159265358979323846;
inline constexpr Cplx iu{0.0, 1.0};

/// Plane point / 2-vector.
struct Vec2 {
    Real x = 0.0, y = 0.0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(Real s) const { return {x * s, y * s}; }
    Real dot(const Vec2& o) const { return x * o.x + y * o.y; }
    Real norm() const { return std::hypot(x, y); }
    /// Rotate by -90 degrees: (x,y) -> (y,-x).
    Vec2 rot_m90() const { return {y, -x}; }
};

inline Vec2 operator*(Real s, const Vec2& v) { return v * s; }

} // namespace helmtrace
