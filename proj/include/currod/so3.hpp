#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace currod {

using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace so3 {

/// Skew matrix of a vector: skew(a)*x == a.cross(x).
inline Matrix3d skew(const Vector3d& a) {
    Matrix3d s;
    s <<     0, -a(2),  a(1),
          a(2),     0, -a(0),
         -a(1),  a(0),     0;
    return s;
}

/// Axis vector of a skew matrix (inverse of skew()).
inline Vector3d axis(const Matrix3d& s) {
    return Vector3d(s(2, 1), s(0, 2), s(1, 0));
}

inline Matrix3d symmetrize(const Matrix3d& m) { return 0.5 * (m + m.transpose()); }
inline Matrix3d skew_part(const Matrix3d& m) { return 0.5 * (m - m.transpose()); }

// sin(t)/t and (1-cos(t))/t^2 with series fallbacks near t = 0.
inline double sinc(double t) {
    if (std::abs(t) < 1e-4) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

inline double cosc(double t) {
    if (std::abs(t) < 1e-4) {
        const double t2 = t * t;
        return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    }
    return (1.0 - std::cos(t)) / (t * t);
}

// (t - sin(t))/t^3, series near 0.
inline double sinc3(double t) {
    if (std::abs(t) < 1e-4) {
        const double t2 = t * t;
        return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    }
    return (t - std::sin(t)) / (t * t * t);
}

/// Rodrigues formula for the rotation exp(skew(r)).
inline Matrix3d exp(const Vector3d& r) {
    const double th = r.norm();
    const Matrix3d K = skew(r);
    return Matrix3d::Identity() + sinc(th) * K + cosc(th) * K * K;
}

/// Exponential of a 3x3 skew matrix. The input is skew-symmetrized first,
/// so the result is a rotation for any input.
inline Matrix3d exp_skew(const Matrix3d& a) {
    return exp(axis(skew_part(a)));
}

/// Right Jacobian of SO(3): d/dt exp(skew(r(t))) = exp(skew(r)) * skew(Jr(r) * r').
inline Matrix3d right_jacobian(const Vector3d& r) {
    const double th = r.norm();
    const Matrix3d K = skew(r);
    return Matrix3d::Identity() - cosc(th) * K + sinc3(th) * K * K;
}

/// Derivative of s -> exp(skew(r(s))) given r and r' at a point.
inline Matrix3d exp_derivative(const Vector3d& r, const Vector3d& rdot) {
    return exp(r) * skew(right_jacobian(r) * rdot);
}

/// Nearest rotation to m (polar factor), via SVD with det correction.
inline Matrix3d project(const Matrix3d& m) {
    Eigen::JacobiSVD<Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0) {
        Matrix3d flip = Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

inline double orthonormality_defect(const Matrix3d& r) {
    return (r.transpose() * r - Matrix3d::Identity()).norm();
}

/// Squared distance of f to SO(3). For det f < 0 the smallest singular
/// value enters with flipped sign, matching dist^2(F, SO(3)).
inline double dist2_SO3(const Matrix3d& f) {
    Eigen::JacobiSVD<Matrix3d> svd(f);
    Vector3d s = svd.singularValues();
    if (f.determinant() < 0) s(2) = -s(2);
    const Vector3d d = s - Vector3d::Ones();
    return d.squaredNorm();
}

} // namespace so3
} // namespace currod
