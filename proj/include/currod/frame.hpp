#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "currod/curve.hpp"
#include "currod/so3.hpp"

namespace currod {

using Eigen::Matrix3d;

enum class FrameMode { RotationMinimizing, Frenet, PrescribedTwist };

/// Prescribed frame twist rate rho(s) and its derivative.
struct TwistSpec {
    std::function<double(double)> rho = [](double) { return 0.0; };
    std::function<double(double)> drho = [](double) { return 0.0; };
};

/// Frame data at one arclength location. Columns of R are (tau, nu2, nu3);
/// k2, k3, rho are the coefficients of the frame equations
///   tau' = k2 nu2 + k3 nu3,  nu2' = -k2 tau + rho nu3,  nu3' = -k3 tau - rho nu2.
struct FrameSample {
    double s = 0;
    Vector3d gamma = Vector3d::Zero();
    Matrix3d R = Matrix3d::Identity();
    double k2 = 0, k3 = 0, rho = 0;
    double dk2 = 0, dk3 = 0, drho = 0;

    Vector3d tau() const { return R.col(0); }
    Vector3d nu2() const { return R.col(1); }
    Vector3d nu3() const { return R.col(2); }

    /// C = R^T R', assembled from the coefficients.
    Matrix3d coefficient_matrix() const {
        Matrix3d c;
        c <<  0, -k2, -k3,
             k2,   0, -rho,
             k3, rho,    0;
        return c;
    }
    Matrix3d R_prime() const { return R * coefficient_matrix(); }
    Vector3d nu2_prime() const { return R * coefficient_matrix().col(1); }
    Vector3d nu3_prime() const { return R * coefficient_matrix().col(2); }
    double curvature() const { return std::hypot(k2, k3); }
};

/// Build an orthonormal matrix with first column t and a deterministic
/// choice of the remaining columns.
inline Matrix3d tangent_adapted_identity(const Vector3d& t) {
    Vector3d tn = t.normalized();
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(tn(i)) < std::abs(tn(least))) least = i;
    Vector3d n2 = (Vector3d::Unit(least) - tn(least) * tn).normalized();
    Matrix3d r;
    r.col(0) = tn;
    r.col(1) = n2;
    r.col(2) = tn.cross(n2);
    return r;
}

/// Curve with an adapted rotation field R0(s), sampled on a uniform
/// arclength grid and evaluable anywhere on [0, L]. Immutable once built.
class FramedCurve {
public:
    FramedCurve(CurvePtr curve, FrameMode mode, int n_segments,
                std::optional<Matrix3d> initial = std::nullopt, TwistSpec twist = {},
                int substeps = 8)
        : curve_(std::move(curve)), mode_(mode), n_(n_segments), twist_(std::move(twist)),
          substeps_(substeps) {
        if (!curve_) throw std::invalid_argument("frame: null curve");
        if (n_ < 2) throw std::invalid_argument("frame: need at least 2 segments");
        len_ = curve_->length();
        ds_ = len_ / n_;
        closed_ = curve_->closed();
        rho_corr_ = 0.0;
        if (mode_ == FrameMode::Frenet) {
            build_frenet_nodes();
        } else {
            build_integrated_nodes(initial);
        }
    }

    const Curve& curve() const { return *curve_; }
    double length() const { return len_; }
    int segments() const { return n_; }
    double spacing() const { return ds_; }
    bool closed() const { return closed_; }
    FrameMode mode() const { return mode_; }
    double node_s(int i) const { return i * ds_; }
    const Matrix3d& node_rotation(int i) const { return nodes_.at(i); }

    /// Wrap s into [0, L) for closed curves; node L maps to node 0 so
    /// periodic evaluations agree bitwise.
    double wrap(double s) const {
        if (!closed_) return s;
        s = std::fmod(s, len_);
        if (s < 0) s += len_;
        return s;
    }

    FrameSample sample(double s) const {
        s = wrap(s);
        if (mode_ == FrameMode::Frenet) return frenet_sample(s);
        const int i = std::min(static_cast<int>(std::floor(s / ds_)), n_ - 1);
        const double s0 = node_s(i);
        Matrix3d r = nodes_[i];
        if (s > s0) r = integrate(r, s0, s);
        return make_sample(s, r);
    }

    /// Curvature and torsion fields on the node grid. k2', k3' by centered
    /// differences (periodic wrap when closed, one-sided at open ends).
    /// Torsion is NaN where the curvature vanishes.
    void curvature_torsion(std::vector<double>& kappa, std::vector<double>& torsion) const {
        std::vector<double> vk2(n_ + 1), vk3(n_ + 1), vrho(n_ + 1);
        for (int i = 0; i <= n_; ++i) {
            const FrameSample f = sample(node_s(i));
            vk2[i] = f.k2;
            vk3[i] = f.k3;
            vrho[i] = f.rho;
        }
        kappa.resize(n_ + 1);
        torsion.resize(n_ + 1);
        auto diff = [&](const std::vector<double>& v, int i) {
            if (closed_) {
                const int ip = (i + 1) % n_, im = (i - 1 + n_) % n_;
                return (v[ip] - v[im]) / (2 * ds_);
            }
            if (i == 0) return (v[1] - v[0]) / ds_;
            if (i == n_) return (v[n_] - v[n_ - 1]) / ds_;
            return (v[i + 1] - v[i - 1]) / (2 * ds_);
        };
        for (int i = 0; i <= n_; ++i) {
            const double kk = vk2[i] * vk2[i] + vk3[i] * vk3[i];
            kappa[i] = std::sqrt(kk);
            if (kappa[i] < 1e-12) {
                torsion[i] = std::numeric_limits<double>::quiet_NaN();
            } else {
                torsion[i] = vrho[i] + (vk2[i] * diff(vk3, i) - vk3[i] * diff(vk2, i)) / kk;
            }
        }
    }

    void to_csv(std::ostream& os) const {
        os << "s,gx,gy,gz,r11,r21,r31,r12,r22,r32,r13,r23,r33,k2,k3,rho\n";
        char buf[64];
        for (int i = 0; i <= n_; ++i) {
            const FrameSample f = sample(node_s(i));
            auto put = [&](double v, char sep) {
                std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
                os << buf;
            };
            put(f.s, ',');
            for (int k = 0; k < 3; ++k) put(f.gamma(k), ',');
            for (int c = 0; c < 3; ++c)
                for (int r = 0; r < 3; ++r) put(f.R(r, c), ',');
            put(f.k2, ',');
            put(f.k3, ',');
            put(f.rho, '\n');
        }
    }

private:
    // Angular velocity of the frame: omega = tau x tau' + rho tau. The flow
    // R' = skew(omega) R preserves R e1 = tau.
    Vector3d omega(double s) const {
        const Vector3d t = curve_->d1(s), tp = curve_->d2(s);
        Vector3d w = t.cross(tp);
        const double rho = twist_.rho(s) + rho_corr_;
        if (rho != 0.0) w += rho * t;
        return w;
    }

    Matrix3d rk4_step(const Matrix3d& r, double s, double h) const {
        const Matrix3d k1 = so3::skew(omega(s)) * r;
        const Matrix3d k2 = so3::skew(omega(s + 0.5 * h)) * (r + 0.5 * h * k1);
        const Matrix3d k3 = so3::skew(omega(s + 0.5 * h)) * (r + 0.5 * h * k2);
        const Matrix3d k4 = so3::skew(omega(s + h)) * (r + h * k3);
        return so3::project(r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4));
    }

    Matrix3d integrate(Matrix3d r, double s0, double s1) const {
        const int m = std::max(1, static_cast<int>(std::ceil(substeps_ * (s1 - s0) / ds_)));
        const double h = (s1 - s0) / m;
        for (int k = 0; k < m; ++k) r = rk4_step(r, s0 + k * h, h);
        return r;
    }

    void build_integrated_nodes(const std::optional<Matrix3d>& initial) {
        Matrix3d r0;
        if (initial) {
            r0 = *initial;
            if (so3::orthonormality_defect(r0) > 1e-10 || r0.determinant() < 0)
                throw std::invalid_argument("frame: initial rotation is not orthonormal");
            if ((r0.col(0) - curve_->d1(0).normalized()).norm() > 1e-8)
                throw std::invalid_argument("frame: initial rotation first column must be the tangent");
            r0.col(0) = curve_->d1(0).normalized();
            r0.col(1) = (r0.col(1) - r0.col(1).dot(r0.col(0)) * r0.col(0)).normalized();
            r0.col(2) = r0.col(0).cross(r0.col(1));
        } else {
            r0 = tangent_adapted_identity(curve_->d1(0));
        }
        integrate_nodes(r0);
        if (closed_) {
            // kill the holonomy with a constant corrective twist rate, then
            // snap the seam so node L coincides with node 0 exactly
            const Matrix3d m = nodes_.front().transpose() * nodes_.back();
            const double theta = std::atan2(m(2, 1) - m(1, 2), m(1, 1) + m(2, 2));
            if (std::abs(theta) > 1e-15) {
                rho_corr_ = -theta / len_;
                integrate_nodes(r0);
            }
            nodes_.back() = nodes_.front();
        }
    }

    void integrate_nodes(const Matrix3d& r0) {
        nodes_.assign(n_ + 1, Matrix3d::Identity());
        nodes_[0] = r0;
        for (int i = 0; i < n_; ++i)
            nodes_[i + 1] = integrate(nodes_[i], node_s(i), node_s(i + 1));
    }

    void build_frenet_nodes() {
        nodes_.assign(n_ + 1, Matrix3d::Identity());
        for (int i = 0; i <= n_; ++i) {
            const double s = node_s(i);
            if (curve_->d2(s).norm() < 1e-12)
                throw std::invalid_argument("frame: Frenet mode with vanishing curvature at node " +
                                            std::to_string(i) + " (s=" + std::to_string(s) + ")");
            nodes_[i] = frenet_rotation(s);
        }
    }

    Matrix3d frenet_rotation(double s) const {
        const Vector3d t = curve_->d1(s), tp = curve_->d2(s);
        const double kap = tp.norm();
        if (kap < 1e-12)
            throw std::invalid_argument("frame: Frenet frame undefined (zero curvature) at s=" +
                                        std::to_string(s));
        Matrix3d r;
        r.col(0) = t;
        r.col(1) = tp / kap;
        r.col(2) = t.cross(r.col(1));
        return r;
    }

    FrameSample frenet_sample(double s) const {
        FrameSample f;
        f.s = s;
        f.gamma = curve_->position(s);
        f.R = frenet_rotation(s);
        const Vector3d tp = curve_->d2(s), tpp = curve_->d3(s);
        const double kap = tp.norm();
        f.k2 = kap;
        f.k3 = 0;
        f.dk2 = tp.dot(tpp) / kap;
        f.dk3 = 0;
        f.rho = frenet_torsion(s);
        // torsion rate would involve the fourth derivative of gamma;
        // a centered difference of the analytic torsion is used instead
        const double d = 1e-5 * len_;
        double sl = s - d, sr = s + d;
        if (!closed_) {
            sl = std::max(sl, 0.0);
            sr = std::min(sr, len_);
        }
        f.drho = (frenet_torsion(wrap(sr)) - frenet_torsion(wrap(sl))) / (sr - sl);
        return f;
    }

    double frenet_torsion(double s) const {
        const Vector3d t = curve_->d1(s), tp = curve_->d2(s), tpp = curve_->d3(s);
        const double k2 = tp.squaredNorm();
        return t.cross(tp).dot(tpp) / k2;
    }

    FrameSample make_sample(double s, const Matrix3d& r) const {
        FrameSample f;
        f.s = s;
        f.gamma = curve_->position(s);
        f.R = r;
        const Vector3d tp = curve_->d2(s), tpp = curve_->d3(s);
        const Vector3d w = omega(s);
        f.k2 = tp.dot(r.col(1));
        f.k3 = tp.dot(r.col(2));
        f.rho = twist_.rho(s) + rho_corr_;
        f.drho = twist_.drho(s);
        f.dk2 = tpp.dot(r.col(1)) + tp.dot(w.cross(r.col(1)));
        f.dk3 = tpp.dot(r.col(2)) + tp.dot(w.cross(r.col(2)));
        return f;
    }

    CurvePtr curve_;
    FrameMode mode_;
    int n_;
    TwistSpec twist_;
    int substeps_;
    double len_ = 0, ds_ = 0, rho_corr_ = 0;
    bool closed_ = false;
    std::vector<Matrix3d> nodes_;
};

/// Scaled gradient of the tube map Psi^h: R0 + h (xi nu2' + zeta nu3') (x) e1.
inline Matrix3d grad_h_psi(const FrameSample& f, double xi, double zeta, double h) {
    Matrix3d g = f.R;
    g.col(0) += h * (xi * f.nu2_prime() + zeta * f.nu3_prime());
    return g;
}

struct GradPsiInverse {
    Matrix3d inverse;
    double det;
};

/// Exact inverse (3x3 solve) of grad_h_psi together with its determinant.
/// Throws when the tube self-penetrates (det <= 0).
inline GradPsiInverse grad_h_psi_inv(const FrameSample& f, double xi, double zeta, double h) {
    const Matrix3d g = grad_h_psi(f, xi, zeta, h);
    const double det = g.determinant();
    if (!(det > 0))
        throw std::runtime_error("grad_h_psi: non-positive Jacobian at (s=" + std::to_string(f.s) +
                                 ", xi=" + std::to_string(xi) + ", zeta=" + std::to_string(zeta) +
                                 ", h=" + std::to_string(h) + "); h too large for the curvature");
    return {g.inverse(), det};
}

/// Exponential of a 3x3 skew matrix (input is skew-symmetrized first).
inline Matrix3d rotation_exp(const Matrix3d& a) { return so3::exp_skew(a); }

} // namespace currod
