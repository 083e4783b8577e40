#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "currod/frame.hpp"
#include "currod/linsolve.hpp"
#include "currod/material.hpp"
#include "currod/section.hpp"

namespace currod {

inline void require_skew(const Matrix3d& f, const char* where) {
    if (so3::symmetrize(f).norm() > 1e-12)
        throw std::invalid_argument(std::string(where) + ": F must be skew-symmetric");
}

/// Closed form of Q0 for homogeneous isotropic material:
///   mu (3 lambda + 2 mu)/(lambda + mu) (t^2 + I3 F12^2 + I2 F13^2) + mu T F23^2.
inline double q0_closed_form_isotropic(double lambda, double mu, double I2, double I3, double T,
                                       double t, const Matrix3d& f) {
    require_skew(f, "q0_closed_form_isotropic");
    if (std::abs(lambda + mu) < 1e-300)
        throw std::invalid_argument("q0_closed_form_isotropic: lambda + mu = 0");
    const double c0 = mu * (3 * lambda + 2 * mu) / (lambda + mu);
    return c0 * (t * t + I3 * f(0, 1) * f(0, 1) + I2 * f(0, 2) * f(0, 2)) +
           mu * T * f(1, 2) * f(1, 2);
}

/// Q0 with the warping frozen at phi = 0 (no cross-section relaxation):
///   (lambda + 2 mu)(t^2 + I3 F12^2 + I2 F13^2) + mu mu(D) F23^2.
/// Upper bound for Q0; also the exact limit density of recovery sequences
/// built with a vanishing warping field.
inline double q0_unrelaxed_isotropic(double lambda, double mu, double I2, double I3, double muD,
                                     double t, const Matrix3d& f) {
    require_skew(f, "q0_unrelaxed_isotropic");
    return (lambda + 2 * mu) * (t * t + I3 * f(0, 1) * f(0, 1) + I2 * f(0, 2) * f(0, 2)) +
           mu * muD * f(1, 2) * f(1, 2);
}

struct CellSolution {
    double value = 0;          // Q0(s, t, F)
    VectorXd phi;              // minimizing warping field, 3 dofs per vertex
    double t = 0;
    Matrix3d F = Matrix3d::Zero();
    CgReport solve;
};

/// Discrete cross-section minimization behind Q0: P1 vector warping fields
/// on the normalized mesh, all in frame coordinates. The quadratic form is
/// conjugated by R0 only when the material is heterogeneous, so for
/// homogeneous isotropic material one assembly serves every s.
class CellProblem {
public:
    CellProblem(const Material& material, const SectionMesh& mesh,
                const Matrix3d& frame_rotation = Matrix3d::Identity(), double s = 0)
        : material_(material), mesh_(mesh), rotation_(frame_rotation), s_(s) {
        assemble();
    }

    const SectionMesh& mesh() const { return mesh_; }

    /// Integrand of Q0 for an arbitrary (not necessarily minimizing) warping
    /// field; an empty phi means phi == 0.
    double energy(double t, const Matrix3d& f, const VectorXd& phi = VectorXd()) const {
        require_skew(f, "q0_integrand_value");
        if (phi.size() != 0 && phi.size() != 3 * mesh_.vertex_count())
            throw std::invalid_argument("cell: warping field has wrong size");
        double acc = 0;
        for_each_quad_point(t, f, [&](int tri, const Vector2d& p, double w, const Matrix3d& m0) {
            Matrix3d m = m0;
            if (phi.size()) {
                const auto& tv = mesh_.triangles()[tri];
                Vector3d dxi = Vector3d::Zero(), dzeta = Vector3d::Zero();
                for (int k = 0; k < 3; ++k) {
                    const Vector3d pk(phi(3 * tv[k]), phi(3 * tv[k] + 1), phi(3 * tv[k] + 2));
                    dxi += mesh_.tri_grad(tri, k).x() * pk;
                    dzeta += mesh_.tri_grad(tri, k).y() * pk;
                }
                m.col(1) += dxi;
                m.col(2) += dzeta;
            }
            acc += w * form(p, m);
        });
        return acc;
    }

    /// Q0(s, t, F): constrained minimization over the subspace V
    /// (zero mean, zero in-plane rotational moment).
    CellSolution minimize(double t, const Matrix3d& f, double tol = 1e-10,
                          int max_iter = 50000) const {
        require_skew(f, "q0_solve");
        const int n = mesh_.vertex_count();
        VectorXd c = VectorXd::Zero(3 * n);
        double constant = 0;
        for_each_quad_point(t, f, [&](int tri, const Vector2d& p, double w, const Matrix3d& m0) {
            constant += w * form(p, m0);
            const auto& tv = mesh_.triangles()[tri];
            for (int k = 0; k < 3; ++k)
                for (int comp = 0; comp < 3; ++comp) {
                    Matrix3d g = Matrix3d::Zero();
                    g(comp, 1) = mesh_.tri_grad(tri, k).x();
                    g(comp, 2) = mesh_.tri_grad(tri, k).y();
                    c(3 * tv[k] + comp) += w * bilinear(p, g, m0);
                }
        });
        CellSolution sol;
        sol.t = t;
        sol.F = f;
        sol.phi = cg_->solve(-c, tol, max_iter, &sol.solve);
        sol.value = constant + c.dot(sol.phi);
        return sol;
    }

private:
    template <class Fn>
    void for_each_quad_point(double t, const Matrix3d& f, Fn&& fn) const {
        // edge midpoints: exact for the quadratic integrand of homogeneous
        // material, sampling rule for heterogeneous fields
        for (int tri = 0; tri < mesh_.triangle_count(); ++tri) {
            const auto& tv = mesh_.triangles()[tri];
            const double w = mesh_.tri_area(tri) / 3.0;
            for (int e = 0; e < 3; ++e) {
                const Vector2d p =
                    0.5 * (mesh_.vertices()[tv[e]] + mesh_.vertices()[tv[(e + 1) % 3]]);
                Matrix3d m0 = Matrix3d::Zero();
                m0.col(0) = t * Vector3d::UnitX() + p.x() * f.col(1) + p.y() * f.col(2);
                fn(tri, p, w, m0);
            }
        }
    }

    double form(const Vector2d& p, const Matrix3d& g) const {
        if (material_.isotropic()) return q3_isotropic(material_.lame(), g);
        return material_.q3(s_, p.x(), p.y(), rotation_ * g * rotation_.transpose());
    }

    double bilinear(const Vector2d& p, const Matrix3d& g, const Matrix3d& h) const {
        if (material_.isotropic()) {
            const auto& m = material_.lame();
            return 2 * m.mu * so3::symmetrize(g).cwiseProduct(so3::symmetrize(h)).sum() +
                   m.lambda * g.trace() * h.trace();
        }
        return 0.25 * (form(p, g + h) - form(p, g - h));
    }

    void assemble() {
        const int n = mesh_.vertex_count();
        std::vector<Eigen::Triplet<double>> trips;
        for (int tri = 0; tri < mesh_.triangle_count(); ++tri) {
            const auto& tv = mesh_.triangles()[tri];
            // P1 gradients are constant per triangle
            Matrix3d basis[9];
            for (int k = 0; k < 3; ++k)
                for (int comp = 0; comp < 3; ++comp) {
                    Matrix3d g = Matrix3d::Zero();
                    g(comp, 1) = mesh_.tri_grad(tri, k).x();
                    g(comp, 2) = mesh_.tri_grad(tri, k).y();
                    basis[3 * k + comp] = g;
                }
            for (int a = 0; a < 9; ++a)
                for (int b = a; b < 9; ++b) {
                    double v = 0;
                    if (material_.isotropic()) {
                        v = mesh_.tri_area(tri) * bilinear(Vector2d::Zero(), basis[a], basis[b]);
                    } else {
                        for (int e = 0; e < 3; ++e) {
                            const Vector2d p = 0.5 * (mesh_.vertices()[tv[e]] +
                                                      mesh_.vertices()[tv[(e + 1) % 3]]);
                            v += mesh_.tri_area(tri) / 3.0 * bilinear(p, basis[a], basis[b]);
                        }
                    }
                    if (v != 0.0) {
                        trips.emplace_back(3 * tv[a / 3] + a % 3, 3 * tv[b / 3] + b % 3, v);
                        if (b != a)
                            trips.emplace_back(3 * tv[b / 3] + b % 3, 3 * tv[a / 3] + a % 3, v);
                    }
                }
        }
        matrix_.resize(3 * n, 3 * n);
        matrix_.setFromTriplets(trips.begin(), trips.end());

        // subspace V: zero mean (3 constraints) and zero rotational moment
        // int (zeta phi_2 - xi phi_3) = 0
        MatrixXd constraints = MatrixXd::Zero(3 * n, 4);
        for (int tri = 0; tri < mesh_.triangle_count(); ++tri) {
            const auto& tv = mesh_.triangles()[tri];
            const double w = mesh_.tri_area(tri) / 3.0;
            for (int e = 0; e < 3; ++e) {
                const int i = tv[e], j = tv[(e + 1) % 3];
                const Vector2d p = 0.5 * (mesh_.vertices()[i] + mesh_.vertices()[j]);
                for (int v : {i, j}) {
                    for (int comp = 0; comp < 3; ++comp)
                        constraints(3 * v + comp, comp) += 0.5 * w;
                    constraints(3 * v + 1, 3) += 0.5 * w * p.y();
                    constraints(3 * v + 2, 3) -= 0.5 * w * p.x();
                }
            }
        }
        cg_ = std::make_unique<ProjectedCg>(sparse_matvec(matrix_), sparse_diagonal(matrix_),
                                            std::move(constraints));
    }

    Material material_;
    const SectionMesh& mesh_;
    Matrix3d rotation_;
    double s_;
    SparseMat matrix_;
    std::unique_ptr<ProjectedCg> cg_;
};

/// Q(s, F) = min_t Q0(s, t, F) by a three-point parabola fit (Q0 is exactly
/// quadratic in t). Returns the minimum and the minimizer t*.
template <class Q0Fn>
std::pair<double, double> q_min_over_t(Q0Fn&& q0, const Matrix3d& f) {
    const double qm = q0(-1.0, f), q0v = q0(0.0, f), qp = q0(1.0, f);
    const double curv = qp - 2 * q0v + qm; // = 2a with Q0 = a t^2 + b t + c
    if (!(curv > 0)) throw std::runtime_error("q_min: Q0 not strictly convex in t");
    const double tstar = (qm - qp) / (2 * curv);
    return {q0(tstar, f), tstar};
}

/// Pointwise Q0 evaluator used by the 1D functionals.
class CellEvaluator {
public:
    virtual ~CellEvaluator() = default;
    virtual double q0(const FrameSample& frame, double t, const Matrix3d& f) const = 0;
    double q(const FrameSample& frame, const Matrix3d& f, double* tstar = nullptr) const {
        auto [v, ts] =
            q_min_over_t([&](double t, const Matrix3d& ff) { return q0(frame, t, ff); }, f);
        if (tstar) *tstar = ts;
        return v;
    }
};

class IsotropicClosedFormQ0 final : public CellEvaluator {
public:
    IsotropicClosedFormQ0(IsotropicLame lame, double I2, double I3, double T)
        : lame_(lame), i2_(I2), i3_(I3), t_(T) {
        lame.validate();
    }
    double q0(const FrameSample&, double t, const Matrix3d& f) const override {
        return q0_closed_form_isotropic(lame_.lambda, lame_.mu, i2_, i3_, t_, t, f);
    }

private:
    IsotropicLame lame_;
    double i2_, i3_, t_;
};

class UnrelaxedIsotropicQ0 final : public CellEvaluator {
public:
    UnrelaxedIsotropicQ0(IsotropicLame lame, double I2, double I3, double muD)
        : lame_(lame), i2_(I2), i3_(I3), mud_(muD) {}
    double q0(const FrameSample&, double t, const Matrix3d& f) const override {
        return q0_unrelaxed_isotropic(lame_.lambda, lame_.mu, i2_, i3_, mud_, t, f);
    }

private:
    IsotropicLame lame_;
    double i2_, i3_, mud_;
};

/// Q0 through the discrete cell solve. For isotropic material the assembled
/// operator is s-independent and shared; heterogeneous fields re-assemble
/// per sample.
class FemQ0 final : public CellEvaluator {
public:
    FemQ0(Material material, const SectionMesh& mesh, double tol = 1e-10)
        : material_(std::move(material)), mesh_(mesh), tol_(tol) {
        if (material_.isotropic()) shared_ = std::make_unique<CellProblem>(material_, mesh_);
    }
    double q0(const FrameSample& frame, double t, const Matrix3d& f) const override {
        if (shared_) return shared_->minimize(t, f, tol_).value;
        CellProblem local(material_, mesh_, frame.R, frame.s);
        return local.minimize(t, f, tol_).value;
    }

private:
    Material material_;
    const SectionMesh& mesh_;
    double tol_;
    std::unique_ptr<CellProblem> shared_;
};

} // namespace currod
