#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "currod/cell.hpp"
#include "currod/rod_energy.hpp"
#include "currod/rod_state.hpp"

namespace currod {

using Eigen::Matrix4d;
using Eigen::Vector4d;

/// Distributed loads sampled on the rod grid: f acts on v, g on u, m on w.
struct LoadCase {
    std::vector<Vector3d> f;
    std::vector<double> g, m;

    static LoadCase zero(int nodes) {
        LoadCase lc;
        lc.f.assign(nodes, Vector3d::Zero());
        lc.g.assign(nodes, 0.0);
        lc.m.assign(nodes, 0.0);
        return lc;
    }
};

struct BoundarySpec {
    enum Kind { Free, ClampedLeft, ClampedRight, ClampedBoth, PeriodicRing } kind = Free;
};

struct MinimizeReport {
    double energy = 0;
    double load_work = 0;
    double constraint_residual = 0; // max |v'.tau| on the energy quadrature set
    CgReport cg;
    std::vector<std::string> gauge_modes; // zero-energy directions projected out
    // von Karman solves only:
    int newton_iterations = 0;
    int levenberg_shifts = 0;
    std::vector<double> gradient_norms;
};

/// Gram matrix of Q0(s, t, F) over the coordinates (t, F12, F13, F23),
/// obtained by polarization; Q0 is exactly quadratic in these.
inline Matrix4d q0_gram(const CellEvaluator& cell, const FrameSample& f) {
    auto basis = [](int i) {
        double t = 0;
        Matrix3d F = Matrix3d::Zero();
        if (i == 0) t = 1;
        if (i == 1) { F(0, 1) = 1; F(1, 0) = -1; }
        if (i == 2) { F(0, 2) = 1; F(2, 0) = -1; }
        if (i == 3) { F(1, 2) = 1; F(2, 1) = -1; }
        return std::make_pair(t, F);
    };
    Matrix4d g;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            auto [ti, fi] = basis(i);
            auto [tj, fj] = basis(j);
            const double plus = cell.q0(f, ti + tj, fi + fj);
            const double minus = cell.q0(f, ti - tj, fi - fj);
            g(i, j) = g(j, i) = 0.25 * (plus - minus);
        }
    return g;
}

/// Gram matrix of Q(s, F) = min_t Q0 over (F12, F13, F23).
inline Matrix3d q_gram(const CellEvaluator& cell, const FrameSample& f) {
    auto basis = [](int i) {
        Matrix3d F = Matrix3d::Zero();
        if (i == 0) { F(0, 1) = 1; F(1, 0) = -1; }
        if (i == 1) { F(0, 2) = 1; F(2, 0) = -1; }
        if (i == 2) { F(1, 2) = 1; F(2, 1) = -1; }
        return F;
    };
    Matrix3d g;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const double plus = cell.q(f, basis(i) + basis(j));
            const double minus = cell.q(f, basis(i) - basis(j));
            g(i, j) = g(j, i) = 0.25 * (plus - minus);
        }
    return g;
}

/// Discrete minimization of I_alpha over rod states under loads and boundary
/// conditions. Quadratic solves for alpha != 3, damped Newton for alpha = 3.
class RodMinimizer {
public:
    static constexpr int npd = DiscreteRodState::dofs_per_node;

    RodMinimizer(std::shared_ptr<const FramedCurve> frame, const CellEvaluator& cell,
                 ScalingRegime regime, BoundarySpec boundary)
        : frame_(std::move(frame)), cell_(cell), regime_(regime), boundary_(boundary) {
        if (boundary_.kind == BoundarySpec::PeriodicRing && !frame_->closed())
            throw std::invalid_argument("minimize: periodic ring needs a closed frame");
        if (frame_->closed() && boundary_.kind != BoundarySpec::PeriodicRing)
            throw std::invalid_argument("minimize: closed frames use the PeriodicRing boundary");
        n_ = frame_->segments();
        nodes_ = frame_->closed() ? n_ : n_ + 1;
        ndof_ = npd * nodes_;
        build_gauss_contexts();
        mark_fixed_dofs();
        assemble_quadratic();
        build_generators();
    }

    int dof_count() const { return ndof_; }
    int node_count() const { return nodes_; }
    const SparseMat& stiffness() const { return matrix_; }

    VectorXd load_vector(const LoadCase& lc) const {
        if (static_cast<int>(lc.f.size()) != nodes_ || static_cast<int>(lc.g.size()) != nodes_ ||
            static_cast<int>(lc.m.size()) != nodes_)
            throw std::invalid_argument("loads: wrong node count");
        VectorXd ell = VectorXd::Zero(ndof_);
        for (const auto& ctx : gauss_) {
            // P1 interpolation of the nodal load samples
            const Vector3d fq = (1 - ctx.t) * lc.f[ctx.node0] + ctx.t * lc.f[ctx.node1];
            const double gq = (1 - ctx.t) * lc.g[ctx.node0] + ctx.t * lc.g[ctx.node1];
            const double mq = (1 - ctx.t) * lc.m[ctx.node0] + ctx.t * lc.m[ctx.node1];
            for (int k = 0; k < 14; ++k) {
                double val = 0;
                for (int c = 0; c < 3; ++c) val += fq(c) * ctx.v[c](k);
                val += gq * ctx.u(k) + mq * ctx.w(k);
                ell(ctx.dof[k]) += ctx.wq * val;
            }
        }
        for (int i : fixed_) ell(i) = 0;
        return ell;
    }

    /// Zero-energy nodal states compatible with the boundary conditions
    /// (energy below 1e-12 relative to the operator scale).
    std::vector<std::pair<std::string, VectorXd>> kernel_basis() const {
        std::vector<std::pair<std::string, VectorXd>> out;
        const double scale = matrix_scale();
        for (const auto& [label, gen] : generators_) {
            const double e = 0.5 * gen.dot(matrix_ * gen);
            if (e <= 1e-12 * scale * gen.squaredNorm()) out.emplace_back(label, gen);
        }
        return out;
    }

    /// All rigid-motion generators compatible with the boundary conditions,
    /// including those with small positive discrete energy on curved grids;
    /// loads must be orthogonal to every one of them.
    const std::vector<std::pair<std::string, VectorXd>>& rigid_generators() const {
        return generators_;
    }

    DiscreteRodState minimize_quadratic(const LoadCase& lc, MinimizeReport* report = nullptr,
                                        double tol = 1e-10, int max_iter = 200000) const {
        if (regime_.kind == ScalingRegime::VonKarman)
            throw std::invalid_argument("minimize_quadratic: alpha = 3 needs the Newton solver");
        VectorXd ell = load_vector(lc);
        check_equilibrated(ell);
        ProjectedCg cg(sparse_matvec(matrix_), sparse_diagonal(matrix_), constraint_matrix());
        MinimizeReport rep;
        VectorXd x = cg.solve(ell, tol, max_iter, &rep.cg);
        if (regime_.kind == ScalingRegime::Intermediate) reconstruct_u(x);
        finalize_report(x, ell, rep);
        if (report) *report = rep;
        return DiscreteRodState(frame_, std::move(x));
    }

    DiscreteRodState minimize_von_karman(const LoadCase& lc,
                                         const VectorXd& initial = VectorXd(),
                                         MinimizeReport* report = nullptr, int max_newton = 100,
                                         double cg_tol = 1e-12) const {
        if (regime_.kind != ScalingRegime::VonKarman)
            throw std::invalid_argument("minimize_von_karman: regime must be alpha = 3");
        VectorXd ell = load_vector(lc);
        check_equilibrated(ell);
        VectorXd x = initial.size() ? initial : VectorXd::Zero(ndof_);
        for (int i : fixed_) x(i) = 0;

        MinimizeReport rep;
        const MatrixXd constraints = constraint_matrix();
        double j_old = objective(x, ell);
        for (int it = 0; it < max_newton; ++it) {
            VectorXd grad;
            SparseMat hess;
            assemble_newton(x, grad, hess);
            grad -= ell;
            ProjectedCg proj(sparse_matvec(hess), sparse_diagonal(hess), constraints);
            const double gnorm = proj.project(grad).norm();
            rep.gradient_norms.push_back(gnorm);
            rep.newton_iterations = it;
            if (gnorm <= 1e-9 * (1 + std::abs(j_old))) break;

            VectorXd dir;
            double shift = 0;
            for (;;) {
                try {
                    SparseMat hs = hess;
                    if (shift > 0) {
                        SparseMat eye(ndof_, ndof_);
                        eye.setIdentity();
                        hs = hess + shift * eye;
                    }
                    ProjectedCg cg(sparse_matvec(hs), sparse_diagonal(hs), constraints);
                    dir = cg.solve(-grad, cg_tol, 100000);
                    break;
                } catch (const std::exception&) {
                    ++rep.levenberg_shifts;
                    shift = shift == 0 ? 1e-8 * matrix_scale() : 10 * shift;
                    if (shift > 1e12 * matrix_scale())
                        throw std::runtime_error("von Karman: Levenberg shift diverged");
                }
            }
            // backtracking Armijo line search, factor 1/2
            const double slope = grad.dot(dir);
            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                const double j_new = objective(x + step * dir, ell);
                if (j_new <= j_old + 1e-4 * step * slope) {
                    x += step * dir;
                    j_old = j_new;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                throw std::runtime_error(
                    "von Karman: line search failed at Newton iteration " + std::to_string(it) +
                    " (gradient norm " + std::to_string(gnorm) + ")");
        }
        finalize_report(x, ell, rep);
        if (report) *report = rep;
        return DiscreteRodState(frame_, std::move(x));
    }

    /// Analytic gradient of the von Karman objective at a nodal vector.
    VectorXd von_karman_gradient(const VectorXd& x, const VectorXd& ell) const {
        VectorXd grad;
        SparseMat hess;
        assemble_newton(x, grad, hess);
        return grad - ell;
    }

    /// Objective 1/2 int Q0(t_arg, E) - load work at a nodal vector.
    double objective(const VectorXd& x, const VectorXd& ell) const {
        double acc = 0;
        for (const auto& ctx : gauss_) {
            Vector4d z = gauss_z(ctx, x);
            acc += ctx.wq * z.dot(ctx.gram * z);
        }
        return 0.5 * acc - ell.dot(x);
    }

private:
    struct GaussCtx {
        using Row = Eigen::Matrix<double, 14, 1>;
        double s = 0, wq = 0, t = 0;
        int node0 = 0, node1 = 0;
        int dof[14] = {};
        Row a, b, da, db, u, du, w, dw;
        Row v[3];
        Row e12, e13, e23;
        Matrix4d gram = Matrix4d::Zero(); // Q0 over (t, F12, F13, F23)
    };

    Vector4d gauss_z(const GaussCtx& ctx, const VectorXd& x) const {
        Eigen::Matrix<double, 14, 1> xl;
        for (int k = 0; k < 14; ++k) xl(k) = x(ctx.dof[k]);
        const double a = ctx.a.dot(xl), b = ctx.b.dot(xl);
        double targ = 0;
        switch (regime_.kind) {
            case ScalingRegime::VonKarman: targ = ctx.du.dot(xl) + 0.5 * (a * a + b * b); break;
            case ScalingRegime::Linear: targ = ctx.du.dot(xl); break;
            case ScalingRegime::Intermediate: targ = 0; break;
        }
        return {targ, ctx.e12.dot(xl), ctx.e13.dot(xl), ctx.e23.dot(xl)};
    }

    void build_gauss_contexts() {
        const GaussRule g = gauss_legendre(2);
        const double ds = frame_->spacing();
        std::vector<FrameSample> node_frames;
        node_frames.reserve(nodes_);
        for (int i = 0; i < nodes_; ++i) node_frames.push_back(frame_->sample(frame_->node_s(i)));

        for (int el = 0; el < n_; ++el) {
            for (int q = 0; q < g.points(); ++q) {
                GaussCtx ctx;
                ctx.t = 0.5 + 0.5 * g.x[q];
                ctx.s = (el + ctx.t) * ds;
                ctx.wq = 0.5 * ds * g.w[q];
                ctx.node0 = el % nodes_;
                ctx.node1 = (el + 1) % nodes_;
                for (int k = 0; k < 7; ++k) {
                    ctx.dof[k] = npd * ctx.node0 + k;
                    ctx.dof[7 + k] = npd * ctx.node1 + k;
                }
                const FrameSample f = frame_->sample(ctx.s);
                const FrameSample& f0 = node_frames[ctx.node0];
                const FrameSample& f1 = node_frames[ctx.node1];
                const double t = ctx.t;
                const double h00 = 1 - 3 * t * t + 2 * t * t * t;
                const double h10 = t - 2 * t * t + t * t * t;
                const double h01 = 3 * t * t - 2 * t * t * t;
                const double h11 = -t * t + t * t * t;
                const double d00 = (-6 * t + 6 * t * t) / ds, d10 = 1 - 4 * t + 3 * t * t;
                const double d01 = (6 * t - 6 * t * t) / ds, d11 = -2 * t + 3 * t * t;
                const double g00 = (-6 + 12 * t) / (ds * ds), g10 = (-4 + 6 * t) / ds;
                const double g01 = (6 - 12 * t) / (ds * ds), g11 = (-2 + 6 * t) / ds;

                auto fill = [&](GaussCtx::Row& row, const Vector3d& dir, double cv0, double cm0,
                                double cv1, double cm1) {
                    // row of dir . (cv0 v0 + cm0 m0 + cv1 v1 + cm1 m1) over local dofs
                    row.setZero();
                    for (int c = 0; c < 3; ++c) {
                        row(c) += cv0 * dir(c);
                        row(7 + c) += cv1 * dir(c);
                    }
                    row(3) += cm0 * dir.dot(f0.nu2());
                    row(4) += cm0 * dir.dot(f0.nu3());
                    row(10) += cm1 * dir.dot(f1.nu2());
                    row(11) += cm1 * dir.dot(f1.nu3());
                };

                // a = v'.nu2, da = v''.nu2 + v'.nu2'
                GaussCtx::Row tmp;
                fill(ctx.a, f.nu2(), d00, d10, d01, d11);
                fill(ctx.b, f.nu3(), d00, d10, d01, d11);
                fill(ctx.da, f.nu2(), g00, g10, g01, g11);
                fill(tmp, f.nu2_prime(), d00, d10, d01, d11);
                ctx.da += tmp;
                fill(ctx.db, f.nu3(), g00, g10, g01, g11);
                fill(tmp, f.nu3_prime(), d00, d10, d01, d11);
                ctx.db += tmp;
                for (int c = 0; c < 3; ++c)
                    fill(ctx.v[c], Vector3d::Unit(c), h00, ds * h10, h01, ds * h11);

                ctx.u.setZero();
                ctx.u(5) = 1 - t;
                ctx.u(12) = t;
                ctx.du.setZero();
                ctx.du(5) = -1 / ds;
                ctx.du(12) = 1 / ds;
                ctx.w.setZero();
                ctx.w(6) = 1 - t;
                ctx.w(13) = t;
                ctx.dw.setZero();
                ctx.dw(6) = -1 / ds;
                ctx.dw(13) = 1 / ds;

                // E = B' + 2 skw(C B) entrywise
                ctx.e12 = -ctx.da - f.k3 * ctx.w + f.rho * ctx.b;
                ctx.e13 = -ctx.db + f.k2 * ctx.w - f.rho * ctx.a;
                ctx.e23 = -ctx.dw - f.k2 * ctx.b + f.k3 * ctx.a;

                if (regime_.kind == ScalingRegime::Intermediate) {
                    ctx.gram.bottomRightCorner<3, 3>() = q_gram(cell_, f);
                } else {
                    ctx.gram = q0_gram(cell_, f);
                }
                gauss_.push_back(std::move(ctx));
            }
        }
    }

    void mark_fixed_dofs() {
        auto clamp_node = [&](int node) {
            for (int k = 0; k < npd; ++k) fixed_.push_back(npd * node + k);
        };
        if (boundary_.kind == BoundarySpec::ClampedLeft ||
            boundary_.kind == BoundarySpec::ClampedBoth)
            clamp_node(0);
        if (boundary_.kind == BoundarySpec::ClampedRight ||
            boundary_.kind == BoundarySpec::ClampedBoth)
            clamp_node(nodes_ - 1);
        // the intermediate regime has no u unknowns: u is reconstructed from
        // the constraint after the solve
        if (regime_.kind == ScalingRegime::Intermediate)
            for (int i = 0; i < nodes_; ++i) fixed_.push_back(npd * i + 5);
    }

    void assemble_quadratic() {
        std::vector<Eigen::Triplet<double>> trips;
        for (const auto& ctx : gauss_) {
            Eigen::Matrix<double, 4, 14> zrows;
            // for alpha = 3 this matrix is the Hessian at zero (t-row = u')
            if (regime_.kind == ScalingRegime::Intermediate)
                zrows.row(0).setZero();
            else
                zrows.row(0) = ctx.du.transpose();
            zrows.row(1) = ctx.e12.transpose();
            zrows.row(2) = ctx.e13.transpose();
            zrows.row(3) = ctx.e23.transpose();
            const Eigen::Matrix<double, 14, 14> ke =
                ctx.wq * zrows.transpose() * ctx.gram * zrows;
            for (int i = 0; i < 14; ++i)
                for (int j = 0; j < 14; ++j)
                    if (ke(i, j) != 0.0) trips.emplace_back(ctx.dof[i], ctx.dof[j], ke(i, j));
        }
        matrix_.resize(ndof_, ndof_);
        matrix_.setFromTriplets(trips.begin(), trips.end());
    }

    // Newton gradient and Hessian of the quartic von Karman objective
    // (without the load term).
    void assemble_newton(const VectorXd& x, VectorXd& grad, SparseMat& hess) const {
        grad = VectorXd::Zero(ndof_);
        std::vector<Eigen::Triplet<double>> trips;
        for (const auto& ctx : gauss_) {
            Eigen::Matrix<double, 14, 1> xl;
            for (int k = 0; k < 14; ++k) xl(k) = x(ctx.dof[k]);
            const double a = ctx.a.dot(xl), b = ctx.b.dot(xl);
            const Vector4d z(ctx.du.dot(xl) + 0.5 * (a * a + b * b), ctx.e12.dot(xl),
                             ctx.e13.dot(xl), ctx.e23.dot(xl));
            Eigen::Matrix<double, 4, 14> dz;
            dz.row(0) = (ctx.du + a * ctx.a + b * ctx.b).transpose();
            dz.row(1) = ctx.e12.transpose();
            dz.row(2) = ctx.e13.transpose();
            dz.row(3) = ctx.e23.transpose();
            const Vector4d qz = ctx.gram * z;
            const Eigen::Matrix<double, 14, 1> ge = ctx.wq * (dz.transpose() * qz);
            Eigen::Matrix<double, 14, 14> he =
                ctx.wq * (dz.transpose() * ctx.gram * dz +
                          qz(0) * (ctx.a * ctx.a.transpose() + ctx.b * ctx.b.transpose()));
            for (int i = 0; i < 14; ++i) {
                grad(ctx.dof[i]) += ge(i);
                for (int j = 0; j < 14; ++j)
                    if (he(i, j) != 0.0) trips.emplace_back(ctx.dof[i], ctx.dof[j], he(i, j));
            }
        }
        hess.resize(ndof_, ndof_);
        hess.setFromTriplets(trips.begin(), trips.end());
    }

    void build_generators() {
        auto add = [&](const std::string& label, const VectorXd& gen) {
            for (int i : fixed_)
                if (std::abs(gen(i)) > 1e-12) return; // incompatible with the BCs
            generators_.emplace_back(label, gen);
        };
        // translations of v
        for (int c = 0; c < 3; ++c) {
            VectorXd g = VectorXd::Zero(ndof_);
            for (int i = 0; i < nodes_; ++i) g(npd * i + c) = 1;
            add("translation_" + std::string(1, char('x' + c)), g);
        }
        // shift of u (absent in the intermediate regime)
        if (regime_.kind != ScalingRegime::Intermediate) {
            VectorXd g = VectorXd::Zero(ndof_);
            for (int i = 0; i < nodes_; ++i) g(npd * i + 5) = 1;
            add("u_shift", g);
        }
        // infinitesimal rotations v = A0 gamma + const, w = (A0 nu2).nu3.
        // Zero energy in the continuum; on curved grids the discrete energy
        // is O(ds^4) but loads must still be orthogonal to them.
        for (int c = 0; c < 3; ++c) {
            const Matrix3d a0 = so3::skew(Vector3d::Unit(c));
            VectorXd g = VectorXd::Zero(ndof_);
            bool quartic_safe = true;
            for (int i = 0; i < nodes_; ++i) {
                const FrameSample f = frame_->sample(frame_->node_s(i));
                const Vector3d v = a0 * f.gamma;
                const Vector3d vp = a0 * f.tau();
                g(npd * i + 0) = v(0);
                g(npd * i + 1) = v(1);
                g(npd * i + 2) = v(2);
                g(npd * i + 3) = vp.dot(f.nu2());
                g(npd * i + 4) = vp.dot(f.nu3());
                g(npd * i + 6) = (a0 * f.nu2()).dot(f.nu3());
                if (std::abs(g(npd * i + 3)) > 1e-12 || std::abs(g(npd * i + 4)) > 1e-12)
                    quartic_safe = false;
            }
            // for alpha = 3 a rotation with v' != 0 stiffens the quartic term
            // and is not a zero-energy direction
            if (regime_.kind == ScalingRegime::VonKarman && !quartic_safe) continue;
            add("rotation_" + std::string(1, char('x' + c)), g);
        }
    }

    MatrixXd constraint_matrix() const {
        const int cols = static_cast<int>(fixed_.size() + generators_.size());
        MatrixXd c = MatrixXd::Zero(ndof_, cols);
        int j = 0;
        for (int i : fixed_) c(i, j++) = 1;
        for (const auto& [label, gen] : generators_) c.col(j++) = gen;
        return c;
    }

    double matrix_scale() const {
        double m = 0;
        const VectorXd d = sparse_diagonal(matrix_);
        for (Eigen::Index i = 0; i < d.size(); ++i) m = std::max(m, std::abs(d(i)));
        return m > 0 ? m : 1.0;
    }

    void check_equilibrated(const VectorXd& ell) const {
        const double ln = ell.norm();
        if (ln == 0) return;
        for (const auto& [label, gen] : generators_) {
            const double pairing = std::abs(ell.dot(gen));
            if (pairing > 1e-8 * ln * gen.norm())
                throw std::invalid_argument(
                    "minimize: load not equilibrated, pairs with zero-energy direction '" +
                    label + "' (work " + std::to_string(pairing) + ")");
        }
    }

    void reconstruct_u(VectorXd& x) const {
        // u' = -1/2 ((v'.nu2)^2 + (v'.nu3)^2), integrated with zero mean
        DiscreteRodState tmp(frame_, x);
        const GaussRule g = gauss_legendre(2);
        const double ds = frame_->spacing();
        std::vector<double> u(nodes_ + 1, 0.0);
        for (int el = 0; el < n_; ++el) {
            double inc = 0;
            for (int q = 0; q < g.points(); ++q) {
                const double s = (el + 0.5 + 0.5 * g.x[q]) * ds;
                const FrameSample f = frame_->sample(s);
                const StateSample st = tmp.sample(s, f);
                inc += 0.5 * ds * g.w[q] * (-0.5) * (st.a * st.a + st.b * st.b);
            }
            u[el + 1] = u[el] + inc;
        }
        double mean = 0;
        for (int i = 0; i < n_; ++i) mean += 0.5 * ds * (u[i] + u[i + 1]);
        mean /= frame_->length();
        for (int i = 0; i < nodes_; ++i) x(npd * i + 5) = u[i] - mean;
    }

    void finalize_report(const VectorXd& x, const VectorXd& ell, MinimizeReport& rep) const {
        rep.energy = 0;
        for (const auto& ctx : gauss_) {
            const Vector4d z = gauss_z(ctx, x);
            rep.energy += 0.5 * ctx.wq * z.dot(ctx.gram * z);
        }
        rep.load_work = ell.dot(x);
        DiscreteRodState st(frame_, x);
        rep.constraint_residual = st.constraint_quadrature_residual();
        for (const auto& [label, gen] : generators_) rep.gauge_modes.push_back(label);
    }

    std::shared_ptr<const FramedCurve> frame_;
    const CellEvaluator& cell_;
    ScalingRegime regime_;
    BoundarySpec boundary_;
    int n_ = 0, nodes_ = 0, ndof_ = 0;
    std::vector<GaussCtx> gauss_;
    std::vector<int> fixed_;
    std::vector<std::pair<std::string, VectorXd>> generators_;
    SparseMat matrix_;
};

} // namespace currod
