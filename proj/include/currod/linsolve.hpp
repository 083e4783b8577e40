#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace currod {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;

struct CgReport {
    int iterations = 0;
    double residual = 0;
    bool converged = false;
    std::vector<double> history;
};

/// Conjugate gradients for min 1/2 x^T A x - b^T x subject to C^T x = 0,
/// with the constraints handled by orthogonal projection onto ker(C^T) and
/// diagonal (Jacobi) preconditioning. A must be symmetric and positive
/// semidefinite on ker(C^T).
class ProjectedCg {
public:
    using MatVec = std::function<VectorXd(const VectorXd&)>;

    ProjectedCg(MatVec apply, VectorXd diagonal, MatrixXd constraints = MatrixXd())
        : apply_(std::move(apply)), inv_diag_(diagonal.size()) {
        for (Eigen::Index i = 0; i < diagonal.size(); ++i)
            inv_diag_(i) = diagonal(i) > 1e-300 ? 1.0 / diagonal(i) : 1.0;
        if (constraints.cols() > 0) {
            Eigen::HouseholderQR<MatrixXd> qr(constraints);
            q_ = qr.householderQ() * MatrixXd::Identity(constraints.rows(), constraints.cols());
        }
    }

    VectorXd project(VectorXd v) const {
        if (q_.cols() > 0) v -= q_ * (q_.transpose() * v);
        return v;
    }

    VectorXd solve(const VectorXd& b, double tol, int max_iter, CgReport* report = nullptr) const {
        VectorXd x = VectorXd::Zero(b.size());
        VectorXd r = project(b);
        const double bnorm = r.norm();
        CgReport rep;
        if (bnorm < 1e-300) {
            rep.converged = true;
            if (report) *report = rep;
            return x;
        }
        VectorXd z = project(inv_diag_.asDiagonal() * r);
        VectorXd p = z;
        double rz = r.dot(z);
        for (int it = 0; it < max_iter; ++it) {
            const VectorXd q = project(apply_(p));
            const double pq = p.dot(q);
            if (!(pq > 0)) {
                rep.residual = r.norm() / bnorm;
                if (report) *report = rep;
                throw std::runtime_error("projected cg: non-positive curvature encountered");
            }
            const double alpha = rz / pq;
            x += alpha * p;
            r -= alpha * q;
            const double rel = r.norm() / bnorm;
            rep.history.push_back(rel);
            rep.iterations = it + 1;
            if (rel < tol) {
                rep.converged = true;
                rep.residual = rel;
                if (report) *report = rep;
                return x;
            }
            z = project(inv_diag_.asDiagonal() * r);
            const double rz_new = r.dot(z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        rep.residual = r.norm() / bnorm;
        if (report) *report = rep;
        throw std::runtime_error("projected cg: no convergence after " +
                                 std::to_string(max_iter) +
                                 " iterations, relative residual " + std::to_string(rep.residual));
    }

private:
    MatVec apply_;
    VectorXd inv_diag_;
    MatrixXd q_;
};

inline ProjectedCg::MatVec sparse_matvec(const SparseMat& a) {
    return [&a](const VectorXd& v) { return VectorXd(a * v); };
}

inline VectorXd sparse_diagonal(const SparseMat& a) {
    VectorXd d = VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMat::InnerIterator it(a, k); it; ++it)
            if (it.row() == it.col()) d(it.row()) = it.value();
    return d;
}

} // namespace currod
