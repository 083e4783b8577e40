#pragma once

#include <map>
#include <memory>

#include "currod/cell.hpp"
#include "currod/deform.hpp"

namespace currod {

/// Locate the triangle containing a point by barycentric sign tests, with a
/// last-hit cache (quadrature sweeps revisit neighbouring points). Points
/// outside the mesh snap to the triangle with the smallest defect.
class TriangleLocator {
public:
    explicit TriangleLocator(const SectionMesh& mesh) : mesh_(mesh) {}

    int locate(const Vector2d& p, Vector3d& bary) const {
        if (last_ >= 0 && bary_of(last_, p, bary)) return last_;
        int best = 0;
        double best_defect = std::numeric_limits<double>::max();
        for (int t = 0; t < mesh_.triangle_count(); ++t) {
            if (bary_of(t, p, bary)) {
                last_ = t;
                return t;
            }
            Vector3d bb;
            double defect = 0;
            bary_of(t, p, bb, &defect);
            if (defect < best_defect) {
                best_defect = defect;
                best = t;
            }
        }
        bary_of(best, p, bary);
        last_ = best;
        return best;
    }

private:
    bool bary_of(int t, const Vector2d& p, Vector3d& bary, double* defect = nullptr) const {
        const auto& tv = mesh_.triangles()[t];
        const Vector2d &a = mesh_.vertices()[tv[0]], &b = mesh_.vertices()[tv[1]],
                       &c = mesh_.vertices()[tv[2]];
        const double area = triangle_area(a, b, c);
        bary(0) = triangle_area(p, b, c) / area;
        bary(1) = triangle_area(a, p, c) / area;
        bary(2) = triangle_area(a, b, p) / area;
        if (defect) {
            *defect = 0;
            for (int k = 0; k < 3; ++k) *defect += std::max(0.0, -bary(k));
        }
        const double tol = -1e-10;
        return bary(0) >= tol && bary(1) >= tol && bary(2) >= tol;
    }

    const SectionMesh& mesh_;
    mutable int last_ = -1;
};

/// Warping field interpolated from the cell-problem minimizers: at each s
/// the section field is the P1 minimizer for the state's (t_arg, E); the
/// s-derivative is a central difference of neighbouring solves. Solves are
/// cached per s.
class FemWarp final : public WarpField {
public:
    FemWarp(const Material& material, const SectionMesh& mesh,
            std::shared_ptr<const FramedCurve> frame, std::shared_ptr<const RodState> state,
            ScalingRegime regime, double tol = 1e-10)
        : mesh_(mesh), frame_(std::move(frame)), state_(std::move(state)), regime_(regime),
          locator_(mesh), problem_(material, mesh), tol_(tol) {
        fd_step_ = frame_->spacing() / 16.0;
    }

    Sample eval(double s, double xi, double zeta) const override {
        const VectorXd& phi = solved(s);
        const VectorXd& phi_m = solved(s - fd_step_);
        const VectorXd& phi_p = solved(s + fd_step_);
        Vector3d bary;
        const int t = locator_.locate(Vector2d(xi, zeta), bary);
        const auto& tv = mesh_.triangles()[t];

        Sample out;
        for (int k = 0; k < 3; ++k) {
            const Vector3d pk(phi(3 * tv[k]), phi(3 * tv[k] + 1), phi(3 * tv[k] + 2));
            const Vector3d pk_m(phi_m(3 * tv[k]), phi_m(3 * tv[k] + 1), phi_m(3 * tv[k] + 2));
            const Vector3d pk_p(phi_p(3 * tv[k]), phi_p(3 * tv[k] + 1), phi_p(3 * tv[k] + 2));
            out.value += bary(k) * pk;
            out.d_s += bary(k) * (pk_p - pk_m) / (2 * fd_step_);
            out.d_xi += mesh_.tri_grad(t, k).x() * pk;
            out.d_zeta += mesh_.tri_grad(t, k).y() * pk;
        }
        return out;
    }

private:
    const VectorXd& solved(double s) const {
        auto it = cache_.find(s);
        if (it != cache_.end()) return it->second;
        const FrameSample f = frame_->sample(s);
        const StateSample st = state_->sample(s, f);
        const StrainSample strain = strain_measure(st, f, regime_);
        double t_arg = strain.t_arg;
        if (regime_.kind == ScalingRegime::Intermediate) {
            auto [val, ts] = q_min_over_t(
                [&](double t, const Matrix3d& ff) { return problem_.minimize(t, ff, tol_).value; },
                strain.E);
            (void)val;
            t_arg = ts;
        }
        CellSolution sol = problem_.minimize(t_arg, strain.E, tol_);
        return cache_.emplace(s, std::move(sol.phi)).first->second;
    }

    const SectionMesh& mesh_;
    std::shared_ptr<const FramedCurve> frame_;
    std::shared_ptr<const RodState> state_;
    ScalingRegime regime_;
    TriangleLocator locator_;
    CellProblem problem_;
    double tol_, fd_step_ = 0;
    mutable std::map<double, VectorXd> cache_;
};

} // namespace currod
