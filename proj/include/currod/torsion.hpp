#pragma once

#include "currod/linsolve.hpp"
#include "currod/section.hpp"

namespace currod {

struct TorsionSolution {
    VectorXd psi;      // warping function, zero mean
    double rigidity;   // T = min_psi int_D |grad psi + (-zeta, xi)|^2
    CgReport solve;
};

/// Saint-Venant torsional rigidity: minimize int_D |grad psi + (-zeta, xi)|^2
/// over P1 warping fields. The pure twist specialization of the section cell
/// problem for isotropic material.
inline TorsionSolution torsional_rigidity(const SectionMesh& mesh, double tol = 1e-12,
                                          int max_iter = 20000) {
    const int n = mesh.vertex_count();
    VectorXd b = VectorXd::Zero(n);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        Vector2d g = Vector2d::Zero(); // (-zeta, xi) at the centroid
        for (int k = 0; k < 3; ++k) {
            const Vector2d& p = mesh.vertices()[tri[k]];
            g += Vector2d(-p.y(), p.x()) / 3.0;
        }
        for (int k = 0; k < 3; ++k) b(tri[k]) -= mesh.tri_area(t) * mesh.tri_grad(t, k).dot(g);
    }

    // stiffness kernel is the constants; project them out of the iteration
    MatrixXd c = MatrixXd::Ones(n, 1);
    ProjectedCg cg(sparse_matvec(mesh.stiffness()), sparse_diagonal(mesh.stiffness()),
                   std::move(c));
    TorsionSolution sol;
    try {
        sol.psi = cg.solve(b, tol, max_iter, &sol.solve);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("torsional_rigidity: singular or ill-posed system "
                                             "(disconnected mesh?): ") + e.what());
    }
    // zero-mean gauge in the L2 sense
    const double mean = mesh.integrate_nodal(sol.psi) / mesh.area();
    sol.psi.array() -= mean;
    sol.rigidity = mesh.muD() - sol.psi.dot(b);
    return sol;
}

} // namespace currod
