#pragma once

#include <cmath>
#include <stdexcept>

#include "currod/deform.hpp"
#include "currod/frame.hpp"
#include "currod/material.hpp"
#include "currod/quadrature.hpp"
#include "currod/section.hpp"

namespace currod {

struct QuadratureSpec {
    int s_points = 4;        // Gauss points per frame element
    int triangle_degree = 4; // exactness degree of the section rule
    QuadratureSpec doubled() const { return {2 * s_points, 2 * triangle_degree}; }
};

/// Elastic energy per unit cross-section of a deformation Y on the tube:
///   int_Omega W(grad_h Y (grad_h Psi)^-1) det(grad_h Psi) ds dxi dzeta,
/// which equals h^-2 int over the physical tube by the change of variables.
inline double energy_3d(const Deformation3D& def, const FramedCurve& frame,
                        const SectionMesh& mesh, const NonlinearDensity& density,
                        const QuadratureSpec& quad = {}) {
    const GaussRule gs = gauss_legendre(quad.s_points);
    const TriangleRule tr = triangle_rule(quad.triangle_degree);
    const double ds = frame.spacing();
    const double h = def.h();

    double acc = 0;
    for (int el = 0; el < frame.segments(); ++el) {
        for (int q = 0; q < gs.points(); ++q) {
            const double s = (el + 0.5 + 0.5 * gs.x[q]) * ds;
            const double ws = 0.5 * ds * gs.w[q];
            const FrameSample f = frame.sample(s);
            const auto slice = def.slice(s);
            double section = 0;
            for (int t = 0; t < mesh.triangle_count(); ++t) {
                const auto& tv = mesh.triangles()[t];
                const Vector2d& p0 = mesh.vertices()[tv[0]];
                const Vector2d& p1 = mesh.vertices()[tv[1]];
                const Vector2d& p2 = mesh.vertices()[tv[2]];
                const double jac = 2.0 * mesh.tri_area(t);
                for (int k = 0; k < tr.points(); ++k) {
                    const Vector2d p = p0 + tr.x[k] * (p1 - p0) + tr.y[k] * (p2 - p0);
                    const GradPsiInverse gpi = grad_h_psi_inv(f, p.x(), p.y(), h);
                    const Matrix3d z = slice->grad_h(p.x(), p.y()) * gpi.inverse;
                    section += jac * tr.w[k] * density(z) * gpi.det;
                }
            }
            acc += ws * section;
        }
    }
    return acc;
}

} // namespace currod
