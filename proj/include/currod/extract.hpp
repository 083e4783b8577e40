#pragma once

#include <cmath>
#include <vector>

#include "currod/deform.hpp"
#include "currod/energy3d.hpp"

namespace currod {

/// Scaled 1D fields recovered from a 3D deformation:
///   v_h = h^-(a-2) int_D (Y - Psi),
///   w_h = h^-(a-1) / mu(D) int_D (Y - Psi) . (xi nu3 - zeta nu2),
///   u_h = the cumulative tangential average of d_s(Y - Psi), scaled by
///         h^-2(a-2) for 2 < a < 3 and h^-(a-1) for a >= 3, zero mean.
struct ExtractedFields {
    std::vector<double> s;
    std::vector<Vector3d> v, vp;
    std::vector<double> w, u, up;
};

inline ExtractedFields extract_fields(const Deformation3D& def, const FramedCurve& frame,
                                      const SectionMesh& mesh, double alpha,
                                      int samples_per_element = 2) {
    const double h = def.h();
    const double pref_v = std::pow(h, -(alpha - 2));
    const double pref_w = std::pow(h, -(alpha - 1));
    const double pref_u = alpha < 3 ? std::pow(h, -2 * (alpha - 2)) : std::pow(h, -(alpha - 1));
    const TriangleRule tr = triangle_rule(4);

    // section averages at one s: int (Y - Psi), int d_s(Y - Psi),
    // int (Y - Psi).(xi nu3 - zeta nu2)
    auto section_data = [&](double s, Vector3d& dv, Vector3d& dvp, double& twist) {
        const FrameSample f = frame.sample(s);
        const auto slice = def.slice(s);
        dv.setZero();
        dvp.setZero();
        twist = 0;
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            const auto& tv = mesh.triangles()[t];
            const Vector2d& p0 = mesh.vertices()[tv[0]];
            const Vector2d& p1 = mesh.vertices()[tv[1]];
            const Vector2d& p2 = mesh.vertices()[tv[2]];
            const double jac = 2.0 * mesh.tri_area(t);
            for (int k = 0; k < tr.points(); ++k) {
                const Vector2d p = p0 + tr.x[k] * (p1 - p0) + tr.y[k] * (p2 - p0);
                const double w = jac * tr.w[k];
                const Vector3d diff =
                    slice->value(p.x(), p.y()) - detail::psi_value(f, h, p.x(), p.y());
                const Vector3d diff_s = slice->grad_h(p.x(), p.y()).col(0) -
                                        detail::psi_grad_h(f, h, p.x(), p.y()).col(0);
                dv += w * diff;
                dvp += w * diff_s;
                twist += w * diff.dot(p.x() * f.nu3() - p.y() * f.nu2());
            }
        }
    };

    const int n = frame.segments() * samples_per_element;
    const double ds = frame.length() / n;
    ExtractedFields out;
    out.s.resize(n + 1);
    out.v.resize(n + 1);
    out.vp.resize(n + 1);
    out.w.resize(n + 1);
    out.u.resize(n + 1);
    out.up.resize(n + 1);

    std::vector<double> up_raw(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double s = i * ds;
        Vector3d dv, dvp;
        double twist;
        section_data(s, dv, dvp, twist);
        const FrameSample f = frame.sample(s);
        out.s[i] = s;
        out.v[i] = pref_v * dv;
        out.vp[i] = pref_v * dvp;
        out.w[i] = pref_w * twist / mesh.muD();
        up_raw[i] = pref_u * dvp.dot(f.tau());
        out.up[i] = up_raw[i];
    }
    // cumulative trapezoid for u, then zero mean (the paper's choice of s_h)
    out.u[0] = 0;
    for (int i = 0; i < n; ++i) out.u[i + 1] = out.u[i] + 0.5 * ds * (up_raw[i] + up_raw[i + 1]);
    double mean = 0;
    for (int i = 0; i < n; ++i) mean += 0.5 * ds * (out.u[i] + out.u[i + 1]);
    mean /= frame.length();
    for (double& ui : out.u) ui -= mean;
    return out;
}

} // namespace currod
