#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "currod/energy3d.hpp"

namespace currod {

/// Least-squares slope of log(y) against log(x); NaN when underdetermined.
inline double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ConvergenceRecord {
    struct Row {
        double h = 0;
        double scaled_energy = 0; // energy_3d / h^(2 alpha - 2)
        double reference = 0;
        double ratio = 1;
        double quadrature_disagreement = 0;
    };
    std::vector<Row> rows;
    double order = 0;          // fitted order of |ratio - 1| in h
    bool monotone = true;      // |ratio - 1| decreasing along the h list
    bool quadrature_ok = true; // two quadrature levels agree within 0.1%

    void to_csv(std::ostream& os) const {
        os << "h,scaled_energy,reference,ratio,quad_disagreement\n";
        char buf[180];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.h,
                          r.scaled_energy, r.reference, r.ratio, r.quadrature_disagreement);
            os << buf;
        }
    }
};

/// Verify h^-(2 alpha - 2) I_h(recovery) -> reference along a decreasing h
/// list. The reference must be computed with the matching warping treatment
/// (unrelaxed phi = 0 closed form, or the FEM Q0 on the same mesh). Ratio is
/// defined as 1 when both sides vanish. When check_quadrature is set, every
/// energy is recomputed at doubled quadrature orders and disagreements above
/// 0.1% are flagged.
inline ConvergenceRecord convergence_study(
    const std::function<std::shared_ptr<const Deformation3D>(double h)>& builder, double alpha,
    double reference_energy, const std::vector<double>& h_list, const FramedCurve& frame,
    const SectionMesh& mesh, const NonlinearDensity& density, const QuadratureSpec& quad = {},
    bool check_quadrature = true) {
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1]))
            throw std::invalid_argument("convergence_study: h list must decrease");

    ConvergenceRecord rec;
    std::vector<double> hs, errs;
    double prev_err = -1;
    for (double h : h_list) {
        const auto def = builder(h);
        ConvergenceRecord::Row row;
        row.h = h;
        const double raw = energy_3d(*def, frame, mesh, density, quad);
        row.scaled_energy = raw / std::pow(h, 2 * alpha - 2);
        row.reference = reference_energy;
        row.ratio = reference_energy != 0 ? row.scaled_energy / reference_energy
                                          : (row.scaled_energy == 0 ? 1.0 : 0.0);
        if (check_quadrature) {
            const double raw2 = energy_3d(*def, frame, mesh, density, quad.doubled());
            row.quadrature_disagreement = std::abs(raw2 - raw) / std::max(std::abs(raw2), 1e-300);
            if (row.quadrature_disagreement > 1e-3) rec.quadrature_ok = false;
        }
        const double err = std::abs(row.ratio - 1);
        hs.push_back(h);
        errs.push_back(err);
        if (prev_err >= 0 && err > prev_err) rec.monotone = false;
        prev_err = err;
        rec.rows.push_back(row);
    }
    rec.order = fitted_order(hs, errs);
    return rec;
}

} // namespace currod
