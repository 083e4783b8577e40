#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

#include "currod/so3.hpp"

namespace currod {

using Eigen::Matrix3d;

/// Homogeneous isotropic material; admissibility means mu > 0, 3 lambda + 2 mu > 0.
struct IsotropicLame {
    double lambda = 1.0;
    double mu = 1.0;

    void validate() const {
        if (!(mu > 0) || !(3 * lambda + 2 * mu > 0))
            throw std::invalid_argument("material: need mu > 0 and 3*lambda + 2*mu > 0");
    }
    /// The modulus mu (3 lambda + 2 mu) / (lambda + mu) of the reduced forms.
    double reduced_modulus() const {
        if (std::abs(lambda + mu) < 1e-300)
            throw std::invalid_argument("material: lambda + mu = 0");
        return mu * (3 * lambda + 2 * mu) / (lambda + mu);
    }
};

/// Twice the quadratic form of linearized elasticity for isotropic material:
/// 2 mu |sym G|^2 + lambda (tr G)^2.
inline double q3_isotropic(const IsotropicLame& m, const Matrix3d& g) {
    const Matrix3d e = so3::symmetrize(g);
    const double tr = g.trace();
    return 2 * m.mu * e.squaredNorm() + m.lambda * tr * tr;
}

/// Pointwise quadratic form Q3(s, xi, zeta; G). Must be positive
/// semidefinite and vanish on skew matrices.
using QuadraticFormField = std::function<double(double s, double xi, double zeta, const Matrix3d&)>;

/// Material model: homogeneous isotropic or a general quadratic-form field.
class Material {
public:
    static Material isotropic(IsotropicLame lame) {
        lame.validate();
        Material m;
        m.lame_ = lame;
        m.is_isotropic_ = true;
        return m;
    }
    static Material form_field(QuadraticFormField field) {
        if (!field) throw std::invalid_argument("material: null form field");
        Material m;
        m.field_ = std::move(field);
        m.is_isotropic_ = false;
        return m;
    }

    bool isotropic() const { return is_isotropic_; }
    const IsotropicLame& lame() const {
        if (!is_isotropic_) throw std::logic_error("material: not isotropic");
        return lame_;
    }

    double q3(double s, double xi, double zeta, const Matrix3d& g) const {
        return is_isotropic_ ? q3_isotropic(lame_, g) : field_(s, xi, zeta, g);
    }

private:
    Material() = default;
    IsotropicLame lame_;
    QuadraticFormField field_;
    bool is_isotropic_ = true;
};

/// Nonlinear stored-energy densities for the 3D evaluator. Both are frame
/// indifferent and vanish on SO(3); their quadratic forms at the identity
/// are the isotropic Q3 with the moduli reported by quadratic_moduli().
struct NonlinearDensity {
    enum Kind { SaintVenantKirchhoff, SquaredDistanceToSO3 } kind = SaintVenantKirchhoff;
    double lambda = 1.0;
    double mu = 1.0;

    double operator()(const Matrix3d& f) const {
        switch (kind) {
            case SaintVenantKirchhoff: {
                const Matrix3d e = 0.5 * (f.transpose() * f - Matrix3d::Identity());
                const double tr = e.trace();
                return mu * e.squaredNorm() + 0.5 * lambda * tr * tr;
            }
            case SquaredDistanceToSO3:
                return so3::dist2_SO3(f);
        }
        return 0;
    }

    IsotropicLame quadratic_moduli() const {
        if (kind == SquaredDistanceToSO3) return {0.0, 1.0};
        return {lambda, mu};
    }
};

} // namespace currod
