#pragma once

#include <cmath>

#include "currod/cell.hpp"
#include "currod/frame.hpp"
#include "currod/rod_state.hpp"

namespace currod {

/// Strain matrix of the 1D theory: columns (0,a,b), (-a,0,w), (-b,-w,0)
/// with a = v'.nu2, b = v'.nu3.
inline Matrix3d b_matrix(double a, double b, double w) {
    Matrix3d m;
    m <<  0, -a, -b,
          a,  0, -w,
          b,  w,  0;
    return m;
}

struct StrainSample {
    Matrix3d B = Matrix3d::Zero();
    Matrix3d E = Matrix3d::Zero(); // B' + 2 skw(R0^T R0' B)
    double t_arg = 0;              // regime-dependent first argument of Q0
};

/// The measure E = B' + 2 skw(C B) with C = R0^T R0' taken from the frame
/// equations (never finite differences), plus the regime's t-argument.
inline StrainSample strain_measure(const StateSample& st, const FrameSample& f,
                                   const ScalingRegime& regime) {
    StrainSample out;
    out.B = b_matrix(st.a, st.b, st.w);
    const Matrix3d bp = b_matrix(st.da, st.db, st.dw);
    const Matrix3d cb = f.coefficient_matrix() * out.B;
    out.E = bp + (cb - cb.transpose());
    switch (regime.kind) {
        case ScalingRegime::VonKarman:
            out.t_arg = st.du + 0.5 * (st.a * st.a + st.b * st.b);
            break;
        case ScalingRegime::Linear:
            out.t_arg = st.du;
            break;
        case ScalingRegime::Intermediate:
            out.t_arg = 0; // Q is minimized over t
            break;
    }
    return out;
}

/// Limit energy I_alpha by 2-point Gauss quadrature per frame element of the
/// pointwise Q0 (or Q for the intermediate regime).
inline double energy_I_alpha(const RodState& state, const FramedCurve& frame,
                             const CellEvaluator& cell, const ScalingRegime& regime) {
    static const GaussRule g = gauss_legendre(2);
    const double ds = frame.spacing();
    double acc = 0;
    for (int el = 0; el < frame.segments(); ++el) {
        for (int q = 0; q < g.points(); ++q) {
            const double s = (el + 0.5 + 0.5 * g.x[q]) * ds;
            const FrameSample f = frame.sample(s);
            const StateSample st = state.sample(s, f);
            const StrainSample strain = strain_measure(st, f, regime);
            const double density = regime.kind == ScalingRegime::Intermediate
                                       ? cell.q(f, strain.E)
                                       : cell.q0(f, strain.t_arg, strain.E);
            acc += 0.5 * ds * g.w[q] * density;
        }
    }
    return 0.5 * acc;
}

struct IsotropicRodCoefficients {
    double lambda = 1, mu = 1;
    double I2 = 0, I3 = 0, T = 0;
};

/// The three strain scalars of the isotropic linear rod functional,
/// evaluated exactly as printed in the reduced form:
///   q1 = w' + k2 (v.nu3)' - k3 (v.nu2)' + rho (k2 (v.nu2) + k3 (v.nu3))
///   q2 = k2 w - (v.nu3)'' - 2 rho (v.nu2)' - (v.tau)(rho k2 + k3')
///        + (v.nu2)(k2 k3 + rho') + (v.nu3)(rho^2 - k3^2)
///   q3 = k3 w + (v.nu2)'' - 2 rho (v.nu3)' - (v.tau)(rho k3 - k2')
///        - (v.nu2)(rho^2 - k2^2) + (v.nu3)(k2 k3 - rho').
struct QForms {
    double q1 = 0, q2 = 0, q3 = 0;
};

inline QForms isotropic_q_forms(const StateSample& st, const FrameSample& f) {
    const double p1 = st.v.dot(f.tau());
    const double p2 = st.v.dot(f.nu2());
    const double p3 = st.v.dot(f.nu3());
    const Matrix3d c = f.coefficient_matrix();
    Matrix3d cp; // C' from the coefficient derivatives
    cp <<      0, -f.dk2, -f.dk3,
           f.dk2,      0, -f.drho,
           f.dk3, f.drho,       0;

    const Vector3d nu2p = f.R * c.col(1);
    const Vector3d nu3p = f.R * c.col(2);
    const Vector3d nu2pp = f.R * (c * c + cp).col(1);
    const Vector3d nu3pp = f.R * (c * c + cp).col(2);

    const double d_p2 = st.vp.dot(f.nu2()) + st.v.dot(nu2p);
    const double d_p3 = st.vp.dot(f.nu3()) + st.v.dot(nu3p);
    const double dd_p2 = st.vpp.dot(f.nu2()) + 2 * st.vp.dot(nu2p) + st.v.dot(nu2pp);
    const double dd_p3 = st.vpp.dot(f.nu3()) + 2 * st.vp.dot(nu3p) + st.v.dot(nu3pp);

    QForms q;
    q.q1 = st.dw + f.k2 * d_p3 - f.k3 * d_p2 + f.rho * (f.k2 * p2 + f.k3 * p3);
    q.q2 = f.k2 * st.w - dd_p3 - 2 * f.rho * d_p2 - p1 * (f.rho * f.k2 + f.dk3) +
           p2 * (f.k2 * f.k3 + f.drho) + p3 * (f.rho * f.rho - f.k3 * f.k3);
    q.q3 = f.k3 * st.w + dd_p2 - 2 * f.rho * d_p3 - p1 * (f.rho * f.k3 - f.dk2) -
           p2 * (f.rho * f.rho - f.k2 * f.k2) + p3 * (f.k2 * f.k3 - f.drho);
    return q;
}

/// Isotropic rod energy in its reduced (q1, q2, q3) form, valid for the
/// linear regime alpha > 3:
///   1/2 c0 int ((u')^2 + I2 q2^2 + I3 q3^2) + 1/2 mu T int q1^2,
/// with c0 = mu (3 lambda + 2 mu)/(lambda + mu).
inline double energy_isotropic_q(const RodState& state, const FramedCurve& frame,
                                 const IsotropicRodCoefficients& co) {
    IsotropicLame lame{co.lambda, co.mu};
    const double c0 = lame.reduced_modulus();
    static const GaussRule g = gauss_legendre(2);
    const double ds = frame.spacing();
    double acc = 0;
    for (int el = 0; el < frame.segments(); ++el) {
        for (int q = 0; q < g.points(); ++q) {
            const double s = (el + 0.5 + 0.5 * g.x[q]) * ds;
            const FrameSample f = frame.sample(s);
            const StateSample st = state.sample(s, f);
            const QForms qf = isotropic_q_forms(st, f);
            const double density = c0 * (st.du * st.du + co.I2 * qf.q2 * qf.q2 +
                                         co.I3 * qf.q3 * qf.q3) +
                                   co.mu * co.T * qf.q1 * qf.q1;
            acc += 0.5 * ds * g.w[q] * density;
        }
    }
    return 0.5 * acc;
}

/// L2 norm of u' + 1/2 ((v'.nu2)^2 + (v'.nu3)^2), the constraint linking u
/// to v in the intermediate regime.
inline double constraint_residual(const RodState& state, const FramedCurve& frame) {
    static const GaussRule g = gauss_legendre(4);
    const double ds = frame.spacing();
    double acc = 0;
    for (int el = 0; el < frame.segments(); ++el) {
        for (int q = 0; q < g.points(); ++q) {
            const double s = (el + 0.5 + 0.5 * g.x[q]) * ds;
            const FrameSample f = frame.sample(s);
            const StateSample st = state.sample(s, f);
            const double r = st.du + 0.5 * (st.a * st.a + st.b * st.b);
            acc += 0.5 * ds * g.w[q] * r * r;
        }
    }
    return std::sqrt(acc);
}

} // namespace currod
