#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "currod/frame.hpp"
#include "currod/rod_energy.hpp"
#include "currod/rod_state.hpp"

namespace currod {

/// Warping field phi(s, xi, zeta) with its first derivatives.
class WarpField {
public:
    struct Sample {
        Vector3d value = Vector3d::Zero();
        Vector3d d_s = Vector3d::Zero();
        Vector3d d_xi = Vector3d::Zero();
        Vector3d d_zeta = Vector3d::Zero();
    };
    virtual ~WarpField() = default;
    virtual Sample eval(double s, double xi, double zeta) const = 0;
};

class ZeroWarp final : public WarpField {
public:
    Sample eval(double, double, double) const override { return {}; }
    static const ZeroWarp& instance() {
        static ZeroWarp z;
        return z;
    }
};

/// Warping field given by closed-form callables.
class AnalyticWarp final : public WarpField {
public:
    using Fn = std::function<Vector3d(double s, double xi, double zeta)>;
    AnalyticWarp(Fn value, Fn d_s, Fn d_xi, Fn d_zeta)
        : value_(std::move(value)), ds_(std::move(d_s)), dxi_(std::move(d_xi)),
          dzeta_(std::move(d_zeta)) {}
    Sample eval(double s, double xi, double zeta) const override {
        return {value_(s, xi, zeta), ds_(s, xi, zeta), dxi_(s, xi, zeta), dzeta_(s, xi, zeta)};
    }

private:
    Fn value_, ds_, dxi_, dzeta_;
};

/// Analytic 3D deformation on the tube domain: Y(s, xi, zeta) together with
/// the scaled gradient (d_s | h^-1 d_xi | h^-1 d_zeta) Y, assembled from the
/// building blocks of the ansatz rather than differenced.
class Deformation3D {
public:
    class Slice {
    public:
        virtual ~Slice() = default;
        virtual Vector3d value(double xi, double zeta) const = 0;
        virtual Matrix3d grad_h(double xi, double zeta) const = 0;
    };

    explicit Deformation3D(double h, std::string tag) : h_(h), tag_(std::move(tag)) {}
    virtual ~Deformation3D() = default;
    virtual std::unique_ptr<Slice> slice(double s) const = 0;
    double h() const { return h_; }
    const std::string& tag() const { return tag_; }

private:
    double h_;
    std::string tag_;
};

namespace detail {

inline Vector3d psi_value(const FrameSample& f, double h, double xi, double zeta) {
    return f.gamma + h * xi * f.nu2() + h * zeta * f.nu3();
}

inline Matrix3d psi_grad_h(const FrameSample& f, double h, double xi, double zeta) {
    return grad_h_psi(f, xi, zeta, h);
}

} // namespace detail

/// The tube parametrization itself, Y = Psi^h.
class PsiDeformation final : public Deformation3D {
public:
    PsiDeformation(std::shared_ptr<const FramedCurve> frame, double h)
        : Deformation3D(h, "psi"), frame_(std::move(frame)) {}

    class PsiSlice final : public Slice {
    public:
        PsiSlice(FrameSample f, double h) : f_(std::move(f)), h_(h) {}
        Vector3d value(double xi, double zeta) const override {
            return detail::psi_value(f_, h_, xi, zeta);
        }
        Matrix3d grad_h(double xi, double zeta) const override {
            return detail::psi_grad_h(f_, h_, xi, zeta);
        }

    private:
        FrameSample f_;
        double h_;
    };

    std::unique_ptr<Slice> slice(double s) const override {
        return std::make_unique<PsiSlice>(frame_->sample(s), h());
    }

private:
    std::shared_ptr<const FramedCurve> frame_;
};

/// Rigid image R Y + c of another deformation.
class RotatedDeformation final : public Deformation3D {
public:
    RotatedDeformation(std::shared_ptr<const Deformation3D> inner, Matrix3d rotation,
                       Vector3d shift = Vector3d::Zero())
        : Deformation3D(inner->h(), "rotated:" + inner->tag()), inner_(std::move(inner)),
          rot_(std::move(rotation)), shift_(std::move(shift)) {}

    class RotSlice final : public Slice {
    public:
        RotSlice(std::unique_ptr<Slice> inner, const Matrix3d& r, const Vector3d& c)
            : inner_(std::move(inner)), r_(r), c_(c) {}
        Vector3d value(double xi, double zeta) const override {
            return r_ * inner_->value(xi, zeta) + c_;
        }
        Matrix3d grad_h(double xi, double zeta) const override {
            return r_ * inner_->grad_h(xi, zeta);
        }

    private:
        std::unique_ptr<Slice> inner_;
        Matrix3d r_;
        Vector3d c_;
    };

    std::unique_ptr<Slice> slice(double s) const override {
        return std::make_unique<RotSlice>(inner_->slice(s), rot_, shift_);
    }

private:
    std::shared_ptr<const Deformation3D> inner_;
    Matrix3d rot_;
    Vector3d shift_;
};

namespace detail {

// frame vectors gamma2, gamma3 of the quadratic correction and their
// s-derivatives, in canonical components
inline Vector3d gamma2_vec(const StateSample& st) {
    return {2 * st.w * st.b, st.w * st.w + st.a * st.a, st.a * st.b};
}
inline Vector3d gamma3_vec(const StateSample& st) {
    return {-2 * st.w * st.a, st.a * st.b, st.w * st.w + st.b * st.b};
}
inline Vector3d gamma2_vec_prime(const StateSample& st) {
    return {2 * (st.dw * st.b + st.w * st.db), 2 * (st.w * st.dw + st.a * st.da),
            st.da * st.b + st.a * st.db};
}
inline Vector3d gamma3_vec_prime(const StateSample& st) {
    return {-2 * (st.dw * st.a + st.w * st.da), st.da * st.b + st.a * st.db,
            2 * (st.w * st.dw + st.b * st.db)};
}

struct RecoveryData {
    FrameSample f;
    StateSample st;
    Matrix3d A, Aprime;
    Vector3d tau, nu2, nu3, taup, nu2p, nu3p;
};

inline RecoveryData recovery_data(const FramedCurve& frame, const RodState& state, double s) {
    RecoveryData d;
    d.f = frame.sample(s);
    d.st = state.sample(s, d.f);
    const Matrix3d B = b_matrix(d.st.a, d.st.b, d.st.w);
    const Matrix3d Bp = b_matrix(d.st.da, d.st.db, d.st.dw);
    const Matrix3d C = d.f.coefficient_matrix();
    d.A = d.f.R * B * d.f.R.transpose();
    d.Aprime = d.f.R * (C * B + Bp - B * C) * d.f.R.transpose();
    d.tau = d.f.tau();
    d.nu2 = d.f.nu2();
    d.nu3 = d.f.nu3();
    d.taup = d.f.R * C.col(0);
    d.nu2p = d.f.R * C.col(1);
    d.nu3p = d.f.R * C.col(2);
    return d;
}

} // namespace detail

/// Recovery ansatz for alpha >= 3:
///   Y = Psi + h^(a-2) v + h^(a-1) u kappa + h^(a-1)(xi A nu2 + zeta A nu3) + h^a beta
/// with kappa = (1 - h xi k2 - h zeta k3) tau and
/// beta = R0 phi - xi/2 R0 gamma2 - zeta/2 R0 gamma3 for alpha = 3 (no
/// gamma correction for alpha > 3).
class StandardRecovery final : public Deformation3D {
public:
    StandardRecovery(std::shared_ptr<const FramedCurve> frame,
                     std::shared_ptr<const RodState> state, double alpha, double h,
                     std::shared_ptr<const WarpField> warp = nullptr)
        : Deformation3D(h, "standard_recovery"), frame_(std::move(frame)),
          state_(std::move(state)), warp_(std::move(warp)), alpha_(alpha) {
        if (!(alpha >= 3.0))
            throw std::invalid_argument("standard recovery: requires alpha >= 3");
    }

    class RSlice final : public Slice {
    public:
        RSlice(detail::RecoveryData d, const WarpField* warp, double alpha, double h)
            : d_(std::move(d)), warp_(warp), alpha_(alpha), h_(h) {
            ha2_ = std::pow(h_, alpha_ - 2);
            ha1_ = std::pow(h_, alpha_ - 1);
            ha_ = std::pow(h_, alpha_);
            von_karman_ = (alpha_ == 3.0);
            g2_ = detail::gamma2_vec(d_.st);
            g3_ = detail::gamma3_vec(d_.st);
            g2p_ = detail::gamma2_vec_prime(d_.st);
            g3p_ = detail::gamma3_vec_prime(d_.st);
        }

        Vector3d value(double xi, double zeta) const override {
            const auto& f = d_.f;
            const double kap = 1 - h_ * xi * f.k2 - h_ * zeta * f.k3;
            Vector3d y = detail::psi_value(f, h_, xi, zeta);
            y += ha2_ * d_.st.v;
            y += ha1_ * d_.st.u * kap * d_.tau;
            y += ha1_ * (xi * d_.A * d_.nu2 + zeta * d_.A * d_.nu3);
            y += ha_ * beta(xi, zeta);
            return y;
        }

        Matrix3d grad_h(double xi, double zeta) const override {
            const auto& f = d_.f;
            const double kap = 1 - h_ * xi * f.k2 - h_ * zeta * f.k3;
            const WarpField::Sample ws =
                warp_ ? warp_->eval(f.s, xi, zeta) : WarpField::Sample{};

            Vector3d ds = detail::psi_grad_h(f, h_, xi, zeta).col(0);
            ds += ha2_ * d_.st.vp;
            ds += ha1_ * (d_.st.du * kap * d_.tau +
                          d_.st.u * (-(h_ * xi * f.dk2 + h_ * zeta * f.dk3) * d_.tau +
                                     kap * d_.taup));
            ds += ha1_ * (xi * (d_.Aprime * d_.nu2 + d_.A * d_.nu2p) +
                          zeta * (d_.Aprime * d_.nu3 + d_.A * d_.nu3p));
            ds += ha_ * beta_ds(ws, xi, zeta);

            Vector3d dxi = h_ * d_.nu2;
            dxi += ha1_ * (-h_ * f.k2) * d_.st.u * d_.tau;
            dxi += ha1_ * d_.A * d_.nu2;
            dxi += ha_ * beta_dxi(ws);

            Vector3d dzeta = h_ * d_.nu3;
            dzeta += ha1_ * (-h_ * f.k3) * d_.st.u * d_.tau;
            dzeta += ha1_ * d_.A * d_.nu3;
            dzeta += ha_ * beta_dzeta(ws);

            Matrix3d g;
            g.col(0) = ds;
            g.col(1) = dxi / h_;
            g.col(2) = dzeta / h_;
            return g;
        }

    private:
        Vector3d beta(double xi, double zeta) const {
            Vector3d b = Vector3d::Zero();
            if (warp_) b = d_.f.R * warp_->eval(d_.f.s, xi, zeta).value;
            if (von_karman_) b -= d_.f.R * (0.5 * xi * g2_ + 0.5 * zeta * g3_);
            return b;
        }
        Vector3d beta_ds(const WarpField::Sample& ws, double xi, double zeta) const {
            Vector3d b = Vector3d::Zero();
            if (warp_) b = d_.f.R_prime() * ws.value + d_.f.R * ws.d_s;
            if (von_karman_)
                b -= 0.5 * xi * (d_.f.R_prime() * g2_ + d_.f.R * g2p_) +
                     0.5 * zeta * (d_.f.R_prime() * g3_ + d_.f.R * g3p_);
            return b;
        }
        Vector3d beta_dxi(const WarpField::Sample& ws) const {
            Vector3d b = Vector3d::Zero();
            if (warp_) b = d_.f.R * ws.d_xi;
            if (von_karman_) b -= 0.5 * d_.f.R * g2_;
            return b;
        }
        Vector3d beta_dzeta(const WarpField::Sample& ws) const {
            Vector3d b = Vector3d::Zero();
            if (warp_) b = d_.f.R * ws.d_zeta;
            if (von_karman_) b -= 0.5 * d_.f.R * g3_;
            return b;
        }

        detail::RecoveryData d_;
        const WarpField* warp_;
        double alpha_, h_, ha2_, ha1_, ha_;
        bool von_karman_;
        Vector3d g2_, g3_, g2p_, g3p_;
    };

    std::unique_ptr<Slice> slice(double s) const override {
        return std::make_unique<RSlice>(detail::recovery_data(*frame_, *state_, s),
                                        warp_.get(), alpha_, h());
    }

private:
    std::shared_ptr<const FramedCurve> frame_;
    std::shared_ptr<const RodState> state_;
    std::shared_ptr<const WarpField> warp_;
    double alpha_;
};

/// Exponential-map ansatz for 2 < alpha < 3:
///   Y = int_0^s R_eps tau + h xi R_eps nu2 + h zeta R_eps nu3 + h^a R0 phi
/// with R_eps = exp(eps A), eps = h^(alpha-2). The position integral is
/// tabulated by composite Gauss quadrature on a grid refined 4x past the
/// frame grid; the energy only sees its exact derivative R_eps tau.
class IntermediateRecovery final : public Deformation3D {
public:
    IntermediateRecovery(std::shared_ptr<const FramedCurve> frame,
                         std::shared_ptr<const RodState> state, double alpha, double h,
                         std::shared_ptr<const WarpField> warp = nullptr)
        : Deformation3D(h, "intermediate_recovery"), frame_(std::move(frame)),
          state_(std::move(state)), warp_(std::move(warp)), alpha_(alpha),
          eps_(std::pow(h, alpha - 2)) {
        if (!(alpha > 2.0 && alpha < 3.0))
            throw std::invalid_argument("intermediate recovery: requires 2 < alpha < 3");
        tabulate_position();
    }

    Matrix3d rotation(double s) const {
        const auto d = detail::recovery_data(*frame_, *state_, s);
        return so3::exp(eps_ * so3::axis(d.A));
    }

    class ISlice final : public Slice {
    public:
        ISlice(detail::RecoveryData d, Vector3d pos, const WarpField* warp, double eps,
               double alpha, double h)
            : d_(std::move(d)), pos_(std::move(pos)), warp_(warp), eps_(eps), h_(h) {
            ha_ = std::pow(h_, alpha);
            const Vector3d r = eps_ * so3::axis(d_.A);
            const Vector3d rdot = eps_ * so3::axis(d_.Aprime);
            reps_ = so3::exp(r);
            reps_prime_ = so3::exp_derivative(r, rdot);
        }

        Vector3d value(double xi, double zeta) const override {
            Vector3d y = pos_ + h_ * xi * reps_ * d_.nu2 + h_ * zeta * reps_ * d_.nu3;
            if (warp_) y += ha_ * d_.f.R * warp_->eval(d_.f.s, xi, zeta).value;
            return y;
        }

        Matrix3d grad_h(double xi, double zeta) const override {
            const WarpField::Sample ws =
                warp_ ? warp_->eval(d_.f.s, xi, zeta) : WarpField::Sample{};
            Vector3d ds = reps_ * d_.tau;
            ds += h_ * xi * (reps_prime_ * d_.nu2 + reps_ * d_.nu2p);
            ds += h_ * zeta * (reps_prime_ * d_.nu3 + reps_ * d_.nu3p);
            Vector3d dxi = h_ * reps_ * d_.nu2;
            Vector3d dzeta = h_ * reps_ * d_.nu3;
            if (warp_) {
                ds += ha_ * (d_.f.R_prime() * ws.value + d_.f.R * ws.d_s);
                dxi += ha_ * d_.f.R * ws.d_xi;
                dzeta += ha_ * d_.f.R * ws.d_zeta;
            }
            Matrix3d g;
            g.col(0) = ds;
            g.col(1) = dxi / h_;
            g.col(2) = dzeta / h_;
            return g;
        }

        const Matrix3d& rotation() const { return reps_; }

    private:
        detail::RecoveryData d_;
        Vector3d pos_;
        const WarpField* warp_;
        double eps_, h_, ha_;
        Matrix3d reps_, reps_prime_;
    };

    std::unique_ptr<Slice> slice(double s) const override {
        return std::make_unique<ISlice>(detail::recovery_data(*frame_, *state_, s), position(s),
                                        warp_.get(), eps_, alpha_, h());
    }

private:
    Vector3d integrand(double s) const {
        const auto d = detail::recovery_data(*frame_, *state_, s);
        return so3::exp(eps_ * so3::axis(d.A)) * d.tau;
    }

    Vector3d segment_integral(double s0, double s1) const {
        static const GaussRule g = gauss_legendre(4);
        Vector3d acc = Vector3d::Zero();
        const double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
        for (int k = 0; k < g.points(); ++k) acc += half * g.w[k] * integrand(mid + half * g.x[k]);
        return acc;
    }

    void tabulate_position() {
        const int n = 4 * frame_->segments();
        dsfine_ = frame_->length() / n;
        pos_nodes_.assign(n + 1, Vector3d::Zero());
        for (int i = 0; i < n; ++i)
            pos_nodes_[i + 1] = pos_nodes_[i] + segment_integral(i * dsfine_, (i + 1) * dsfine_);
    }

    Vector3d position(double s) const {
        const int i = std::min(static_cast<int>(std::floor(s / dsfine_)),
                               static_cast<int>(pos_nodes_.size()) - 2);
        Vector3d p = pos_nodes_[i];
        const double s0 = i * dsfine_;
        if (s > s0) p += segment_integral(s0, s);
        return p;
    }

    std::shared_ptr<const FramedCurve> frame_;
    std::shared_ptr<const RodState> state_;
    std::shared_ptr<const WarpField> warp_;
    double alpha_, eps_, dsfine_ = 0;
    std::vector<Vector3d> pos_nodes_;
};

/// Ring recovery (closed mid-fiber, alpha = 3): the standard von Karman
/// ansatz plus the tangential correction absorbing u(L) - u(0) and a cutoff
/// matching the warping contribution at the seam. The correction integral
/// int_0^s (L - sigma) tau' d sigma is assembled in the integrated-by-parts
/// form (L-s) tau(s) - L tau(0) + gamma(s) - gamma(0), which reproduces the
/// cancellation that makes Y exactly periodic.
class RingRecovery final : public Deformation3D {
public:
    RingRecovery(std::shared_ptr<const FramedCurve> frame, std::shared_ptr<const RodState> state,
                 double h, std::shared_ptr<const WarpField> warp = nullptr)
        : Deformation3D(h, "ring_recovery"), frame_(std::move(frame)), state_(std::move(state)),
          warp_(std::move(warp)) {
        if (!frame_->closed())
            throw std::invalid_argument("ring recovery: frame must be closed");
        check_state_periodicity();
        const FrameSample f0 = frame_->sample(0.0);
        const double L = frame_->length();
        u0_ = state_->sample(0.0, f0).u;
        uL_ = state_->sample(L, frame_->sample(L)).u;
        du_over_L_ = (uL_ - u0_) / L;
        tau0_ = f0.tau();
        gamma0_ = f0.gamma;
    }

    class RingSlice final : public Slice {
    public:
        RingSlice(const RingRecovery& owner, double s)
            : owner_(owner), s_(s), d_(detail::recovery_data(*owner.frame_, *owner.state_, s)),
              inner_(d_, owner.warp_.get(), 3.0, owner.h()) {
            const double L = owner_.frame_->length();
            h_ = owner_.h();
            // int_0^s (L - sigma) tau' = (L - s) tau(s) - L tau(0) + gamma(s) - gamma(0)
            corr_ = (L - s_) * d_.tau - L * owner_.tau0_ + d_.f.gamma - owner_.gamma0_;
            corr_ds_ = (L - s_) * d_.taup;
            theta_ = owner_.cutoff(s_);
            dtheta_ = owner_.cutoff_derivative(s_);
            if (owner_.warp_) {
                seam_jump_ = true;
            }
        }

        Vector3d value(double xi, double zeta) const override {
            const double L = owner_.frame_->length();
            Vector3d y = inner_.value(xi, zeta);
            const double trans = -h_ * (L - s_) * (xi * d_.f.k2 + zeta * d_.f.k3);
            y += h_ * h_ * owner_.du_over_L_ * (corr_ + trans * d_.tau);
            if (seam_jump_ && theta_ != 0.0)
                y += h_ * h_ * h_ * theta_ * owner_.seam_beta_jump(xi, zeta);
            return y;
        }

        Matrix3d grad_h(double xi, double zeta) const override {
            const double L = owner_.frame_->length();
            Matrix3d g = inner_.grad_h(xi, zeta);
            const double k = xi * d_.f.k2 + zeta * d_.f.k3;
            const double dk = xi * d_.f.dk2 + zeta * d_.f.dk3;
            // d/ds of the correction term
            Vector3d ds = corr_ds_;
            ds += -h_ * (-(k)*d_.tau + (L - s_) * (dk * d_.tau + k * d_.taup));
            g.col(0) += h_ * h_ * owner_.du_over_L_ * ds;
            // transverse derivatives of the correction
            g.col(1) += h_ * h_ * owner_.du_over_L_ * (-h_ * (L - s_) * d_.f.k2) * d_.tau / h_;
            g.col(2) += h_ * h_ * owner_.du_over_L_ * (-h_ * (L - s_) * d_.f.k3) * d_.tau / h_;
            if (seam_jump_) {
                if (dtheta_ != 0.0)
                    g.col(0) += h_ * h_ * h_ * dtheta_ * owner_.seam_beta_jump(xi, zeta);
                if (theta_ != 0.0) {
                    g.col(1) += h_ * h_ * h_ * theta_ * owner_.seam_beta_jump_dxi(xi, zeta) / h_;
                    g.col(2) += h_ * h_ * h_ * theta_ * owner_.seam_beta_jump_dzeta(xi, zeta) / h_;
                }
            }
            return g;
        }

    private:
        const RingRecovery& owner_;
        double s_, h_;
        detail::RecoveryData d_;
        StandardRecovery::RSlice inner_;
        Vector3d corr_, corr_ds_;
        double theta_ = 0, dtheta_ = 0;
        bool seam_jump_ = false;
    };

    std::unique_ptr<Slice> slice(double s) const override {
        return std::make_unique<RingSlice>(*this, s);
    }

private:
    friend class RingSlice;

    void check_state_periodicity() const {
        const double L = frame_->length();
        const FrameSample f0 = frame_->sample(0.0), fL = frame_->sample(L);
        const StateSample s0 = state_->sample(0.0, f0), sL = state_->sample(L, fL);
        const double scale = 1 + std::abs(s0.a) + std::abs(s0.b) + std::abs(s0.w);
        if (std::abs(s0.a - sL.a) > 1e-8 * scale || std::abs(s0.b - sL.b) > 1e-8 * scale ||
            std::abs(s0.w - sL.w) > 1e-8 * scale || (s0.v - sL.v).norm() > 1e-6 * scale)
            throw std::invalid_argument(
                "ring recovery: state violates the periodic conditions v(0)=v(L), "
                "v'(0)=v'(L), w(0)=w(L)");
    }

    // C1 cutoff supported in [L - sqrt(h), L] with theta(L) = 1 and
    // |theta'| <= 1.5 / sqrt(h)
    double cutoff(double s) const {
        const double L = frame_->length(), sh = std::sqrt(h());
        if (s <= L - sh) return 0.0;
        const double x = (s - (L - sh)) / sh;
        return x * x * (3 - 2 * x);
    }
    double cutoff_derivative(double s) const {
        const double L = frame_->length(), sh = std::sqrt(h());
        if (s <= L - sh) return 0.0;
        const double x = (s - (L - sh)) / sh;
        return 6 * x * (1 - x) / sh;
    }

    Vector3d seam_beta_jump(double xi, double zeta) const {
        return beta_at(0.0, xi, zeta) - beta_at(frame_->length(), xi, zeta);
    }
    Vector3d seam_beta_jump_dxi(double xi, double zeta) const {
        const double d = 1e-6;
        return (seam_beta_jump(xi + d, zeta) - seam_beta_jump(xi - d, zeta)) / (2 * d);
    }
    Vector3d seam_beta_jump_dzeta(double xi, double zeta) const {
        const double d = 1e-6;
        return (seam_beta_jump(xi, zeta + d) - seam_beta_jump(xi, zeta - d)) / (2 * d);
    }
    Vector3d beta_at(double s, double xi, double zeta) const {
        const FrameSample f = frame_->sample(s);
        if (!warp_) return Vector3d::Zero();
        return f.R * warp_->eval(s, xi, zeta).value;
    }

    std::shared_ptr<const FramedCurve> frame_;
    std::shared_ptr<const RodState> state_;
    std::shared_ptr<const WarpField> warp_;
    double u0_ = 0, uL_ = 0, du_over_L_ = 0;
    Vector3d tau0_ = Vector3d::UnitX(), gamma0_ = Vector3d::Zero();
};

} // namespace currod
