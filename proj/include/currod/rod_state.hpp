#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "currod/curve.hpp"
#include "currod/frame.hpp"
#include "currod/quadrature.hpp"

namespace currod {

using Eigen::VectorXd;

/// Energy scaling regime: the 3D energy is of order h^(2 alpha - 2).
struct ScalingRegime {
    enum Kind { Intermediate, VonKarman, Linear };
    double alpha = 4.0;
    Kind kind = Linear;

    static ScalingRegime from_alpha(double a) {
        if (!(a > 2.0))
            throw std::invalid_argument("regime: alpha must exceed 2");
        ScalingRegime r;
        r.alpha = a;
        r.kind = a < 3.0 ? Intermediate : (a == 3.0 ? VonKarman : Linear);
        return r;
    }
    double energy_exponent() const { return 2 * alpha - 2; }
};

/// Rod state data at one arclength location. a and b are the frame
/// components of v': a = v'.nu2, b = v'.nu3 (v'.tau = 0 throughout).
struct StateSample {
    double s = 0;
    double a = 0, b = 0, da = 0, db = 0;
    double w = 0, dw = 0;
    double u = 0, du = 0;
    Vector3d v = Vector3d::Zero();
    Vector3d vp = Vector3d::Zero();
    Vector3d vpp = Vector3d::Zero();
};

/// Limit 1D state (u, v, w) on [0, L].
class RodState {
public:
    virtual ~RodState() = default;
    virtual StateSample sample(double s, const FrameSample& f) const = 0;
    virtual bool periodic() const = 0;
};

struct ScalarField {
    std::function<double(double)> value = [](double) { return 0.0; };
    std::function<double(double)> derivative = [](double) { return 0.0; };
};

inline ScalarField zero_field() { return {}; }

/// Fourier profile as a field on [0, L]: f(s) = series(2 pi s / L).
inline ScalarField fourier_field(FourierSeries series, double length) {
    const double rate = 2 * M_PI / length;
    auto s1 = std::make_shared<FourierSeries>(std::move(series));
    return {[s1, rate](double s) { return s1->eval(rate * s, 0); },
            [s1, rate](double s) { return rate * s1->eval(rate * s, 1); }};
}

/// Smooth test state with v' given in frame components, so the
/// inextensibility constraint v'.tau = 0 holds pointwise by construction.
/// v itself is recovered by cumulative quadrature of a nu2 + b nu3 on a
/// refined grid.
class AnalyticRodState final : public RodState {
public:
    AnalyticRodState(std::shared_ptr<const FramedCurve> frame, ScalarField a, ScalarField b,
                     ScalarField w, ScalarField u, int refine = 4)
        : frame_(std::move(frame)), a_(std::move(a)), b_(std::move(b)), w_(std::move(w)),
          u_(std::move(u)) {
        build_displacement(refine);
    }

    /// Fields are evaluated at the passed (unwrapped) s, so a ring state may
    /// carry u(L) != u(0) while the periodic frame sample wraps.
    StateSample sample(double s, const FrameSample& f) const override {
        StateSample st;
        st.s = s;
        st.a = a_.value(s);
        st.b = b_.value(s);
        st.da = a_.derivative(s);
        st.db = b_.derivative(s);
        st.w = w_.value(s);
        st.dw = w_.derivative(s);
        st.u = u_.value(s);
        st.du = u_.derivative(s);
        st.vp = st.a * f.nu2() + st.b * f.nu3();
        st.vpp = st.da * f.nu2() + st.a * f.nu2_prime() + st.db * f.nu3() + st.b * f.nu3_prime();
        st.v = displacement(s);
        return st;
    }

    bool periodic() const override { return frame_->closed(); }

    Vector3d displacement(double s) const {
        s = std::min(std::max(s, 0.0), frame_->length());
        const int i = std::min(static_cast<int>(std::floor(s / ds_)),
                               static_cast<int>(v_nodes_.size()) - 2);
        Vector3d v = v_nodes_[i];
        const double s0 = i * ds_;
        if (s > s0) v += integrate_vp(s0, s);
        return v;
    }

private:
    Vector3d vprime(double s) const {
        const FrameSample f = frame_->sample(s);
        return a_.value(s) * f.nu2() + b_.value(s) * f.nu3();
    }

    Vector3d integrate_vp(double s0, double s1) const {
        static const GaussRule g = gauss_legendre(5);
        Vector3d acc = Vector3d::Zero();
        const double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
        for (int k = 0; k < g.points(); ++k) acc += half * g.w[k] * vprime(mid + half * g.x[k]);
        return acc;
    }

    void build_displacement(int refine) {
        const int n = frame_->segments() * refine;
        ds_ = frame_->length() / n;
        v_nodes_.assign(n + 1, Vector3d::Zero());
        for (int i = 0; i < n; ++i)
            v_nodes_[i + 1] = v_nodes_[i] + integrate_vp(i * ds_, (i + 1) * ds_);
    }

    std::shared_ptr<const FramedCurve> frame_;
    ScalarField a_, b_, w_, u_;
    std::vector<Vector3d> v_nodes_;
    double ds_ = 0;
};

/// Discretized rod state: v as a cubic Hermite field whose nodal derivatives
/// are stored in frame components (a, b) of the node frames, enforcing
/// v'.tau = 0 exactly at the nodes; u and w piecewise linear.
///
/// Nodal dof layout, 7 per node: [vx vy vz a b u w].
class DiscreteRodState final : public RodState {
public:
    static constexpr int dofs_per_node = 7;

    DiscreteRodState(std::shared_ptr<const FramedCurve> frame, VectorXd dofs)
        : frame_(std::move(frame)), x_(std::move(dofs)) {
        n_ = frame_->segments();
        nodes_ = frame_->closed() ? n_ : n_ + 1;
        if (x_.size() != dofs_per_node * nodes_)
            throw std::invalid_argument("rod state: dof vector has wrong size");
        node_frames_.reserve(nodes_);
        for (int i = 0; i < nodes_; ++i) node_frames_.push_back(frame_->sample(frame_->node_s(i)));
    }

    static DiscreteRodState zero(std::shared_ptr<const FramedCurve> frame) {
        const int nodes = frame->closed() ? frame->segments() : frame->segments() + 1;
        return DiscreteRodState(std::move(frame), VectorXd::Zero(dofs_per_node * nodes));
    }

    const VectorXd& dofs() const { return x_; }
    int node_count() const { return nodes_; }
    const FramedCurve& frame() const { return *frame_; }
    bool periodic() const override { return frame_->closed(); }

    int index(int node, int comp) const { return dofs_per_node * (node % nodes_) + comp; }

    Vector3d node_value(int i) const {
        return {x_(index(i, 0)), x_(index(i, 1)), x_(index(i, 2))};
    }
    Vector3d node_derivative(int i) const {
        const FrameSample& f = node_frames_[i % nodes_];
        return x_(index(i, 3)) * f.nu2() + x_(index(i, 4)) * f.nu3();
    }

    StateSample sample(double s, const FrameSample& f) const override {
        s = frame_->wrap(s);
        const double ds = frame_->spacing();
        const int el = std::min(static_cast<int>(std::floor(s / ds)), n_ - 1);
        const double t = (s - el * ds) / ds;

        // Hermite basis and derivatives in t
        const double h00 = 1 - 3 * t * t + 2 * t * t * t;
        const double h10 = t - 2 * t * t + t * t * t;
        const double h01 = 3 * t * t - 2 * t * t * t;
        const double h11 = -t * t + t * t * t;
        const double d00 = -6 * t + 6 * t * t, d10 = 1 - 4 * t + 3 * t * t;
        const double d01 = 6 * t - 6 * t * t, d11 = -2 * t + 3 * t * t;
        const double g00 = -6 + 12 * t, g10 = -4 + 6 * t, g01 = 6 - 12 * t, g11 = -2 + 6 * t;

        const Vector3d v0 = node_value(el), v1 = node_value(el + 1);
        const Vector3d m0 = node_derivative(el), m1 = node_derivative(el + 1);

        StateSample st;
        st.s = s;
        st.v = h00 * v0 + ds * h10 * m0 + h01 * v1 + ds * h11 * m1;
        st.vp = (d00 * v0 + ds * d10 * m0 + d01 * v1 + ds * d11 * m1) / ds;
        st.vpp = (g00 * v0 + ds * g10 * m0 + g01 * v1 + ds * g11 * m1) / (ds * ds);

        st.a = st.vp.dot(f.nu2());
        st.b = st.vp.dot(f.nu3());
        st.da = st.vpp.dot(f.nu2()) + st.vp.dot(f.nu2_prime());
        st.db = st.vpp.dot(f.nu3()) + st.vp.dot(f.nu3_prime());

        st.u = (1 - t) * x_(index(el, 5)) + t * x_(index(el + 1, 5));
        st.du = (x_(index(el + 1, 5)) - x_(index(el, 5))) / ds;
        st.w = (1 - t) * x_(index(el, 6)) + t * x_(index(el + 1, 6));
        st.dw = (x_(index(el + 1, 6)) - x_(index(el, 6))) / ds;
        return st;
    }

    /// Largest |v'(s).tau(s)| over the 2-point Gauss set used by the energy
    /// quadrature. Zero at the nodes by construction; monitored between.
    double constraint_quadrature_residual() const {
        static const GaussRule g = gauss_legendre(2);
        double worst = 0;
        for (int el = 0; el < n_; ++el) {
            for (int q = 0; q < g.points(); ++q) {
                const double s = (el + 0.5 + 0.5 * g.x[q]) * frame_->spacing();
                const FrameSample f = frame_->sample(s);
                const StateSample st = sample(s, f);
                worst = std::max(worst, std::abs(st.vp.dot(f.tau())));
            }
        }
        return worst;
    }

    void to_csv(std::ostream& os) const {
        os << "s,u,w,vx,vy,vz,dvx,dvy,dvz\n";
        char buf[64];
        for (int i = 0; i < nodes_; ++i) {
            const Vector3d v = node_value(i), d = node_derivative(i);
            auto put = [&](double val, char sep) {
                std::snprintf(buf, sizeof buf, "%.17g%c", val, sep);
                os << buf;
            };
            put(frame_->node_s(i), ',');
            put(x_(index(i, 5)), ',');
            put(x_(index(i, 6)), ',');
            for (int k = 0; k < 3; ++k) put(v(k), ',');
            put(d(0), ',');
            put(d(1), ',');
            put(d(2), '\n');
        }
    }

private:
    std::shared_ptr<const FramedCurve> frame_;
    VectorXd x_;
    int n_ = 0, nodes_ = 0;
    std::vector<FrameSample> node_frames_;
};

} // namespace currod
