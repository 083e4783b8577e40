#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace currod {

using Eigen::Vector3d;

/// Arc-length parametrized curve with derivatives up to third order.
class Curve {
public:
    virtual ~Curve() = default;
    virtual Vector3d position(double s) const = 0;
    virtual Vector3d d1(double s) const = 0;
    virtual Vector3d d2(double s) const = 0;
    virtual Vector3d d3(double s) const = 0;
    virtual double length() const = 0;
    virtual bool closed() const = 0;
};

using CurvePtr = std::shared_ptr<const Curve>;

class LineCurve final : public Curve {
public:
    explicit LineCurve(double len) : len_(len) {
        if (!(len > 0)) throw std::invalid_argument("line: length must be positive");
    }
    Vector3d position(double s) const override { return {s, 0, 0}; }
    Vector3d d1(double) const override { return {1, 0, 0}; }
    Vector3d d2(double) const override { return {0, 0, 0}; }
    Vector3d d3(double) const override { return {0, 0, 0}; }
    double length() const override { return len_; }
    bool closed() const override { return false; }

private:
    double len_;
};

/// Circle of radius R in the (e1,e2)-plane. Closed when the arc spans the
/// full circumference.
class CircleCurve final : public Curve {
public:
    CircleCurve(double radius, double len) : r_(radius), len_(len) {
        if (!(radius > 0)) throw std::invalid_argument("circle: radius must be positive");
        if (!(len > 0) || len > 2 * M_PI * radius * (1 + 1e-12))
            throw std::invalid_argument("circle: length must lie in (0, 2*pi*R]");
    }
    explicit CircleCurve(double radius) : CircleCurve(radius, 2 * M_PI * radius) {}

    Vector3d position(double s) const override {
        const double a = s / r_;
        return {r_ * std::cos(a), r_ * std::sin(a), 0};
    }
    Vector3d d1(double s) const override {
        const double a = s / r_;
        return {-std::sin(a), std::cos(a), 0};
    }
    Vector3d d2(double s) const override {
        const double a = s / r_;
        return {-std::cos(a) / r_, -std::sin(a) / r_, 0};
    }
    Vector3d d3(double s) const override {
        const double a = s / r_;
        return {std::sin(a) / (r_ * r_), -std::cos(a) / (r_ * r_), 0};
    }
    double length() const override { return len_; }
    bool closed() const override { return std::abs(len_ - 2 * M_PI * r_) < 1e-9 * r_; }

private:
    double r_, len_;
};

/// Circular helix, arc-length parametrized: x = R cos(w s), y = R sin(w s),
/// z = c w s with c = pitch/(2 pi) and w = 1/sqrt(R^2 + c^2).
class HelixCurve final : public Curve {
public:
    HelixCurve(double radius, double pitch, double len)
        : r_(radius), c_(pitch / (2 * M_PI)), len_(len) {
        if (!(radius > 0)) throw std::invalid_argument("helix: radius must be positive");
        if (!(len > 0)) throw std::invalid_argument("helix: length must be positive");
        w_ = 1.0 / std::sqrt(r_ * r_ + c_ * c_);
    }

    Vector3d position(double s) const override {
        const double a = w_ * s;
        return {r_ * std::cos(a), r_ * std::sin(a), c_ * a};
    }
    Vector3d d1(double s) const override {
        const double a = w_ * s;
        return {-w_ * r_ * std::sin(a), w_ * r_ * std::cos(a), w_ * c_};
    }
    Vector3d d2(double s) const override {
        const double a = w_ * s, w2 = w_ * w_;
        return {-w2 * r_ * std::cos(a), -w2 * r_ * std::sin(a), 0};
    }
    Vector3d d3(double s) const override {
        const double a = w_ * s, w3 = w_ * w_ * w_;
        return {w3 * r_ * std::sin(a), -w3 * r_ * std::cos(a), 0};
    }
    double length() const override { return len_; }
    bool closed() const override { return false; }

    double curvature() const { return r_ * w_ * w_; }
    double torsion() const { return c_ * w_ * w_; }

private:
    double r_, c_, len_, w_;
};

/// One Fourier component table: f(t) = sum_k a_k cos(k t) + b_k sin(k t),
/// t in [0, 2 pi).
struct FourierSeries {
    std::vector<double> cos_coeff; // index k = 0..K
    std::vector<double> sin_coeff;

    double eval(double t, int deriv = 0) const {
        double v = 0;
        const std::size_t K = std::max(cos_coeff.size(), sin_coeff.size());
        for (std::size_t k = 0; k < K; ++k) {
            const double a = k < cos_coeff.size() ? cos_coeff[k] : 0.0;
            const double b = k < sin_coeff.size() ? sin_coeff[k] : 0.0;
            const double kd = static_cast<double>(k);
            double kp = 1;
            for (int d = 0; d < deriv; ++d) kp *= kd;
            switch (deriv % 4) {
                case 0: v += kp * (a * std::cos(kd * t) + b * std::sin(kd * t)); break;
                case 1: v += kp * (-a * std::sin(kd * t) + b * std::cos(kd * t)); break;
                case 2: v += kp * (-a * std::cos(kd * t) - b * std::sin(kd * t)); break;
                case 3: v += kp * (a * std::sin(kd * t) - b * std::cos(kd * t)); break;
            }
        }
        return v;
    }
};

/// Closed curve given by Fourier series per component, reparametrized to
/// arc length numerically. The parameter-to-arclength map is tabulated with
/// composite Gauss quadrature and inverted by bisection plus Newton steps.
class FourierCurve final : public Curve {
public:
    explicit FourierCurve(std::array<FourierSeries, 3> comp, int table_size = 4096)
        : comp_(std::move(comp)) {
        build_table(table_size);
    }

    Vector3d position(double s) const override {
        const double t = param(s);
        return base(t, 0);
    }
    Vector3d d1(double s) const override {
        const double t = param(s);
        return base(t, 1) * tp(t);
    }
    Vector3d d2(double s) const override {
        const double t = param(s);
        const double t1 = tp(t), t2 = tpp(t);
        return base(t, 2) * t1 * t1 + base(t, 1) * t2;
    }
    Vector3d d3(double s) const override {
        const double t = param(s);
        const double t1 = tp(t), t2 = tpp(t), t3 = tppp(t);
        return base(t, 3) * t1 * t1 * t1 + 3.0 * base(t, 2) * t1 * t2 + base(t, 1) * t3;
    }
    double length() const override { return len_; }
    bool closed() const override { return true; }

private:
    Vector3d base(double t, int d) const {
        return {comp_[0].eval(t, d), comp_[1].eval(t, d), comp_[2].eval(t, d)};
    }
    double speed(double t) const { return base(t, 1).norm(); }

    // dt/ds and higher derivatives of the inverse arclength map.
    double tp(double t) const { return 1.0 / speed(t); }
    double tpp(double t) const {
        const double sg = speed(t);
        const double sgp = base(t, 1).dot(base(t, 2)) / sg;
        return -sgp / (sg * sg * sg);
    }
    double tppp(double t) const {
        const double sg = speed(t);
        const double sgp = base(t, 1).dot(base(t, 2)) / sg;
        const double sgpp =
            (base(t, 2).squaredNorm() + base(t, 1).dot(base(t, 3))) / sg - sgp * sgp / sg;
        return -sgpp / std::pow(sg, 4) + 3.0 * sgp * sgp / std::pow(sg, 5);
    }

    void build_table(int n) {
        // cumulative arclength over [0, 2 pi] with 4-point Gauss per cell
        static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                     0.3399810435848563, 0.8611363115940526};
        static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                     0.6521451548625461, 0.3478548451374538};
        t_grid_.resize(n + 1);
        s_grid_.resize(n + 1);
        const double dt = 2 * M_PI / n;
        s_grid_[0] = 0;
        for (int i = 0; i < n; ++i) {
            t_grid_[i] = i * dt;
            double acc = 0;
            for (int g = 0; g < 4; ++g) {
                const double t = (i + 0.5 + 0.5 * gx[g]) * dt;
                const double sp = speed(t);
                if (!(sp > 1e-10))
                    throw std::invalid_argument("fourier curve: vanishing speed, not a regular curve");
                acc += 0.5 * dt * gw[g] * sp;
            }
            s_grid_[i + 1] = s_grid_[i] + acc;
        }
        t_grid_[n] = 2 * M_PI;
        len_ = s_grid_[n];
    }

    double param(double s) const {
        // clamp into [0, L]; table bisection then Newton on s(t) - s = 0
        s = std::min(std::max(s, 0.0), len_);
        std::size_t lo = 0, hi = s_grid_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (s_grid_[mid] <= s ? lo : hi) = mid;
        }
        double t = t_grid_[lo] + (t_grid_[lo + 1] - t_grid_[lo]) *
                                     (s - s_grid_[lo]) /
                                     std::max(s_grid_[lo + 1] - s_grid_[lo], 1e-300);
        // Newton with local 4-point Gauss for s(t) increments
        for (int it = 0; it < 30; ++it) {
            const double f = arclen_from(t_grid_[lo], t) + s_grid_[lo] - s;
            const double step = -f / speed(t);
            t += step;
            if (std::abs(step) < 1e-14 * (1 + std::abs(t))) break;
        }
        return t;
    }

    double arclen_from(double t0, double t1) const {
        static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                     0.3399810435848563, 0.8611363115940526};
        static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                     0.6521451548625461, 0.3478548451374538};
        double acc = 0;
        const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
        for (int g = 0; g < 4; ++g) acc += half * gw[g] * speed(mid + half * gx[g]);
        return acc;
    }

    std::array<FourierSeries, 3> comp_;
    std::vector<double> t_grid_, s_grid_;
    double len_ = 0;
};

} // namespace currod
