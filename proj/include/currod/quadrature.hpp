#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace currod {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
    int points() const { return static_cast<int>(x.size()); }
};

inline GaussRule gauss_legendre(int n) {
    GaussRule g;
    switch (n) {
        case 1:
            g.x = {0.0};
            g.w = {2.0};
            break;
        case 2:
            g.x = {-0.5773502691896257, 0.5773502691896257};
            g.w = {1.0, 1.0};
            break;
        case 3:
            g.x = {-0.7745966692414834, 0.0, 0.7745966692414834};
            g.w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            break;
        case 4:
            g.x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                   0.8611363115940526};
            g.w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                   0.3478548451374538};
            break;
        case 5:
            g.x = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                   0.9061798459386640};
            g.w = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                   0.4786286704993665, 0.2369268850561891};
            break;
        case 8:
            g.x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                   -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
                   0.7966664774136267, 0.9602898564975363};
            g.w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                   0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                   0.2223810344533745, 0.1012285362903763};
            break;
        default:
            throw std::invalid_argument("gauss_legendre: unsupported point count");
    }
    return g;
}

/// Quadrature on the reference triangle (0,0)-(1,0)-(0,1); weights sum to 1/2.
struct TriangleRule {
    std::vector<double> x, y, w;
    int points() const { return static_cast<int>(x.size()); }
};

/// Edge-midpoint rule, exact for polynomials of degree 2.
inline TriangleRule triangle_rule_midpoint() {
    TriangleRule r;
    r.x = {0.5, 0.5, 0.0};
    r.y = {0.0, 0.5, 0.5};
    r.w = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    return r;
}

/// Duffy (collapsed square) rule from an n-point Gauss rule in each factor:
///   int_T f = int_0^1 int_0^1 f(u, v(1-u)) (1-u) dv du.
/// A degree-d integrand becomes degree <= d+1 in u and <= d in v, so the
/// rule is exact through degree 2n-2.
inline TriangleRule triangle_rule_duffy(int n) {
    const GaussRule g = gauss_legendre(n);
    TriangleRule r;
    for (int i = 0; i < n; ++i) {
        const double u = 0.5 * (g.x[i] + 1.0), wu = 0.5 * g.w[i];
        for (int j = 0; j < n; ++j) {
            const double v = 0.5 * (g.x[j] + 1.0), wv = 0.5 * g.w[j];
            r.x.push_back(u);
            r.y.push_back(v * (1.0 - u));
            r.w.push_back(wu * wv * (1.0 - u));
        }
    }
    return r;
}

/// Rule exact to at least the requested polynomial degree.
inline TriangleRule triangle_rule(int degree) {
    if (degree <= 2) return triangle_rule_midpoint();
    const int need = (degree + 3) / 2; // smallest n with 2n-2 >= degree
    for (int n : {3, 4, 5, 8})
        if (n >= need) return triangle_rule_duffy(n);
    throw std::invalid_argument("triangle_rule: degree too high");
}

} // namespace currod
