#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "currod/linsolve.hpp"

namespace currod {

using Eigen::Vector2d;

struct RawMesh {
    std::vector<Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;
};

inline double triangle_area(const Vector2d& a, const Vector2d& b, const Vector2d& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

/// Structured triangulation of an axis-aligned rectangle centered wherever
/// the caller put it; two triangles per grid cell.
inline RawMesh mesh_rectangle(double width, double height, double edge,
                              const Vector2d& center = Vector2d::Zero()) {
    if (!(width > 0) || !(height > 0)) throw std::invalid_argument("rectangle: degenerate side");
    if (!(edge > 0)) throw std::invalid_argument("rectangle: edge length must be positive");
    const int nx = std::max(1, static_cast<int>(std::ceil(width / edge)));
    const int ny = std::max(1, static_cast<int>(std::ceil(height / edge)));
    RawMesh m;
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.vertices.emplace_back(center.x() - 0.5 * width + width * i / nx,
                                    center.y() - 0.5 * height + height * j / ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

/// Concentric-ring fan mesh of a disc: ring j carries 6j nodes, giving a
/// near-uniform triangulation.
inline RawMesh mesh_disc(double radius, double edge) {
    if (!(radius > 0)) throw std::invalid_argument("disc: radius must be positive");
    if (!(edge > 0)) throw std::invalid_argument("disc: edge length must be positive");
    const int rings = std::max(2, static_cast<int>(std::ceil(radius / edge)));
    RawMesh m;
    m.vertices.emplace_back(0, 0);
    std::vector<int> ring_start{0};
    for (int j = 1; j <= rings; ++j) {
        ring_start.push_back(static_cast<int>(m.vertices.size()));
        const int cnt = 6 * j;
        const double r = radius * j / rings;
        for (int k = 0; k < cnt; ++k) {
            const double a = 2 * M_PI * k / cnt;
            m.vertices.emplace_back(r * std::cos(a), r * std::sin(a));
        }
    }
    for (int k = 0; k < 6; ++k)
        m.triangles.push_back({ring_start[1] + k, ring_start[1] + (k + 1) % 6, 0});
    for (int j = 2; j <= rings; ++j) {
        const int ni = 6 * (j - 1), no = 6 * j;
        auto inner = [&](int k) { return ring_start[j - 1] + ((k % ni) + ni) % ni; };
        auto outer = [&](int k) { return ring_start[j] + ((k % no) + no) % no; };
        for (int sec = 0; sec < 6; ++sec) {
            const int i0 = sec * (j - 1), o0 = sec * j;
            for (int i = 0; i < j; ++i)
                m.triangles.push_back({outer(o0 + i), outer(o0 + i + 1), inner(i0 + i)});
            for (int i = 0; i + 1 < j; ++i)
                m.triangles.push_back({outer(o0 + i + 1), inner(i0 + i + 1), inner(i0 + i)});
        }
    }
    return m;
}

namespace detail {

inline bool segments_properly_intersect(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                                        const Vector2d& d) {
    auto orient = [](const Vector2d& p, const Vector2d& q, const Vector2d& r) {
        const double v = (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
        return v > 0 ? 1 : (v < 0 ? -1 : 0);
    };
    return orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
}

inline void check_simple_convex(const std::vector<Vector2d>& poly) {
    const int n = static_cast<int>(poly.size());
    if (n < 3) throw std::invalid_argument("polygon: need at least 3 vertices");
    double area2 = 0;
    for (int i = 0; i < n; ++i) {
        const Vector2d &a = poly[i], &b = poly[(i + 1) % n];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    if (!(area2 > 0))
        throw std::invalid_argument("polygon: must be positively oriented with positive area");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(i - j) <= 1 || (i == 0 && j == n - 1)) continue;
            if (segments_properly_intersect(poly[i], poly[(i + 1) % n], poly[j],
                                            poly[(j + 1) % n]))
                throw std::invalid_argument("polygon: self-intersecting boundary rejected");
        }
    for (int i = 0; i < n; ++i) {
        const Vector2d& a = poly[i];
        const Vector2d& b = poly[(i + 1) % n];
        const Vector2d& c = poly[(i + 2) % n];
        if (triangle_area(a, b, c) < -1e-12 * area2)
            throw std::invalid_argument("polygon: non-convex sections are unsupported");
    }
}

// Lawson edge-flip sweep toward the Delaunay criterion; conformity is
// preserved by construction.
inline void delaunay_flip(RawMesh& m, int max_sweeps = 50) {
    auto incircle = [&](int ia, int ib, int ic, int id) {
        // > 0 when d lies inside the circumcircle of ccw triangle (a, b, c)
        const Vector2d &a = m.vertices[ia], &b = m.vertices[ib], &c = m.vertices[ic],
                       &d = m.vertices[id];
        Eigen::Matrix3d mm;
        mm << a.x() - d.x(), a.y() - d.y(), (a - d).squaredNorm(),
              b.x() - d.x(), b.y() - d.y(), (b - d).squaredNorm(),
              c.x() - d.x(), c.y() - d.y(), (c - d).squaredNorm();
        return mm.determinant();
    };
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        std::map<std::pair<int, int>, std::vector<int>> edge_tris;
        for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
            for (int e = 0; e < 3; ++e) {
                int u = m.triangles[t][e], v = m.triangles[t][(e + 1) % 3];
                if (u > v) std::swap(u, v);
                edge_tris[{u, v}].push_back(t);
            }
        bool flipped = false;
        for (auto& [edge, tris] : edge_tris) {
            if (tris.size() != 2) continue;
            auto &t1 = m.triangles[tris[0]], &t2 = m.triangles[tris[1]];
            int p1 = -1, p2 = -1;
            for (int v : t1)
                if (v != edge.first && v != edge.second) p1 = v;
            for (int v : t2)
                if (v != edge.first && v != edge.second) p2 = v;
            if (p1 < 0 || p2 < 0 || p1 == p2) continue;
            const double scale = (m.vertices[edge.first] - m.vertices[edge.second]).squaredNorm();
            if (incircle(edge.first, edge.second, p1, p2) <= 1e-12 * scale * scale) continue;
            // only flip when the union is strictly convex
            if (triangle_area(m.vertices[p1], m.vertices[p2], m.vertices[edge.first]) <= 0 ||
                triangle_area(m.vertices[p2], m.vertices[p1], m.vertices[edge.second]) <= 0)
                continue;
            t1 = {p1, p2, edge.first};
            t2 = {p2, p1, edge.second};
            flipped = true;
            break; // edge map is stale after a flip; rebuild
        }
        if (!flipped) return;
    }
}

} // namespace detail

inline void refine_uniform(RawMesh& m) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = static_cast<int>(m.vertices.size());
        m.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
        midpoint.emplace(key, id);
        return id;
    };
    std::vector<std::array<int, 3>> out;
    out.reserve(4 * m.triangles.size());
    for (const auto& t : m.triangles) {
        const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
        out.push_back({t[0], m01, m20});
        out.push_back({t[1], m12, m01});
        out.push_back({t[2], m20, m12});
        out.push_back({m01, m12, m20});
    }
    m.triangles = std::move(out);
}

/// Fan triangulation of a convex polygon refined to the target edge length,
/// finished with Delaunay flips.
inline RawMesh mesh_polygon(const std::vector<Vector2d>& poly, double edge) {
    if (!(edge > 0)) throw std::invalid_argument("polygon: edge length must be positive");
    detail::check_simple_convex(poly);
    Vector2d centroid = Vector2d::Zero();
    for (const auto& p : poly) centroid += p;
    centroid /= static_cast<double>(poly.size());
    RawMesh m;
    m.vertices.push_back(centroid);
    const int n = static_cast<int>(poly.size());
    for (const auto& p : poly) m.vertices.push_back(p);
    for (int i = 0; i < n; ++i) m.triangles.push_back({0, 1 + i, 1 + (i + 1) % n});
    auto longest_edge = [&] {
        double l = 0;
        for (const auto& t : m.triangles)
            for (int e = 0; e < 3; ++e)
                l = std::max(l, (m.vertices[t[e]] - m.vertices[t[(e + 1) % 3]]).norm());
        return l;
    };
    while (longest_edge() > edge && m.triangles.size() < 2000000) refine_uniform(m);
    detail::delaunay_flip(m);
    return m;
}

struct SectionPreset {
    enum Kind { Disc, Square, Rectangle, Polygon } kind = Disc;
    double aspect = 1.0;                 // rectangle only
    std::vector<Vector2d> vertices;     // polygon only
};

/// Mesh factory for the section presets; all presets have unit area before
/// normalization except Polygon.
inline RawMesh make_section(const SectionPreset& preset, double target_edge_length) {
    switch (preset.kind) {
        case SectionPreset::Disc:
            return mesh_disc(1.0 / std::sqrt(M_PI), target_edge_length);
        case SectionPreset::Square:
            return mesh_rectangle(1.0, 1.0, target_edge_length);
        case SectionPreset::Rectangle: {
            if (!(preset.aspect > 0)) throw std::invalid_argument("rectangle: aspect must be positive");
            const double w = std::sqrt(preset.aspect);
            return mesh_rectangle(w, 1.0 / w, target_edge_length);
        }
        case SectionPreset::Polygon:
            return mesh_polygon(preset.vertices, target_edge_length);
    }
    throw std::invalid_argument("make_section: unknown preset");
}

struct NormalizationReport {
    Vector2d translation = Vector2d::Zero(); // applied to raw coordinates
    double rotation = 0;                     // principal-axis angle removed
    double scale = 1;                        // unit-area scaling factor
};

/// Normalized cross-section: unit area, centered, principal axes
/// (so the first moments and the mixed second moment vanish), with the P1
/// stiffness/mass operators assembled once.
class SectionMesh {
public:
    SectionMesh(RawMesh raw, NormalizationReport report)
        : vertices_(std::move(raw.vertices)), triangles_(std::move(raw.triangles)),
          report_(report) {
        build();
    }

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int triangle_count() const { return static_cast<int>(triangles_.size()); }
    const std::vector<Vector2d>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_; }
    double area() const { return area_; }
    double I2() const { return i2_; } // int zeta^2
    double I3() const { return i3_; } // int xi^2
    double muD() const { return i2_ + i3_; }
    const NormalizationReport& report() const { return report_; }

    double tri_area(int t) const { return tri_area_[t]; }
    /// Gradient of the P1 hat function of local vertex k on triangle t.
    Vector2d tri_grad(int t, int k) const { return tri_grad_[t][k]; }

    const SparseMat& stiffness() const { return stiffness_; }
    const SparseMat& mass() const { return mass_; }

    /// Exact integral of a function evaluated with the edge-midpoint rule
    /// (exact through quadratic integrands).
    template <class F>
    double integrate(F&& f) const {
        double acc = 0;
        for (int t = 0; t < triangle_count(); ++t) {
            const auto& tri = triangles_[t];
            const Vector2d m01 = 0.5 * (vertices_[tri[0]] + vertices_[tri[1]]);
            const Vector2d m12 = 0.5 * (vertices_[tri[1]] + vertices_[tri[2]]);
            const Vector2d m20 = 0.5 * (vertices_[tri[2]] + vertices_[tri[0]]);
            acc += tri_area_[t] / 3.0 * (f(m01) + f(m12) + f(m20));
        }
        return acc;
    }

    /// Integral of a P1 nodal field.
    double integrate_nodal(const VectorXd& values) const {
        double acc = 0;
        for (int t = 0; t < triangle_count(); ++t) {
            const auto& tri = triangles_[t];
            acc += tri_area_[t] / 3.0 * (values(tri[0]) + values(tri[1]) + values(tri[2]));
        }
        return acc;
    }

    SectionMesh refined() const {
        RawMesh raw{vertices_, triangles_};
        refine_uniform(raw);
        return SectionMesh(std::move(raw), report_);
    }

    void to_csv(std::ostream& os, const VectorXd* nodal = nullptr) const {
        char buf[64];
        os << (nodal ? "x,y,value\n" : "x,y\n");
        for (int i = 0; i < vertex_count(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", vertices_[i].x(), vertices_[i].y());
            os << buf;
            if (nodal) {
                std::snprintf(buf, sizeof buf, ",%.17g", (*nodal)(i));
                os << buf;
            }
            os << '\n';
        }
        os << "triangles\n";
        for (const auto& t : triangles_) os << t[0] << ',' << t[1] << ',' << t[2] << '\n';
    }

private:
    void build() {
        const int nt = triangle_count();
        tri_area_.resize(nt);
        tri_grad_.resize(nt);
        for (int t = 0; t < nt; ++t) {
            const auto& tri = triangles_[t];
            const Vector2d &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
            const double ar = triangle_area(a, b, c);
            if (!(ar > 0)) throw std::invalid_argument("section: degenerate or flipped triangle");
            tri_area_[t] = ar;
            tri_grad_[t][0] = Vector2d(b.y() - c.y(), c.x() - b.x()) / (2 * ar);
            tri_grad_[t][1] = Vector2d(c.y() - a.y(), a.x() - c.x()) / (2 * ar);
            tri_grad_[t][2] = Vector2d(a.y() - b.y(), b.x() - a.x()) / (2 * ar);
        }
        area_ = 0;
        for (double a : tri_area_) area_ += a;
        i2_ = integrate([](const Vector2d& p) { return p.y() * p.y(); });
        i3_ = integrate([](const Vector2d& p) { return p.x() * p.x(); });

        std::vector<Eigen::Triplet<double>> ks, ms;
        for (int t = 0; t < nt; ++t) {
            const auto& tri = triangles_[t];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    ks.emplace_back(tri[i], tri[j],
                                    tri_area_[t] * tri_grad_[t][i].dot(tri_grad_[t][j]));
                    ms.emplace_back(tri[i], tri[j], tri_area_[t] / 12.0 * (i == j ? 2.0 : 1.0));
                }
        }
        const int n = vertex_count();
        stiffness_.resize(n, n);
        stiffness_.setFromTriplets(ks.begin(), ks.end());
        mass_.resize(n, n);
        mass_.setFromTriplets(ms.begin(), ms.end());

        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& tri : triangles_)
            for (int e = 0; e < 3; ++e) {
                auto key = std::minmax(tri[e], tri[(e + 1) % 3]);
                ++edge_count[key];
            }
        boundary_.clear();
        for (const auto& [e, cnt] : edge_count)
            if (cnt == 1) boundary_.push_back({e.first, e.second});
    }

    std::vector<Vector2d> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> boundary_;
    NormalizationReport report_;
    std::vector<double> tri_area_;
    std::vector<std::array<Vector2d, 3>> tri_grad_;
    double area_ = 0, i2_ = 0, i3_ = 0;
    SparseMat stiffness_, mass_;
};

/// Translate to the centroid, rotate to principal axes, scale to unit area.
inline SectionMesh normalize_section(RawMesh raw) {
    std::vector<double> areas(raw.triangles.size());
    double area = 0;
    Vector2d first = Vector2d::Zero();
    for (std::size_t t = 0; t < raw.triangles.size(); ++t) {
        const auto& tri = raw.triangles[t];
        areas[t] = triangle_area(raw.vertices[tri[0]], raw.vertices[tri[1]], raw.vertices[tri[2]]);
        area += areas[t];
        first += areas[t] / 3.0 *
                 (raw.vertices[tri[0]] + raw.vertices[tri[1]] + raw.vertices[tri[2]]);
    }
    if (!(area > 0)) throw std::invalid_argument("normalize_section: non-positive area");
    const Vector2d centroid = first / area;
    for (auto& v : raw.vertices) v -= centroid;

    double mxx = 0, myy = 0, mxy = 0;
    for (std::size_t t = 0; t < raw.triangles.size(); ++t) {
        const auto& tri = raw.triangles[t];
        const Vector2d m01 = 0.5 * (raw.vertices[tri[0]] + raw.vertices[tri[1]]);
        const Vector2d m12 = 0.5 * (raw.vertices[tri[1]] + raw.vertices[tri[2]]);
        const Vector2d m20 = 0.5 * (raw.vertices[tri[2]] + raw.vertices[tri[0]]);
        for (const Vector2d& p : {m01, m12, m20}) {
            mxx += areas[t] / 3.0 * p.x() * p.x();
            myy += areas[t] / 3.0 * p.y() * p.y();
            mxy += areas[t] / 3.0 * p.x() * p.y();
        }
    }
    double angle = 0;
    if (std::abs(mxy) > 1e-14 * (mxx + myy)) angle = 0.5 * std::atan2(2 * mxy, mxx - myy);
    if (angle != 0) {
        const double c = std::cos(angle), s = std::sin(angle);
        for (auto& v : raw.vertices) v = Vector2d(c * v.x() + s * v.y(), -s * v.x() + c * v.y());
    }
    const double scale = 1.0 / std::sqrt(area);
    for (auto& v : raw.vertices) v *= scale;

    NormalizationReport rep;
    rep.translation = -centroid;
    rep.rotation = -angle;
    rep.scale = scale;
    return SectionMesh(std::move(raw), rep);
}

} // namespace currod
