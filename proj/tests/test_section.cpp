#include <catch2/catch_amalgamated.hpp>

#include "currod/section.hpp"
#include "currod/torsion.hpp"
#include "oracles.hpp"

using namespace currod;

TEST_CASE("rectangle mesh has the requested area and moments") {
    RawMesh raw = mesh_rectangle(1.0, 1.0, 0.1, Vector2d(3.0, 5.0));
    double area = 0;
    for (const auto& t : raw.triangles)
        area += triangle_area(raw.vertices[t[0]], raw.vertices[t[1]], raw.vertices[t[2]]);
    REQUIRE(area == Catch::Approx(1.0).epsilon(1e-12));

    // moments of a 2:1 rectangle before normalization are in ratio 4:1
    const double w = std::sqrt(2.0), h = 1.0 / w;
    SectionMesh mesh = normalize_section(mesh_rectangle(w, h, 0.05));
    REQUIRE(mesh.I3() / mesh.I2() == Catch::Approx(4.0).epsilon(1e-10));
    REQUIRE(mesh.I3() == Catch::Approx(oracles::rect_Iyy(w, h)).epsilon(1e-10));
    REQUIRE(mesh.I2() == Catch::Approx(oracles::rect_Ixx(w, h)).epsilon(1e-10));
}

TEST_CASE("disc mesh area converges to pi r^2") {
    const double r = 1.0;
    double prev_defect = 1;
    for (double edge : {0.25, 0.125}) {
        RawMesh raw = mesh_disc(r, edge);
        double area = 0;
        for (const auto& t : raw.triangles)
            area += triangle_area(raw.vertices[t[0]], raw.vertices[t[1]], raw.vertices[t[2]]);
        const double defect = M_PI - area;
        REQUIRE(defect > 0);
        REQUIRE(defect < prev_defect);
        prev_defect = defect;
    }
    REQUIRE(prev_defect < 0.02);
}

TEST_CASE("normalization enforces the paper's moment conditions") {
    // shifted and rotated rectangle
    RawMesh raw = mesh_rectangle(2.0, 0.7, 0.08, Vector2d(1.5, -2.0));
    const double c = std::cos(0.4), s = std::sin(0.4);
    for (auto& v : raw.vertices) v = Vector2d(c * v.x() - s * v.y(), s * v.x() + c * v.y());
    SectionMesh mesh = normalize_section(std::move(raw));

    REQUIRE(mesh.area() == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(mesh.integrate([](const Vector2d& p) { return p.x(); }) ==
            Catch::Approx(0.0).margin(1e-10));
    REQUIRE(mesh.integrate([](const Vector2d& p) { return p.y(); }) ==
            Catch::Approx(0.0).margin(1e-10));
    REQUIRE(mesh.integrate([](const Vector2d& p) { return p.x() * p.y(); }) ==
            Catch::Approx(0.0).margin(1e-10));
    REQUIRE(mesh.muD() == Catch::Approx(mesh.I2() + mesh.I3()).margin(1e-15));
}

TEST_CASE("centered unit square needs no transform") {
    SectionMesh mesh = normalize_section(mesh_rectangle(1.0, 1.0, 0.1, Vector2d(3.0, 5.0)));
    REQUIRE(mesh.report().translation.x() == Catch::Approx(-3.0).margin(1e-12));
    REQUIRE(mesh.report().translation.y() == Catch::Approx(-5.0).margin(1e-12));
    REQUIRE(mesh.report().rotation == 0.0); // tie-break: identity
    REQUIRE(mesh.report().scale == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("unit-area disc moments match the analytic values") {
    SectionMesh mesh = normalize_section(make_section({SectionPreset::Disc}, 0.03));
    REQUIRE(mesh.I2() == Catch::Approx(oracles::disc_unit_area_I()).margin(1e-4));
    REQUIRE(mesh.I3() == Catch::Approx(oracles::disc_unit_area_I()).margin(1e-4));
    REQUIRE(mesh.muD() == Catch::Approx(oracles::disc_unit_area_muD()).margin(2e-4));
}

TEST_CASE("operators: stiffness PSD with constant kernel, mass SPD") {
    SectionMesh mesh = normalize_section(make_section({SectionPreset::Square}, 0.2));
    const int n = mesh.vertex_count();
    const VectorXd ones = VectorXd::Ones(n);
    REQUIRE((mesh.stiffness() * ones).norm() < 1e-12);
    REQUIRE((mesh.stiffness() - SparseMat(mesh.stiffness().transpose())).norm() < 1e-14);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (int k = 0; k < 10; ++k) {
        VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = d(rng);
        REQUIRE(v.dot(mesh.stiffness() * v) > -1e-12);
        REQUIRE(v.dot(mesh.mass() * v) > 0);
    }
    // mass integrates 1 to the area
    REQUIRE(ones.dot(mesh.mass() * ones) == Catch::Approx(mesh.area()).epsilon(1e-12));
}

TEST_CASE("torsional rigidity of the unit-area disc") {
    SectionMesh mesh = normalize_section(make_section({SectionPreset::Disc}, 0.05));
    const TorsionSolution tor = torsional_rigidity(mesh);
    // warping vanishes for circles: T = polar moment = 1/(2 pi)
    REQUIRE(tor.rigidity == Catch::Approx(oracles::disc_unit_area_muD()).epsilon(0.01));
    REQUIRE(tor.psi.lpNorm<Eigen::Infinity>() < 1e-3);
    REQUIRE(tor.rigidity <= mesh.muD());
    REQUIRE(mesh.integrate_nodal(tor.psi) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("torsional rigidity of the unit square against the series oracle") {
    const double expected = oracles::torsion_rectangle_series(1.0, 1.0);
    REQUIRE(expected == Catch::Approx(0.140577).margin(2e-6)); // classical value
    SectionMesh mesh = normalize_section(make_section({SectionPreset::Square}, 0.04));
    const TorsionSolution tor = torsional_rigidity(mesh);
    REQUIRE(tor.rigidity == Catch::Approx(expected).epsilon(0.01));
    REQUIRE(tor.rigidity < mesh.muD());
}

TEST_CASE("aspect ratio reduces T relative to the polar moment") {
    SectionMesh sq = normalize_section(make_section({SectionPreset::Square}, 0.05));
    SectionPreset rect{SectionPreset::Rectangle};
    rect.aspect = 3.0;
    SectionMesh r3 = normalize_section(make_section(rect, 0.05));
    const double tsq = torsional_rigidity(sq).rigidity;
    const double tr3 = torsional_rigidity(r3).rigidity;
    REQUIRE(tsq / sq.muD() > tr3 / r3.muD());
    REQUIRE(tr3 < r3.muD());
    // series oracle for the 3:1 rectangle of unit area
    const double w = std::sqrt(3.0);
    REQUIRE(tr3 == Catch::Approx(oracles::torsion_rectangle_series(w, 1 / w)).epsilon(0.01));
}

TEST_CASE("T converges under uniform refinement") {
    SectionMesh mesh = normalize_section(make_section({SectionPreset::Square}, 0.15));
    SectionMesh fine = mesh.refined();
    SectionMesh finer = fine.refined();
    const double t0 = torsional_rigidity(mesh).rigidity;
    const double t1 = torsional_rigidity(fine).rigidity;
    const double t2 = torsional_rigidity(finer).rigidity;
    // nested P1 spaces: T decreases, Cauchy differences shrink >= 2x
    REQUIRE(t1 < t0);
    REQUIRE(t2 < t1);
    REQUIRE((t0 - t1) / (t1 - t2) > 2.0);
}

TEST_CASE("polygon meshing handles a convex hexagon and rejects bad input") {
    std::vector<Vector2d> hex;
    for (int k = 0; k < 6; ++k)
        hex.emplace_back(std::cos(M_PI * k / 3.0), std::sin(M_PI * k / 3.0));
    SectionPreset preset{SectionPreset::Polygon};
    preset.vertices = hex;
    SectionMesh mesh = normalize_section(make_section(preset, 0.2));
    REQUIRE(mesh.area() == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(mesh.boundary_edges().size() >= 6);

    SECTION("self-intersecting polygon rejected") {
        SectionPreset bad{SectionPreset::Polygon};
        bad.vertices = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
        REQUIRE_THROWS_WITH(make_section(bad, 0.2),
                            Catch::Matchers::ContainsSubstring("self-intersecting") ||
                                Catch::Matchers::ContainsSubstring("oriented"));
    }
    SECTION("non-convex polygon rejected") {
        SectionPreset bad{SectionPreset::Polygon};
        bad.vertices = {{0, 0}, {2, 0}, {2, 2}, {1, 0.5}, {0, 2}};
        REQUIRE_THROWS_WITH(make_section(bad, 0.2),
                            Catch::Matchers::ContainsSubstring("non-convex"));
    }
}
