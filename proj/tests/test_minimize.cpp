#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "currod/minimize.hpp"
#include "oracles.hpp"

using namespace currod;

namespace {

IsotropicClosedFormQ0 square_q0() {
    return IsotropicClosedFormQ0({1.0, 1.0}, 1.0 / 12, 1.0 / 12, 0.140577);
}

LoadCase sine_transverse_load(const FramedCurve& frame, int nodes, double amp = 1.0) {
    LoadCase lc = LoadCase::zero(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double s = frame.node_s(i);
        lc.f[i] = amp * std::sin(M_PI * s / frame.length()) * frame.sample(s).nu2();
    }
    return lc;
}

} // namespace

TEST_CASE("zero loads give the zero state") {
    auto frame = oracles::line_frame(30);
    auto q0 = square_q0();
    RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::ClampedBoth});
    MinimizeReport rep;
    auto sol = solver.minimize_quadratic(LoadCase::zero(solver.node_count()), &rep);
    REQUIRE(sol.dofs().norm() == 0.0);
    REQUIRE(rep.energy == 0.0);
}

TEST_CASE("clamped straight rod matches the dense Euler-Bernoulli oracle") {
    auto frame = oracles::line_frame(60);
    auto q0 = square_q0();
    const double c0 = IsotropicLame{1.0, 1.0}.reduced_modulus();
    RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::ClampedBoth});
    const LoadCase lc = sine_transverse_load(*frame, solver.node_count());
    MinimizeReport rep;
    auto sol = solver.minimize_quadratic(lc, &rep);
    const double oracle = oracles::euler_bernoulli_energy(
        c0 / 12.0, 1.0, [](double s) { return std::sin(M_PI * s); });
    REQUIRE(rep.energy == Catch::Approx(oracle).epsilon(5e-3));
    REQUIRE(rep.energy == Catch::Approx(0.5 * rep.load_work).epsilon(1e-9));
    REQUIRE(rep.constraint_residual < 1e-12); // straight rod: exact
}

TEST_CASE("linearity of the quadratic solve") {
    auto frame = oracles::helix_frame(40);
    auto q0 = square_q0();
    RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::ClampedBoth});
    LoadCase lc = sine_transverse_load(*frame, solver.node_count());
    for (int i = 0; i < solver.node_count(); ++i) lc.m[i] = 0.3 * frame->node_s(i);
    LoadCase doubled = lc;
    for (int i = 0; i < solver.node_count(); ++i) {
        doubled.f[i] *= 2.0;
        doubled.m[i] *= 2.0;
    }
    auto x1 = solver.minimize_quadratic(lc);
    auto x2 = solver.minimize_quadratic(doubled);
    REQUIRE((x2.dofs() - 2.0 * x1.dofs()).norm() / x2.dofs().norm() < 1e-8);
}

TEST_CASE("solver optimality: random feasible perturbations do not improve") {
    auto frame = oracles::helix_frame(24);
    auto q0 = square_q0();
    RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::ClampedBoth});
    const LoadCase lc = sine_transverse_load(*frame, solver.node_count());
    MinimizeReport rep;
    auto sol = solver.minimize_quadratic(lc, &rep, 1e-12);
    const VectorXd ell = solver.load_vector(lc);
    const double j0 = solver.objective(sol.dofs(), ell);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> d(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        VectorXd dx(sol.dofs().size());
        for (int i = 0; i < dx.size(); ++i) dx(i) = d(rng);
        // keep the clamped dofs fixed
        for (int c = 0; c < RodMinimizer::npd; ++c) {
            dx(c) = 0;
            dx(dx.size() - 1 - c) = 0;
        }
        dx *= 1e-3 * sol.dofs().norm() / dx.norm();
        REQUIRE(solver.objective(sol.dofs() + dx, ell) >= j0 - 1e-12 * (1 + std::abs(j0)));
    }
}

TEST_CASE("energy decreases under grid refinement") {
    auto curve = std::make_shared<HelixCurve>(1.0, 1.0, 10.0);
    auto q0 = square_q0();
    double prev = std::numeric_limits<double>::max();
    for (int n : {20, 40, 80}) {
        auto frame = std::make_shared<FramedCurve>(curve, FrameMode::Frenet, n);
        RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0),
                            {BoundarySpec::ClampedBoth});
        const LoadCase lc = sine_transverse_load(*frame, solver.node_count());
        MinimizeReport rep;
        solver.minimize_quadratic(lc, &rep, 1e-12);
        const double j = rep.energy - rep.load_work; // = -energy at equilibrium
        REQUIRE(j <= prev + 1e-11);
        prev = j;
    }
}

TEST_CASE("kernel basis") {
    auto q0 = square_q0();
    SECTION("free straight rod has the full rigid family") {
        auto frame = oracles::line_frame(16);
        RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::Free});
        auto kb = solver.kernel_basis();
        REQUIRE(kb.size() == 7); // 3 translations + u shift + 3 rotations
        const SparseMat& k = solver.stiffness();
        for (const auto& [label, g] : kb)
            REQUIRE(0.5 * g.dot(k * g) <= 1e-12 * g.squaredNorm() * 10);
    }
    SECTION("clamped ends leave nothing") {
        auto frame = oracles::line_frame(16);
        RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0),
                            {BoundarySpec::ClampedBoth});
        REQUIRE(solver.kernel_basis().empty());
        REQUIRE(solver.rigid_generators().empty());
    }
    SECTION("ring generators are periodic by construction") {
        auto frame = oracles::circle_frame(32);
        RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0),
                            {BoundarySpec::PeriodicRing});
        for (const auto& [label, g] : solver.rigid_generators())
            REQUIRE(g.size() == solver.dof_count()); // single-valued nodal dofs
        REQUIRE(solver.rigid_generators().size() >= 4);
    }
}

TEST_CASE("non-equilibrated ring loads are rejected with the direction") {
    auto frame = oracles::circle_frame(48);
    auto q0 = square_q0();
    RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::PeriodicRing});
    // m(s) = cos(s) pairs with the twist profile of a rigid rotation of the
    // ring about an in-plane axis
    LoadCase lc = LoadCase::zero(solver.node_count());
    for (int i = 0; i < solver.node_count(); ++i) lc.m[i] = std::cos(frame->node_s(i));
    REQUIRE_THROWS_WITH(solver.minimize_quadratic(lc),
                        Catch::Matchers::ContainsSubstring("rotation"));
}

TEST_CASE("equilibrated ring twist load solves periodically") {
    auto frame = oracles::circle_frame(48);
    auto q0 = square_q0();
    RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::PeriodicRing});
    LoadCase lc = LoadCase::zero(solver.node_count());
    for (int i = 0; i < solver.node_count(); ++i) lc.m[i] = std::cos(2 * frame->node_s(i));
    MinimizeReport rep;
    auto sol = solver.minimize_quadratic(lc, &rep);
    REQUIRE(rep.energy > 0);
    // periodicity is structural: node L is node 0
    const StateSample s0 = sol.sample(0.0, frame->sample(0.0));
    const StateSample sL = sol.sample(frame->length(), frame->sample(frame->length()));
    REQUIRE(s0.w == sL.w);
    REQUIRE((s0.v - sL.v).norm() == 0.0);
}

TEST_CASE("intermediate regime reconstructs u from the constraint") {
    auto frame = oracles::helix_frame(40);
    auto q0 = square_q0();
    RodMinimizer solver(frame, q0, ScalingRegime::from_alpha(2.5), {BoundarySpec::ClampedBoth});
    const LoadCase lc = sine_transverse_load(*frame, solver.node_count(), 0.5);
    MinimizeReport rep;
    auto sol = solver.minimize_quadratic(lc, &rep);
    // u nodal values integrate -1/2 |v'_perp|^2 with zero mean
    double mean = 0;
    const int nodes = solver.node_count();
    for (int i = 0; i < nodes; ++i) mean += sol.dofs()(RodMinimizer::npd * i + 5);
    REQUIRE(std::abs(mean / nodes) < 1e-10);
    double worst = 0;
    for (int i = 1; i < nodes; ++i) {
        const double du = (sol.dofs()(RodMinimizer::npd * i + 5) -
                           sol.dofs()(RodMinimizer::npd * (i - 1) + 5)) /
                          frame->spacing();
        const double s = frame->node_s(i) - 0.5 * frame->spacing();
        const FrameSample f = frame->sample(s);
        const StateSample st = sol.sample(s, f);
        worst = std::max(worst, std::abs(du + 0.5 * (st.a * st.a + st.b * st.b)));
    }
    REQUIRE(worst < 1e-8);
}

TEST_CASE("von Karman Newton solver") {
    auto frame = oracles::line_frame(40);
    auto q0 = square_q0();
    RodMinimizer vk(frame, q0, ScalingRegime::from_alpha(3.0), {BoundarySpec::ClampedBoth});

    SECTION("zero loads converge immediately to zero") {
        MinimizeReport rep;
        auto sol = vk.minimize_von_karman(LoadCase::zero(vk.node_count()), {}, &rep);
        REQUIRE(sol.dofs().norm() == 0.0);
    }
    SECTION("analytic gradient matches central differences") {
        const LoadCase lc = sine_transverse_load(*frame, vk.node_count(), 2.0);
        const VectorXd ell = vk.load_vector(lc);
        std::mt19937_64 rng(23);
        std::normal_distribution<double> d(0.0, 0.1);
        VectorXd x = VectorXd::Zero(vk.dof_count());
        for (int i = 0; i < x.size(); ++i) x(i) = d(rng);
        const VectorXd grad = vk.von_karman_gradient(x, ell);
        const double step = 1e-6;
        double worst = 0;
        std::uniform_int_distribution<int> pick(0, static_cast<int>(x.size()) - 1);
        for (int k = 0; k < 25; ++k) {
            const int i = pick(rng);
            VectorXd xp = x, xm = x;
            xp(i) += step;
            xm(i) -= step;
            const double fd = (vk.objective(xp, ell) - vk.objective(xm, ell)) / (2 * step);
            worst = std::max(worst, std::abs(fd - grad(i)) / (1 + std::abs(fd)));
        }
        REQUIRE(worst < 1e-6);
    }
    SECTION("small loads converge to the linear solution with O(load) gap") {
        RodMinimizer lin(frame, q0, ScalingRegime::from_alpha(4.0), {BoundarySpec::ClampedBoth});
        double prev_gap = std::numeric_limits<double>::max();
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            const LoadCase lc = sine_transverse_load(*frame, vk.node_count(), eps);
            auto xvk = vk.minimize_von_karman(lc);
            auto xlin = lin.minimize_quadratic(lc);
            const double gap = (xvk.dofs() - xlin.dofs()).norm() / xlin.dofs().norm();
            REQUIRE(gap < prev_gap + 1e-14);
            prev_gap = gap;
        }
        REQUIRE(prev_gap < 1e-6);
    }
}
