#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "sdae/errors.hpp"
#include "sdae/integrators.hpp"
#include "sdae/models.hpp"
#include "test_helpers.hpp"

using namespace sdae;
using test_helpers::bits_equal;

namespace {

SdaeProblem scalar_problem(double a, double b) {
    SdaeProblem p;
    p.d = 1;
    p.d1 = 1;
    p.horizon = 1.0;
    p.zeta = Vector::Zero(1);
    p.a = constant_matrix(Matrix::Constant(1, 1, a));
    p.b = constant_matrix(Matrix::Constant(1, 1, b));
    p.f = [](double, const Vector&) { return Vector::Zero(1).eval(); };
    p.g = [](double, const Vector&) { return Matrix::Identity(1, 1).eval(); };
    return p;
}

// Regular mass matrix, no linear drift: the scheme must reduce to explicit
// Euler-Maruyama.
SdaeProblem em_problem() {
    SdaeProblem p;
    p.d = 2;
    p.d1 = 1;
    p.horizon = 1.0;
    p.zeta = Vector{{0.5, -0.25}};
    p.a = constant_matrix(Matrix::Identity(2, 2));
    p.b = constant_matrix(Matrix::Zero(2, 2));
    p.f = [](double t, const Vector& y) {
        return Vector{{-0.5 * y(1) + 0.1 * std::sin(t), 0.3 * y(0)}};
    };
    p.g = [](double, const Vector& y) {
        Matrix g(2, 1);
        g << 0.3, 0.7 + 0.1 * y(0);
        return g;
    };
    return p;
}

} // namespace

TEST_CASE("primary step reduces to explicit Euler-Maruyama for A = I, B = 0") {
    const SdaeProblem p = scalar_problem(1.0, 0.0);
    const PrimaryStep st = step_primary(p, 0.0, 0.1, Vector::Zero(1),
                                        Vector::Constant(1, 0.3));
    CHECK(st.x(0) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("primary step is implicit in the linear drift") {
    // dY = -Y dt: one step of size 0.1 from 1 gives 1 / 1.1.
    const SdaeProblem p = scalar_problem(1.0, -1.0);
    const PrimaryStep st = step_primary(p, 0.0, 0.1, Vector::Ones(1),
                                        Vector::Zero(1));
    CHECK(st.x(0) == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
}

TEST_CASE("3d model: one primary step matches an independent dense solve") {
    const SdaeProblem p = example3d();
    const double h = std::pow(2.0, -4.0);
    const Vector x{{1.0, -2.0, 1.0}};
    const Vector dw{{0.1, -0.05, 0.2}};

    const PrimaryStep st = step_primary(p, 0.0, h, x, dw);

    // Oracle: assemble the same linear system and solve it with a different
    // factorization.
    const Matrix a = p.a(0.0);
    const Matrix m = a - h * p.b(0.0);
    const Vector rhs = a * x + h * p.f(0.0, x) + p.g(0.0, x) * dw;
    const Vector oracle = m.colPivHouseholderQr().solve(rhs);
    CHECK((st.x - oracle).norm() <= 1e-12);
    CHECK(st.solve_residual <= 1e-12);
}

TEST_CASE("without the drift split the 3d iteration matrix is singular") {
    const SdaeProblem p = example3d_unsplit();
    const Vector x{{1.0, -2.0, 1.0}};
    CHECK_THROWS_AS(
        step_primary(p, 0.0, std::pow(2.0, -4.0), x, Vector::Zero(3)),
        SingularIterationMatrix);
}

TEST_CASE("dual step degenerates to Euler-Maruyama when A is regular") {
    const SdaeProblem p = em_problem();
    const double h = 0.125;
    DualState state;
    state.u = p.zeta;           // P = I
    state.v = Vector::Zero(2);  // Q = 0
    const Vector dw = Vector::Constant(1, 0.2);

    const DualStep st = step_dual(p, 0.0, h, state, dw);
    const Vector expected = p.zeta + h * p.f(0.0, p.zeta) + p.g(0.0, p.zeta) * dw;
    CHECK((st.state.u - expected).norm() <= 1e-14);
    CHECK(st.state.v.norm() <= 1e-14);
}

TEST_CASE("3d model: the dual constraint solves to the printed closed form") {
    const SdaeProblem p = example3d();
    const double h = std::pow(2.0, -4.0);
    const ProjectorSet ps = projectors_at(p, 0.0);

    DualState state;
    state.u = ps.p * p.zeta;    // (1, 0, 1)
    state.v = p.zeta - state.u; // Q(0) zeta = (0, -2, 0)
    CHECK((state.u - Vector{{1.0, 0.0, 1.0}}).norm() <= 1e-12);
    CHECK((state.v - Vector{{0.0, -2.0, 0.0}}).norm() <= 1e-12);

    const Vector dw{{0.1, -0.05, 0.2}};
    const DualStep st = step_dual(p, 0.0, h, state, dw);
    const Vector& u = st.state.u;
    const Vector& v = st.state.v;
    CHECK(std::abs(v(0)) <= 1e-12);
    CHECK(std::abs(v(2)) <= 1e-12);
    CHECK(v(1) == doctest::Approx(-(u(0) + u(1) + u(2))).epsilon(1e-12));

    // v solves the discrete constraint with matrices frozen at t_i and f
    // evaluated at the previous reconstructed state.
    const Matrix a = p.a(0.0);
    const Matrix b = p.b(0.0);
    const Vector residual =
        a * v + ps.r * (b * (u + v) + p.f(0.0, state.u + state.v));
    CHECK(residual.norm() <= 1e-12);

    // Equivalence with the primary scheme on the same step.
    const PrimaryStep primary = step_primary(p, 0.0, h, p.zeta, dw);
    CHECK((u + v - primary.x).norm() <= 1e-8 * (1.0 + primary.x.norm()));
}

TEST_CASE("dual iterates stay in the dynamic subspace Im P") {
    const SdaeProblem p = example3d();
    const Index n = 32;
    const BrownianPath path = generate_brownian(4, p.horizon, n, p.d1);
    const Matrix dw = coarsen(path, n);
    const double h = p.horizon / static_cast<double>(n);

    DualState state;
    const ProjectorSet ps0 = projectors_at(p, 0.0);
    state.u = ps0.p * p.zeta;
    state.v = p.zeta - state.u;
    for (Index i = 0; i < n; ++i) {
        const double t = p.horizon * static_cast<double>(i) / static_cast<double>(n);
        state = step_dual(p, t, h, state, dw.row(i).transpose()).state;
        const ProjectorSet ps = projectors_at(p, t + h);
        CHECK((ps.p * state.u - state.u).norm() <= 1e-9 * (1.0 + state.u.norm()));
    }
}

TEST_CASE("integrate is the identity map for a trivial problem") {
    SdaeProblem p = scalar_problem(1.0, 0.0);
    p.d = 2;
    p.d1 = 1;
    p.zeta = Vector{{0.25, -4.0}};
    p.a = constant_matrix(Matrix::Identity(2, 2));
    p.b = constant_matrix(Matrix::Zero(2, 2));
    p.f = [](double, const Vector&) { return Vector::Zero(2).eval(); };
    p.g = [](double, const Vector&) { return Matrix::Zero(2, 1).eval(); };

    const BrownianPath path = generate_brownian(1, 1.0, 1, 1);
    const Trajectory traj = integrate(p, 1, path, Scheme::primary);
    REQUIRE(traj.states.rows() == 2);
    CHECK(bits_equal(Vector(traj.states.row(0).transpose()), p.zeta));
    CHECK((traj.states.row(1).transpose() - p.zeta).norm() <= 1e-15);
}

TEST_CASE("primary and dual trajectories coincide pathwise") {
    const SdaeProblem p = example3d();
    const Index n = 256;
    const BrownianPath path = generate_brownian(1, p.horizon, n, p.d1);
    const Trajectory primary = integrate(p, n, path, Scheme::primary);
    const Trajectory dual = integrate(p, n, path, Scheme::dual);

    double max_norm = 0.0;
    double max_diff = 0.0;
    for (Index i = 0; i <= n; ++i) {
        max_norm = std::max(max_norm, primary.states.row(i).norm());
        max_diff = std::max(max_diff,
                            (primary.states.row(i) - dual.states.row(i)).norm());
    }
    CHECK(max_diff <= 1e-8 * (1.0 + max_norm));
}

TEST_CASE("discrete constraint residual vanishes along primary runs") {
    const SdaeProblem p = example3d();
    const BrownianPath path = generate_brownian(3, p.horizon, 64, p.d1);
    const Trajectory traj = integrate(p, 64, path, Scheme::primary);
    CHECK(max_constraint_residual(p, traj) <= 1e-8);
}

TEST_CASE("primary scheme is bit-identical to a handwritten EM loop") {
    const SdaeProblem p = em_problem();
    const Index n = 32;
    const BrownianPath path = generate_brownian(12, p.horizon, n, p.d1);
    const Matrix dw = coarsen(path, n);
    const Trajectory traj = integrate(p, n, path, Scheme::primary);

    const double h = p.horizon / static_cast<double>(n);
    Vector x = p.zeta;
    for (Index i = 0; i < n; ++i) {
        const double t = p.horizon * static_cast<double>(i) / static_cast<double>(n);
        x = x + h * p.f(t, x) + p.g(t, x) * dw.row(i).transpose();
        CHECK(bits_equal(Vector(traj.states.row(i + 1).transpose()), x));
    }
}

TEST_CASE("heat2d completes and keeps the Dirichlet rows pinned") {
    Heat2dSpec spec;
    spec.m = 8;
    const SdaeProblem p = build_heat2d(spec);
    const Index n = 64;
    const BrownianPath path = generate_brownian(1, p.horizon, n, p.d1);
    const Trajectory traj = integrate(p, n, path, Scheme::primary);
    CHECK(traj.states.allFinite());
    for (Index i = 0; i <= n; ++i) {
        for (Index iy = 0; iy <= spec.m; ++iy) {
            CHECK(std::abs(traj.states(i, iy * (spec.m + 1)) - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("step errors carry the failing step index") {
    SdaeProblem p = em_problem();
    p.f = [](double t, const Vector& y) {
        if (t >= 0.5) {
            return Vector::Constant(2, std::numeric_limits<double>::quiet_NaN())
                .eval();
        }
        return (0.1 * y).eval();
    };
    const BrownianPath path = generate_brownian(5, p.horizon, 8, p.d1);
    try {
        integrate(p, 8, path, Scheme::primary);
        FAIL("expected NonFiniteCoefficient");
    } catch (const NonFiniteCoefficient& e) {
        CHECK(e.step() == 4); // first step with t_i >= 0.5
    }
}

TEST_CASE("guard radius aborts runaway states") {
    SdaeProblem p = em_problem();
    p.f = [](double, const Vector& y) { return (1e9 * y).eval(); };
    const BrownianPath path = generate_brownian(5, p.horizon, 8, p.d1);
    CHECK_THROWS_AS(integrate(p, 8, path, Scheme::primary), Overflow);
}

TEST_CASE("integrate validates the resolution against the path") {
    const SdaeProblem p = em_problem();
    const BrownianPath path = generate_brownian(5, p.horizon, 8, p.d1);
    CHECK_THROWS_AS(integrate(p, 3, path, Scheme::primary), InvalidResolution);
    CHECK_THROWS_AS(integrate(p, 16, path, Scheme::primary), InvalidResolution);
}

TEST_CASE("trajectory CSV round-trips at full precision") {
    const SdaeProblem p = example3d();
    const BrownianPath path = generate_brownian(2, p.horizon, 16, p.d1);
    const Trajectory traj = integrate(p, 16, path, Scheme::primary);

    const std::string file = "test_trajectory.csv";
    write_trajectory_csv(traj, file);
    const Trajectory back = read_trajectory_csv(file);
    CHECK(bits_equal(back.states, traj.states));
    CHECK(bits_equal(back.times, traj.times));
    std::remove(file.c_str());
}
