#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lqrk/evolution.hpp"
#include "lqrk/random_problem.hpp"
#include "lqrk/riccati.hpp"

using namespace lqrk;

namespace {

ProblemData scalar(GridPtr g, double a, double b, double m, double n,
                   double j0 = 1.0) {
    ProblemData p;
    p.grid = g;
    p.A = OperatorPath::constant(Matrix::Constant(1, 1, a), g);
    p.B = OperatorPath::constant(Matrix::Constant(1, 1, b), g);
    p.M = OperatorPath::constant(Matrix::Constant(1, 1, m), g);
    p.N = OperatorPath::constant(Matrix::Constant(1, 1, n), g);
    p.J0 = Matrix::Constant(1, 1, j0);
    p.nu = 0.5 * n;
    return p;
}

}  // namespace

TEST_CASE("M = 0 gives P = 0") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    RiccatiSolution P = solve_riccati(scalar(g, 0.4, 1.0, 0.0, 1.0));
    for (const auto& Pi : P.P) CHECK(Pi.norm() == doctest::Approx(0.0));
}

TEST_CASE("scalar tanh closed form") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    RiccatiSolution P = solve_riccati(scalar(g, 0.0, 1.0, 1.0, 1.0));
    CHECK(P.P.back().norm() == 0.0);  // P(T) = 0 exactly
    CHECK(std::abs(P.P.front()(0, 0) - std::tanh(1.0)) < 1e-6);
    for (std::size_t i = 0; i < g->size(); i += 20)
        CHECK(P.P[i](0, 0) ==
              doctest::Approx(std::tanh(1.0 - g->nodes[i])).epsilon(1e-5));
}

TEST_CASE("scalar m = 4 closed form P(t) = 2 tanh(2(T - t))") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    RiccatiSolution P = solve_riccati(scalar(g, 0.0, 1.0, 4.0, 1.0));
    CHECK(std::abs(P.P.front()(0, 0) - 2.0 * std::tanh(2.0)) < 1e-6);
}

TEST_CASE("fourth-order convergence of P(t0)") {
    std::vector<double> errs;
    for (int steps : {50, 100, 200, 400}) {
        GridPtr g = make_uniform_grid_ptr(0.0, 1.0, steps);
        RiccatiSolution P = solve_riccati(scalar(g, 0.0, 1.0, 1.0, 1.0));
        errs.push_back(std::abs(P.P.front()(0, 0) - std::tanh(1.0)));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i)
        CHECK(errs[i] / errs[i + 1] > 12.0);
}

TEST_CASE("symmetry and PSD of random solutions") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        ProblemData p = make_random_problem(seed, 4, 4, g);
        RiccatiSolution P = solve_riccati(p);
        for (const auto& Pi : P.P) {
            CHECK((Pi - Pi.transpose()).norm() <= 1e-12);
            CHECK(min_eigenvalue(Pi) >= -1e-8);
        }
        CHECK(P.cond_J0_P0 >= 1.0);
    }
}

TEST_CASE("Lyapunov pi: degenerate and closed-form cases") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    PiSolution z = solve_lyapunov_pi(scalar(g, 0.4, 1.0, 0.0, 1.0));
    for (const auto& pi : z.pi) CHECK(pi.norm() == doctest::Approx(0.0));

    PiSolution lin = solve_lyapunov_pi(scalar(g, 0.0, 1.0, 1.0, 1.0));
    for (std::size_t i = 0; i < g->size(); i += 25)
        CHECK(lin.pi[i](0, 0) ==
              doctest::Approx(1.0 - g->nodes[i]).epsilon(1e-10));
}

TEST_CASE("Lyapunov pi with A = 0 integrates M") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    ProblemData p;
    p.grid = g;
    p.A = OperatorPath::constant(Matrix::Zero(2, 2), g);
    p.B = OperatorPath::constant(Matrix::Identity(2, 2), g);
    std::vector<Matrix> mvals(g->size());
    Matrix M0(2, 2);
    M0 << 2.0, 0.5, 0.5, 1.0;
    for (std::size_t i = 0; i < g->size(); ++i) mvals[i] = (1.0 + g->nodes[i]) * M0;
    p.M = OperatorPath::from_nodes(mvals, g);
    p.N = OperatorPath::constant(Matrix::Identity(2, 2), g);
    p.J0 = Matrix::Identity(2, 2);
    p.nu = 0.5;
    PiSolution z = solve_lyapunov_pi(p);
    // pi(t) = int_t^1 (1 + tau) dtau M0
    for (std::size_t i = 0; i < g->size(); i += 40) {
        double t = g->nodes[i];
        double c = (1.0 - t) + 0.5 * (1.0 - t * t);
        CHECK((z.pi[i] - c * M0).norm() < 1e-8);
    }
}

TEST_CASE("solve_fbs: linearity and decoupled cases") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    ProblemData p = scalar(g, 0.5, 1.0, 0.0, 1.0);
    FBSolution zero = solve_fbs(p, 0.0, Vector::Zero(1));
    for (const auto& s : zero.xi.states) CHECK(s.norm() < 1e-12);
    for (const auto& s : zero.eta.states) CHECK(s.norm() < 1e-12);

    // M = 0: eta vanishes and xi is the free flow
    FBSolution free = solve_fbs(p, 0.0, Vector::Ones(1));
    for (const auto& s : free.eta.states) CHECK(s.norm() < 1e-10);
    for (std::size_t i = 0; i < free.xi.states.size(); i += 10)
        CHECK(free.xi.states[i](0) ==
              doctest::Approx(std::exp(-0.5 * free.xi.grid->nodes[i])).epsilon(1e-4));
}

TEST_CASE("solve_fbs recovers tanh(1) at the left endpoint") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    ProblemData p = scalar(g, 0.0, 1.0, 1.0, 1.0);
    FBSolution fb = solve_fbs(p, 0.0, Vector::Ones(1));
    CHECK(std::abs(fb.eta.states.front()(0) - std::tanh(1.0)) < 1e-4);
    CHECK(fb.eta.states.back().norm() < 1e-12);
    CHECK(fb.xi.states.front()(0) == doctest::Approx(1.0));
}

TEST_CASE("decoupling residual") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    ProblemData p0 = scalar(g, 0.2, 1.0, 0.0, 1.0);
    RiccatiSolution P0 = solve_riccati(p0);
    CHECK(decoupling_residual(p0, P0, 0.0, Vector::Ones(1)) < 1e-10);

    ProblemData p = scalar(g, 0.0, 1.0, 1.0, 1.0);
    RiccatiSolution P = solve_riccati(p);
    CHECK(decoupling_residual(p, P, 0.0, Vector::Ones(1)) <= 1e-5);
    CHECK(decoupling_residual(p, P, 0.5, Vector::Constant(1, -2.0)) <= 1e-5);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ProblemData pr = make_random_problem(11, 4, 4, g);
    RiccatiSolution Pr = solve_riccati(pr);
    Vector h(4);
    for (int i = 0; i < 4; ++i) h[i] = uni(rng);
    CHECK(decoupling_residual(pr, Pr, 0.0, h) <= 1e-4);
}

TEST_CASE("Riccati monotonicity in M") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        ProblemData p1 = make_random_problem(seed, 2, 2, g);
        ProblemData p2 = p1;
        Matrix E(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) E(r, c) = uni(rng);
        p2.M = OperatorPath::constant(p1.M.at(0) + E.transpose() * E, g);
        Matrix diff = solve_riccati(p2).P.front() - solve_riccati(p1).P.front();
        CHECK(min_eigenvalue(diff) >= -1e-8);
    }
}

TEST_CASE("classical LQR closed loop") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    ProblemData p = scalar(g, 0.0, 1.0, 1.0, 1.0);

    LqrResult zero = optimal_lqr_classical(p, Vector::Zero(1));
    CHECK(zero.cost == doctest::Approx(0.0));
    for (const auto& s : zero.y.states) CHECK(s.norm() == 0.0);

    LqrResult opt = optimal_lqr_classical(p, Vector::Ones(1));
    for (std::size_t i = 0; i < g->size(); i += 20)
        CHECK(opt.y.states[i](0) ==
              doctest::Approx(std::cosh(1.0 - g->nodes[i]) / std::cosh(1.0))
                  .epsilon(1e-5));
    CHECK(std::abs(opt.y.states.back()(0) - 0.648054) < 1e-5);
    CHECK(opt.cost == doctest::Approx(running_cost(p, opt.y, opt.u)).epsilon(1e-12));
}

TEST_CASE("classical LQR with M = 0 flies free") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    ProblemData p = scalar(g, 0.3, 1.0, 0.0, 1.0);
    LqrResult r = optimal_lqr_classical(p, Vector::Ones(1));
    for (const auto& u : r.u.controls) CHECK(u.norm() < 1e-12);
    for (std::size_t i = 0; i < g->size(); i += 10)
        CHECK(r.y.states[i](0) ==
              doctest::Approx(std::exp(-0.3 * g->nodes[i])).epsilon(1e-8));
}

TEST_CASE("classical LQR beats random admissible controls") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    ProblemData p = make_random_problem(31, 3, 3, g);
    Vector y0 = Vector::Ones(3);
    LqrResult opt = optimal_lqr_classical(p, y0);
    for (std::uint64_t k = 0; k < 50; ++k) {
        ControlPath u = make_random_smooth_control(500 + k, 3, g);
        Trajectory y = integrate_controlled(p, y0, u);
        CHECK(running_cost(p, y, u) - opt.cost >= -1e-10);
    }
}
