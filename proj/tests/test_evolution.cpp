#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqrk/evolution.hpp"
#include "lqrk/riccati.hpp"

using namespace lqrk;

namespace {

ProblemData scalar(GridPtr g, double a, double b, double m, double n) {
    ProblemData p;
    p.grid = g;
    p.A = OperatorPath::constant(Matrix::Constant(1, 1, a), g);
    p.B = OperatorPath::constant(Matrix::Constant(1, 1, b), g);
    p.M = OperatorPath::constant(Matrix::Constant(1, 1, m), g);
    p.N = OperatorPath::constant(Matrix::Constant(1, 1, n), g);
    p.J0 = Matrix::Ones(1, 1);
    p.nu = 0.5 * std::max(n, 1e-3);
    return p;
}

}  // namespace

TEST_CASE("closed-loop generator equals A when M vanishes") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 50);
    ProblemData p = scalar(g, 0.3, 1.0, 0.0, 1.0);
    RiccatiSolution P = solve_riccati(p);
    OperatorPath gen = closed_loop_generator(p, P);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(gen.at(i)(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("closed-loop generator equals A when B vanishes") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 50);
    ProblemData p = scalar(g, 0.3, 0.0, 1.0, 1.0);
    RiccatiSolution P = solve_riccati(p);
    OperatorPath gen = closed_loop_generator(p, P);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(gen.at(i)(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("closed-loop generator of the scalar tanh problem") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 200);
    ProblemData p = scalar(g, 0.0, 1.0, 1.0, 1.0);
    RiccatiSolution P = solve_riccati(p);
    OperatorPath gen = closed_loop_generator(p, P);
    for (std::size_t i = 0; i < g->size(); i += 25)
        CHECK(gen.at(i)(0, 0) ==
              doctest::Approx(std::tanh(1.0 - g->nodes[i])).epsilon(1e-5));
}

TEST_CASE("propagate matches the exponential for constant scalar generator") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    EvolutionFamily fam = propagate(OperatorPath::constant(Matrix::Ones(1, 1), g));
    CHECK(std::abs(fam.block(g->size() - 1, 0)(0, 0) - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("diagonal blocks are the identity, zero generator gives identity") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 20);
    EvolutionFamily fam = propagate(OperatorPath::constant(Matrix::Zero(2, 2), g));
    for (std::size_t i = 0; i < g->size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            CHECK((fam.block(i, j) - Matrix::Identity(2, 2)).norm() ==
                  doctest::Approx(0.0));
    CHECK_THROWS_AS(fam.block(0, 1), std::invalid_argument);
}

TEST_CASE("semigroup composition law") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    Matrix G(2, 2);
    G << 1.0, 2.0, -2.0, 1.0;
    EvolutionFamily fam = propagate(OperatorPath::constant(G, g));
    for (std::size_t k = 30; k <= 100; k += 35)
        for (std::size_t i = 10; i < k; i += 20)
            for (std::size_t j = 0; j < i; j += 10) {
                const Matrix& full = fam.block(k, j);
                CHECK((full - fam.block(k, i) * fam.block(i, j)).norm() <=
                      1e-8 * full.norm());
            }
}

TEST_CASE("fourth-order convergence against the matrix exponential") {
    Matrix G(2, 2);
    G << 1.0, 2.0, -2.0, 1.0;
    // exact flow of dy/dt + Gy = 0: e^{-t} rotation by 2t
    auto exact = [&](double t) {
        Matrix R(2, 2);
        R << std::cos(2 * t), -std::sin(2 * t), std::sin(2 * t), std::cos(2 * t);
        return (std::exp(-t) * R).eval();
    };
    std::vector<double> errs;
    for (int steps : {25, 50, 100, 200}) {
        GridPtr g = make_uniform_grid_ptr(0.0, 1.0, steps);
        EvolutionFamily fam = propagate(OperatorPath::constant(G, g));
        errs.push_back((fam.block(g->size() - 1, 0) - exact(1.0)).norm());
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        double ratio = errs[i] / errs[i + 1];
        CHECK(ratio > 12.0);  // ~16x per halving
        CHECK(ratio < 20.0);
    }
}

TEST_CASE("adjoint blocks") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    EvolutionFamily fam =
        propagate(OperatorPath::constant(Matrix::Constant(1, 1, 0.7), g));
    CHECK((adjoint_block(fam, 0.5, 0.5) - Matrix::Identity(1, 1)).norm() ==
          doctest::Approx(0.0));
    CHECK(adjoint_block(fam, 0.75, 0.25)(0, 0) ==
          doctest::Approx(std::exp(-0.7 * 0.5)).epsilon(1e-8));
    CHECK_THROWS_AS(adjoint_block(fam, 0.25, 0.75), std::invalid_argument);

    Matrix S(2, 2);
    S << 1.0, 0.4, 0.4, -0.3;
    EvolutionFamily fs = propagate(OperatorPath::constant(S, g));
    CHECK((adjoint_block(fs, 0.8, 0.2) - fs.block(g->index_of(0.8), g->index_of(0.2)))
              .norm() < 1e-10);
}

TEST_CASE("storage layout: triangular block count, constant-time access") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 30);
    EvolutionFamily fam = propagate(OperatorPath::constant(Matrix::Zero(1, 1), g));
    CHECK(fam.blocks.size() == g->size() * (g->size() + 1) / 2);
}

TEST_CASE("integrate_homogeneous matches the first column of the family") {
    GridPtr g = make_uniform_grid_ptr(0.0, 1.0, 100);
    Matrix G(2, 2);
    G << 0.5, -1.0, 1.0, 0.2;
    OperatorPath gen = OperatorPath::constant(G, g);
    EvolutionFamily fam = propagate(gen);
    Vector y0(2);
    y0 << 1.0, -2.0;
    Trajectory y = integrate_homogeneous(gen, y0);
    for (std::size_t i = 0; i < g->size(); i += 10)
        CHECK((y.states[i] - fam.block(i, 0) * y0).norm() < 1e-12);
}
