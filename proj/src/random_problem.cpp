#include "lqrk/random_problem.hpp"

#include <cmath>
#include <random>

namespace lqrk {

namespace {

Matrix draw_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = uni(rng);
    return m;
}

}  // namespace

ProblemData make_random_problem(std::uint64_t seed, int n, int m, GridPtr grid,
                                double j0_scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    Vector d(n);
    for (int i = 0; i < n; ++i) d[i] = uni(rng);
    Matrix G = draw_matrix(rng, n, n);
    Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
    Matrix A = Q.transpose() * d.asDiagonal() * Q;

    Matrix B = draw_matrix(rng, n, m);
    Matrix C = draw_matrix(rng, n, n);
    Matrix M = C.transpose() * C;
    Matrix D = draw_matrix(rng, m, m);
    Matrix N = Matrix::Identity(m, m) + D.transpose() * D;

    ProblemData p;
    p.grid = grid;
    p.A = OperatorPath::constant(A, grid);
    p.B = OperatorPath::constant(B, grid);
    p.M = OperatorPath::constant(symmetrize(M), grid);
    p.N = OperatorPath::constant(symmetrize(N), grid);
    p.J0 = j0_scale * Matrix::Identity(n, n);
    p.nu = 1.0;
    return p;
}

ControlPath make_random_smooth_control(std::uint64_t seed, int m, GridPtr grid) {
    std::mt19937_64 rng(seed);
    constexpr double pi = 3.14159265358979323846;
    Matrix coef = draw_matrix(rng, m, 3);
    ControlPath u;
    u.grid = grid;
    u.controls.resize(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double tp = (grid->nodes[i] - grid->t0) / grid->span();
        Vector v(m);
        for (int j = 0; j < m; ++j)
            v[j] = coef(j, 0) + coef(j, 1) * std::sin(pi * tp) +
                   coef(j, 2) * std::cos(2.0 * pi * tp);
        u.controls[i] = v;
    }
    return u;
}

Trajectory integrate_controlled(const ProblemData& p, const Vector& y0,
                                const ControlPath& u) {
    const TimeGrid& g = *p.grid;
    OperatorPath upath;
    {
        std::vector<Matrix> vals(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) vals[i] = u.controls[i];
        upath = OperatorPath::from_nodes(std::move(vals), p.grid);
    }
    auto rhs = [&](double t, const Vector& y) -> Vector {
        return -eval_path(p.A, t) * y + eval_path(p.B, t) * eval_path(upath, t);
    };
    Trajectory y;
    y.grid = p.grid;
    y.states.resize(g.size());
    y.states[0] = y0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double t = g.nodes[i];
        const double h = g.nodes[i + 1] - t;
        const Vector& yi = y.states[i];
        Vector k1 = rhs(t, yi);
        Vector k2 = rhs(t + 0.5 * h, yi + 0.5 * h * k1);
        Vector k3 = rhs(t + 0.5 * h, yi + 0.5 * h * k2);
        Vector k4 = rhs(t + h, yi + h * k3);
        y.states[i + 1] = yi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

}  // namespace lqrk
