#include "lqrk/evolution.hpp"

#include <cmath>

#include "lqrk/parallel.hpp"
#include "lqrk/riccati.hpp"

namespace lqrk {

namespace {

bool constant_diagonal(const OperatorPath& gen) {
    if (gen.rows != gen.cols) return false;
    const Matrix& first = gen.values.front();
    if (!first.isDiagonal(0.0)) return false;
    for (const auto& v : gen.values)
        if (v != first) return false;
    return true;
}

// One-step RK4 transition matrix for d/dt Phi = -gen(t) Phi over [t, t+h].
Matrix rk4_step_matrix(const OperatorPath& gen, double t, double h) {
    const Eigen::Index n = gen.rows;
    const Matrix G0 = -eval_path(gen, t);
    const Matrix Gm = -eval_path(gen, t + 0.5 * h);
    const Matrix G1 = -eval_path(gen, t + h);
    const Matrix I = Matrix::Identity(n, n);
    Matrix k1 = G0;
    Matrix k2 = Gm * (I + 0.5 * h * k1);
    Matrix k3 = Gm * (I + 0.5 * h * k2);
    Matrix k4 = G1 * (I + h * k3);
    return I + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

OperatorPath closed_loop_generator(const ProblemData& p, const RiccatiSolution& P) {
    if (P.grid->nodes != p.grid->nodes)
        throw std::invalid_argument("closed_loop_generator: grid mismatch");
    std::vector<Matrix> vals(p.grid->size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const Matrix& Bi = p.B.at(i);
        Eigen::LLT<Matrix> llt(symmetrize(p.N.at(i)));
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("closed_loop_generator: N(t) not SPD");
        vals[i] = p.A.at(i) + Bi * llt.solve(Bi.transpose() * P.P[i]);
    }
    return OperatorPath::from_nodes(std::move(vals), p.grid);
}

EvolutionFamily propagate(const OperatorPath& gen) {
    if (gen.rows != gen.cols)
        throw std::invalid_argument("propagate: generator must be square");
    const TimeGrid& g = *gen.grid;
    const std::size_t nn = g.size();
    const Eigen::Index n = gen.rows;

    EvolutionFamily fam;
    fam.grid = gen.grid;
    fam.dim = n;
    fam.blocks.resize(nn * (nn + 1) / 2);
    auto tri = [](std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; };

    if (constant_diagonal(gen)) {
        const Vector d = gen.values.front().diagonal();
        for (std::size_t i = 0; i < nn; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double dt = g.nodes[i] - g.nodes[j];
                fam.blocks[tri(i, j)] = (-d.array() * dt).exp().matrix().asDiagonal();
            }
        return fam;
    }

    // Per-interval one-step matrices; column j is then the running product
    // R_{i-1} ... R_j, identical to stepping each column independently.
    std::vector<Matrix> step(nn > 0 ? nn - 1 : 0);
    for (std::size_t i = 0; i + 1 < nn; ++i)
        step[i] = rk4_step_matrix(gen, g.nodes[i], g.nodes[i + 1] - g.nodes[i]);

    parallel_for(nn, [&](std::size_t j) {
        fam.blocks[tri(j, j)] = Matrix::Identity(n, n);
        for (std::size_t i = j + 1; i < nn; ++i)
            fam.blocks[tri(i, j)] = step[i - 1] * fam.blocks[tri(i - 1, j)];
    });
    return fam;
}

EvolutionFamily propagate(const OperatorPath& gen, const TimeGrid& grid) {
    if (gen.grid->nodes != grid.nodes)
        throw std::invalid_argument("propagate: grid mismatch");
    return propagate(gen);
}

Matrix adjoint_block(const EvolutionFamily& fam, double t, double s) {
    const std::size_t it = fam.grid->index_of(t);
    const std::size_t is = fam.grid->index_of(s);
    if (is > it) throw std::invalid_argument("adjoint_block: requires s <= t");
    return fam.block(it, is).transpose();
}

Trajectory integrate_homogeneous(const OperatorPath& gen, const Vector& y0) {
    const TimeGrid& g = *gen.grid;
    Trajectory traj;
    traj.grid = gen.grid;
    traj.states.resize(g.size());
    traj.states[0] = y0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        Matrix R = rk4_step_matrix(gen, g.nodes[i], g.nodes[i + 1] - g.nodes[i]);
        traj.states[i + 1] = R * traj.states[i];
    }
    return traj;
}

}  // namespace lqrk
