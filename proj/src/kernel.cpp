#include "lqrk/kernel.hpp"

#include <cmath>

#include "lqrk/parallel.hpp"

namespace lqrk {

namespace {

Matrix spd_solve(const Matrix& N, const Matrix& rhs) {
    Eigen::LLT<Matrix> llt(symmetrize(N));
    if (llt.info() != Eigen::Success)
        throw SingularError("N(t) is not symmetric positive definite");
    return llt.solve(rhs);
}

// dy/dt at every node: centered differences, second-order one-sided at the
// endpoints (three-point Lagrange derivative, valid on non-uniform grids).
std::vector<Vector> grid_derivative(const Trajectory& y) {
    const auto& t = y.grid->nodes;
    const std::size_t nn = t.size();
    std::vector<Vector> dy(nn);
    auto lagrange3 = [&](std::size_t a, std::size_t b, std::size_t c, double at) {
        const double ta = t[a], tb = t[b], tc = t[c];
        const double wa = (2 * at - tb - tc) / ((ta - tb) * (ta - tc));
        const double wb = (2 * at - ta - tc) / ((tb - ta) * (tb - tc));
        const double wc = (2 * at - ta - tb) / ((tc - ta) * (tc - tb));
        return (wa * y.states[a] + wb * y.states[b] + wc * y.states[c]).eval();
    };
    dy[0] = lagrange3(0, 1, 2, t[0]);
    dy[nn - 1] = lagrange3(nn - 3, nn - 2, nn - 1, t[nn - 1]);
    for (std::size_t i = 1; i + 1 < nn; ++i)
        dy[i] = lagrange3(i - 1, i, i + 1, t[i]);
    return dy;
}

}  // namespace

double jump_weight(const TimeGrid& g, std::size_t i, std::size_t it) {
    if (i < it) return 1.0;
    if (i > it || it == 0) return 0.0;
    return 0.5 * (g.nodes[it] - g.nodes[it - 1]) / g.weights[it];
}

KernelTable build_kernel_table(const ProblemData& p,
                               std::shared_ptr<const RiccatiSolution> P,
                               std::shared_ptr<const EvolutionFamily> famAP) {
    const TimeGrid& g = *p.grid;
    const std::size_t nn = g.size();
    const Eigen::Index n = p.state_dim();
    if (famAP->grid->nodes != g.nodes || P->grid->nodes != g.nodes)
        throw std::invalid_argument("build_kernel_table: grid mismatch");

    KernelTable kt;
    kt.grid = p.grid;
    kt.dim = n;
    kt.riccati = P;
    kt.famAP = famAP;

    Eigen::PartialPivLU<Matrix> lu(p.J0 + P->P.front());
    kt.invJ0P0 = lu.solve(Matrix::Identity(n, n));

    // B N^{-1} B^T at every node.
    std::vector<Matrix> S(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        const Matrix& Bi = p.B.at(i);
        S[i] = symmetrize(Bi * spd_solve(p.N.at(i), Bi.transpose()));
    }

    // Diagonal integrals D_j = K1(t_j, t_j) by the exact recursion
    //   D_{j+1} = Phi(j+1,j) [D_j + h_j/2 S_j] Phi(j+1,j)^T + h_j/2 S_{j+1},
    // which reproduces trapezoidal quadrature truncated at t_j blockwise.
    std::vector<Matrix> D(nn);
    D[0] = Matrix::Zero(n, n);
    for (std::size_t j = 0; j + 1 < nn; ++j) {
        const double hj = g.nodes[j + 1] - g.nodes[j];
        const Matrix& R = famAP->block(j + 1, j);
        D[j + 1] = symmetrize(R * (D[j] + 0.5 * hj * S[j]) * R.transpose() +
                              0.5 * hj * S[j + 1]);
    }

    kt.K0.resize(nn * nn);
    kt.K1.resize(nn * nn);
    kt.K.resize(nn * nn);
    parallel_for(nn, [&](std::size_t i) {
        const Matrix Ci = famAP->block(i, 0) * kt.invJ0P0;
        for (std::size_t j = 0; j <= i; ++j) {
            const std::size_t lo = i * nn + j, hi = j * nn + i;
            kt.K0[lo] = Ci * famAP->block(j, 0).transpose();
            kt.K1[lo] = famAP->block(i, j) * D[j];
            kt.K[lo] = kt.K0[lo] + kt.K1[lo];
            if (hi != lo) {
                kt.K0[hi] = kt.K0[lo].transpose();
                kt.K1[hi] = kt.K1[lo].transpose();
                kt.K[hi] = kt.K[lo].transpose();
            }
        }
    });
    return kt;
}

ControlPath control_kernel(const ProblemData& p, const KernelTable& kt, double t,
                           const Vector& z) {
    const TimeGrid& g = *p.grid;
    const std::size_t it = g.index_of(t);
    ControlPath u;
    u.grid = p.grid;
    u.controls.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double ind = jump_weight(g, i, it);
        Vector drive = -kt.riccati->P[i] * (kt.k(i, it) * z);
        if (ind > 0.0) drive += ind * (kt.famAP->block(it, i).transpose() * z);
        u.controls[i] = spd_solve(p.N.at(i), p.B.at(i).transpose() * drive);
    }
    return u;
}

RkhsElement kernel_apply(const ProblemData& p, const KernelTable& kt, double t,
                         const Vector& z) {
    const std::size_t it = p.grid->index_of(t);
    RkhsElement e;
    e.trajectory.grid = p.grid;
    e.trajectory.states.resize(p.grid->size());
    for (std::size_t i = 0; i < p.grid->size(); ++i)
        e.trajectory.states[i] = kt.k(i, it) * z;
    e.control = control_kernel(p, kt, t, z);
    e.initial = e.trajectory.states.front();
    return e;
}

ControlPath canonical_control(const ProblemData& p, const Trajectory& y, double tol) {
    const TimeGrid& g = *p.grid;
    std::vector<Vector> dy = grid_derivative(y);
    const double scale = tol * (1.0 + y.sup_norm());
    ControlPath u;
    u.grid = p.grid;
    u.controls.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Matrix& Bi = p.B.at(i);
        const Vector rhs = dy[i] + p.A.at(i) * y.states[i];
        const Matrix G = Bi * spd_solve(p.N.at(i), Bi.transpose());
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);
        const Vector lambda = cod.solve(rhs);
        u.controls[i] = spd_solve(p.N.at(i), Bi.transpose() * lambda);
        if ((Bi * u.controls[i] - rhs).norm() > scale)
            throw NotAdmissibleError(
                "canonical_control: trajectory is not admissible at t=" +
                std::to_string(g.nodes[i]));
    }
    return u;
}

double rkhs_inner(const ProblemData& p, const RkhsElement& e1, const RkhsElement& e2) {
    const TimeGrid& g = *p.grid;
    if (e1.trajectory.grid->nodes != g.nodes || e2.trajectory.grid->nodes != g.nodes)
        throw std::invalid_argument("rkhs_inner: grid mismatch");
    double acc = e1.initial.dot(p.J0 * e2.initial);
    for (std::size_t i = 0; i < g.size(); ++i) {
        acc += g.weights[i] *
               (e1.trajectory.states[i].dot(p.M.at(i) * e2.trajectory.states[i]) +
                e1.control.controls[i].dot(p.N.at(i) * e2.control.controls[i]));
    }
    return acc;
}

double rkhs_norm(const ProblemData& p, const RkhsElement& e) {
    return std::sqrt(std::max(0.0, rkhs_inner(p, e, e)));
}

double check_reproducing(const ProblemData& p, const KernelTable& kt,
                         const RkhsElement& e, double t, const Vector& z) {
    const std::size_t it = p.grid->index_of(t);
    RkhsElement sec = kernel_apply(p, kt, t, z);
    const double lhs = e.trajectory.states[it].dot(z);
    const double rhs = rkhs_inner(p, e, sec);
    return std::abs(lhs - rhs) /
           std::max(1.0, z.norm() * e.trajectory.sup_norm());
}

RkhsElement project_onto_HK1(const ProblemData& p, const KernelTable& kt,
                             double t, const Vector& z) {
    const TimeGrid& g = *p.grid;
    const std::size_t it = g.index_of(t);
    RkhsElement e;
    e.trajectory.grid = p.grid;
    e.trajectory.states.resize(g.size());
    e.control.grid = p.grid;
    e.control.controls.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        e.trajectory.states[i] = kt.k1(i, it) * z;
        // same closed form as the full section, with the K1 trajectory
        const double ind = jump_weight(g, i, it);
        Vector drive = -kt.riccati->P[i] * e.trajectory.states[i];
        if (ind > 0.0) drive += ind * (kt.famAP->block(it, i).transpose() * z);
        e.control.controls[i] = spd_solve(p.N.at(i), p.B.at(i).transpose() * drive);
    }
    e.initial = Vector::Zero(p.state_dim());
    return e;
}

RkhsElement project_onto_HK0(const ProblemData& p, const PiSolution& pi,
                             const EvolutionFamily& famA, double t, const Vector& z) {
    const TimeGrid& g = *p.grid;
    const std::size_t it = g.index_of(t);
    Eigen::PartialPivLU<Matrix> lu(p.J0 + pi.pi.front());
    Vector zeta0 = lu.solve(famA.block(it, 0).transpose() * z);
    if (!zeta0.allFinite())
        throw SingularError("project_onto_HK0: J0 + pi(t0) is singular");

    RkhsElement e;
    e.trajectory.grid = p.grid;
    e.trajectory.states.resize(g.size());
    e.control.grid = p.grid;
    e.control.controls.assign(g.size(), Vector::Zero(p.control_dim()));
    for (std::size_t i = 0; i < g.size(); ++i)
        e.trajectory.states[i] = famA.block(i, 0) * zeta0;
    e.initial = zeta0;
    return e;
}

}  // namespace lqrk
