#include "lqrk/solvers.hpp"

#include <cmath>

namespace lqrk {

TerminalCost TerminalCost::quadratic(const Matrix& Q, const Vector& c) {
    TerminalCost g;
    g.value = [Q, c](const Vector& h) { return 0.5 * (h - c).dot(Q * (h - c)); };
    g.grad = [Q, c](const Vector& h) -> Vector { return Q * (h - c); };
    g.hess = [Q](const Vector&) -> Matrix { return Q; };
    return g;
}

double gradient_consistency(const TerminalCost& g, const std::vector<Vector>& points,
                            double step) {
    double worst = 0.0;
    for (const Vector& h : points) {
        const Vector grad = g.grad(h);
        for (Eigen::Index k = 0; k < h.size(); ++k) {
            Vector hp = h, hm = h;
            hp[k] += step;
            hm[k] -= step;
            const double fd = (g.value(hp) - g.value(hm)) / (2.0 * step);
            worst = std::max(worst, std::abs(fd - grad[k]) /
                                        std::max(1.0, std::abs(grad[k])));
        }
    }
    return worst;
}

RepresenterSolution solve_mayer(const MayerProblem& mp, const KernelTable& kt) {
    const ProblemData& p = *mp.p;
    const TimeGrid& g = *p.grid;
    const Eigen::Index n = kt.dim;
    const std::size_t iT = g.size() - 1;
    const Matrix& KTT = kt.k(iT, iT);
    const Matrix I = Matrix::Identity(n, n);

    const double tol = 1e-10;
    const int max_iter = 200;
    const double damping = 0.5;

    Vector z = Vector::Zero(n);
    int it = 0;
    double step_norm = 0.0;
    for (; it < max_iter; ++it) {
        Vector yT = KTT * z;
        if (mp.g.hess) {
            // Newton on F(z) = z + Dg(K(T,T) z)
            Vector F = z + mp.g.grad(yT);
            Matrix J = I + mp.g.hess(yT) * KTT;
            Vector dz = J.partialPivLu().solve(-F);
            z += dz;
            step_norm = dz.norm();
        } else {
            Vector znext = (1.0 - damping) * z - damping * mp.g.grad(yT);
            step_norm = (znext - z).norm();
            z = znext;
        }
        if (!z.allFinite()) throw ConvergenceError("solve_mayer: iteration diverged");
        if (step_norm <= tol) break;
    }
    const double residual = (z + mp.g.grad(KTT * z)).norm();
    if (step_norm > tol)
        throw ConvergenceError("solve_mayer: no convergence after 200 iterations"
                               " (last residual " + std::to_string(residual) + ")");

    RepresenterSolution sol;
    sol.points = {g.T};
    sol.coeffs = {z};
    sol.element = kernel_apply(p, kt, g.T, z);
    sol.objective = eval_objective(p, sol.element, &mp.g);
    sol.residual = residual;
    sol.iterations = it + 1;
    return sol;
}

RepresenterSolution solve_lqr_via_kernel(const ProblemData& p, const KernelTable& kt,
                                         const EvolutionFamily& famA, const Vector& y0) {
    const TimeGrid& g = *p.grid;
    const std::size_t nn = g.size();

    // free trajectory and the representer coefficients z_j = -w_j M_j y0(t_j)
    std::vector<Vector> free_states(nn), z(nn);
    for (std::size_t j = 0; j < nn; ++j) {
        free_states[j] = famA.block(j, 0) * y0;
        z[j] = -g.weights[j] * (p.M.at(j) * free_states[j]);
    }

    RepresenterSolution sol;
    sol.uses_k1 = true;
    sol.points.assign(g.nodes.begin(), g.nodes.end());
    sol.coeffs = z;

    RkhsElement& e = sol.element;
    e.trajectory.grid = p.grid;
    e.trajectory.states.resize(nn);
    e.control.grid = p.grid;
    e.control.controls.resize(nn);
    e.initial = y0;

    std::vector<Vector> zeta(nn, Vector::Zero(p.state_dim()));
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = 0; j < nn; ++j) zeta[i] += kt.k1(i, j) * z[j];

    for (std::size_t i = 0; i < nn; ++i) {
        e.trajectory.states[i] = free_states[i] + zeta[i];
        // canonical control of the K1 expansion (free part carries none)
        Vector drive = -kt.riccati->P[i] * zeta[i];
        for (std::size_t j = i; j < nn; ++j) {
            const double ind = jump_weight(g, i, j);
            if (ind > 0.0)
                drive += ind * (kt.famAP->block(j, i).transpose() * z[j]);
        }
        Eigen::LLT<Matrix> llt(symmetrize(p.N.at(i)));
        e.control.controls[i] = llt.solve(p.B.at(i).transpose() * drive);
    }
    sol.objective = eval_objective(p, e);

    LqrResult classical = optimal_lqr_classical(p, *kt.riccati, y0);
    double gap = 0.0;
    for (std::size_t i = 0; i < nn; ++i)
        gap = std::max(gap, (e.trajectory.states[i] - classical.y.states[i])
                                .lpNorm<Eigen::Infinity>());
    sol.residual = gap;
    return sol;
}

Matrix assemble_gram(const KernelTable& kt, const std::vector<double>& points,
                     GramKind which) {
    const Eigen::Index n = kt.dim;
    const Eigen::Index N = static_cast<Eigen::Index>(points.size());
    Matrix G(N * n, N * n);
    for (Eigen::Index a = 0; a < N; ++a) {
        const std::size_t ia = kt.grid->index_of(points[a]);
        for (Eigen::Index b = 0; b < N; ++b) {
            const std::size_t ib = kt.grid->index_of(points[b]);
            G.block(a * n, b * n, n, n) =
                (which == GramKind::K) ? kt.k(ia, ib) : kt.k1(ia, ib);
        }
    }
    return symmetrize(G);
}

RepresenterSolution solve_interpolation(const ProblemData& p, const KernelTable& kt,
                                        const EvolutionFamily& famA, const Vector& y0,
                                        const std::vector<double>& points,
                                        const std::vector<Vector>& targets,
                                        double ridge) {
    const TimeGrid& g = *p.grid;
    const std::size_t nn = g.size();
    const Eigen::Index n = p.state_dim();
    const Eigen::Index N = static_cast<Eigen::Index>(points.size());
    if (targets.size() != points.size())
        throw std::invalid_argument("solve_interpolation: one target per point");
    if (N * n > 512)
        throw std::invalid_argument("solve_interpolation: N*n exceeds dense-solve cap 512");
    for (Eigen::Index a = 0; a < N; ++a)
        for (Eigen::Index b = a + 1; b < N; ++b)
            if (kt.grid->index_of(points[a]) == kt.grid->index_of(points[b]))
                throw std::invalid_argument("solve_interpolation: points must be distinct");

    Matrix G = assemble_gram(kt, points, GramKind::K1);
    Vector rhs(N * n);
    std::vector<std::size_t> idx(N);
    for (Eigen::Index a = 0; a < N; ++a) {
        idx[a] = g.index_of(points[a]);
        rhs.segment(a * n, n) = targets[a] - famA.block(idx[a], 0) * y0;
    }

    Vector zflat;
    Matrix reg = G + ridge * Matrix::Identity(N * n, N * n);
    Eigen::LDLT<Matrix> ldlt(reg);
    zflat = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !zflat.allFinite() ||
        (reg * zflat - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
        // pseudo-inverse fallback; reject genuinely inconsistent systems
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(reg);
        zflat = cod.solve(rhs);
        if (ridge == 0.0 &&
            (G * zflat - rhs).norm() > 1e-6 * (1.0 + rhs.norm()))
            throw SingularError(
                "solve_interpolation: Gram matrix is rank deficient; "
                "use ridge > 0");
    }

    RepresenterSolution sol;
    sol.uses_k1 = true;
    sol.points = points;
    sol.coeffs.resize(N);
    for (Eigen::Index a = 0; a < N; ++a) sol.coeffs[a] = zflat.segment(a * n, n);

    RkhsElement& e = sol.element;
    e.trajectory.grid = p.grid;
    e.trajectory.states.resize(nn);
    e.control.grid = p.grid;
    e.control.controls.resize(nn);
    e.initial = y0;
    for (std::size_t i = 0; i < nn; ++i) {
        Vector zeta = Vector::Zero(n);
        for (Eigen::Index a = 0; a < N; ++a) zeta += kt.k1(i, idx[a]) * sol.coeffs[a];
        e.trajectory.states[i] = famA.block(i, 0) * y0 + zeta;
        Vector drive = -kt.riccati->P[i] * zeta;
        for (Eigen::Index a = 0; a < N; ++a) {
            const double ind = jump_weight(g, i, idx[a]);
            if (ind > 0.0)
                drive += ind * (kt.famAP->block(idx[a], i).transpose() * sol.coeffs[a]);
        }
        Eigen::LLT<Matrix> llt(symmetrize(p.N.at(i)));
        e.control.controls[i] = llt.solve(p.B.at(i).transpose() * drive);
    }
    sol.objective = eval_objective(p, e);

    double viol = 0.0;
    for (Eigen::Index a = 0; a < N; ++a)
        viol = std::max(viol, (e.trajectory.states[idx[a]] - targets[a]).norm());
    sol.residual = (ridge == 0.0) ? viol : (G * zflat + ridge * zflat - rhs).norm();
    return sol;
}

double eval_objective(const ProblemData& p, const RkhsElement& e,
                      const TerminalCost* g) {
    double running = running_cost(p, e.trajectory, e.control);
    if (!g) return running;
    return g->value(e.trajectory.states.back()) +
           0.5 * e.initial.dot(p.J0 * e.initial) + 0.5 * running;
}

}  // namespace lqrk
