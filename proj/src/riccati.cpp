#include "lqrk/riccati.hpp"

#include <cmath>

#include "lqrk/evolution.hpp"

namespace lqrk {

namespace {

Matrix spd_inverse_apply(const Matrix& N, const Matrix& rhs) {
    Eigen::LLT<Matrix> llt(symmetrize(N));
    if (llt.info() != Eigen::Success)
        throw SingularError("N(t) is not symmetric positive definite");
    return llt.solve(rhs);
}

// B(t) N(t)^{-1} B(t)^T at an off-node time via path interpolation.
Matrix control_gramian(const ProblemData& p, double t) {
    Matrix B = eval_path(p.B, t);
    return B * spd_inverse_apply(eval_path(p.N, t), B.transpose());
}

// Shared backward RK4 for P' = PA + A^T P + quad * P S P - M from P(T) = 0.
std::vector<Matrix> integrate_backward(const ProblemData& p, bool quadratic) {
    const TimeGrid& g = *p.grid;
    const Eigen::Index n = p.state_dim();
    auto rhs = [&](double t, const Matrix& P) -> Matrix {
        Matrix A = eval_path(p.A, t);
        Matrix out = P * A + A.transpose() * P - eval_path(p.M, t);
        if (quadratic) out += P * control_gramian(p, t) * P;
        return out;
    };
    std::vector<Matrix> P(g.size());
    P.back() = Matrix::Zero(n, n);
    for (std::size_t i = g.size() - 1; i > 0; --i) {
        const double t = g.nodes[i];
        const double h = g.nodes[i - 1] - t;  // negative
        const Matrix& Pi = P[i];
        Matrix k1 = rhs(t, Pi);
        Matrix k2 = rhs(t + 0.5 * h, Pi + 0.5 * h * k1);
        Matrix k3 = rhs(t + 0.5 * h, Pi + 0.5 * h * k2);
        Matrix k4 = rhs(t + h, Pi + h * k3);
        P[i - 1] = symmetrize(Pi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        if (!P[i - 1].allFinite())
            throw ConvergenceError("Riccati integration diverged");
    }
    return P;
}

}  // namespace

RiccatiSolution solve_riccati(const ProblemData& p) {
    RiccatiSolution sol;
    sol.grid = p.grid;
    sol.P = integrate_backward(p, /*quadratic=*/true);

    Eigen::JacobiSVD<Matrix> svd(p.J0 + sol.P.front());
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 0.0) || smin / smax < 1e-12)
        throw SingularError("J0 + P(t0) is numerically singular");
    sol.cond_J0_P0 = smax / smin;
    return sol;
}

PiSolution solve_lyapunov_pi(const ProblemData& p) {
    PiSolution sol;
    sol.grid = p.grid;
    sol.pi = integrate_backward(p, /*quadratic=*/false);
    return sol;
}

FBSolution solve_fbs(const ProblemData& p, double t, const Vector& h) {
    const TimeGrid& g = *p.grid;
    const std::size_t start = g.index_of(t);
    const std::size_t K = g.size() - 1 - start;  // intervals on [t, T]
    const Eigen::Index n = p.state_dim();
    const Eigen::Index sz = 2 * n * static_cast<Eigen::Index>(K + 1);

    // Unknowns interleaved per node: [xi_k; eta_k], k = 0..K.
    Matrix sys = Matrix::Zero(sz, sz);
    Vector rhs = Vector::Zero(sz);
    auto xi_at = [&](std::size_t k) { return 2 * n * static_cast<Eigen::Index>(k); };
    auto eta_at = [&](std::size_t k) { return 2 * n * static_cast<Eigen::Index>(k) + n; };

    const Matrix I = Matrix::Identity(n, n);
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const double ta = g.nodes[start + k];
        const double tb = g.nodes[start + k + 1];
        const double hk = tb - ta;
        const double tm = 0.5 * (ta + tb);
        const Matrix Am = eval_path(p.A, tm);
        const Matrix Sm = control_gramian(p, tm);
        const Matrix Mm = eval_path(p.M, tm);

        // (xi_{k+1}-xi_k)/h + Am (xi_k+xi_{k+1})/2 + Sm (eta_k+eta_{k+1})/2 = 0
        sys.block(row, xi_at(k), n, n) = -I / hk + 0.5 * Am;
        sys.block(row, xi_at(k + 1), n, n) = I / hk + 0.5 * Am;
        sys.block(row, eta_at(k), n, n) = 0.5 * Sm;
        sys.block(row, eta_at(k + 1), n, n) = 0.5 * Sm;
        row += n;
        // -(eta_{k+1}-eta_k)/h + Am^T (eta_k+eta_{k+1})/2 - Mm (xi_k+xi_{k+1})/2 = 0
        sys.block(row, eta_at(k), n, n) = I / hk + 0.5 * Am.transpose();
        sys.block(row, eta_at(k + 1), n, n) = -I / hk + 0.5 * Am.transpose();
        sys.block(row, xi_at(k), n, n) = -0.5 * Mm;
        sys.block(row, xi_at(k + 1), n, n) = -0.5 * Mm;
        row += n;
    }
    sys.block(row, xi_at(0), n, n) = I;
    rhs.segment(row, n) = h;
    row += n;
    sys.block(row, eta_at(K), n, n) = I;

    Eigen::PartialPivLU<Matrix> lu(sys);
    Vector sol = lu.solve(rhs);
    if (!sol.allFinite() || (sys * sol - rhs).norm() > 1e-6 * (1.0 + rhs.norm()))
        throw SingularError("solve_fbs: stacked system is singular");

    FBSolution fb;
    fb.start_index = start;
    auto subgrid = std::make_shared<TimeGrid>();
    subgrid->t0 = t;
    subgrid->T = g.T;
    subgrid->nodes.assign(g.nodes.begin() + start, g.nodes.end());
    // trapezoid weights on the subgrid
    subgrid->weights.assign(K + 1, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const double hk = subgrid->nodes[k + 1] - subgrid->nodes[k];
        subgrid->weights[k] += 0.5 * hk;
        subgrid->weights[k + 1] += 0.5 * hk;
    }
    fb.xi.grid = subgrid;
    fb.eta.grid = subgrid;
    fb.xi.states.resize(K + 1);
    fb.eta.states.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        fb.xi.states[k] = sol.segment(xi_at(k), n);
        fb.eta.states[k] = sol.segment(eta_at(k), n);
    }
    return fb;
}

double decoupling_residual(const ProblemData& p, const RiccatiSolution& P,
                           double t, const Vector& h) {
    FBSolution fb = solve_fbs(p, t, h);
    const std::size_t it = p.grid->index_of(t);
    Vector gap = fb.eta.states.front() - P.P[it] * h;
    return gap.norm() / std::max(1.0, h.norm());
}

double running_cost(const ProblemData& p, const Trajectory& y, const ControlPath& u) {
    const TimeGrid& g = *p.grid;
    double cost = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vector& yi = y.states[i];
        const Vector& ui = u.controls[i];
        cost += g.weights[i] *
                (yi.dot(p.M.at(i) * yi) + ui.dot(p.N.at(i) * ui));
    }
    return cost;
}

LqrResult optimal_lqr_classical(const ProblemData& p, const RiccatiSolution& P,
                                const Vector& y0) {
    OperatorPath gen = closed_loop_generator(p, P);
    LqrResult res;
    res.y = integrate_homogeneous(gen, y0);
    if (!res.y.states.back().allFinite())
        throw ConvergenceError("optimal_lqr_classical: integration diverged");
    res.u.grid = p.grid;
    res.u.controls.resize(p.grid->size());
    for (std::size_t i = 0; i < p.grid->size(); ++i) {
        const Matrix& Bi = p.B.at(i);
        res.u.controls[i] = -spd_inverse_apply(
            p.N.at(i), Bi.transpose() * (P.P[i] * res.y.states[i]));
    }
    res.cost = running_cost(p, res.y, res.u);
    return res;
}

LqrResult optimal_lqr_classical(const ProblemData& p, const Vector& y0) {
    return optimal_lqr_classical(p, solve_riccati(p), y0);
}

}  // namespace lqrk
