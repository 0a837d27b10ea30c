#pragma once

#include "lqrk/core.hpp"

namespace lqrk {

/// Backward Riccati solution P(t_i), symmetric PSD, P(T) = 0.
struct RiccatiSolution {
    GridPtr grid;
    std::vector<Matrix> P;
    double cond_J0_P0 = 0.0;  // condition number of J0 + P(t0)
};

/// Solution pi(t_i) of the Lyapunov equation -pi' + A*pi + pi A = M, pi(T)=0.
struct PiSolution {
    GridPtr grid;
    std::vector<Matrix> pi;
};

/// Two-point boundary value solution on [t, T]: state xi and adjoint eta,
/// eta(T) = 0. Trajectories are sampled on the subgrid starting at t.
struct FBSolution {
    Trajectory xi;
    Trajectory eta;
    std::size_t start_index = 0;  // index of t in the full grid
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrates -P' + PA + A*P + P B N^{-1} B* P = M backward from P(T) = 0
// (RK4, symmetrized each step). Checks that J0 + P(t0) is invertible and
// records its condition number.
RiccatiSolution solve_riccati(const ProblemData& p);

// Same integrator with the quadratic term removed.
PiSolution solve_lyapunov_pi(const ProblemData& p);

// Coupled linear BVP on [t, T] with xi(t) = h, eta(T) = 0, discretized by
// implicit midpoint and solved as one stacked dense system.
FBSolution solve_fbs(const ProblemData& p, double t, const Vector& h);

// ||eta(t) - P(t) h|| / max(1, ||h||): the primary Riccati correctness oracle.
double decoupling_residual(const ProblemData& p, const RiccatiSolution& P,
                           double t, const Vector& h);

struct LqrResult {
    Trajectory y;
    ControlPath u;
    double cost = 0.0;  // running cost (no J0, no 1/2 factors)
};

// Closed-loop integration dy/dt + (A + B N^{-1} B* P) y = 0 from y(t0) = y0;
// u = -N^{-1} B* P y; cost by grid quadrature of the running integrand.
LqrResult optimal_lqr_classical(const ProblemData& p, const Vector& y0);
LqrResult optimal_lqr_classical(const ProblemData& p, const RiccatiSolution& P,
                                const Vector& y0);

// Quadrature of the running cost integrand <M y, y> + <N u, u>.
double running_cost(const ProblemData& p, const Trajectory& y, const ControlPath& u);

}  // namespace lqrk
