#pragma once

#include "lqrk/evolution.hpp"
#include "lqrk/riccati.hpp"

namespace lqrk {

/// Member of the Hilbert space of controlled trajectories: trajectory,
/// its minimal-norm (canonical) control, and the initial state.
struct RkhsElement {
    Trajectory trajectory;
    ControlPath control;
    Vector initial;
};

/// Kernel blocks K(t_i, t_j) = K0 + K1 for every node pair, where
///   K0(s,t) = Phi(s,t0) (J0+P(t0))^{-1} Phi(t,t0)^T
///   K1(s,t) = int_{t0}^{min(s,t)} Phi(s,tau) B N^{-1} B^T Phi(t,tau)^T dtau
/// with Phi the closed-loop evolution family and grid-weight quadrature.
struct KernelTable {
    GridPtr grid;
    Eigen::Index dim = 0;
    std::vector<Matrix> K;   // row-major over (i, j)
    std::vector<Matrix> K0;
    std::vector<Matrix> K1;
    Matrix invJ0P0;          // (J0 + P(t0))^{-1}

    std::shared_ptr<const RiccatiSolution> riccati;
    std::shared_ptr<const EvolutionFamily> famAP;

    const Matrix& k(std::size_t i, std::size_t j) const { return K[i * grid->size() + j]; }
    const Matrix& k0(std::size_t i, std::size_t j) const { return K0[i * grid->size() + j]; }
    const Matrix& k1(std::size_t i, std::size_t j) const { return K1[i * grid->size() + j]; }
};

KernelTable build_kernel_table(const ProblemData& p,
                               std::shared_ptr<const RiccatiSolution> P,
                               std::shared_ptr<const EvolutionFamily> famAP);

// Kernel section at node t: trajectory s -> K(s,t) z with its canonical
// control and initial value K(t0,t) z.
RkhsElement kernel_apply(const ProblemData& p, const KernelTable& kt, double t,
                         const Vector& z);

// Canonical control of the kernel section:
//   u(s) = N^{-1}(s) B^T(s) [Phi(t,s)^T z 1_{s<t} - P(s) K(s,t) z].
// At the jump node s = t the indicator takes the value jump_weight below so
// that trapezoidal quadrature of the truncated integrand stays exact.
ControlPath control_kernel(const ProblemData& p, const KernelTable& kt, double t,
                           const Vector& z);

// Discrete value of the indicator 1_{s<t} at nodes i (= s) and it (= t):
// 1 below, 0 above; at i == it the half left-interval divided by the node's
// global weight (0.5 interior, 0 at t0, 1 at T on uniform grids), which makes
// the grid quadrature of the truncated integrand match the trapezoid rule on
// [t0, t] exactly.
double jump_weight(const TimeGrid& g, std::size_t i, std::size_t it);

struct NotAdmissibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Minimal-||.||_N control reproducing the trajectory:
//   u = N^{-1} B^T (B N^{-1} B^T)^+ (dy/dt + A y), dy/dt by second-order
// finite differences. Throws NotAdmissibleError when B u misses the
// required drift beyond tol * (1 + ||y||_inf).
ControlPath canonical_control(const ProblemData& p, const Trajectory& y,
                              double tol = 1e-6);

// <y1(t0), J0 y2(t0)> + int [<M y1, y2> + <N u1, u2>] dt by grid quadrature.
double rkhs_inner(const ProblemData& p, const RkhsElement& e1, const RkhsElement& e2);

double rkhs_norm(const ProblemData& p, const RkhsElement& e);

// Normalized defect of the reproducing identity <y(t), z> = <y, K(.,t)z>.
double check_reproducing(const ProblemData& p, const KernelTable& kt,
                         const RkhsElement& e, double t, const Vector& z);

// Projection of K(.,t)z onto the zero-initial-condition subspace: the
// element with trajectory s -> K1(s,t) z.
RkhsElement project_onto_HK1(const ProblemData& p, const KernelTable& kt,
                             double t, const Vector& z);

// Projection of K(.,t)z onto the null-control subspace:
//   s -> Phi_A(s,t0) (J0 + pi(t0))^{-1} Phi_A(t,t0)^T z, control = 0.
RkhsElement project_onto_HK0(const ProblemData& p, const PiSolution& pi,
                             const EvolutionFamily& famA, double t, const Vector& z);

}  // namespace lqrk
