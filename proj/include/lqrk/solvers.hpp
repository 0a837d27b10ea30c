#pragma once

#include <functional>
#include <optional>

#include "lqrk/kernel.hpp"

namespace lqrk {

/// Differentiable terminal functional g with caller-supplied evaluators.
/// The Hessian is optional; when present the Mayer solver uses Newton steps.
struct TerminalCost {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> grad;
    std::function<Matrix(const Vector&)> hess;  // may be empty

    static TerminalCost quadratic(const Matrix& Q, const Vector& c);  // 1/2 ||h-c||_Q^2
};

// Directional finite-difference consistency of grad against value at the
// given points; returns the worst relative defect.
double gradient_consistency(const TerminalCost& g, const std::vector<Vector>& points,
                            double step = 1e-6);

struct MayerProblem {
    const ProblemData* p = nullptr;
    TerminalCost g;
};

/// Finite kernel expansion y_hat = sum_n K(.,t_n) z_n (+ affine offset).
struct RepresenterSolution {
    std::vector<double> points;
    std::vector<Vector> coeffs;
    RkhsElement element;
    double objective = 0.0;
    double residual = 0.0;  // stationarity or constraint/comparison gap
    int iterations = 0;
    bool uses_k1 = false;   // expansion in K1 with affine free-trajectory offset
};

// Minimizes g(y(T)) + 1/2 ||y||^2 over the trajectory space by solving the
// stationarity fixed point z = -Dg(K(T,T) z): Newton when g has a Hessian,
// damped Picard (damping 0.5) otherwise. Tolerance 1e-10 on the step,
// at most 200 iterations.
RepresenterSolution solve_mayer(const MayerProblem& mp, const KernelTable& kt);

// Classical LQR recovered through kernel algebra: the free trajectory
// y0(s) = Phi_A(s,t0) y0 plus zeta(s) = -int K1(s,t) M(t) y0(t) dt.
// residual = sup-norm gap against the closed-loop solution.
RepresenterSolution solve_lqr_via_kernel(const ProblemData& p, const KernelTable& kt,
                                         const EvolutionFamily& famA, const Vector& y0);

// Minimal-norm correction zeta in the zero-initial-condition space matching
// y(t_n) = target_n: solves (G + ridge I) z = targets - y0(points) on the
// K1 block Gram.
RepresenterSolution solve_interpolation(const ProblemData& p, const KernelTable& kt,
                                        const EvolutionFamily& famA, const Vector& y0,
                                        const std::vector<double>& points,
                                        const std::vector<Vector>& targets,
                                        double ridge);

enum class GramKind { K, K1 };

// (N*n) x (N*n) symmetric block matrix of kernel evaluations at the points;
// symmetry enforced by averaging.
Matrix assemble_gram(const KernelTable& kt, const std::vector<double>& points,
                     GramKind which);

// Quadrature objective. With a terminal cost, the Mayer weighting
//   g(y(T)) + 1/2 <y(t0), J0 y(t0)> + 1/2 int [<My,y> + <Nu,u>] dt;
// without, the plain running cost int [<My,y> + <Nu,u>] dt.
double eval_objective(const ProblemData& p, const RkhsElement& e,
                      const TerminalCost* g = nullptr);

}  // namespace lqrk
