#pragma once

#include "lqrk/core.hpp"

namespace lqrk {

struct RiccatiSolution;  // riccati.hpp

/// Lower-triangular-in-time table of transition operators Phi(t_i, t_j),
/// i >= j, with Phi(t_i, t_i) = I. Blocks with s > t are unrepresented.
struct EvolutionFamily {
    GridPtr grid;
    Eigen::Index dim = 0;
    std::vector<Matrix> blocks;  // index tri(i,j) = i*(i+1)/2 + j

    const Matrix& block(std::size_t i, std::size_t j) const {
        if (j > i)
            throw std::invalid_argument("EvolutionFamily: block requires i >= j");
        return blocks[i * (i + 1) / 2 + j];
    }
};

// Node values A(t_i) + B(t_i) N(t_i)^{-1} B(t_i)^T P(t_i).
OperatorPath closed_loop_generator(const ProblemData& p, const RiccatiSolution& P);

// Integrates d/dt Phi(t, t_j) + gen(t) Phi(t, t_j) = 0, Phi(t_j, t_j) = I,
// forward from every base node t_j with one RK4 step per grid interval
// (stage coefficients interpolated in time). A generator that is constant
// and diagonal across all nodes takes an exact-exponential fast path.
EvolutionFamily propagate(const OperatorPath& gen);
EvolutionFamily propagate(const OperatorPath& gen, const TimeGrid& grid);

// Transpose of Phi(t, s); realizes the backward adjoint flows without a
// separate backward integration. Requires s <= t, both grid nodes.
Matrix adjoint_block(const EvolutionFamily& fam, double t, double s);

// Forward RK4 of dy/dt + gen(t) y = 0 from y(t0) = y0, sampled at nodes.
Trajectory integrate_homogeneous(const OperatorPath& gen, const Vector& y0);

}  // namespace lqrk
