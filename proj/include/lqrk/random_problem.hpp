#pragma once

#include <cstdint>

#include "lqrk/core.hpp"

namespace lqrk {

// Seeded constant-coefficient test problem with documented structure:
// draws from std::mt19937_64(seed) in this order, all entries uniform
// in [-1, 1]:
//   1. n eigenvalues d_i of A,
//   2. an n x n matrix G (row-major), Q = orthogonal factor of its QR,
//      A = Q^T diag(d) Q,
//   3. B (n x m, row-major),
//   4. C (n x n, row-major), M = C^T C,
//   5. D (m x m, row-major), N = I + D^T D.
// J0 = j0_scale * I, nu = 1.
ProblemData make_random_problem(std::uint64_t seed, int n, int m, GridPtr grid,
                                double j0_scale = 1.0);

// Smooth random control path u_j(t) = c0_j + c1_j sin(pi t') + c2_j cos(2 pi t')
// with t' normalized to [0, 1] and coefficients uniform in [-1, 1], drawn
// from std::mt19937_64(seed).
ControlPath make_random_smooth_control(std::uint64_t seed, int m, GridPtr grid);

// Forward RK4 of dy/dt + A(t)y = B(t)u(t) from y(t0) = y0, with u evaluated
// by the same piecewise-linear interpolation as operator paths.
Trajectory integrate_controlled(const ProblemData& p, const Vector& y0,
                                const ControlPath& u);

}  // namespace lqrk
