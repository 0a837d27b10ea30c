#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqrk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Time grid with quadrature weights. Nodes are strictly increasing,
/// weights are positive and sum to T - t0 (trapezoidal by default).
struct TimeGrid {
    double t0 = 0.0;
    double T = 1.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double span() const { return T - t0; }

    // Exact node lookup; throws std::invalid_argument if t is not a node.
    std::size_t index_of(double t) const;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

// steps+1 equispaced nodes on [t0, T], trapezoidal weights
// (half weight at the endpoints).
TimeGrid make_uniform_grid(double t0, double T, int steps);
GridPtr make_uniform_grid_ptr(double t0, double T, int steps);

/// Time-varying operator sampled at grid nodes, piecewise linear in time.
struct OperatorPath {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<Matrix> values;  // one matrix per grid node
    GridPtr grid;

    static OperatorPath constant(const Matrix& value, GridPtr grid);
    static OperatorPath from_nodes(std::vector<Matrix> values, GridPtr grid);

    const Matrix& at(std::size_t node) const { return values[node]; }
};

// Linear interpolation between bracketing nodes; exact at nodes.
// Throws std::out_of_range for t outside [t0, T].
Matrix eval_path(const OperatorPath& path, double t);

struct Trajectory {
    GridPtr grid;
    std::vector<Vector> states;  // one n-vector per node

    double sup_norm() const;
};

struct ControlPath {
    GridPtr grid;
    std::vector<Vector> controls;  // one m-vector per node
};

/// The LQ problem after spatial discretization:
/// dy/dt + A(t)y = B(t)u, cost weights M(t), N(t) >= nu*I, initial weight J0.
struct ProblemData {
    OperatorPath A;  // n x n
    OperatorPath B;  // n x m
    OperatorPath M;  // n x n
    OperatorPath N;  // m x m
    Matrix J0;       // n x n
    double nu = 0.0;
    GridPtr grid;

    Eigen::Index state_dim() const { return A.rows; }
    Eigen::Index control_dim() const { return B.cols; }
};

struct ValidationReport {
    struct NodeCheck {
        double t;
        double min_eig_M;
        double min_eig_N;
        double asym_M;  // ||M - M^T||_inf
        double asym_N;
    };
    std::vector<NodeCheck> node_checks;
    double min_eig_J0 = 0.0;
    double asym_J0 = 0.0;
    // informational: min over nodes of lambda_min(sym(A(t_i)))
    double coercivity_min = 0.0;
    bool passed = false;
    std::string summary;
};

struct ValidationError : std::runtime_error {
    ValidationError(const std::string& msg, ValidationReport rep)
        : std::runtime_error(msg), report(std::move(rep)) {}
    ValidationReport report;
};

// Per-node eigenvalue checks for M, N, J0. Hard failure (throws
// ValidationError) when N drops below nu at any node or M is indefinite
// beyond tolerance. Coercivity is reported, not enforced.
ValidationReport validate_problem(const ProblemData& p, double eig_tol = 1e-10);

// (P + P^T)/2
inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Smallest eigenvalue of the symmetric part.
double min_eigenvalue(const Matrix& sym_matrix);

}  // namespace lqrk
