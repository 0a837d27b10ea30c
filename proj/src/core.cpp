#include "lqrk/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lqrk {

std::size_t TimeGrid::index_of(double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(T - t0));
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t - tol);
    if (it == nodes.end() || std::abs(*it - t) > tol) {
        std::ostringstream os;
        os << "time " << t << " is not a grid node";
        throw std::invalid_argument(os.str());
    }
    return static_cast<std::size_t>(it - nodes.begin());
}

TimeGrid make_uniform_grid(double t0, double T, int steps) {
    if (!(T > t0)) throw std::invalid_argument("make_uniform_grid: requires T > t0");
    if (steps < 2) throw std::invalid_argument("make_uniform_grid: requires steps >= 2");
    TimeGrid g;
    g.t0 = t0;
    g.T = T;
    const double h = (T - t0) / steps;
    g.nodes.resize(steps + 1);
    g.weights.resize(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        g.nodes[i] = (i == steps) ? T : t0 + i * h;
        g.weights[i] = (i == 0 || i == steps) ? 0.5 * h : h;
    }
    return g;
}

GridPtr make_uniform_grid_ptr(double t0, double T, int steps) {
    return std::make_shared<const TimeGrid>(make_uniform_grid(t0, T, steps));
}

OperatorPath OperatorPath::constant(const Matrix& value, GridPtr grid) {
    OperatorPath p;
    p.rows = value.rows();
    p.cols = value.cols();
    p.grid = std::move(grid);
    p.values.assign(p.grid->size(), value);
    return p;
}

OperatorPath OperatorPath::from_nodes(std::vector<Matrix> values, GridPtr grid) {
    if (values.size() != grid->size())
        throw std::invalid_argument("OperatorPath: one matrix per grid node required");
    OperatorPath p;
    p.rows = values.front().rows();
    p.cols = values.front().cols();
    for (const auto& v : values)
        if (v.rows() != p.rows || v.cols() != p.cols)
            throw std::invalid_argument("OperatorPath: inconsistent matrix shapes");
    p.values = std::move(values);
    p.grid = std::move(grid);
    return p;
}

Matrix eval_path(const OperatorPath& path, double t) {
    const TimeGrid& g = *path.grid;
    const double tol = 1e-12 * std::max(1.0, std::abs(g.span()));
    if (t < g.t0 - tol || t > g.T + tol)
        throw std::out_of_range("eval_path: t outside [t0, T]");
    t = std::clamp(t, g.t0, g.T);
    auto it = std::upper_bound(g.nodes.begin(), g.nodes.end(), t);
    std::size_t hi = std::min<std::size_t>(it - g.nodes.begin(), g.size() - 1);
    if (hi == 0) return path.values[0];
    std::size_t lo = hi - 1;
    const double tl = g.nodes[lo], th = g.nodes[hi];
    if (t <= tl) return path.values[lo];
    if (t >= th) return path.values[hi];
    const double w = (t - tl) / (th - tl);
    return (1.0 - w) * path.values[lo] + w * path.values[hi];
}

double Trajectory::sup_norm() const {
    double m = 0.0;
    for (const auto& s : states) m = std::max(m, s.lpNorm<Eigen::Infinity>());
    return m;
}

double min_eigenvalue(const Matrix& sym_matrix) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym_matrix),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

ValidationReport validate_problem(const ProblemData& p, double eig_tol) {
    ValidationReport rep;
    const TimeGrid& g = *p.grid;
    std::ostringstream fail;

    if (!(p.nu > 0.0)) fail << "nu must be positive; ";

    rep.min_eig_J0 = min_eigenvalue(p.J0);
    rep.asym_J0 = (p.J0 - p.J0.transpose()).lpNorm<Eigen::Infinity>();
    if (rep.asym_J0 > eig_tol) fail << "J0 not symmetric; ";
    if (rep.min_eig_J0 < -eig_tol) fail << "J0 not PSD; ";

    rep.coercivity_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        ValidationReport::NodeCheck c;
        c.t = g.nodes[i];
        const Matrix& Mi = p.M.at(i);
        const Matrix& Ni = p.N.at(i);
        c.asym_M = (Mi - Mi.transpose()).lpNorm<Eigen::Infinity>();
        c.asym_N = (Ni - Ni.transpose()).lpNorm<Eigen::Infinity>();
        c.min_eig_M = min_eigenvalue(Mi);
        c.min_eig_N = min_eigenvalue(Ni);
        rep.coercivity_min =
            std::min(rep.coercivity_min, min_eigenvalue(p.A.at(i)));
        if (c.asym_M > eig_tol) fail << "M asymmetric at t=" << c.t << "; ";
        if (c.asym_N > eig_tol) fail << "N asymmetric at t=" << c.t << "; ";
        if (c.min_eig_M < -eig_tol)
            fail << "M indefinite at t=" << c.t << " (min eig " << c.min_eig_M
                 << "); ";
        if (c.min_eig_N < p.nu - eig_tol)
            fail << "N below nu at t=" << c.t << " (min eig " << c.min_eig_N
                 << " < " << p.nu << "); ";
        rep.node_checks.push_back(c);
    }

    rep.summary = fail.str();
    rep.passed = rep.summary.empty();
    if (!rep.passed) throw ValidationError("validate_problem: " + rep.summary, rep);
    rep.summary = "ok";
    return rep;
}

}  // namespace lqrk
