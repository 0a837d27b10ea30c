#include "lqrk/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "lqrk/heat.hpp"
#include "lqrk/kernel.hpp"
#include "lqrk/random_problem.hpp"
#include "lqrk/solvers.hpp"

namespace lqrk {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key \"" + path + "." + it.key() + "\"");
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for \"" + key + "\": " + e.what());
    }
}

template <typename T>
T require(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key))
        throw ConfigError("missing required key \"" + path + "." + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for \"" + path + "." + key + "\": " + e.what());
    }
}

// 17-significant-digit float formatting for byte-stable diagnostics.
std::string fmt17(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump17(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump17(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump17(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float:
            out += fmt17(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void write_json(const std::string& path, const json& j) {
    std::string text;
    dump17(j, text);
    text += '\n';
    write_file(path, text);
}

// CSV: "," delimiter, "." decimal separator, header row, LF line endings.
void write_trajectory_csv(const std::string& path, const Trajectory& y,
                          const ControlPath& u) {
    std::string out = "t";
    const Eigen::Index n = y.states.front().size();
    const Eigen::Index m = u.controls.front().size();
    for (Eigen::Index i = 0; i < n; ++i) out += ",y_" + std::to_string(i + 1);
    for (Eigen::Index i = 0; i < m; ++i) out += ",u_" + std::to_string(i + 1);
    out += '\n';
    for (std::size_t k = 0; k < y.grid->size(); ++k) {
        out += fmt17(y.grid->nodes[k]);
        for (Eigen::Index i = 0; i < n; ++i) out += "," + fmt17(y.states[k][i]);
        for (Eigen::Index i = 0; i < m; ++i) out += "," + fmt17(u.controls[k][i]);
        out += '\n';
    }
    write_file(path, out);
}

void write_matrix_path_csv(const std::string& path, const TimeGrid& g,
                           const std::vector<Matrix>& vals, const char* prefix) {
    const Eigen::Index n = vals.front().rows(), c = vals.front().cols();
    std::string out = "t";
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index cc = 0; cc < c; ++cc)
            out += "," + std::string(prefix) + "_" + std::to_string(r + 1) +
                   std::to_string(cc + 1);
    out += '\n';
    for (std::size_t k = 0; k < g.size(); ++k) {
        out += fmt17(g.nodes[k]);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index cc = 0; cc < c; ++cc)
                out += "," + fmt17(vals[k](r, cc));
        out += '\n';
    }
    write_file(path, out);
}

Vector to_vector(const std::vector<double>& v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

struct BuiltProblem {
    ProblemData data;
    std::optional<SpectralHeatModel> heat;
};

BuiltProblem build_problem(const Scenario& s, GridPtr grid, std::uint64_t seed) {
    BuiltProblem bp{ProblemData{}, std::nullopt};
    switch (s.builtin) {
        case Scenario::Builtin::ScalarLq: {
            ProblemData& p = bp.data;
            p.grid = grid;
            p.A = OperatorPath::constant(Matrix::Constant(1, 1, s.a), grid);
            p.B = OperatorPath::constant(Matrix::Constant(1, 1, s.b), grid);
            p.M = OperatorPath::constant(Matrix::Constant(1, 1, s.m_weight), grid);
            p.N = OperatorPath::constant(Matrix::Constant(1, 1, s.n_weight), grid);
            p.J0 = Matrix::Constant(1, 1, s.j0);
            p.nu = s.nu;
            break;
        }
        case Scenario::Builtin::Random: {
            const int m = s.control_dim > 0 ? s.control_dim : s.dim;
            bp.data = make_random_problem(seed, s.dim, m, grid, s.j0_scale);
            break;
        }
        case Scenario::Builtin::HeatSpectral: {
            SpectralHeatModel model;
            model.modes = s.modes;
            model.domain_length = s.domain_length;
            model.lambda = s.lambda;
            model.grid = grid;
            bp.data = discretize_heat(model);
            bp.heat = model;
            break;
        }
    }
    return bp;
}

std::string artifact_path(const std::string& configured, const std::string& out_dir,
                          const std::string& fallback) {
    namespace fs = std::filesystem;
    fs::path base = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::path p = configured.empty() ? fs::path(fallback) : fs::path(configured);
    if (p.is_absolute()) return p.string();
    fs::create_directories(base);
    return (base / p).string();
}

}  // namespace

Scenario parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"problem", "grid", "task", "params", "output", "seed", "tolerances"});

    Scenario s;
    s.seed = get_or<std::uint64_t>(root, "seed", 0);

    const json& prob = root.contains("problem") ? root.at("problem") : json::object();
    std::string builtin = get_or<std::string>(prob, "builtin", "scalar-lq");
    if (builtin == "scalar-lq") {
        s.builtin = Scenario::Builtin::ScalarLq;
        check_keys(prob, "problem", {"builtin", "a", "b", "m", "n", "j0", "nu"});
        s.a = get_or(prob, "a", 0.0);
        s.b = get_or(prob, "b", 1.0);
        s.m_weight = get_or(prob, "m", 1.0);
        s.n_weight = get_or(prob, "n", 1.0);
        s.j0 = get_or(prob, "j0", 1.0);
        s.nu = get_or(prob, "nu", 0.5 * s.n_weight);
    } else if (builtin == "random") {
        s.builtin = Scenario::Builtin::Random;
        check_keys(prob, "problem", {"builtin", "dim", "control_dim", "j0"});
        s.dim = get_or(prob, "dim", 4);
        s.control_dim = get_or(prob, "control_dim", 0);
        s.j0_scale = get_or(prob, "j0", 1.0);
        if (s.dim < 1) throw ConfigError("problem.dim must be >= 1");
    } else if (builtin == "heat-spectral") {
        s.builtin = Scenario::Builtin::HeatSpectral;
        check_keys(prob, "problem", {"builtin", "modes", "domain_length", "lambda"});
        s.modes = get_or(prob, "modes", 5);
        s.domain_length = get_or(prob, "domain_length", s.domain_length);
        s.lambda = get_or(prob, "lambda", 1.0);
        if (s.lambda <= 0.0) throw ConfigError("problem.lambda must be positive");
    } else {
        throw ConfigError("unknown problem.builtin \"" + builtin + "\"");
    }

    const json& grid = root.contains("grid") ? root.at("grid") : json::object();
    check_keys(grid, "grid", {"t0", "T", "steps"});
    s.t0 = get_or(grid, "t0", 0.0);
    s.T = get_or(grid, "T", 1.0);
    s.steps = get_or(grid, "steps", 200);
    if (!(s.T > s.t0)) throw ConfigError("grid: requires T > t0");
    if (s.steps < 2) throw ConfigError("grid.steps must be >= 2");

    s.task = require<std::string>(root, "config", "task");
    static const std::set<std::string> tasks = {
        "riccati", "kernel-gram", "lqr-compare", "mayer",
        "interp",  "heat-check",  "verify"};
    if (!tasks.count(s.task)) throw ConfigError("unknown task \"" + s.task + "\"");

    const json& params = root.contains("params") ? root.at("params") : json::object();
    check_keys(params, "params",
               {"y0", "points", "targets", "ridge", "terminal", "s_check", "which"});
    s.y0 = get_or(params, "y0", std::vector<double>{});
    s.points = get_or(params, "points", std::vector<double>{});
    s.targets = get_or(params, "targets", std::vector<std::vector<double>>{});
    s.ridge = get_or(params, "ridge", 0.0);
    s.s_check = get_or(params, "s_check", 0.25);
    s.gram_which = get_or<std::string>(params, "which", "K");
    if (s.gram_which != "K" && s.gram_which != "K1")
        throw ConfigError("params.which must be \"K\" or \"K1\"");
    if (params.contains("terminal")) {
        const json& term = params.at("terminal");
        check_keys(term, "params.terminal", {"target", "weight"});
        s.has_terminal = true;
        s.terminal_target = require<std::vector<double>>(term, "params.terminal", "target");
        s.terminal_weight = get_or(term, "weight", 1.0);
    }

    if (s.task == "lqr-compare" || s.task == "interp") {
        if (s.y0.empty()) throw ConfigError("params.y0 is required for task " + s.task);
    }
    if (s.task == "mayer" && !s.has_terminal)
        throw ConfigError("params.terminal is required for task mayer");
    if (s.task == "interp") {
        if (s.points.empty()) throw ConfigError("params.points is required for task interp");
        if (s.targets.size() != s.points.size())
            throw ConfigError("params.targets must match params.points");
    }
    if (s.task == "kernel-gram" && s.points.empty())
        throw ConfigError("params.points is required for task kernel-gram");

    const json& output = root.contains("output") ? root.at("output") : json::object();
    check_keys(output, "output", {"csv", "json"});
    s.csv_path = get_or<std::string>(output, "csv", "");
    s.json_path = get_or<std::string>(output, "json", "");

    const json& tol = root.contains("tolerances") ? root.at("tolerances") : json::object();
    check_keys(tol, "tolerances", {"gap", "identity"});
    s.tol_gap = get_or(tol, "gap", 1e-3);
    s.tol_identity = get_or(tol, "identity", 1e-6);
    return s;
}

Scenario parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config(text);
}

int run_scenario(const Scenario& s, const RunOverrides& ov) {
    try {
        const int steps = ov.steps.value_or(s.steps);
        const std::uint64_t seed = ov.seed.value_or(s.seed);
        GridPtr grid = make_uniform_grid_ptr(s.t0, s.T, steps);
        const std::string json_path =
            artifact_path(s.json_path, ov.out_dir, s.task + ".json");
        const std::string csv_path =
            artifact_path(s.csv_path, ov.out_dir, s.task + ".csv");

        json diag;
        diag["task"] = s.task;
        diag["steps"] = steps;
        diag["seed"] = seed;
        bool verification_failed = false;

        if (s.task == "verify") {
            auto checks = run_invariant_suite(seed);
            json arr = json::array();
            bool all = true;
            for (const auto& c : checks) {
                arr.push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"value", c.value},
                               {"tolerance", c.tolerance}});
                all = all && c.pass;
            }
            diag["checks"] = arr;
            diag["all_pass"] = all;
            verification_failed = !all;
            write_json(json_path, diag);
            return verification_failed ? 3 : 0;
        }

        BuiltProblem bp = build_problem(s, grid, seed);
        const ProblemData& p = bp.data;
        validate_problem(p);

        if (s.task == "riccati") {
            RiccatiSolution P = solve_riccati(p);
            diag["P_t0"] = matrix_to_json(P.P.front());
            diag["P_t0_00"] = P.P.front()(0, 0);
            diag["P_terminal_norm"] = P.P.back().norm();
            diag["cond_J0_P0"] = P.cond_J0_P0;
            write_matrix_path_csv(csv_path, *grid, P.P, "p");
            write_json(json_path, diag);
            return 0;
        }

        auto P = std::make_shared<const RiccatiSolution>(solve_riccati(p));
        auto famAP = std::make_shared<const EvolutionFamily>(
            propagate(closed_loop_generator(p, *P)));
        KernelTable kt = build_kernel_table(p, P, famAP);

        if (s.task == "kernel-gram") {
            GramKind which = s.gram_which == "K" ? GramKind::K : GramKind::K1;
            Matrix G = assemble_gram(kt, s.points, which);
            double sym_gap = 0.0;
            for (double a : s.points)
                for (double b : s.points) {
                    std::size_t ia = grid->index_of(a), ib = grid->index_of(b);
                    sym_gap = std::max(
                        sym_gap, (kt.k(ia, ib) - kt.k(ib, ia).transpose()).norm());
                }
            diag["which"] = s.gram_which;
            diag["gram"] = matrix_to_json(G);
            diag["min_eigenvalue"] = min_eigenvalue(G);
            diag["adjoint_symmetry_gap"] = sym_gap;
            verification_failed = min_eigenvalue(G) < -1e-8 || sym_gap > 1e-8;
            write_json(json_path, diag);
            return verification_failed ? 3 : 0;
        }

        if (s.task == "lqr-compare") {
            EvolutionFamily famA = propagate(p.A);
            Vector y0 = to_vector(s.y0);
            RepresenterSolution sol = solve_lqr_via_kernel(p, kt, famA, y0);
            LqrResult classical = optimal_lqr_classical(p, *P, y0);
            diag["gap"] = sol.residual;
            diag["tolerance"] = s.tol_gap;
            diag["cost_kernel"] = sol.objective;
            diag["cost_classical"] = classical.cost;
            diag["objective_convention"] = "running-cost";
            diag["pass"] = sol.residual <= s.tol_gap * std::max(1.0, y0.norm());
            verification_failed = !diag["pass"].get<bool>();
            write_trajectory_csv(csv_path, sol.element.trajectory, sol.element.control);
            write_json(json_path, diag);
            return verification_failed ? 3 : 0;
        }

        if (s.task == "mayer") {
            const Eigen::Index n = p.state_dim();
            Vector target = to_vector(s.terminal_target);
            if (target.size() != n)
                throw ConfigError("params.terminal.target has wrong dimension");
            MayerProblem mp{&p, TerminalCost::quadratic(
                                    s.terminal_weight * Matrix::Identity(n, n), target)};
            RepresenterSolution sol = solve_mayer(mp, kt);
            diag["yT"] = vector_to_json(sol.element.trajectory.states.back());
            diag["objective"] = sol.objective;
            diag["objective_convention"] = "mayer-half-weights";
            diag["stationarity_residual"] = sol.residual;
            diag["iterations"] = sol.iterations;
            write_trajectory_csv(csv_path, sol.element.trajectory, sol.element.control);
            write_json(json_path, diag);
            return 0;
        }

        if (s.task == "interp") {
            EvolutionFamily famA = propagate(p.A);
            Vector y0 = to_vector(s.y0);
            std::vector<Vector> targets;
            for (const auto& t : s.targets) targets.push_back(to_vector(t));
            RepresenterSolution sol =
                solve_interpolation(p, kt, famA, y0, s.points, targets, s.ridge);
            json coeffs = json::array();
            for (const auto& z : sol.coeffs) coeffs.push_back(vector_to_json(z));
            diag["coefficients"] = coeffs;
            diag["max_violation"] = sol.residual;
            diag["objective"] = sol.objective;
            diag["objective_convention"] = "running-cost";
            diag["ridge"] = s.ridge;
            write_trajectory_csv(csv_path, sol.element.trajectory, sol.element.control);
            write_json(json_path, diag);
            return 0;
        }

        if (s.task == "heat-check") {
            if (!bp.heat)
                throw ConfigError("task heat-check requires problem.builtin heat-spectral");
            const SpectralHeatModel& model = *bp.heat;
            double s_check = s.s_check;
            // snap to the nearest grid node
            std::size_t is = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < grid->size(); ++i) {
                double d = std::abs(grid->nodes[i] - s_check);
                if (d < best) { best = d; is = i; }
            }
            s_check = grid->nodes[is];
            K1IdentityReport rep = check_K1_identity(model, s_check);

            // generic pipeline vs per-mode closed forms
            double pipeline_gap = 0.0;
            const std::size_t stride = std::max<std::size_t>(1, grid->size() / 20);
            for (std::size_t i = 0; i < grid->size(); i += stride)
                for (std::size_t j = 0; j < grid->size(); j += stride)
                    for (int mi = 0; mi < model.modes; ++mi) {
                        ModeKernel mk = mode_kernel_analytic(
                            model, model.frequency(mi), grid->nodes[i], grid->nodes[j]);
                        pipeline_gap = std::max(
                            {pipeline_gap, std::abs(kt.k0(i, j)(mi, mi) - mk.K0),
                             std::abs(kt.k1(i, j)(mi, mi) - mk.K1)});
                    }

            json modes = json::array();
            for (const auto& row : rep.modes)
                modes.push_back({{"k", row.k},
                                 {"a", row.a},
                                 {"printed_lhs", row.printed_lhs},
                                 {"printed_rhs", row.printed_rhs},
                                 {"printed_gap", row.printed_gap},
                                 {"printed_identity_holds", row.printed_identity_holds},
                                 {"change_of_variables_gap", row.change_of_variables_gap}});
            diag["s_check"] = s_check;
            diag["modes"] = modes;
            diag["printed_identity_ok"] = rep.printed_identity_ok;
            diag["max_change_of_variables_gap"] = rep.max_change_of_variables_gap;
            diag["pipeline_max_gap"] = pipeline_gap;
            verification_failed =
                rep.max_change_of_variables_gap > s.tol_identity ||
                pipeline_gap > s.tol_identity;
            write_json(json_path, diag);
            return verification_failed ? 3 : 0;
        }

        throw ConfigError("unhandled task " + s.task);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "invalid problem data: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace lqrk
