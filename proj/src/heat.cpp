#include "lqrk/heat.hpp"

#include <cmath>

namespace lqrk {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Composite Simpson quadrature of f over [a, b].
template <typename F>
double simpson(F f, double a, double b, int panels) {
    const double h = (b - a) / (2 * panels);
    double acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i)
        acc += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

ProblemData discretize_heat(const SpectralHeatModel& model) {
    if (model.modes < 1 || model.modes % 2 == 0)
        throw std::invalid_argument("discretize_heat: modes must be odd and >= 1");
    const int n = model.modes;
    Vector diag(n);
    for (int i = 0; i < n; ++i) {
        const double kh = model.khat(model.frequency(i));
        diag[i] = kh * kh;
    }
    ProblemData p;
    p.grid = model.grid;
    p.A = OperatorPath::constant(Matrix(diag.asDiagonal()), model.grid);
    p.B = OperatorPath::constant(Matrix::Identity(n, n), model.grid);
    p.M = OperatorPath::constant(Matrix::Zero(n, n), model.grid);
    p.N = OperatorPath::constant(Matrix::Identity(n, n), model.grid);
    p.J0 = model.lambda * Matrix::Identity(n, n);
    p.nu = 1.0;
    return p;
}

double analytic_heat_kernel(double tau, double x, double y, int d) {
    if (!(tau > 0.0)) throw std::invalid_argument("analytic_heat_kernel: tau must be > 0");
    const double r2 = (x - y) * (x - y);
    return std::pow(4.0 * kPi * tau, -0.5 * d) * std::exp(-r2 / (4.0 * tau));
}

ModeKernel mode_kernel_analytic(const SpectralHeatModel& model, int k, double s,
                                double t) {
    const double kh = model.khat(k);
    const double a = kh * kh;
    const double lo = std::min(s, t), hi = std::max(s, t);
    ModeKernel out;
    out.K0 = std::exp(-a * (s + t)) / model.lambda;
    if (a == 0.0) {
        out.K1 = lo - model.grid->t0;
    } else {
        out.K1 = (std::exp(-a * (hi - lo)) - std::exp(-a * (hi + lo))) / (2.0 * a);
    }
    return out;
}

K1IdentityReport check_K1_identity(const SpectralHeatModel& model, double s) {
    const TimeGrid& g = *model.grid;
    if (!(s > g.t0)) throw std::invalid_argument("check_K1_identity: requires s > t0");

    K1IdentityReport rep;
    rep.s = s;
    rep.printed_identity_ok = true;
    for (int mi = 0; mi < model.modes; ++mi) {
        const int k = model.frequency(mi);
        K1IdentityReport::ModeRow row;
        row.k = k;
        const double kh = model.khat(k);
        row.a = kh * kh;
        row.printed_lhs =
            (row.a == 0.0) ? 2.0 * s : (1.0 - std::exp(-2.0 * s * row.a)) / row.a;
        row.printed_rhs = std::exp(-s * s * row.a);
        row.printed_gap = std::abs(row.printed_lhs - row.printed_rhs);
        row.printed_identity_holds = row.printed_gap <= 1e-10;
        if (!row.printed_identity_holds) rep.printed_identity_ok = false;

        for (double t : g.nodes) {
            if (t < s) continue;
            const double quad =
                0.5 * simpson([&](double sig) { return std::exp(-row.a * sig); },
                              t - s, t + s, 1000);
            const double exact = mode_kernel_analytic(model, k, s, t).K1;
            row.change_of_variables_gap =
                std::max(row.change_of_variables_gap, std::abs(quad - exact));
        }
        rep.max_change_of_variables_gap =
            std::max(rep.max_change_of_variables_gap, row.change_of_variables_gap);
        rep.modes.push_back(row);
    }
    return rep;
}

}  // namespace lqrk
