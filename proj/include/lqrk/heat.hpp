#pragma once

#include "lqrk/core.hpp"

namespace lqrk {

/// Heat equation with distributed control on a periodic 1-D domain,
/// spectrally discretized: A is the constant diagonal of squared
/// frequencies, B = I, M = 0, N = I, J0 = lambda I.
struct SpectralHeatModel {
    int modes = 5;              // odd; frequencies 0, +-1, ..., +-(modes-1)/2
    double domain_length = 2.0 * 3.14159265358979323846;
    double lambda = 1.0;
    GridPtr grid;

    // frequency for state index i, ordered 0, 1, -1, 2, -2, ...
    int frequency(int index) const { return (index % 2 == 1) ? (index + 1) / 2 : -index / 2; }
    double khat(int k) const { return 2.0 * 3.14159265358979323846 * k / domain_length; }
};

// A diagonal with entries khat(k)^2 (sign convention dy/dt + Ay = Bu puts
// -Laplacian on the left with a positive diagonal), B = I, M = 0, N = I,
// J0 = lambda I. Requires an odd mode count.
ProblemData discretize_heat(const SpectralHeatModel& model);

// Gaussian heat kernel (4 pi tau)^{-d/2} exp(-||x-y||^2 / (4 tau)), tau > 0.
double analytic_heat_kernel(double tau, double x, double y, int d);

struct ModeKernel {
    double K0 = 0.0;
    double K1 = 0.0;
};

// Per-mode closed forms with a = khat(k)^2:
//   K0 = e^{-a(s+t)} / lambda,
//   K1 = (e^{-a|t-s|} - e^{-a(t+s)}) / (2a), or min(s,t) when a = 0.
ModeKernel mode_kernel_analytic(const SpectralHeatModel& model, int k, double s,
                                double t);

struct K1IdentityReport {
    struct ModeRow {
        int k = 0;
        double a = 0.0;
        double printed_lhs = 0.0;   // int_0^{2s} e^{-a tau} dtau
        double printed_rhs = 0.0;   // e^{-s^2 a}
        double printed_gap = 0.0;
        bool printed_identity_holds = false;
        double change_of_variables_gap = 0.0;  // max over nodes t >= s
    };
    double s = 0.0;
    std::vector<ModeRow> modes;
    double max_change_of_variables_gap = 0.0;
    bool printed_identity_ok = false;  // true only if every mode satisfies it
};

// Diagnostic: evaluates the printed identity int_0^{2s} k(tau,.,.) dtau =
// k(s^2,.,.) per Fourier mode and reports the discrepancy, alongside the
// change-of-variables form K1(s,t) = 1/2 int_{t-s}^{t+s} e^{-a sigma} dsigma
// checked by numerical quadrature against the closed form.
K1IdentityReport check_K1_identity(const SpectralHeatModel& model, double s);

}  // namespace lqrk
