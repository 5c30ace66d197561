#pragma once

#include <vector>

#include "twistel/gauge.hpp"
#include "twistel/modulation.hpp"
#include "twistel/profiles.hpp"
#include "twistel/radial_grid.hpp"

namespace twistel {

// E* = int |q|^2 + V^2 + (W*/r)^2, E = E* + mu^2 int |v|^2, all against r dr,
// with W* = W - W_os(t). Dissipation and vortex forcing follow the balance
// (1/2) dE/dt + dissipation = forcing.
struct EnergyReport {
    double E = 0.0;
    double Estar = 0.0;
    double dissipation = 0.0;
    double forcing = 0.0;
    double q_l2 = 0.0;
    double v_l2 = 0.0;
    double V_l2 = 0.0;
    double wstar_over_r_l2 = 0.0;
};

EnergyReport energy_report(const EquivariantState& s, const GaugeFields& gf, const RadialGrid& g,
                           const ModelParams& p);

// | (1/2)(E_next - E_prev)/(t_next - t_prev) + dissipation - forcing |
double energy_identity_residual(double e_prev, double e_next, double span, double dissipation,
                                double forcing);

struct DiagnosticsRecord {
    double t = 0.0;
    double sigma = 0.0;
    double theta = 0.0;
    double x_norm_z = 0.0;
    double l2_z = 0.0; // sigma-weighted: sigma * ||z||_L2(rho drho)
    double E = 0.0;
    double Estar = 0.0;
    double dissipation = 0.0;
    double forcing = 0.0;
    double residual = 0.0; // centered energy-identity residual, NaN at the ends
    double V_l2 = 0.0;
    double V2_l2 = 0.0;
    double wstar_over_r_l2 = 0.0;
    double v_l2 = 0.0;
    double V1_sup = 0.0;
    double wstar1_over_r2_sup = 0.0;
    double wstar2_over_r_l2 = 0.0;
    double weighted_z = 0.0; // running int e^{2 mu^2 t / m^2} ||z||_X^2 dt
    bool a1_ok = true;
    bool a2_ok = true;
    double sigma_cells = 0.0; // grid nodes inside r < sigma
};

struct FitResult {
    double rate = 0.0;
    double r2 = 1.0;
    int samples = 0;
};

// Least-squares slope of ln(value) over t in [t_lo, t_hi]. Needs at least 10
// samples and strictly positive values in the window.
FitResult fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& value,
                               double t_lo, double t_hi);

struct DecayCheck {
    bool pass = false;
    double c_first = 0.0;  // smallest admissible constant over the first half-window
    double c_second = 0.0; // same over the second half
};

// Checks value(t) <= C base(t)^exponent with base = (1+t) or t; passes when the
// required constant does not grow from the first half of the window to the second.
DecayCheck decay_bound_check(const std::vector<double>& t, const std::vector<double>& value,
                             double exponent, bool offset_base, double t_lo, double t_hi);

struct CoercivityResult {
    double min_quotient = 0.0;    // min of int |L_h z|^2 rho drho / ||z||_X^2
    double kernel_alignment = 0.0; // |<zhat, h1>| / (||zhat|| ||h1||) in L2(rho drho)
};

// Generalized eigenproblem for the quotient above on {z(0) = 0}, optionally
// restricted to the complement of h1 in L2(rho drho). Dense solve, n <= 2048.
CoercivityResult coercivity_spectrum(const RadialGrid& rho_grid, int m, bool constrained);

// int (|d_r q|^2 + |q|^2/r^2) r dr / int |L_m q|^2 r dr for the state's gauge field.
double lm_coercivity_ratio(const EquivariantState& s, const GaugeFields& gf, const RadialGrid& g,
                           int m);

struct RatioStats {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int count = 0;
};

// ||q||_L2(r dr) / ||z||_X across synthesized frames (fluid fields zero).
RatioStats check_norm_equivalence(const RadialGrid& g, const ModelParams& p,
                                  const std::vector<ModulationFrame>& frames);

struct BootstrapCheck {
    bool a1 = true;
    bool a2 = true;
    double sigma_lo = 0.0, sigma_hi = 0.0; // admissible band at this time
    double v2_budget = 0.0;                // allowed int V2^2 at this time
};

BootstrapCheck bootstrap_assumption_check(double t, double sigma, double v2_l2,
                                          const ModelParams& p, double sigma_in, double epsilon,
                                          double epsilon_star);

} // namespace twistel
