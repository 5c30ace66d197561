#pragma once

#include <string>
#include <vector>

#include "twistel/diagnostics.hpp"
#include "twistel/modulation.hpp"
#include "twistel/profiles.hpp"
#include "twistel/radial_grid.hpp"

namespace twistel {

enum class RunMode { Coupled, HeatFlow };

struct RunConfig {
    ModelParams params;
    RunMode mode = RunMode::Coupled;
    double sigma_in = 0.5;
    double theta_in = 0.0;
    double r_max = 0.0; // <= 0 selects max(50 sigma_in, 10 r0)
    int n = 512;
    GridKind grading = GridKind::Geometric;
    double grading_beta = 0.0; // 0 selects the automatic value
    double dt = 1e-3;
    bool adaptive_dt = true;
    double dt_max = 5e-3;
    double t_end = -1.0; // < 0 selects 3 m^2 / mu^2
    int output_cadence = 50;
    bool companion_flows = true;
    std::string perturb_kind = "zero";
    double perturb_amplitude = 0.0;
    double vin_l2 = 0.0;
    double vin_width = 1.0;
    double wstar_l2 = 0.0;
    double wstar_width = 1.0;
    double epsilon = 0.2;
    double epsilon_star = 0.1;
    int min_sigma_cells = 8;
};

// Fills the derived defaults (r_max, t_end) and validates ranges.
RunConfig resolve_config(const RunConfig& cfg);

// One implicit-explicit step of the coupled system. Linear stiff parts
// (radial Laplacians, the m^2/r^2 + mu^2 damping of the horizontal director
// components, the swirl and vertical-flow operators) go backward Euler via
// tridiagonal solves; gradient nonlinearities and the swirl/flow forcing are
// explicit. The director is renormalized nodewise after the solve.
class Stepper {
  public:
    Stepper(const RadialGrid& g, const ModelParams& p, RunMode mode);

    // Attempts a step of size dt from s; writes the candidate into out and
    // returns the largest nodewise renormalization correction. Throws
    // NanDetected if the solve produces non-finite values.
    double attempt(const EquivariantState& s, double dt, EquivariantState& out);

    // Advances the decoupled comparison flows: dV1/dt = Lap2 V1 and
    // dg1/dt = Lap4 g1 (g1 tracks W*1 / r^2).
    void advance_companions(std::vector<double>& V1, std::vector<double>& g1, double dt) const;

    const RadialGrid& grid() const { return grid_; }

  private:
    struct TriDiag {
        std::vector<double> a, b, c; // sub, diag, super
    };
    void build_matrices(double dt) const;
    static void solve(const TriDiag& M, std::vector<double>& rhs);

    RadialGrid grid_;
    ModelParams params_;
    RunMode mode_;
    mutable double cached_dt_ = -1.0;
    mutable TriDiag mat_ph_, mat_pv_, mat_w_, mat_v_, mat_g1_;
};

struct TrajectoryRecord {
    double t = 0.0;
    ModulationFrame frame;
    std::vector<double> W, V, V1, G1; // G1 approximates W*1 / r^2
    DiagnosticsRecord diag;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::vector<double> accepted_dt;
    int rejected_steps = 0;
};

enum class RunStatus { Completed, EarlyStop, Breakdown, Aborted };

struct RunResult {
    RunStatus status = RunStatus::Completed;
    std::string message;
    RunConfig config; // resolved
    RadialGrid grid;
    Trajectory traj;
    EquivariantState final_state;
    double wall_seconds = 0.0;
};

RunResult run_simulation(const RunConfig& cfg);

// Self-similar bookkeeping: lambda(t) = mu^{-1} e^{-mu^2 t / m^2} and
// s(t) = (m^2/2)(e^{2 mu^2 t / m^2} - 1), so that lambda^2 s' = 1.
double similarity_lambda(double t, const ModelParams& p);
double similarity_time(double t, const ModelParams& p);

struct RescaledSample {
    double t = 0.0;
    double s = 0.0;
    double lambda = 0.0;
    double sigma_over_lambda = 0.0;
    double fit_residual = 0.0; // L2(y dy) distance to the fitted harmonic bubble
};

std::vector<RescaledSample> to_self_similar_frame(const Trajectory& traj, const ModelParams& p);

} // namespace twistel
