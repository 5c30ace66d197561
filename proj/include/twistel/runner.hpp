#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twistel/evolution.hpp"

namespace twistel {

struct RunRequest {
    RunConfig cfg;
    std::vector<double> snapshot_times; // records nearest these times get profile dumps
};

// key = value lines; '#' starts a comment; unknown keys are rejected.
RunRequest parse_config_text(const std::string& text);
RunRequest parse_config_file(const std::string& path);
// Applies one key = value assignment and returns the key; blank and comment
// lines return an empty string.
std::string apply_config_line(RunRequest& req, const std::string& line);

// Canonical echo used for hashing and for the manifest.
std::string config_to_text(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

// Runs the simulation and writes timeseries.csv, profile snapshots,
// manifest.txt and summary.txt under out_dir. Returns the process exit code:
// 0 completed or resolved early stop, 1 aborted, 2 breakdown.
int execute_run(const RunRequest& req, const std::string& out_dir);

// Writes the pinned-order timeseries for an already computed trajectory.
void write_timeseries(const Trajectory& traj, const std::string& path);
// Rebuilds the state at the record time from the stored frame and fields.
void write_profile(const TrajectoryRecord& rec, const RadialGrid& g, const ModelParams& p,
                   const std::string& path);

struct SweepSpec {
    RunRequest base;
    std::vector<int> m_list;
    std::vector<double> mu_list;
    std::vector<double> omega_list;
    std::vector<double> sigma_list;
    std::vector<double> amplitude_list;
    int threads = 0; // 0 picks the hardware count
};

SweepSpec parse_sweep_file(const std::string& path);

// Cross product of the lists, run in parallel, one output directory per case,
// plus a deterministic rates.csv comparing fitted and predicted scale rates.
int execute_sweep(const SweepSpec& spec, const std::string& out_dir);

// Least-squares exponential rate of a named timeseries column.
int execute_fit(const std::string& csv_path, const std::string& column, double t_lo, double t_hi);

// Built-in consistency checks; full adds short simulation-based checks.
int execute_verify(bool full);

} // namespace twistel
