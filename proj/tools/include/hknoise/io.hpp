#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hknoise/ensemble.hpp"
#include "hknoise/walk.hpp"

namespace hknoise::io {

// A config file plus the command-scoped extras that may ride along in it.
struct CommandParams {
    SimulationConfig config;
    std::size_t replicates = 100;
    std::vector<double> ratios;   // sweep grid; empty means "use the default grid"
};

inline const std::vector<double> kDefaultSweepRatios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8};

// Parse a config file. A manifest written by any command is also accepted:
// its embedded "config" snapshot is used, which is how a finished run is
// replayed bit-exactly. Throws std::invalid_argument on anything malformed;
// no output file is touched before this succeeds.
CommandParams load_config_file(const std::filesystem::path& path);

CommandParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const CommandParams& params);

// Shortest-reversible decimal for CSV cells ("%.17g"; "nan" for NaN).
std::string format_double(double v);

// Per-step metrics: t,d_V,n_clusters,min,max and, with states, x0..x{n-1}.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

// One row per ratio: ratio,n,epsilon,replicates,qc_freq,mean_T,median_T,
// div_freq,mean_first_div_t,master_seed.
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

// Walk series: t,eta,S,s2_analytic,lil_stat for t = 1..horizon.
void write_walk_csv(const std::filesystem::path& path, const WalkRecord& record);

// Clamp events of the paired clamped run: agent,boundary,t ordered by
// (t, agent, boundary).
void write_boundary_events_csv(const std::filesystem::path& path, const BoundaryHitLog& log);

struct RunManifest {
    std::string command;
    CommandParams params;
    std::vector<std::string> outputs;    // file names relative to the manifest
    std::string started_utc;
    std::string finished_utc;
    nlohmann::json extra;                // command-specific additions
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

std::string utc_timestamp();

} // namespace hknoise::io
