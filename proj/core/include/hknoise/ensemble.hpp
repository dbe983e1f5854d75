#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hknoise/metrics.hpp"
#include "hknoise/trajectory.hpp"

namespace hknoise {

struct ReplicateVerdict {
    std::uint64_t replicate = 0;
    ConsensusVerdict consensus;
    std::optional<std::int64_t> first_divergence;
    double final_diameter = 0.0;
    std::int64_t absorption_violations = 0;
    double max_consensus_residual = 0.0;
};

// Run `replicates` independent trajectories of the config. Replicate r draws
// from root(master_seed).substream(r); verdicts are a pure function of
// (config, replicates) and come back ordered by replicate, so the worker
// count only changes wall time, never a byte of the results. workers = 0
// means hardware concurrency.
std::vector<ReplicateVerdict> run_ensemble(const SimulationConfig& config,
                                           std::size_t replicates, unsigned workers = 0);

struct EnsembleSummary {
    std::size_t replicates = 0;
    double qc_freq = 0.0;
    double mean_T = 0.0;             // NaN when no replicate reached quasi-consensus
    double median_T = 0.0;           // NaN likewise
    double div_freq = 0.0;
    double mean_first_div_t = 0.0;   // NaN when no replicate diverged
};

// Order-independent aggregation (sums of counts, then divide).
EnsembleSummary summarize(std::span<const ReplicateVerdict> verdicts);

struct SweepRow {
    double ratio = 0.0;
    std::size_t n = 0;
    double epsilon = 0.0;
    std::size_t replicates = 0;
    double qc_freq = 0.0;
    double mean_T = 0.0;
    double median_T = 0.0;
    double div_freq = 0.0;
    double mean_first_div_t = 0.0;
    std::uint64_t master_seed = 0;
};

// One row per delta/eps ratio, using Uniform(ratio * eps) noise (Zero noise
// at ratio 0). Row i derives replicate streams from
// root(master_seed).substream(i).substream(r), mixing the ratio index into
// the stream lineage. Ratios must be >= 0.
std::vector<SweepRow> sweep_critical(std::span<const double> ratios,
                                     const SimulationConfig& base, std::size_t replicates,
                                     unsigned workers = 0);

// Bundled demonstration scenarios:
//   fig1  n=20, eps=0.2, uniform random initials, no noise; the seed is
//         searched upward from the given one until the run settles into
//         exactly 3 clusters, and the seed found is reported.
//   fig2  the same initials as fig1 (same seed search), Uniform(0.1*eps)
//         noise; expected to reach quasi-consensus in finite time.
//   fig3  n=10, eps=0.01, all initials 0.5, Uniform(0.6*eps) noise; expected
//         to diverge.
enum class Scenario { Fig1, Fig2, Fig3 };

std::optional<Scenario> scenario_from_name(std::string_view name);
std::string scenario_name(Scenario scenario);

struct ScenarioResult {
    Scenario scenario = Scenario::Fig1;
    SimulationConfig config;     // fully resolved; master_seed is the seed used
    std::uint64_t seed_used = 0;
    Trajectory trajectory;
    ConsensusVerdict verdict;
    std::optional<std::int64_t> first_divergence;
    std::size_t final_cluster_count = 0;
};

ScenarioResult reproduce_scenario(Scenario scenario, std::uint64_t master_seed);

} // namespace hknoise
