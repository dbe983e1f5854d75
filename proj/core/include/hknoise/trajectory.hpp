#pragma once

#include <cstdint>
#include <vector>

#include "hknoise/config.hpp"
#include "hknoise/dynamics.hpp"

namespace hknoise {

// Destination steps at which the clamp fired, per agent and boundary.
// A hit is "the clamp branch fired" (pre-clamp value left [0,1]); landing on
// 0 or 1 by arithmetic coincidence is counted separately by the trajectory.
struct BoundaryHitLog {
    std::vector<std::vector<std::int64_t>> at_zero;  // strictly increasing per agent
    std::vector<std::vector<std::int64_t>> at_one;

    std::size_t total_at_zero() const;
    std::size_t total_at_one() const;
    // True when every agent logged at least one hit at each boundary.
    bool every_agent_hit_both() const;
};

struct Trajectory {
    std::size_t n = 0;
    double epsilon = 0.0;
    std::int64_t horizon = 0;

    // Indexed by t = 0..horizon.
    std::vector<double> diameter;
    std::vector<double> min_value;
    std::vector<double> max_value;
    std::vector<std::int32_t> cluster_count;         // empty unless record_clusters
    std::vector<std::vector<double>> states;         // empty unless record_states

    BoundaryHitLog boundary_hits;
    std::int64_t boundary_value_coincidences = 0;    // x_i landed exactly on 0/1 without clamping

    OpinionState final_state;

    // Largest |x*_i - (mean(x(t)) + xi_i)| seen over steps with d_V(t) <= eps,
    // measured only on the per-agent path (see EngineOptions).
    double max_consensus_residual = 0.0;

    // Zero-noise runs: first t with x(t+1) == x(t) bitwise, -1 if never. The
    // state is exactly constant from that step on.
    std::int64_t fixed_point_step = -1;
};

struct EngineOptions {
    // When the time-t diameter is <= eps the interaction graph is complete, so
    // every agent's neighbor average is the one global mean; computing that
    // mean once is bit-identical to the per-agent path (same accumulator, same
    // term order over all agents). Disable to force the per-agent path, which
    // also makes max_consensus_residual a genuinely measured quantity.
    bool fast_consensus_path = true;
};

// Evolve the clamped model from the config's initial condition for
// config.horizon steps. Deterministic in (config, replicate_stream): initial
// draws come from replicate_stream.substream(0), noise draws from
// replicate_stream.substream(1).
Trajectory run_trajectory(const SimulationConfig& config, RandomStream replicate_stream,
                          const EngineOptions& options = {});

// Same, with the replicate stream derived as root(master_seed).substream(replicate).
Trajectory run_trajectory(const SimulationConfig& config, std::uint64_t replicate = 0,
                          const EngineOptions& options = {});

} // namespace hknoise
