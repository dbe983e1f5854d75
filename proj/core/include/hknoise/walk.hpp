#pragma once

#include <cstdint>
#include <vector>

#include "hknoise/config.hpp"
#include "hknoise/metrics.hpp"
#include "hknoise/trajectory.hpp"

namespace hknoise {

// Aggregated-noise walk of a synchronized cluster. For step k the cross-agent
// mean draw is eta_k; S_t is its running sum and s_t^2 = t * Var(xi) / n the
// analytic variance of S_t.
struct WalkRecord {
    std::vector<double> mean_noise;   // eta_k, k = 1..horizon at index k-1
    std::vector<double> walk_sum;     // S_t (Neumaier running sum of mean_noise)
    std::vector<double> variance;     // s_t^2, analytic
    double initial_mean = 0.0;        // mean of y(0)
};

// Unclamped evolution y_i(t+1) = neighbor_mean(y(t), i) + xi_i(t+1); values
// may leave [0, 1].
struct UnclampedRun {
    std::size_t n = 0;
    double epsilon = 0.0;
    std::int64_t horizon = 0;

    std::vector<double> y_min;   // per t = 0..horizon
    std::vector<double> y_max;
    std::vector<std::vector<double>> states;  // empty unless record_states
    std::vector<double> final_values;

    WalkRecord walk;

    // Number of leading steps whose update saw the complete interaction graph
    // (every pair within eps). The closed form y_i(t+1) = mean(y(0)) + S_t +
    // xi_i(t+1) holds exactly on that prefix.
    std::int64_t synchronized_steps = 0;
    bool synchronized_to_horizon = false;

    // max |y_i(t+1) - (mean(y(0)) + S_t + xi_i(t+1))| over the synchronized
    // prefix.
    double max_identity_residual = 0.0;
};

UnclampedRun run_unclamped(const SimulationConfig& config, RandomStream replicate_stream);
UnclampedRun run_unclamped(const SimulationConfig& config, std::uint64_t replicate = 0);

// Clamped and unclamped dynamics driven by the same draws, for boundary
// recurrence and coupling diagnostics.
struct WalkPair {
    Trajectory clamped;
    UnclampedRun unclamped;

    std::int64_t first_upper_clamp = -1;   // first step where any agent clamped at 1

    // Count of (t, i) with y_i(t) > x_i(t) among states recorded strictly
    // before the first upper clamp (the comparison only holds while the
    // clamped path never leaves [0, 1)).
    std::int64_t coupling_violations = 0;
};

WalkPair run_walk_pair(const SimulationConfig& config, std::uint64_t replicate = 0);

struct VarianceBracket {
    double lower = 0.0;   // t * c / n with c = Var(xi)
    double upper = 0.0;   // t * d^2 / n with d = support bound
    double exact = 0.0;   // t * Var(xi) / n
};

// Analytic bracket for s_t^2. Refused for degenerate noise (c = 0 breaks the
// hypothesis the walk diagnostics rely on).
Refusable<VarianceBracket> walk_variance_bounds(const NoiseModel& model, std::size_t n,
                                                std::int64_t t);

// S_t / (s_t * sqrt(log log s_t)) with the analytic s_t. Throws
// std::domain_error when log log s_t <= 0 (s_t <= e) or t is out of range.
double lil_statistic(const WalkRecord& record, std::int64_t t);

// NaN instead of a throw outside the domain (CSV-friendly).
double lil_statistic_or_nan(const WalkRecord& record, std::int64_t t);

// Clamped run delivering only the clamp-event log; the config is expected to
// start from a consensus initial state (see default_boundary_config).
BoundaryHitLog boundary_recurrence(const SimulationConfig& config, std::uint64_t replicate = 0);

// Short-hitting-time defaults for boundary recurrence: n = 3, eps = 0.5,
// Uniform(0.25) noise, all agents at 0.5.
SimulationConfig default_boundary_config(std::int64_t horizon = 1000000);

} // namespace hknoise
