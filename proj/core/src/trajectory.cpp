#include "hknoise/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "hknoise/metrics.hpp"
#include "hknoise/summation.hpp"

namespace hknoise {

std::size_t BoundaryHitLog::total_at_zero() const {
    std::size_t total = 0;
    for (const auto& hits : at_zero) total += hits.size();
    return total;
}

std::size_t BoundaryHitLog::total_at_one() const {
    std::size_t total = 0;
    for (const auto& hits : at_one) total += hits.size();
    return total;
}

bool BoundaryHitLog::every_agent_hit_both() const {
    if (at_zero.empty() || at_one.empty()) return false;
    for (const auto& hits : at_zero) {
        if (hits.empty()) return false;
    }
    for (const auto& hits : at_one) {
        if (hits.empty()) return false;
    }
    return true;
}

namespace {

struct StateStats {
    double min = 0.0;
    double max = 0.0;
};

StateStats scan_stats(std::span<const double> values) {
    StateStats s{values[0], values[0]};
    for (double v : values) {
        if (v < s.min) s.min = v;
        if (v > s.max) s.max = v;
    }
    return s;
}

} // namespace

Trajectory run_trajectory(const SimulationConfig& config, RandomStream replicate_stream,
                          const EngineOptions& options) {
    validate(config);

    RandomStream init_stream = replicate_stream.substream(0);
    RandomStream noise_stream = replicate_stream.substream(1);

    OpinionState x = make_initial_state(config, init_stream);
    const std::size_t n = config.n;
    const double eps = config.epsilon;
    const auto steps = static_cast<std::size_t>(config.horizon);

    Trajectory out;
    out.n = n;
    out.epsilon = eps;
    out.horizon = config.horizon;
    out.diameter.reserve(steps + 1);
    out.min_value.reserve(steps + 1);
    out.max_value.reserve(steps + 1);
    out.boundary_hits.at_zero.resize(n);
    out.boundary_hits.at_one.resize(n);
    if (config.record_clusters) out.cluster_count.reserve(steps + 1);
    if (config.record_states) out.states.reserve(steps + 1);

    std::vector<double> noise(n);
    std::vector<double> pre(n);
    std::vector<double> next(n);
    std::vector<double> sorted;
    if (config.record_clusters) sorted.resize(n);

    auto record = [&](std::span<const double> values, const StateStats& stats) {
        out.min_value.push_back(stats.min);
        out.max_value.push_back(stats.max);
        out.diameter.push_back(stats.max - stats.min);
        if (config.record_clusters) {
            std::copy(values.begin(), values.end(), sorted.begin());
            std::sort(sorted.begin(), sorted.end());
            out.cluster_count.push_back(cluster_count_sorted(sorted, eps));
        }
        if (config.record_states) {
            out.states.emplace_back(values.begin(), values.end());
        }
    };

    StateStats stats = scan_stats(x.values);
    record(x.values, stats);

    const bool zero_noise = config.noise.kind() == NoiseKind::Zero;
    bool frozen = false;

    for (std::int64_t t = 0; t < config.horizon; ++t) {
        if (frozen) {
            // Bitwise fixed point under zero noise: every later state repeats.
            record(x.values, stats);
            ++x.t;
            continue;
        }

        config.noise.sample_vector(noise, noise_stream);

        const bool complete = stats.max - stats.min <= eps;
        if (complete && options.fast_consensus_path) {
            const double mean = compensated_mean(x.values);
            for (std::size_t i = 0; i < n; ++i) {
                pre[i] = mean + noise[i];
            }
        } else {
            detail::neighbor_averages(x.values, eps, pre);
            for (std::size_t i = 0; i < n; ++i) {
                pre[i] += noise[i];
            }
            if (complete) {
                // d_V <= eps makes the graph complete, so every neighbor
                // average must equal the one global mean.
                const double mean = compensated_mean(x.values);
                for (std::size_t i = 0; i < n; ++i) {
                    const double residual = std::abs(pre[i] - (mean + noise[i]));
                    if (residual > out.max_consensus_residual) {
                        out.max_consensus_residual = residual;
                    }
                }
            }
        }

        const std::int64_t dest = t + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = pre[i];
            if (v > 1.0) {
                next[i] = 1.0;
                out.boundary_hits.at_one[i].push_back(dest);
            } else if (v < 0.0) {
                next[i] = 0.0;
                out.boundary_hits.at_zero[i].push_back(dest);
            } else {
                next[i] = v;
                if (v == 0.0 || v == 1.0) ++out.boundary_value_coincidences;
            }
        }

        if (zero_noise && next == x.values) {
            frozen = true;
            out.fixed_point_step = t;
        }

        x.values.swap(next);
        ++x.t;
        stats = scan_stats(x.values);
        record(x.values, stats);
    }

    out.final_state = std::move(x);
    return out;
}

Trajectory run_trajectory(const SimulationConfig& config, std::uint64_t replicate,
                          const EngineOptions& options) {
    return run_trajectory(config, RandomStream(config.master_seed).substream(replicate),
                          options);
}

} // namespace hknoise
