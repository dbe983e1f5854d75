#include "hknoise/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hknoise/summation.hpp"

namespace hknoise {

namespace {

struct MinMax {
    double min = 0.0;
    double max = 0.0;
};

MinMax scan(std::span<const double> values) {
    MinMax s{values[0], values[0]};
    for (double v : values) {
        if (v < s.min) s.min = v;
        if (v > s.max) s.max = v;
    }
    return s;
}

} // namespace

UnclampedRun run_unclamped(const SimulationConfig& config, RandomStream replicate_stream) {
    validate(config);

    RandomStream init_stream = replicate_stream.substream(0);
    RandomStream noise_stream = replicate_stream.substream(1);

    OpinionState y0 = make_initial_state(config, init_stream);
    std::vector<double> y = std::move(y0.values);
    const std::size_t n = config.n;
    const double eps = config.epsilon;
    const auto steps = static_cast<std::size_t>(config.horizon);
    const double var_eta = config.noise.variance() / static_cast<double>(n);

    UnclampedRun out;
    out.n = n;
    out.epsilon = eps;
    out.horizon = config.horizon;
    out.y_min.reserve(steps + 1);
    out.y_max.reserve(steps + 1);
    out.walk.mean_noise.reserve(steps);
    out.walk.walk_sum.reserve(steps);
    out.walk.variance.reserve(steps);
    out.walk.initial_mean = compensated_mean(y);
    if (config.record_states) out.states.reserve(steps + 1);

    std::vector<double> noise(n);
    std::vector<double> next(n);

    auto record = [&](std::span<const double> values) {
        const MinMax s = scan(values);
        out.y_min.push_back(s.min);
        out.y_max.push_back(s.max);
        if (config.record_states) out.states.emplace_back(values.begin(), values.end());
        return s;
    };

    MinMax stats = record(y);

    NeumaierSum walk_sum;
    bool synchronized = true;

    for (std::int64_t t = 0; t < config.horizon; ++t) {
        config.noise.sample_vector(noise, noise_stream);

        const bool complete = stats.max - stats.min <= eps;
        if (!complete) synchronized = false;

        const double closed_base =
            synchronized ? out.walk.initial_mean + walk_sum.value() : 0.0;

        if (complete) {
            const double mean = compensated_mean(y);
            for (std::size_t i = 0; i < n; ++i) {
                next[i] = mean + noise[i];
            }
        } else {
            detail::neighbor_averages(y, eps, next);
            for (std::size_t i = 0; i < n; ++i) {
                next[i] += noise[i];
            }
        }

        if (synchronized) {
            ++out.synchronized_steps;
            for (std::size_t i = 0; i < n; ++i) {
                const double residual = std::abs(next[i] - (closed_base + noise[i]));
                if (residual > out.max_identity_residual) {
                    out.max_identity_residual = residual;
                }
            }
        }

        const double eta = compensated_mean(noise);
        walk_sum.add(eta);
        out.walk.mean_noise.push_back(eta);
        out.walk.walk_sum.push_back(walk_sum.value());
        out.walk.variance.push_back(static_cast<double>(t + 1) * var_eta);

        y.swap(next);
        stats = record(y);
    }

    out.synchronized_to_horizon = synchronized;
    out.final_values = std::move(y);
    return out;
}

UnclampedRun run_unclamped(const SimulationConfig& config, std::uint64_t replicate) {
    return run_unclamped(config, RandomStream(config.master_seed).substream(replicate));
}

WalkPair run_walk_pair(const SimulationConfig& config, std::uint64_t replicate) {
    validate(config);

    RandomStream replicate_stream = RandomStream(config.master_seed).substream(replicate);
    RandomStream init_stream = replicate_stream.substream(0);
    RandomStream noise_stream = replicate_stream.substream(1);

    OpinionState x = make_initial_state(config, init_stream);
    std::vector<double> y = x.values;
    const std::size_t n = config.n;
    const double eps = config.epsilon;
    const auto steps = static_cast<std::size_t>(config.horizon);
    const double var_eta = config.noise.variance() / static_cast<double>(n);
    const bool zero_noise = config.noise.kind() == NoiseKind::Zero;

    WalkPair out;
    Trajectory& traj = out.clamped;
    UnclampedRun& un = out.unclamped;

    traj.n = n;
    traj.epsilon = eps;
    traj.horizon = config.horizon;
    traj.boundary_hits.at_zero.resize(n);
    traj.boundary_hits.at_one.resize(n);
    traj.diameter.reserve(steps + 1);
    traj.min_value.reserve(steps + 1);
    traj.max_value.reserve(steps + 1);
    if (config.record_clusters) traj.cluster_count.reserve(steps + 1);
    if (config.record_states) traj.states.reserve(steps + 1);

    un.n = n;
    un.epsilon = eps;
    un.horizon = config.horizon;
    un.y_min.reserve(steps + 1);
    un.y_max.reserve(steps + 1);
    un.walk.mean_noise.reserve(steps);
    un.walk.walk_sum.reserve(steps);
    un.walk.variance.reserve(steps);
    un.walk.initial_mean = compensated_mean(y);
    if (config.record_states) un.states.reserve(steps + 1);

    std::vector<double> noise(n);
    std::vector<double> x_pre(n);
    std::vector<double> x_next(n);
    std::vector<double> y_next(n);
    std::vector<double> sorted;
    if (config.record_clusters) sorted.resize(n);

    auto record_x = [&](std::span<const double> values) {
        const MinMax s = scan(values);
        traj.min_value.push_back(s.min);
        traj.max_value.push_back(s.max);
        traj.diameter.push_back(s.max - s.min);
        if (config.record_clusters) {
            std::copy(values.begin(), values.end(), sorted.begin());
            std::sort(sorted.begin(), sorted.end());
            traj.cluster_count.push_back(cluster_count_sorted(sorted, eps));
        }
        if (config.record_states) traj.states.emplace_back(values.begin(), values.end());
        return s;
    };
    auto record_y = [&](std::span<const double> values) {
        const MinMax s = scan(values);
        un.y_min.push_back(s.min);
        un.y_max.push_back(s.max);
        if (config.record_states) un.states.emplace_back(values.begin(), values.end());
        return s;
    };

    MinMax x_stats = record_x(x.values);
    MinMax y_stats = record_y(y);

    NeumaierSum walk_sum;
    bool synchronized = true;

    for (std::int64_t t = 0; t < config.horizon; ++t) {
        config.noise.sample_vector(noise, noise_stream);
        const std::int64_t dest = t + 1;

        // Clamped system.
        if (x_stats.max - x_stats.min <= eps) {
            const double mean = compensated_mean(x.values);
            for (std::size_t i = 0; i < n; ++i) {
                x_pre[i] = mean + noise[i];
            }
        } else {
            detail::neighbor_averages(x.values, eps, x_pre);
            for (std::size_t i = 0; i < n; ++i) {
                x_pre[i] += noise[i];
            }
        }
        bool upper_clamped_now = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = x_pre[i];
            if (v > 1.0) {
                x_next[i] = 1.0;
                traj.boundary_hits.at_one[i].push_back(dest);
                upper_clamped_now = true;
            } else if (v < 0.0) {
                x_next[i] = 0.0;
                traj.boundary_hits.at_zero[i].push_back(dest);
            } else {
                x_next[i] = v;
                if (v == 0.0 || v == 1.0) ++traj.boundary_value_coincidences;
            }
        }
        if (upper_clamped_now && out.first_upper_clamp < 0) {
            out.first_upper_clamp = dest;
        }
        if (zero_noise && traj.fixed_point_step < 0 && x_next == x.values) {
            traj.fixed_point_step = t;
        }

        // Unclamped system on the same draws.
        const bool y_complete = y_stats.max - y_stats.min <= eps;
        if (!y_complete) synchronized = false;
        const double closed_base =
            synchronized ? un.walk.initial_mean + walk_sum.value() : 0.0;
        if (y_complete) {
            const double mean = compensated_mean(y);
            for (std::size_t i = 0; i < n; ++i) {
                y_next[i] = mean + noise[i];
            }
        } else {
            detail::neighbor_averages(y, eps, y_next);
            for (std::size_t i = 0; i < n; ++i) {
                y_next[i] += noise[i];
            }
        }
        if (synchronized) {
            ++un.synchronized_steps;
            for (std::size_t i = 0; i < n; ++i) {
                const double residual = std::abs(y_next[i] - (closed_base + noise[i]));
                if (residual > un.max_identity_residual) {
                    un.max_identity_residual = residual;
                }
            }
        }

        const double eta = compensated_mean(noise);
        walk_sum.add(eta);
        un.walk.mean_noise.push_back(eta);
        un.walk.walk_sum.push_back(walk_sum.value());
        un.walk.variance.push_back(static_cast<double>(t + 1) * var_eta);

        x.values.swap(x_next);
        ++x.t;
        y.swap(y_next);
        x_stats = record_x(x.values);
        y_stats = record_y(y);

        // The comparison y <= x only applies while the clamped path has never
        // left [0, 1).
        if (out.first_upper_clamp < 0) {
            for (std::size_t i = 0; i < n; ++i) {
                if (y[i] > x.values[i]) ++out.coupling_violations;
            }
        }
    }

    un.synchronized_to_horizon = synchronized;
    un.final_values = y;
    traj.final_state = std::move(x);
    return out;
}

Refusable<VarianceBracket> walk_variance_bounds(const NoiseModel& model, std::size_t n,
                                                std::int64_t t) {
    using Outcome = Refusable<VarianceBracket>;
    if (model.degenerate()) {
        return Outcome::refused("degenerate noise has no positive variance lower bound");
    }
    if (n < 1) {
        return Outcome::refused("n must be >= 1");
    }
    if (t < 0) {
        return Outcome::refused("t must be >= 0");
    }
    const double c = model.variance();
    const double d = model.support_bound();
    VarianceBracket bracket;
    bracket.lower = static_cast<double>(t) * c / static_cast<double>(n);
    bracket.upper = static_cast<double>(t) * d * d / static_cast<double>(n);
    bracket.exact = bracket.lower;
    return Outcome::accepted(bracket);
}

double lil_statistic(const WalkRecord& record, std::int64_t t) {
    if (t < 1 || static_cast<std::size_t>(t) > record.walk_sum.size()) {
        throw std::domain_error("lil_statistic: t outside the recorded range");
    }
    const double s = std::sqrt(record.variance[static_cast<std::size_t>(t - 1)]);
    if (!(s > 0.0)) {
        throw std::domain_error("lil_statistic: zero variance");
    }
    const double loglog = std::log(std::log(s));
    if (!(loglog > 0.0)) {
        std::ostringstream os;
        os << "lil_statistic: log log s_t <= 0 at s_t = " << s;
        throw std::domain_error(os.str());
    }
    return record.walk_sum[static_cast<std::size_t>(t - 1)] / (s * std::sqrt(loglog));
}

double lil_statistic_or_nan(const WalkRecord& record, std::int64_t t) {
    if (t < 1 || static_cast<std::size_t>(t) > record.walk_sum.size()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double s = std::sqrt(record.variance[static_cast<std::size_t>(t - 1)]);
    if (!(s > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double loglog = std::log(std::log(s));
    if (!(loglog > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return record.walk_sum[static_cast<std::size_t>(t - 1)] / (s * std::sqrt(loglog));
}

BoundaryHitLog boundary_recurrence(const SimulationConfig& config, std::uint64_t replicate) {
    SimulationConfig cfg = config;
    cfg.record_states = false;
    cfg.record_clusters = false;
    return run_trajectory(cfg, replicate).boundary_hits;
}

SimulationConfig default_boundary_config(std::int64_t horizon) {
    SimulationConfig cfg;
    cfg.n = 3;
    cfg.epsilon = 0.5;
    cfg.noise = NoiseModel::uniform(0.25);
    cfg.initial = InitialCondition::all_equal(0.5);
    cfg.horizon = horizon;
    cfg.record_states = false;
    cfg.record_clusters = false;
    return cfg;
}

} // namespace hknoise
