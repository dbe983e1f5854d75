#include "hknoise/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "hknoise/summation.hpp"

namespace hknoise {

double diameter(const OpinionState& state) {
    if (state.size() == 0) {
        throw std::invalid_argument("diameter of an empty state");
    }
    const auto [lo, hi] = std::minmax_element(state.values.begin(), state.values.end());
    return *hi - *lo;
}

ConsensusVerdict detect_quasi_consensus(const Trajectory& traj, ConfidenceThreshold eps,
                                        std::int64_t window, bool absorbing) {
    ConsensusVerdict verdict;
    verdict.absorbing_rule = absorbing;
    const auto& d = traj.diameter;
    if (d.empty()) return verdict;

    if (absorbing) {
        // First hit: once d_V <= eps the certified noise cannot push it out.
        for (std::size_t t = 0; t < d.size(); ++t) {
            if (d[t] <= eps.value()) {
                verdict.detected = true;
                verdict.entry_step = static_cast<std::int64_t>(t);
                return verdict;
            }
        }
        return verdict;
    }

    verdict.window = window;
    // Longest suffix with d <= eps.
    std::size_t start = d.size();
    while (start > 0 && d[start - 1] <= eps.value()) {
        --start;
    }
    if (start == d.size()) return verdict;
    const auto entry = static_cast<std::int64_t>(start);
    if (traj.horizon - entry >= window) {
        verdict.detected = true;
        verdict.entry_step = entry;
    }
    return verdict;
}

std::optional<std::int64_t> divergence_detected(const Trajectory& traj,
                                                ConfidenceThreshold eps) {
    for (std::size_t t = 0; t < traj.diameter.size(); ++t) {
        if (traj.diameter[t] > eps.value()) {
            return static_cast<std::int64_t>(t);
        }
    }
    return std::nullopt;
}

ClusterPartition clusters(const OpinionState& state, ConfidenceThreshold eps) {
    if (state.size() == 0) {
        throw std::invalid_argument("clusters of an empty state");
    }
    std::vector<std::size_t> order(state.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (state.values[a] != state.values[b]) return state.values[a] < state.values[b];
        return a < b;
    });

    ClusterPartition partition;
    partition.gap_threshold = eps.value();

    ClusterPartition::Group group;
    NeumaierSum sum;
    auto flush = [&]() {
        group.mean = sum.value() / static_cast<double>(group.members.size());
        partition.groups.push_back(std::move(group));
        group = {};
        sum.reset();
    };

    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t idx = order[k];
        if (!group.members.empty()) {
            const double gap = state.values[idx] - state.values[group.members.back()];
            if (gap > eps.value()) flush();
        }
        group.members.push_back(idx);
        sum.add(state.values[idx]);
    }
    flush();
    return partition;
}

std::int32_t cluster_count_sorted(std::span<const double> sorted_values, double eps) {
    std::int32_t count = 1;
    for (std::size_t k = 1; k < sorted_values.size(); ++k) {
        if (sorted_values[k] - sorted_values[k - 1] > eps) ++count;
    }
    return count;
}

std::int64_t absorption_violations(const Trajectory& traj, ConfidenceThreshold eps) {
    std::int64_t violations = 0;
    bool entered = false;
    for (double d : traj.diameter) {
        if (d <= eps.value()) {
            entered = true;
        } else if (entered) {
            ++violations;
        }
    }
    return violations;
}

} // namespace hknoise
