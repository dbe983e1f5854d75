#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "hknoise/trajectory.hpp"

namespace hknoise {

// Opinion diameter d_V: max - min of the values. n >= 1.
double diameter(const OpinionState& state);

struct ConsensusVerdict {
    bool detected = false;
    std::int64_t entry_step = -1;   // T
    std::int64_t window = 0;        // trailing persistence length applied
    bool absorbing_rule = false;    // first-hit rule was used
};

// Finite-horizon quasi-consensus surrogate: the smallest T with d(t) <= eps
// for every recorded t in [T, horizon], accepted only when horizon - T >=
// window. With `absorbing` (noise certified to stay within eps/2) the verdict
// is the first step with d <= eps and the window is ignored: once the
// diameter is inside it cannot leave again.
ConsensusVerdict detect_quasi_consensus(const Trajectory& traj, ConfidenceThreshold eps,
                                        std::int64_t window, bool absorbing = false);

// Earliest recorded step whose diameter strictly exceeds eps.
std::optional<std::int64_t> divergence_detected(const Trajectory& traj, ConfidenceThreshold eps);

// Groups of agents split wherever the consecutive sorted-value gap exceeds
// eps (the chain rule matching the interaction graph's connectivity, not a
// diameter rule). Groups are ordered by value.
struct ClusterPartition {
    struct Group {
        std::vector<std::size_t> members;  // original agent indices, ascending value
        double mean = 0.0;
    };
    std::vector<Group> groups;
    double gap_threshold = 0.0;
};

ClusterPartition clusters(const OpinionState& state, ConfidenceThreshold eps);

// Cluster count of a sorted value array (scratch helper for the engines).
std::int32_t cluster_count_sorted(std::span<const double> sorted_values, double eps);

// Number of steps t with d(t) > eps after some earlier step had d <= eps.
// Zero for every noise model certified to stay within eps/2.
std::int64_t absorption_violations(const Trajectory& traj, ConfidenceThreshold eps);

} // namespace hknoise
