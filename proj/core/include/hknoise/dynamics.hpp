#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hknoise {

// Confidence threshold (interaction radius). Valid range (0, 1].
class ConfidenceThreshold {
public:
    explicit ConfidenceThreshold(double epsilon);
    double value() const { return epsilon_; }

private:
    double epsilon_;
};

// Opinion vector at one time step. Values live in [0, 1]; the clamped update
// keeps them there. n >= 1 and stays constant over a trajectory.
struct OpinionState {
    std::vector<double> values;
    std::int64_t t = 0;

    std::size_t size() const { return values.size(); }
};

// Intermediate pre-clamp update values; unbounded.
struct PreClampState {
    std::vector<double> values;
};

// Projection onto [0, 1]: 1 if v > 1, 0 if v < 0, v otherwise.
inline double clamp_to_unit(double v) {
    if (v > 1.0) return 1.0;
    if (v < 0.0) return 0.0;
    return v;
}

// Indices j with |x_j - x_i| <= eps, in ascending order. The comparison is
// the exact IEEE <= on the stored doubles, no tolerance. Always contains the
// agent itself. Throws std::out_of_range for a bad agent index.
std::vector<std::size_t> neighbor_set(const OpinionState& state, std::size_t agent,
                                      ConfidenceThreshold eps);

// Mean opinion over the neighbor set: Neumaier-compensated sum, terms in
// ascending agent-index order, divided by the neighbor count.
double local_average(const OpinionState& state, std::size_t agent, ConfidenceThreshold eps);

// The pre-clamp stage of the noisy update: x*_i = local_average(i) + noise_i
// for every agent. noise must have length n (throws std::invalid_argument).
PreClampState pre_clamp_update(const OpinionState& state, std::span<const double> noise,
                               ConfidenceThreshold eps);

// Agents whose pre-clamp value left [0, 1] in one step.
struct StepEvents {
    std::vector<std::size_t> clamped_low;
    std::vector<std::size_t> clamped_high;
};

// One synchronous update: x_i(t+1) = clamp(x~_i(t) + noise_i), every agent
// reading the full time-t state; t is incremented. noise must have length n.
OpinionState step(const OpinionState& state, std::span<const double> noise,
                  ConfidenceThreshold eps, StepEvents* events = nullptr);

namespace detail {

// Neighbor mean for one agent over raw values (shared by the public ops and
// the trajectory engines).
double neighbor_average(std::span<const double> values, std::size_t agent, double eps);

// Neighbor means for all agents via the per-agent path.
void neighbor_averages(std::span<const double> values, double eps, std::span<double> out);

} // namespace detail

} // namespace hknoise
