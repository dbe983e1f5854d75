#include "hknoise/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "hknoise/summation.hpp"

namespace hknoise {

ConfidenceThreshold::ConfidenceThreshold(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !(epsilon <= 1.0)) {
        throw std::invalid_argument("confidence threshold must lie in (0, 1]");
    }
}

namespace detail {

double neighbor_average(std::span<const double> values, std::size_t agent, double eps) {
    const double xi = values[agent];
    NeumaierSum acc;
    std::size_t count = 0;
    for (double xj : values) {
        if (std::abs(xj - xi) <= eps) {
            acc.add(xj);
            ++count;
        }
    }
    return acc.value() / static_cast<double>(count);
}

void neighbor_averages(std::span<const double> values, double eps, std::span<double> out) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = neighbor_average(values, i, eps);
    }
}

} // namespace detail

namespace {

void check_agent(const OpinionState& state, std::size_t agent) {
    if (agent >= state.size()) {
        throw std::out_of_range("agent index out of range");
    }
}

void check_noise_length(const OpinionState& state, std::span<const double> noise) {
    if (noise.size() != state.size()) {
        throw std::invalid_argument("noise vector length does not match agent count");
    }
}

} // namespace

std::vector<std::size_t> neighbor_set(const OpinionState& state, std::size_t agent,
                                      ConfidenceThreshold eps) {
    check_agent(state, agent);
    const double xi = state.values[agent];
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < state.size(); ++j) {
        if (std::abs(state.values[j] - xi) <= eps.value()) {
            out.push_back(j);
        }
    }
    return out;
}

double local_average(const OpinionState& state, std::size_t agent, ConfidenceThreshold eps) {
    check_agent(state, agent);
    return detail::neighbor_average(state.values, agent, eps.value());
}

PreClampState pre_clamp_update(const OpinionState& state, std::span<const double> noise,
                               ConfidenceThreshold eps) {
    check_noise_length(state, noise);
    PreClampState out;
    out.values.resize(state.size());
    detail::neighbor_averages(state.values, eps.value(), out.values);
    for (std::size_t i = 0; i < state.size(); ++i) {
        out.values[i] += noise[i];
    }
    return out;
}

OpinionState step(const OpinionState& state, std::span<const double> noise,
                  ConfidenceThreshold eps, StepEvents* events) {
    PreClampState pre = pre_clamp_update(state, noise, eps);
    OpinionState next;
    next.values.resize(state.size());
    next.t = state.t + 1;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double v = pre.values[i];
        if (v > 1.0) {
            next.values[i] = 1.0;
            if (events != nullptr) events->clamped_high.push_back(i);
        } else if (v < 0.0) {
            next.values[i] = 0.0;
            if (events != nullptr) events->clamped_low.push_back(i);
        } else {
            next.values[i] = v;
        }
    }
    return next;
}

} // namespace hknoise
