#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace hknoise {

// Neumaier-compensated accumulator. Every opinion average in this library is
// produced by this accumulator with terms added in ascending agent-index
// order; that fixed scheme pins the result to the same double on any platform
// that rounds to nearest (no FMA contraction, no reassociation).
class NeumaierSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

    void reset() {
        sum_ = 0.0;
        comp_ = 0.0;
    }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Compensated arithmetic mean over the whole span, terms in index order.
inline double compensated_mean(std::span<const double> values) {
    NeumaierSum acc;
    for (double v : values) {
        acc.add(v);
    }
    return acc.value() / static_cast<double>(values.size());
}

} // namespace hknoise
