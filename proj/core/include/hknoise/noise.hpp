#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hknoise/dynamics.hpp"
#include "hknoise/rng.hpp"

namespace hknoise {

enum class NoiseKind { Zero, Uniform, TruncatedGaussian, Discrete };

// Symmetric zero-mean noise with bounded support. Symmetry makes the mean
// zero by construction and the bounded support gives a finite second moment.
//
// Every model consumes exactly one stream counter per scalar draw (the
// truncated Gaussian samples by inverse CDF rather than rejection), which
// keeps draws addressable by (master_seed, replicate, step, agent); see
// rng.hpp for the derivation scheme.
class NoiseModel {
public:
    // Degenerate model: every draw is 0. Still consumes one counter per draw.
    static NoiseModel zero();

    // Uniform on [-delta, delta], delta > 0.
    static NoiseModel uniform(double delta);

    // N(0, sigma^2) hard-truncated to [-bound, bound] and renormalized; the
    // mean stays 0 by symmetry. sigma > 0, bound > 0.
    static NoiseModel truncated_gaussian(double sigma, double bound);

    // +delta with probability p_each, -delta with probability p_each, 0 with
    // the remaining weight. delta > 0, 0 < p_each <= 1/2.
    static NoiseModel discrete(double delta, double p_each = 0.5);

    NoiseKind kind() const { return kind_; }
    bool degenerate() const { return kind_ == NoiseKind::Zero; }

    // d with P(|xi| <= d) = 1.
    double support_bound() const;

    // E xi^2, analytic.
    double variance() const;

    // P(xi >= a) and P(xi > a), analytic. Lower tails follow by symmetry.
    double upper_tail_geq(double a) const;
    double upper_tail_gt(double a) const;

    double sample(RandomStream& stream) const;
    void sample_vector(std::span<double> out, RandomStream& stream) const;
    std::vector<double> sample_vector(std::size_t n, RandomStream& stream) const;

    // e.g. "uniform(delta=0.02)"
    std::string describe() const;

    // Parameter access, meaningful per kind.
    double delta() const { return param_a_; }   // Uniform, Discrete
    double sigma() const { return param_a_; }   // TruncatedGaussian
    double bound() const { return param_b_; }   // TruncatedGaussian
    double p_each() const { return param_b_; }  // Discrete

private:
    NoiseModel(NoiseKind kind, double a, double b) : kind_(kind), param_a_(a), param_b_(b) {}

    NoiseKind kind_ = NoiseKind::Zero;
    double param_a_ = 0.0;
    double param_b_ = 0.0;
};

// A value-or-refusal result; the refusal carries the reason and is an
// ordinary outcome, not an error.
template <class T>
struct Refusable {
    std::optional<T> value;
    std::string refusal;

    explicit operator bool() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    const T* operator->() const { return &*value; }

    static Refusable accepted(T v) { return Refusable{std::move(v), {}}; }
    static Refusable refused(std::string why) { return Refusable{std::nullopt, std::move(why)}; }
};

// Witness that the noise surely stays within the critical strength eps/2 and
// still pushes both ways: P(|xi| <= eps/2) = 1, P(xi >= a) >= p and
// P(xi <= -a) >= p with a, p in (0, 1).
struct SubcriticalCertificate {
    double a = 0.0;
    double p = 0.0;
};

// Witness of tail mass beyond the critical strength: P(xi > eps/2) >= q and
// P(xi < -eps/2) >= q with q in (0, 1].
struct SupercriticalCertificate {
    double q = 0.0;
};

// Both certificates are computed analytically from the model parameters.
// For the bounded models shipped here the two hypotheses are mutually
// exclusive; the degenerate Zero model is refused by both.
Refusable<SubcriticalCertificate> certify_subcritical(const NoiseModel& model,
                                                      ConfidenceThreshold eps);
Refusable<SupercriticalCertificate> certify_supercritical(const NoiseModel& model,
                                                          ConfidenceThreshold eps);

} // namespace hknoise
