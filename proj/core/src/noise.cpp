#include "hknoise/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hknoise {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

// Inverse standard normal CDF: Acklam's rational approximation followed by
// one Halley refinement against erfc, good to ~1 ulp over (0, 1).
double std_normal_quantile(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double e = std_normal_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

} // namespace

NoiseModel NoiseModel::zero() { return NoiseModel(NoiseKind::Zero, 0.0, 0.0); }

NoiseModel NoiseModel::uniform(double delta) {
    require(std::isfinite(delta) && delta > 0.0, "uniform noise requires delta > 0");
    return NoiseModel(NoiseKind::Uniform, delta, 0.0);
}

NoiseModel NoiseModel::truncated_gaussian(double sigma, double bound) {
    require(std::isfinite(sigma) && sigma > 0.0, "truncated gaussian requires sigma > 0");
    require(std::isfinite(bound) && bound > 0.0, "truncated gaussian requires bound > 0");
    return NoiseModel(NoiseKind::TruncatedGaussian, sigma, bound);
}

NoiseModel NoiseModel::discrete(double delta, double p_each) {
    require(std::isfinite(delta) && delta > 0.0, "discrete noise requires delta > 0");
    require(std::isfinite(p_each) && p_each > 0.0 && p_each <= 0.5,
            "discrete noise requires p_each in (0, 1/2]");
    return NoiseModel(NoiseKind::Discrete, delta, p_each);
}

double NoiseModel::support_bound() const {
    switch (kind_) {
        case NoiseKind::Zero: return 0.0;
        case NoiseKind::Uniform: return param_a_;
        case NoiseKind::TruncatedGaussian: return param_b_;
        case NoiseKind::Discrete: return param_a_;
    }
    return 0.0;
}

double NoiseModel::variance() const {
    switch (kind_) {
        case NoiseKind::Zero:
            return 0.0;
        case NoiseKind::Uniform:
            return param_a_ * param_a_ / 3.0;
        case NoiseKind::TruncatedGaussian: {
            const double beta = param_b_ / param_a_;
            const double z = 2.0 * std_normal_cdf(beta) - 1.0;
            return param_a_ * param_a_ * (1.0 - 2.0 * beta * std_normal_pdf(beta) / z);
        }
        case NoiseKind::Discrete:
            return 2.0 * param_b_ * param_a_ * param_a_;
    }
    return 0.0;
}

double NoiseModel::upper_tail_geq(double a) const {
    switch (kind_) {
        case NoiseKind::Zero:
            return a <= 0.0 ? 1.0 : 0.0;
        case NoiseKind::Uniform: {
            if (a <= -param_a_) return 1.0;
            if (a >= param_a_) return 0.0;
            return (param_a_ - a) / (2.0 * param_a_);
        }
        case NoiseKind::TruncatedGaussian: {
            if (a <= -param_b_) return 1.0;
            if (a >= param_b_) return 0.0;
            const double beta = param_b_ / param_a_;
            const double z = 2.0 * std_normal_cdf(beta) - 1.0;
            return (std_normal_cdf(beta) - std_normal_cdf(a / param_a_)) / z;
        }
        case NoiseKind::Discrete: {
            if (a <= -param_a_) return 1.0;
            if (a <= 0.0) return 1.0 - param_b_;
            if (a <= param_a_) return param_b_;
            return 0.0;
        }
    }
    return 0.0;
}

double NoiseModel::upper_tail_gt(double a) const {
    switch (kind_) {
        case NoiseKind::Zero:
            return a < 0.0 ? 1.0 : 0.0;
        case NoiseKind::Uniform:
        case NoiseKind::TruncatedGaussian:
            // Continuous: atoms carry no mass, only the endpoints matter.
            if (a < -support_bound()) return 1.0;
            if (a >= support_bound()) return 0.0;
            return upper_tail_geq(a);
        case NoiseKind::Discrete: {
            if (a < -param_a_) return 1.0;
            if (a < 0.0) return 1.0 - param_b_;
            if (a < param_a_) return param_b_;
            return 0.0;
        }
    }
    return 0.0;
}

double NoiseModel::sample(RandomStream& stream) const {
    switch (kind_) {
        case NoiseKind::Zero:
            stream.skip(1);
            return 0.0;
        case NoiseKind::Uniform: {
            const double u = stream.next_unit();
            return param_a_ * (2.0 * u - 1.0);
        }
        case NoiseKind::TruncatedGaussian: {
            const double u = stream.next_unit();
            const double beta = param_b_ / param_a_;
            const double lo = std_normal_cdf(-beta);
            const double hi = std_normal_cdf(beta);
            const double p = lo + u * (hi - lo);
            double v = param_a_ * std_normal_quantile(p);
            if (v > param_b_) v = param_b_;
            if (v < -param_b_) v = -param_b_;
            return v;
        }
        case NoiseKind::Discrete: {
            const double u = stream.next_unit();
            if (u < param_b_) return param_a_;
            if (u < 2.0 * param_b_) return -param_a_;
            return 0.0;
        }
    }
    return 0.0;
}

void NoiseModel::sample_vector(std::span<double> out, RandomStream& stream) const {
    for (double& v : out) {
        v = sample(stream);
    }
}

std::vector<double> NoiseModel::sample_vector(std::size_t n, RandomStream& stream) const {
    std::vector<double> out(n);
    sample_vector(std::span<double>(out), stream);
    return out;
}

std::string NoiseModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case NoiseKind::Zero:
            os << "zero";
            break;
        case NoiseKind::Uniform:
            os << "uniform(delta=" << param_a_ << ")";
            break;
        case NoiseKind::TruncatedGaussian:
            os << "truncated_gaussian(sigma=" << param_a_ << ", bound=" << param_b_ << ")";
            break;
        case NoiseKind::Discrete:
            os << "discrete(delta=" << param_a_ << ", p_each=" << param_b_ << ")";
            break;
    }
    return os.str();
}

Refusable<SubcriticalCertificate> certify_subcritical(const NoiseModel& model,
                                                      ConfidenceThreshold eps) {
    using Outcome = Refusable<SubcriticalCertificate>;
    if (model.degenerate()) {
        return Outcome::refused("degenerate noise: no a > 0 carries positive mass");
    }
    const double half = eps.value() / 2.0;
    const double bound = model.support_bound();
    if (bound > half) {
        std::ostringstream os;
        os << "support bound " << bound << " exceeds eps/2 = " << half;
        return Outcome::refused(os.str());
    }
    SubcriticalCertificate cert;
    cert.a = bound / 2.0;
    cert.p = model.upper_tail_geq(cert.a);
    return Outcome::accepted(cert);
}

Refusable<SupercriticalCertificate> certify_supercritical(const NoiseModel& model,
                                                          ConfidenceThreshold eps) {
    using Outcome = Refusable<SupercriticalCertificate>;
    const double half = eps.value() / 2.0;
    const double q = model.upper_tail_gt(half);
    if (!(q > 0.0)) {
        std::ostringstream os;
        os << "no tail mass beyond eps/2 = " << half << " (support bound "
           << model.support_bound() << ")";
        return Outcome::refused(os.str());
    }
    return Outcome::accepted(SupercriticalCertificate{q});
}

} // namespace hknoise
