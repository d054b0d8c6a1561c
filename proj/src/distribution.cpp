#include "ptsr/distribution.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ptsr/errors.hpp"
#include "ptsr/special.hpp"

namespace ptsr {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string("ConditionalDistribution: ") + name + " must be finite and > 0");
    }
}

void check_args(double y, double mu, double phi) {
    check_positive(y, "y");
    check_positive(mu, "mu");
    check_positive(phi, "phi");
}

double ig_cdf(double y, double mu, double lambda) {
    const double root = std::sqrt(lambda / y);
    const double lower = special::normal_cdf(root * (y / mu - 1.0));
    // exp(2 lambda / mu) Phi(-a) rewritten through erfcx so that it cannot overflow.
    const double a = root * (y / mu + 1.0);
    const double d = y - mu;
    const double upper = 0.5 * std::exp(-lambda * d * d / (2.0 * mu * mu * y)) *
                         special::erfcx(a / std::numbers::sqrt2);
    return std::clamp(lower + upper, 0.0, 1.0);
}

double ig_quantile(double u, double mu, double lambda, const ConditionalDistribution& dist) {
    // Bracket in y, then safeguarded Newton on cdf(y) - u.
    double lo = mu;
    double hi = mu;
    while (ig_cdf(lo, mu, lambda) > u) {
        lo *= 0.5;
        if (lo < 1e-300) return lo;
    }
    while (ig_cdf(hi, mu, lambda) < u) {
        hi *= 2.0;
        if (!std::isfinite(hi) || hi > 1e300) return hi;
    }
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = ig_cdf(y, mu, lambda) - u;
        if (f == 0.0) return y;
        if (f < 0.0) lo = y; else hi = y;
        const double dens = std::exp(dist.log_density(y, mu, lambda));
        double next = dens > 0.0 ? y - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - y) <= 1e-15 * y || (hi - lo) <= 1e-15 * hi) return next;
        y = next;
    }
    return y;
}

}  // namespace

std::string_view ConditionalDistribution::name() const noexcept {
    return family_ == Family::Gamma ? "gamma" : "inverse_gaussian";
}

double ConditionalDistribution::log_density(double y, double mu, double phi) const {
    check_args(y, mu, phi);
    if (family_ == Family::Gamma) {
        return phi * std::log(phi / mu) - std::lgamma(phi) + (phi - 1.0) * std::log(y) - phi * y / mu;
    }
    const double d = y - mu;
    return 0.5 * std::log(phi) - kHalfLog2Pi - 1.5 * std::log(y) - phi * d * d / (2.0 * mu * mu * y);
}

double ConditionalDistribution::dl_dmu(double y, double mu, double phi) const {
    check_args(y, mu, phi);
    if (family_ == Family::Gamma) {
        return phi * (y - mu) / (mu * mu);
    }
    return phi * (y - mu) / (mu * mu * mu);
}

double ConditionalDistribution::dl_dphi(double y, double mu, double phi) const {
    check_args(y, mu, phi);
    if (family_ == Family::Gamma) {
        return std::log(phi / mu) + 1.0 - boost::math::digamma(phi) + std::log(y) - y / mu;
    }
    const double d = y - mu;
    return 0.5 / phi - d * d / (2.0 * mu * mu * y);
}

FisherBlocks ConditionalDistribution::fisher_blocks(double mu, double phi) const {
    check_positive(mu, "mu");
    check_positive(phi, "phi");
    if (family_ == Family::Gamma) {
        return {phi / (mu * mu), 0.0, boost::math::trigamma(phi) - 1.0 / phi};
    }
    return {phi / (mu * mu * mu), 0.0, 0.5 / (phi * phi)};
}

double ConditionalDistribution::cdf(double y, double mu, double phi) const {
    check_args(y, mu, phi);
    if (family_ == Family::Gamma) {
        return boost::math::gamma_p(phi, phi * y / mu);
    }
    return ig_cdf(y, mu, phi);
}

double ConditionalDistribution::quantile(double u, double mu, double phi) const {
    check_positive(mu, "mu");
    check_positive(phi, "phi");
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("ConditionalDistribution::quantile: probability must lie in (0, 1)");
    }
    if (family_ == Family::Gamma) {
        return boost::math::gamma_p_inv(phi, u) * mu / phi;
    }
    return ig_quantile(u, mu, phi, *this);
}

double ConditionalDistribution::variance(double mu, double phi) const {
    check_positive(mu, "mu");
    check_positive(phi, "phi");
    return family_ == Family::Gamma ? mu * mu / phi : mu * mu * mu / phi;
}

double ConditionalDistribution::sample(double mu, double phi, Rng& rng) const {
    check_positive(mu, "mu");
    check_positive(phi, "phi");
    if (family_ == Family::Gamma) {
        std::gamma_distribution<double> gamma(phi, mu / phi);
        double y = gamma(rng);
        // shape < 1 can underflow to exactly 0
        return y > 0.0 ? y : std::numeric_limits<double>::min();
    }
    // Michael, Schucany and Haas transformation with a cancellation-free root.
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double z = normal(rng);
    const double a = mu * z * z / (2.0 * phi);
    const double x = mu / (1.0 + a + std::sqrt(a * a + 2.0 * a));
    const double u = uniform(rng);
    return u <= mu / (mu + x) ? x : mu * mu / x;
}

ConditionalDistribution parse_distribution(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "gamma") return ConditionalDistribution(Family::Gamma);
    if (lower == "inverse_gaussian") return ConditionalDistribution(Family::InverseGaussian);
    throw std::invalid_argument("unknown distribution '" + std::string(name) +
                                "' (expected gamma or inverse_gaussian)");
}

}  // namespace ptsr
