#pragma once

#include <random>
#include <string_view>

namespace ptsr {

/// Pseudo-random engine used throughout (simulation, covariate generation).
using Rng = std::mt19937_64;

enum class Family { Gamma, InverseGaussian };

/// Conditional expectations of the negative second derivatives of the
/// log-density in (mu, phi).
struct FisherBlocks {
    double mu;       ///< -E[d2l/dmu2]
    double mu_phi;   ///< -E[d2l/dmu dphi]
    double phi_phi;  ///< -E[d2l/dphi2]
};

/**
 * @brief Distribution family on (0, inf) parameterized by its mean and a
 * constant dispersion (precision) parameter phi.
 *
 * Gamma: shape phi, scale mu/phi, so E = mu and Var = mu^2/phi.
 * Inverse Gaussian: mean mu, shape phi, so E = mu and Var = mu^3/phi.
 *
 * Every member throws DomainError on non-positive or non-finite arguments.
 */
class ConditionalDistribution {
public:
    constexpr ConditionalDistribution() = default;
    constexpr explicit ConditionalDistribution(Family family) : family_(family) {}

    [[nodiscard]] constexpr Family family() const noexcept { return family_; }
    /// Config name: "gamma" or "inverse_gaussian".
    [[nodiscard]] std::string_view name() const noexcept;

    [[nodiscard]] double log_density(double y, double mu, double phi) const;
    [[nodiscard]] double dl_dmu(double y, double mu, double phi) const;
    [[nodiscard]] double dl_dphi(double y, double mu, double phi) const;
    [[nodiscard]] FisherBlocks fisher_blocks(double mu, double phi) const;

    [[nodiscard]] double cdf(double y, double mu, double phi) const;
    /// Inverse of cdf for u in (0, 1).
    [[nodiscard]] double quantile(double u, double mu, double phi) const;

    /// Conditional variance as a function of the mean.
    [[nodiscard]] double variance(double mu, double phi) const;

    /// One draw; advances `rng` only.
    [[nodiscard]] double sample(double mu, double phi, Rng& rng) const;

    friend constexpr bool operator==(ConditionalDistribution, ConditionalDistribution) = default;

private:
    Family family_ = Family::Gamma;
};

/// Lookup of "gamma" / "inverse_gaussian" (case-insensitive). Throws std::invalid_argument.
ConditionalDistribution parse_distribution(std::string_view name);

}  // namespace ptsr
