#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "ptsr/distribution.hpp"
#include "ptsr/link.hpp"

namespace ptsr {

/**
 * @brief Structure of a positive time series regression model.
 *
 * eta_t = g1(mu_t) = alpha + X_t' beta
 *       + sum_k ar_k [g2(Y_{t-k}) - I_X X_{t-k}' beta]
 *       + sum_j ma_j e_{t-j},      e_t = Y_t - mu_t.
 */
struct ModelSpec {
    std::size_t p = 0;  ///< AR order
    std::size_t q = 0;  ///< MA order
    std::size_t s = 0;  ///< number of covariates
    bool include_x_in_ar = false;
    Link g1{LinkKind::Log};
    Link g2{LinkKind::Log};
    ConditionalDistribution family{Family::Gamma};

    /// p + q + s + 2.
    [[nodiscard]] std::size_t parameter_count() const noexcept { return p + q + s + 2; }
    /// Parameters of the mean structure: p + q + s + 1.
    [[nodiscard]] std::size_t mean_parameter_count() const noexcept { return p + q + s + 1; }

    /// The covariate subtraction inside the AR sum is active.
    [[nodiscard]] bool x_in_ar_active() const noexcept { return include_x_in_ar && s > 0 && p > 0; }

    // Offsets into the flat parameter vector (alpha, beta', ar', ma', dispersion)'.
    [[nodiscard]] std::size_t beta_offset() const noexcept { return 1; }
    [[nodiscard]] std::size_t ar_offset() const noexcept { return 1 + s; }
    [[nodiscard]] std::size_t ma_offset() const noexcept { return 1 + s + p; }
    [[nodiscard]] std::size_t dispersion_index() const noexcept { return 1 + s + p + q; }

    /// Report labels: alpha, beta1.., ar1.., ma1.., dispersion.
    [[nodiscard]] std::vector<std::string> parameter_names() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Parameter point gamma = (alpha, beta', ar', ma', dispersion)'.
struct ParameterVector {
    double alpha = 0.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd ar;
    Eigen::VectorXd ma;
    double dispersion = 1.0;

    /// Zero coefficients and unit dispersion sized for `spec`.
    static ParameterVector zeros(const ModelSpec& spec);
    /// Inverse of flat(). Throws DimensionError on a size mismatch.
    static ParameterVector from_flat(const ModelSpec& spec, const Eigen::VectorXd& flat);

    [[nodiscard]] Eigen::VectorXd flat() const;
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(2 + beta.size() + ar.size() + ma.size());
    }

    /// Throws DimensionError / DomainError if inconsistent with `spec`.
    void check(const ModelSpec& spec) const;
};

}  // namespace ptsr
