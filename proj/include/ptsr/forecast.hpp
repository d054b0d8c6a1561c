#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "ptsr/estimator.hpp"
#include "ptsr/model.hpp"

namespace ptsr {

struct ForecastResult {
    Eigen::VectorXd fitted;     ///< in-sample mu_1..mu_n
    Eigen::VectorXd predicted;  ///< mu_n(1..horizon)
    std::size_t horizon = 0;
};

/**
 * In-sample fitted means and plug-in mean forecasts.
 *
 * Beyond the sample the recursion uses the forecast mean in place of the
 * unobserved response (inside g2), zero future errors and the supplied
 * future covariates. This is a plug-in forecast, not E[g2(Y)].
 *
 * `x_future` must have at least `horizon` rows and s columns when s > 0;
 * throws std::invalid_argument otherwise and RangeError if a mean leaves (0, inf).
 */
ForecastResult forecast(const FitResult& fit, const ModelSpec& spec, const Eigen::VectorXd& y,
                        const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_future, std::size_t horizon);

}  // namespace ptsr
