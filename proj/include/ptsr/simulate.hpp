#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "ptsr/model.hpp"

namespace ptsr {

struct SimulationRequest {
    ModelSpec spec;
    ParameterVector gamma;
    std::size_t n = 0;
    std::size_t burn_in = 500;
    /// (burn_in + n) x s covariates; when absent, i.i.d. U(0,1) columns are drawn.
    std::optional<Eigen::MatrixXd> x;
    std::uint64_t seed = 0;
};

struct SimulationResult {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;   ///< n x s, the covariates aligned with y
    Eigen::VectorXd mu;  ///< true conditional means
};

/**
 * Draws a series from the model. The first p steps run the static model
 * (ar = ma = 0) so the recursion starts from simulated lags; the first
 * burn_in steps are then discarded. Deterministic given the seed.
 *
 * Throws RangeError with the offending index (counted from the start of the
 * burn-in) if the mean recursion explodes.
 */
SimulationResult simulate(const SimulationRequest& request);

}  // namespace ptsr
