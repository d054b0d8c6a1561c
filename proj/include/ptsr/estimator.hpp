#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>

#include "ptsr/model.hpp"

namespace ptsr {

struct FitOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;  ///< on the sup-norm of the score
    double step_tolerance = 1e-10;
    std::optional<ParameterVector> start;

    /// Throws std::invalid_argument unless all tolerances and limits are positive.
    void check() const;
};

struct FitResult {
    ParameterVector estimate;
    double loglik = 0.0;
    Eigen::MatrixXd information;          ///< K_n at the estimate
    std::optional<Eigen::MatrixXd> vcov;  ///< K_n^{-1}; empty when K_n is not positive definite
    Eigen::VectorXd std_errors;           ///< sqrt(diag(vcov)); NaN when vcov is unavailable
    bool converged = false;
    int iterations = 0;
    std::size_t n = 0;
    double score_norm = 0.0;  ///< sup-norm of the score at the estimate
    std::string message;
};

/**
 * Least-squares start: alpha and beta from regressing g1(y_t) on (1, x_t),
 * ar = ma = 0, dispersion from the moment estimate Var(y) = V(mu)/phi on the
 * regression residuals, floored at 0.01.
 *
 * Throws std::invalid_argument when n <= p+q+s+2 and SingularMatrixError
 * when the regression design is rank deficient.
 */
ParameterVector starting_values(const ModelSpec& spec, const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

/**
 * Partial maximum likelihood fit.
 *
 * BFGS ascent with the analytic score, dispersion optimized on the log scale.
 * The returned estimate, information matrix and covariance are in the
 * original parameterization. Non-convergence is reported through
 * `converged`, not by throwing; an infeasible start throws RangeError.
 */
FitResult fit(const ModelSpec& spec, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
              const FitOptions& options = {});

}  // namespace ptsr
