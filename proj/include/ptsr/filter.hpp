#pragma once

#include <Eigen/Dense>

#include "ptsr/model.hpp"

namespace ptsr {

/// Per-time output of the mean recursion and its parameter derivatives.
struct FilterOutput {
    Eigen::VectorXd eta;    ///< linear predictor g1(mu_t)
    Eigen::VectorXd mu;     ///< conditional means, all > 0
    Eigen::VectorXd error;  ///< e_t = y_t - mu_t
    Eigen::VectorXd dmu_deta;  ///< 1 / g1'(mu_t)
    /// n x (p+q+s+1); column j holds d eta_t / d rho_j with rho = (alpha, beta', ar', ma')'.
    Eigen::MatrixXd d_rho;
};

/// Transform of the lagged response used in the AR-coefficient derivative.
enum class ArLagTransform { G2, G1 };

/**
 * @brief Variants of the derivative recursions.
 *
 * The defaults are the chain-rule derivatives of the mean recursion. The
 * alternatives drop the ma_j weight on the lagged-derivative feedback of
 * the MA columns, or evaluate the AR columns with g1 instead of g2; they
 * exist so tests can show that those forms disagree with finite differences.
 */
struct FilterOptions {
    bool derivatives = true;
    bool weight_ma_feedback = true;
    ArLagTransform ar_lag_transform = ArLagTransform::G2;
};

/**
 * Runs the mean recursion for t = 1..n.
 *
 * Pre-sample conventions: lagged responses before t = 1 are replaced by the
 * mean of the first p observations, lagged covariates by the column means of
 * the first p rows (only when the AR covariate correction is active), lagged
 * errors and derivatives by 0.
 *
 * Throws RangeError (with the 0-based index) when a mean leaves (0, inf),
 * DimensionError on shape mismatches, DomainError on non-positive y.
 */
FilterOutput run_filter(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                        const Eigen::MatrixXd& x, const FilterOptions& options = {});

/// Partial log-likelihood sum_t log f(y_t | mu_t, dispersion).
double log_likelihood(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& x);

/// Analytic score in flat parameter order.
Eigen::VectorXd score(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& x, const FilterOptions& options = {});

struct LikelihoodEvaluation {
    double loglik;
    Eigen::VectorXd score;
};

/// Log-likelihood and score from a single filter pass.
LikelihoodEvaluation evaluate(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                              const Eigen::MatrixXd& x, const FilterOptions& options = {});

/// Conditional information matrix K_n(gamma); symmetric, flat parameter order.
Eigen::MatrixXd conditional_information(const ModelSpec& spec, const ParameterVector& gamma,
                                        const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

}  // namespace ptsr
