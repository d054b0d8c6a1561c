#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

namespace ptsr::optim {

/// Value of the objective being maximized at one point.
struct Evaluation {
    double value;
    Eigen::VectorXd gradient;
    /// Convergence measure supplied by the caller (e.g. a sup-norm of the
    /// gradient in some other parameterization). Converged when <= tolerance.
    double stationarity;
};

/// Returns std::nullopt for an infeasible point (treated as value -inf).
using Objective = std::function<std::optional<Evaluation>(const Eigen::VectorXd&)>;

/// Positive definite curvature estimate of -f at a point, used to seed and
/// reset the inverse-Hessian approximation. std::nullopt falls back to identity.
using Curvature = std::function<std::optional<Eigen::MatrixXd>(const Eigen::VectorXd&)>;

struct Options {
    int max_iterations = 500;
    double tolerance = 1e-8;
    double step_tolerance = 1e-10;
};

struct Result {
    Eigen::VectorXd x;
    Evaluation at;
    bool converged = false;
    int iterations = 0;
    std::string message;
};

/**
 * BFGS ascent with a backtracking line search.
 *
 * Infeasible trial points shrink the step. When the objective is flat to
 * rounding, a step is still accepted if it reduces the directional
 * derivative, so the gradient can be driven below tolerances that are
 * invisible in the objective value itself.
 *
 * Throws std::invalid_argument if the starting point is infeasible.
 */
Result maximize(const Objective& objective, const Eigen::VectorXd& x0, const Curvature& curvature,
                const Options& options);

}  // namespace ptsr::optim
