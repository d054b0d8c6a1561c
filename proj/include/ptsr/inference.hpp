#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ptsr/estimator.hpp"

namespace ptsr {

struct Interval {
    double lower;
    double upper;
};

struct ZTest {
    double z;
    double p_value;  ///< two-sided
};

/// Linear hypothesis A gamma = b on the flat parameter vector.
struct LinearRestriction {
    Eigen::MatrixXd a;  ///< k x (p+q+s+2), full row rank, k < p+q+s+2
    Eigen::VectorXd b;
};

struct WaldTest {
    double statistic;
    std::size_t df;
    double p_value;
};

// All functions below throw SingularMatrixError when the fit has no
// covariance matrix and std::out_of_range / std::invalid_argument on bad
// indices or levels.

/// Wald interval estimate_i -/+ z_{(1+level)/2} * se_i, for 0.5 < level < 1.
Interval confidence_interval(const FitResult& fit, std::size_t index, double level);

/// (estimate_i - value) / se_i with its two-sided normal p-value.
ZTest z_statistic(const FitResult& fit, std::size_t index, double value);

/// W = (A g - b)' [A vcov A']^{-1} (A g - b), chi-square with k degrees of freedom.
WaldTest wald_test(const FitResult& fit, const LinearRestriction& restriction);

/**
 * Compiles "ar1=0,ma1=0" style text into (A, b).
 *
 * Equations are separated by commas or semicolons; each is `lhs = number`, where lhs is a sum of
 * optionally scaled names, e.g. "beta1 - beta2 = 0" or "2*ar1 + ma1 = 0.5".
 * Names are those of ModelSpec::parameter_names().
 */
LinearRestriction parse_restriction(std::string_view text, const std::vector<std::string>& names);

}  // namespace ptsr
