#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>

#include "ptsr/estimator.hpp"
#include "ptsr/model.hpp"

namespace ptsr {

struct InformationCriteria {
    double aic;
    double sic;
    double hq;
};

/// AIC = -2l + 2k, SIC = -2l + k ln n, HQ = -2l + 2k ln ln n (n >= 3, k >= 1).
InformationCriteria information_criteria(double loglik, std::size_t k, double n);

struct ResidualSet {
    Eigen::VectorXd simple;    ///< y_t - mu_t
    Eigen::VectorXd quantile;  ///< Phi^{-1}(F(y_t | mu_t, dispersion))
    std::size_t clipped = 0;   ///< CDF values pushed into [1e-12, 1 - 1e-12]
};

/// Residuals of the filter evaluated at the fitted parameters.
ResidualSet residuals(const FitResult& fit, const ModelSpec& spec, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& x);

struct AcfResult {
    Eigen::VectorXd values;  ///< rho(1..max_lag)
    double band;             ///< 1.96 / sqrt(n - m)

    /// rho(h) for 0 <= h <= max_lag; rho(0) = 1.
    [[nodiscard]] double lag(std::size_t h) const {
        return h == 0 ? 1.0 : values[static_cast<Eigen::Index>(h - 1)];
    }
};

/**
 * Sample autocorrelations at lags 1..max_lag. `mean_parameters` is the m in
 * the +/-1.96/sqrt(n-m) band (p+q+s+1 for fitted residuals, 0 for raw data).
 * Throws DomainError for a constant series or max_lag >= n.
 */
AcfResult acf(const Eigen::VectorXd& r, std::size_t max_lag, std::size_t mean_parameters = 0);

struct LjungBoxResult {
    double statistic;
    std::size_t df;
    double p_value;
};

/// Q = n(n+2) sum_{i<=lags} rho(i)^2/(n-i), chi-square with lags - fitted_df degrees of freedom.
LjungBoxResult ljung_box(const Eigen::VectorXd& r, std::size_t lags, std::size_t fitted_df = 0);

/// Same statistic from autocorrelations rho(1..lags) of a series of length n.
LjungBoxResult ljung_box_from_acf(const Eigen::VectorXd& rho, std::size_t n, std::size_t fitted_df = 0);

struct KsResult {
    double statistic;
    double p_value;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_test(const Eigen::VectorXd& sample, const std::function<double(double)>& cdf);

/// ks_test against the standard normal.
KsResult ks_normality(const Eigen::VectorXd& sample);

}  // namespace ptsr
