#include "ptsr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ptsr/errors.hpp"
#include "ptsr/filter.hpp"
#include "ptsr/special.hpp"

namespace ptsr {

namespace {

constexpr double kCdfClip = 1e-12;

}  // namespace

InformationCriteria information_criteria(double loglik, std::size_t k, double n) {
    if (!(n >= 3.0) || k < 1) {
        throw std::invalid_argument("information_criteria: need n >= 3 and k >= 1");
    }
    const double kk = static_cast<double>(k);
    const double log_n = std::log(n);
    return {-2.0 * loglik + 2.0 * kk, -2.0 * loglik + kk * log_n, -2.0 * loglik + 2.0 * kk * std::log(log_n)};
}

ResidualSet residuals(const FitResult& fit, const ModelSpec& spec, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& x) {
    const FilterOutput f = run_filter(spec, fit.estimate, y, x, FilterOptions{.derivatives = false});
    ResidualSet out;
    out.simple = f.error;
    out.quantile.resize(y.size());
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        double u = spec.family.cdf(y[t], f.mu[t], fit.estimate.dispersion);
        if (u < kCdfClip || u > 1.0 - kCdfClip) {
            u = std::clamp(u, kCdfClip, 1.0 - kCdfClip);
            ++out.clipped;
        }
        out.quantile[t] = special::normal_quantile(u);
    }
    return out;
}

AcfResult acf(const Eigen::VectorXd& r, std::size_t max_lag, std::size_t mean_parameters) {
    const Eigen::Index n = r.size();
    if (max_lag < 1 || static_cast<Eigen::Index>(max_lag) >= n) {
        throw DomainError("acf: need 1 <= max_lag < n");
    }
    if (static_cast<Eigen::Index>(mean_parameters) >= n) {
        throw DomainError("acf: more mean parameters than observations");
    }
    const Eigen::VectorXd c = r.array() - r.mean();
    const double denom = c.squaredNorm();
    if (!(denom > 0.0)) {
        throw DomainError("acf: series has zero variance");
    }
    AcfResult out;
    out.values.resize(static_cast<Eigen::Index>(max_lag));
    for (Eigen::Index h = 1; h <= static_cast<Eigen::Index>(max_lag); ++h) {
        out.values[h - 1] = c.tail(n - h).dot(c.head(n - h)) / denom;
    }
    out.band = 1.96 / std::sqrt(static_cast<double>(n - static_cast<Eigen::Index>(mean_parameters)));
    return out;
}

LjungBoxResult ljung_box_from_acf(const Eigen::VectorXd& rho, std::size_t n, std::size_t fitted_df) {
    const auto lags = static_cast<std::size_t>(rho.size());
    if (lags < 1 || lags >= n) {
        throw DomainError("ljung_box: need 1 <= lags < n");
    }
    if (fitted_df >= lags) {
        throw std::invalid_argument("ljung_box: fitted_df must be smaller than the number of lags");
    }
    const double nn = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 1; i <= lags; ++i) {
        const double r = rho[static_cast<Eigen::Index>(i - 1)];
        sum += r * r / (nn - static_cast<double>(i));
    }
    const double q = nn * (nn + 2.0) * sum;
    const std::size_t df = lags - fitted_df;
    return {q, df, special::chi_square_upper_tail(q, static_cast<double>(df))};
}

LjungBoxResult ljung_box(const Eigen::VectorXd& r, std::size_t lags, std::size_t fitted_df) {
    if (fitted_df >= lags) {
        throw std::invalid_argument("ljung_box: fitted_df must be smaller than the number of lags");
    }
    return ljung_box_from_acf(acf(r, lags).values, static_cast<std::size_t>(r.size()), fitted_df);
}

KsResult ks_test(const Eigen::VectorXd& sample, const std::function<double(double)>& cdf) {
    const Eigen::Index n = sample.size();
    if (n < 1) {
        throw std::invalid_argument("ks_test: empty sample");
    }
    std::vector<double> sorted(sample.data(), sample.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double nn = static_cast<double>(n);
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double f = cdf(sorted[static_cast<std::size_t>(i)]);
        d = std::max({d, static_cast<double>(i + 1) / nn - f, f - static_cast<double>(i) / nn});
    }
    // Stephens' finite-sample correction of the limiting distribution.
    const double root = std::sqrt(nn);
    const double lambda = (root + 0.12 + 0.11 / root) * d;
    return {d, special::kolmogorov_upper_tail(lambda)};
}

KsResult ks_normality(const Eigen::VectorXd& sample) {
    return ks_test(sample, special::normal_cdf);
}

}  // namespace ptsr
