#include "ptsr/forecast.hpp"

#include <stdexcept>
#include <string>

#include "ptsr/errors.hpp"
#include "ptsr/filter.hpp"

namespace ptsr {

ForecastResult forecast(const FitResult& fit, const ModelSpec& spec, const Eigen::VectorXd& y,
                        const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_future, std::size_t horizon) {
    using Eigen::Index;
    const ParameterVector& g = fit.estimate;
    const auto s = static_cast<Index>(spec.s);
    const auto p = static_cast<Index>(spec.p);
    const auto q = static_cast<Index>(spec.q);
    const auto h = static_cast<Index>(horizon);
    if (s > 0 && (x_future.rows() < h || x_future.cols() != s)) {
        throw std::invalid_argument("forecast: future covariates must provide " + std::to_string(horizon) +
                                    " rows of " + std::to_string(spec.s) + " columns");
    }

    const FilterOutput f = run_filter(spec, g, y, x, FilterOptions{.derivatives = false});
    const Index n = y.size();
    const bool x_in_ar = spec.x_in_ar_active();

    ForecastResult out;
    out.fitted = f.mu;
    out.horizon = horizon;
    out.predicted.resize(h);

    double y_pre = 0.0;
    Eigen::RowVectorXd x_pre = Eigen::RowVectorXd::Zero(s);
    if (p > 0) {
        const Index k = std::min(p, n);
        y_pre = y.head(k).mean();
        if (x_in_ar) x_pre = x.topRows(k).colwise().mean();
    }
    // Response and covariate rows on the extended time axis (0-based; >= n is the future).
    auto response = [&](Index t) -> double {
        if (t < 0) return y_pre;
        return t < n ? y[t] : out.predicted[t - n];
    };
    auto covariates = [&](Index t) -> Eigen::RowVectorXd {
        if (t < 0) return x_pre;
        return t < n ? Eigen::RowVectorXd(x.row(t)) : Eigen::RowVectorXd(x_future.row(t - n));
    };

    for (Index t = n; t < n + h; ++t) {
        double eta = g.alpha;
        if (s > 0) eta += covariates(t).dot(g.beta);
        for (Index k = 1; k <= p; ++k) {
            double term = spec.g2.eval(response(t - k));
            if (x_in_ar) term -= covariates(t - k).dot(g.beta);
            eta += g.ar[k - 1] * term;
        }
        for (Index j = 1; j <= q; ++j) {
            const Index lag = t - j;
            if (lag >= 0 && lag < n) eta += g.ma[j - 1] * f.error[lag];
        }
        try {
            out.predicted[t - n] = spec.g1.inverse(eta);
        } catch (const RangeError&) {
            throw RangeError("forecast: predicted mean left (0, inf) at step " + std::to_string(t - n + 1),
                             static_cast<std::size_t>(t));
        }
    }
    return out;
}

}  // namespace ptsr
