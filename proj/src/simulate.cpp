#include "ptsr/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ptsr/errors.hpp"

namespace ptsr {

namespace {

constexpr std::uint64_t kCovariateStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

SimulationResult simulate(const SimulationRequest& req) {
    using Eigen::Index;
    const ModelSpec& spec = req.spec;
    const ParameterVector& g = req.gamma;
    g.check(spec);
    if (req.n < 1) {
        throw std::invalid_argument("simulate: n must be >= 1");
    }
    const auto total = static_cast<Index>(req.n + req.burn_in);
    const auto s = static_cast<Index>(spec.s);
    const auto p = static_cast<Index>(spec.p);
    const auto q = static_cast<Index>(spec.q);
    const bool x_in_ar = spec.x_in_ar_active();

    Eigen::MatrixXd x;
    if (req.x) {
        if (req.x->rows() != total || req.x->cols() != s) {
            throw DimensionError("simulate: covariates must be (burn_in + n) x s");
        }
        x = *req.x;
    } else {
        x.resize(total, s);
        Rng cov_rng(req.seed ^ kCovariateStream);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        // column-major fill: one stream per column in order
        for (Index j = 0; j < s; ++j)
            for (Index t = 0; t < total; ++t) x(t, j) = unif(cov_rng);
    }
    Eigen::VectorXd xb = s > 0 ? Eigen::VectorXd(x * g.beta) : Eigen::VectorXd::Zero(total);

    Rng rng(req.seed);
    Eigen::VectorXd y(total);
    Eigen::VectorXd mu(total);
    Eigen::VectorXd err(total);
    for (Index t = 0; t < total; ++t) {
        double eta = g.alpha + xb[t];
        if (t >= p) {
            for (Index k = 1; k <= p; ++k) {
                double term = spec.g2.eval(y[t - k]);
                if (x_in_ar) term -= xb[t - k];
                eta += g.ar[k - 1] * term;
            }
            for (Index j = 1; j <= q && j <= t; ++j) eta += g.ma[j - 1] * err[t - j];
        }
        try {
            mu[t] = spec.g1.inverse(eta);
        } catch (const RangeError&) {
            throw RangeError("simulate: conditional mean exploded at step " + std::to_string(t + 1),
                             static_cast<std::size_t>(t));
        }
        y[t] = spec.family.sample(mu[t], g.dispersion, rng);
        if (!(y[t] > 0.0 && std::isfinite(y[t]))) {
            throw RangeError("simulate: draw left (0, inf) at step " + std::to_string(t + 1),
                             static_cast<std::size_t>(t));
        }
        err[t] = y[t] - mu[t];
    }

    const auto n = static_cast<Index>(req.n);
    return {y.tail(n), x.bottomRows(n), mu.tail(n)};
}

}  // namespace ptsr
