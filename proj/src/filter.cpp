#include "ptsr/filter.hpp"

#include <cmath>
#include <string>

#include "ptsr/errors.hpp"

namespace ptsr {

namespace {

using Eigen::Index;

void check_inputs(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                  const Eigen::MatrixXd& x) {
    gamma.check(spec);
    if (y.size() < 1) {
        throw DimensionError("run_filter: the series must contain at least one observation");
    }
    if (static_cast<std::size_t>(x.cols()) != spec.s) {
        throw DimensionError("run_filter: covariate matrix has " + std::to_string(x.cols()) +
                             " columns, model expects " + std::to_string(spec.s));
    }
    if (spec.s > 0 && x.rows() != y.size()) {
        throw DimensionError("run_filter: covariate matrix has " + std::to_string(x.rows()) +
                             " rows for " + std::to_string(y.size()) + " observations");
    }
}

}  // namespace

FilterOutput run_filter(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                        const Eigen::MatrixXd& x, const FilterOptions& options) {
    check_inputs(spec, gamma, y, x);

    const Index n = y.size();
    const auto s = static_cast<Index>(spec.s);
    const auto p = static_cast<Index>(spec.p);
    const auto q = static_cast<Index>(spec.q);
    const Index m = 1 + s + p + q;
    const bool x_in_ar = spec.x_in_ar_active();

    // g2(y_t) and, for the alternative derivative form, g1(y_t).
    Eigen::VectorXd g2y(n);
    for (Index t = 0; t < n; ++t) {
        try {
            g2y[t] = spec.g2.eval(y[t]);
        } catch (const DomainError&) {
            throw DomainError("run_filter: observation " + std::to_string(t + 1) + " is not positive");
        }
    }
    const bool use_g1_lags = options.derivatives && options.ar_lag_transform == ArLagTransform::G1;
    Eigen::VectorXd g1y;
    if (use_g1_lags) {
        g1y.resize(n);
        for (Index t = 0; t < n; ++t) g1y[t] = spec.g1.eval(y[t]);
    }

    // Pre-sample replacements.
    double g2_pre = 0.0;
    double g1_pre = 0.0;
    Eigen::RowVectorXd x_pre = Eigen::RowVectorXd::Zero(s);
    if (p > 0) {
        const Index k = std::min(p, n);
        const double y_pre = y.head(k).mean();
        g2_pre = spec.g2.eval(y_pre);
        g1_pre = spec.g1.eval(y_pre);
        if (x_in_ar) x_pre = x.topRows(k).colwise().mean();
    }
    const double xb_pre = x_in_ar ? x_pre.dot(gamma.beta) : 0.0;
    Eigen::VectorXd xb(n);
    if (s > 0) {
        xb.noalias() = x * gamma.beta;
    } else {
        xb.setZero();
    }

    FilterOutput out;
    out.eta.resize(n);
    out.mu.resize(n);
    out.error.resize(n);
    out.dmu_deta.resize(n);
    if (options.derivatives) out.d_rho.setZero(n, m);

    Eigen::RowVectorXd row(m);
    for (Index t = 0; t < n; ++t) {
        double eta = gamma.alpha + xb[t];
        for (Index k = 1; k <= p; ++k) {
            const Index lag = t - k;
            const double g2_lag = lag >= 0 ? g2y[lag] : g2_pre;
            const double xb_lag = x_in_ar ? (lag >= 0 ? xb[lag] : xb_pre) : 0.0;
            eta += gamma.ar[k - 1] * (g2_lag - xb_lag);
        }
        for (Index j = 1; j <= q && j <= t; ++j) {
            eta += gamma.ma[j - 1] * out.error[t - j];
        }

        double mu = 0.0;
        try {
            mu = spec.g1.inverse(eta);
        } catch (const RangeError&) {
            throw RangeError("run_filter: conditional mean left (0, inf) at t = " + std::to_string(t + 1),
                             static_cast<std::size_t>(t));
        }
        out.eta[t] = eta;
        out.mu[t] = mu;
        out.error[t] = y[t] - mu;
        out.dmu_deta[t] = 1.0 / spec.g1.deriv(mu);

        if (!options.derivatives) continue;

        row.setZero();
        row[0] = 1.0;
        for (Index i = 0; i < s; ++i) {
            double v = x(t, i);
            if (x_in_ar) {
                for (Index k = 1; k <= p; ++k) {
                    const Index lag = t - k;
                    v -= gamma.ar[k - 1] * (lag >= 0 ? x(lag, i) : x_pre[i]);
                }
            }
            row[1 + i] = v;
        }
        for (Index k = 1; k <= p; ++k) {
            const Index lag = t - k;
            double v = 0.0;
            if (use_g1_lags) {
                v = lag >= 0 ? g1y[lag] : g1_pre;
            } else {
                v = lag >= 0 ? g2y[lag] : g2_pre;
            }
            if (x_in_ar) v -= lag >= 0 ? xb[lag] : xb_pre;
            row[1 + s + k - 1] = v;
        }
        for (Index k = 1; k <= q; ++k) {
            const Index lag = t - k;
            row[1 + s + p + k - 1] = lag >= 0 ? out.error[lag] : 0.0;
        }
        for (Index j = 1; j <= q && j <= t; ++j) {
            const double weight = options.weight_ma_feedback ? gamma.ma[j - 1] : 1.0;
            row -= (weight * out.dmu_deta[t - j]) * out.d_rho.row(t - j);
        }
        out.d_rho.row(t) = row;
    }
    return out;
}

double log_likelihood(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& x) {
    const FilterOutput f = run_filter(spec, gamma, y, x, FilterOptions{.derivatives = false});
    double total = 0.0;
    for (Index t = 0; t < y.size(); ++t) {
        total += spec.family.log_density(y[t], f.mu[t], gamma.dispersion);
    }
    return total;
}

LikelihoodEvaluation evaluate(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                              const Eigen::MatrixXd& x, const FilterOptions& options) {
    FilterOptions opts = options;
    opts.derivatives = true;
    const FilterOutput f = run_filter(spec, gamma, y, x, opts);
    const Index n = y.size();
    const double phi = gamma.dispersion;

    Eigen::VectorXd weighted(n);  // T h1
    double loglik = 0.0;
    double u_phi = 0.0;
    for (Index t = 0; t < n; ++t) {
        loglik += spec.family.log_density(y[t], f.mu[t], phi);
        weighted[t] = f.dmu_deta[t] * spec.family.dl_dmu(y[t], f.mu[t], phi);
        u_phi += spec.family.dl_dphi(y[t], f.mu[t], phi);
    }

    LikelihoodEvaluation out;
    out.loglik = loglik;
    out.score.resize(static_cast<Index>(spec.parameter_count()));
    out.score.head(f.d_rho.cols()).noalias() = f.d_rho.transpose() * weighted;
    out.score[out.score.size() - 1] = u_phi;
    return out;
}

Eigen::VectorXd score(const ModelSpec& spec, const ParameterVector& gamma, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& x, const FilterOptions& options) {
    return evaluate(spec, gamma, y, x, options).score;
}

Eigen::MatrixXd conditional_information(const ModelSpec& spec, const ParameterVector& gamma,
                                        const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const FilterOutput f = run_filter(spec, gamma, y, x);
    const Index n = y.size();
    const Index m = f.d_rho.cols();
    const double phi = gamma.dispersion;

    Eigen::VectorXd w_mu(n);     // T1 E_mu T1
    Eigen::VectorXd w_mphi(n);   // T1 E_muphi
    double k_phiphi = 0.0;
    for (Index t = 0; t < n; ++t) {
        const FisherBlocks e = spec.family.fisher_blocks(f.mu[t], phi);
        w_mu[t] = f.dmu_deta[t] * f.dmu_deta[t] * e.mu;
        w_mphi[t] = f.dmu_deta[t] * e.mu_phi;
        k_phiphi += e.phi_phi;
    }

    Eigen::MatrixXd k(m + 1, m + 1);
    k.topLeftCorner(m, m).noalias() = f.d_rho.transpose() * w_mu.asDiagonal() * f.d_rho;
    k.topRightCorner(m, 1).noalias() = f.d_rho.transpose() * w_mphi;
    k.bottomLeftCorner(1, m) = k.topRightCorner(m, 1).transpose();
    k(m, m) = k_phiphi;
    // exact symmetry regardless of summation order
    k = 0.5 * (k + k.transpose()).eval();
    return k;
}

}  // namespace ptsr
