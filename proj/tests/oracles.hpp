#pragma once

// Test-only reference computations. Apart from negative_hessian, which
// differences the (separately checked) analytic score, nothing here uses the
// library's derivative recursions or information matrix.

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>

#include "ptsr/filter.hpp"
#include "ptsr/model.hpp"

namespace oracle {

/// Integral of f over (0, inf), split at `mid`.
inline double integrate_positive(const std::function<double(double)>& f, double mid) {
    boost::math::quadrature::tanh_sinh<double> head;
    boost::math::quadrature::exp_sinh<double> tail;
    return head.integrate(f, 0.0, mid) + tail.integrate([&](double y) { return f(y); }, mid,
                                                        std::numeric_limits<double>::infinity());
}

/// Five-point central difference of a scalar function.
inline double five_point(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

/// Five-point second difference.
inline double five_point_second(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

/// Straight-line evaluation of the conditional means with explicit pre-sample values.
inline Eigen::VectorXd reference_means(const ptsr::ModelSpec& spec, const ptsr::ParameterVector& g,
                                       const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const int n = static_cast<int>(y.size());
    const int p = static_cast<int>(spec.p);
    const int q = static_cast<int>(spec.q);
    const int s = static_cast<int>(spec.s);
    const bool ix = spec.include_x_in_ar && p > 0 && s > 0;

    double ybar = 0.0;
    Eigen::RowVectorXd xbar = Eigen::RowVectorXd::Zero(s);
    if (p > 0) {
        for (int i = 0; i < p && i < n; ++i) ybar += y[i];
        ybar /= std::min(p, n);
        if (ix)
            for (int i = 0; i < p && i < n; ++i) xbar += x.row(i) / std::min(p, n);
    }
    Eigen::VectorXd mu(n), e(n);
    for (int t = 0; t < n; ++t) {
        double eta = g.alpha;
        for (int i = 0; i < s; ++i) eta += x(t, i) * g.beta[i];
        for (int k = 1; k <= p; ++k) {
            const double yl = t - k >= 0 ? y[t - k] : ybar;
            double xl = 0.0;
            if (ix)
                for (int i = 0; i < s; ++i) xl += (t - k >= 0 ? x(t - k, i) : xbar[i]) * g.beta[i];
            eta += g.ar[k - 1] * (spec.g2.eval(yl) - xl);
        }
        for (int j = 1; j <= q; ++j) eta += g.ma[j - 1] * (t - j >= 0 ? e[t - j] : 0.0);
        mu[t] = spec.g1.inverse(eta);
        e[t] = y[t] - mu[t];
    }
    return mu;
}

/// Log-likelihood from reference_means and the family log-density.
inline double reference_loglik(const ptsr::ModelSpec& spec, const ptsr::ParameterVector& g,
                               const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Eigen::VectorXd mu = reference_means(spec, g, y, x);
    double total = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t) total += spec.family.log_density(y[t], mu[t], g.dispersion);
    return total;
}

/// Five-point finite-difference gradient of the reference log-likelihood.
inline Eigen::VectorXd fd_gradient(const ptsr::ModelSpec& spec, const ptsr::ParameterVector& g,
                                   const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Eigen::VectorXd base = g.flat();
    Eigen::VectorXd grad(base.size());
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        const double h = 1e-4 * std::max(1.0, std::abs(base[i]));
        grad[i] = five_point(
            [&](double v) {
                Eigen::VectorXd z = base;
                z[i] = v;
                return reference_loglik(spec, ptsr::ParameterVector::from_flat(spec, z), y, x);
            },
            base[i], h);
    }
    return grad;
}

/// Central-difference negative Hessian built from an analytic gradient.
inline Eigen::MatrixXd negative_hessian(const ptsr::ModelSpec& spec, const ptsr::ParameterVector& g,
                                        const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Eigen::VectorXd base = g.flat();
    const Eigen::Index k = base.size();
    Eigen::MatrixXd hess(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(base[i]));
        Eigen::VectorXd up = base, down = base;
        up[i] += h;
        down[i] -= h;
        const Eigen::VectorXd su = ptsr::score(spec, ptsr::ParameterVector::from_flat(spec, up), y, x);
        const Eigen::VectorXd sd = ptsr::score(spec, ptsr::ParameterVector::from_flat(spec, down), y, x);
        hess.col(i) = -(su - sd) / (2 * h);
    }
    return 0.5 * (hess + hess.transpose());
}

/// Max over components of |a - b| / max(|b|, 1).
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1.0));
    }
    return worst;
}

}  // namespace oracle
