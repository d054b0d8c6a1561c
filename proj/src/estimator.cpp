#include "ptsr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptsr/errors.hpp"
#include "ptsr/filter.hpp"
#include "ptsr/optimizer.hpp"

namespace ptsr {

namespace {

using Eigen::Index;

constexpr double kMinStartDispersion = 0.01;
constexpr double kMaxStartDispersion = 1e8;

Eigen::VectorXd to_working(const ModelSpec& spec, const ParameterVector& g) {
    Eigen::VectorXd w = g.flat();
    w[static_cast<Index>(spec.dispersion_index())] = std::log(g.dispersion);
    return w;
}

ParameterVector from_working(const ModelSpec& spec, const Eigen::VectorXd& w) {
    Eigen::VectorXd flat = w;
    const auto d = static_cast<Index>(spec.dispersion_index());
    flat[d] = std::exp(w[d]);
    return ParameterVector::from_flat(spec, flat);
}

}  // namespace

void FitOptions::check() const {
    if (max_iterations <= 0 || !(gradient_tolerance > 0.0) || !(step_tolerance > 0.0)) {
        throw std::invalid_argument("FitOptions: iteration limit and tolerances must be > 0");
    }
}

ParameterVector starting_values(const ModelSpec& spec, const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Index n = y.size();
    if (static_cast<std::size_t>(n) <= spec.parameter_count()) {
        throw std::invalid_argument("starting_values: need more than " + std::to_string(spec.parameter_count()) +
                                    " observations");
    }
    const auto s = static_cast<Index>(spec.s);
    if (x.cols() != s || (s > 0 && x.rows() != n)) {
        throw DimensionError("starting_values: covariate matrix does not match the model");
    }

    Eigen::MatrixXd design(n, s + 1);
    design.col(0).setOnes();
    if (s > 0) design.rightCols(s) = x;
    Eigen::VectorXd target(n);
    for (Index t = 0; t < n; ++t) target[t] = spec.g1.eval(y[t]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw SingularMatrixError("starting_values: regression design is rank deficient");
    }
    const Eigen::VectorXd coef = qr.solve(target);

    ParameterVector g = ParameterVector::zeros(spec);
    g.alpha = coef[0];
    g.beta = coef.tail(s);

    const Eigen::VectorXd fitted = design * coef;
    const double fallback = y.mean();
    double ratio = 0.0;
    for (Index t = 0; t < n; ++t) {
        double mu = fallback;
        try {
            mu = spec.g1.inverse(fitted[t]);
        } catch (const RangeError&) {
        }
        const double r = y[t] - mu;
        ratio += r * r / (spec.family.variance(mu, 1.0));
    }
    ratio /= static_cast<double>(n);
    double phi = ratio > 0.0 ? 1.0 / ratio : kMaxStartDispersion;
    g.dispersion = std::clamp(phi, kMinStartDispersion, kMaxStartDispersion);
    return g;
}

FitResult fit(const ModelSpec& spec, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
              const FitOptions& options) {
    options.check();
    const ParameterVector start = options.start ? *options.start : starting_values(spec, y, x);
    start.check(spec);
    const auto d = static_cast<Index>(spec.dispersion_index());

    const optim::Objective objective = [&](const Eigen::VectorXd& w) -> std::optional<optim::Evaluation> {
        if (!w.allFinite()) return std::nullopt;
        const ParameterVector g = from_working(spec, w);
        if (!(g.dispersion > 0.0) || !std::isfinite(g.dispersion)) return std::nullopt;
        try {
            LikelihoodEvaluation e = evaluate(spec, g, y, x);
            if (!std::isfinite(e.loglik) || !e.score.allFinite()) return std::nullopt;
            optim::Evaluation out;
            out.value = e.loglik;
            out.stationarity = e.score.lpNorm<Eigen::Infinity>();
            out.gradient = std::move(e.score);
            out.gradient[d] *= g.dispersion;
            return out;
        } catch (const RangeError&) {
            return std::nullopt;
        }
    };

    const optim::Curvature curvature = [&](const Eigen::VectorXd& w) -> std::optional<Eigen::MatrixXd> {
        const ParameterVector g = from_working(spec, w);
        try {
            Eigen::MatrixXd k = conditional_information(spec, g, y, x);
            k.row(d) *= g.dispersion;
            k.col(d) *= g.dispersion;
            if (!k.allFinite()) return std::nullopt;
            return k;
        } catch (const RangeError&) {
            return std::nullopt;
        }
    };

    const Eigen::VectorXd w0 = to_working(spec, start);
    if (!objective(w0)) {
        throw RangeError("fit: the starting point is infeasible");
    }

    const optim::Result opt = optim::maximize(
        objective, w0, curvature,
        {.max_iterations = options.max_iterations,
         .tolerance = options.gradient_tolerance,
         .step_tolerance = options.step_tolerance});

    FitResult result;
    result.estimate = from_working(spec, opt.x);
    result.loglik = opt.at.value;
    result.converged = opt.converged;
    result.iterations = opt.iterations;
    result.n = static_cast<std::size_t>(y.size());
    result.score_norm = opt.at.stationarity;
    result.message = opt.message;
    result.information = conditional_information(spec, result.estimate, y, x);

    const Index k = result.information.rows();
    result.std_errors = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(result.information, Eigen::EigenvaluesOnly);
    if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(result.information);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd v = llt.solve(Eigen::MatrixXd::Identity(k, k));
            v = 0.5 * (v + v.transpose()).eval();
            result.std_errors = v.diagonal().cwiseMax(0.0).cwiseSqrt();
            result.vcov = std::move(v);
        }
    }
    return result;
}

}  // namespace ptsr
