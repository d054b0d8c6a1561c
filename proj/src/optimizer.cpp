#include "ptsr/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptsr::optim {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

Eigen::MatrixXd inverse_curvature(const Curvature& curvature, const Eigen::VectorXd& x) {
    const auto n = x.size();
    if (curvature) {
        if (auto h = curvature(x)) {
            Eigen::LLT<Eigen::MatrixXd> llt(*h);
            if (llt.info() == Eigen::Success) {
                Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
                if (inv.allFinite()) return 0.5 * (inv + inv.transpose());
            }
        }
    }
    return Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

Result maximize(const Objective& objective, const Eigen::VectorXd& x0, const Curvature& curvature,
                const Options& options) {
    Result result;
    result.x = x0;
    auto start = objective(x0);
    if (!start) {
        throw std::invalid_argument("maximize: infeasible starting point");
    }
    result.at = *start;

    // Minimize F = -f internally.
    Eigen::MatrixXd h_inv = inverse_curvature(curvature, result.x);
    bool fresh = true;
    int stalls = 0;

    while (true) {
        if (result.at.stationarity <= options.tolerance) {
            result.converged = true;
            result.message = "gradient tolerance reached";
            break;
        }
        if (result.iterations >= options.max_iterations) {
            result.message = "iteration limit reached";
            break;
        }

        const Eigen::VectorXd g = -result.at.gradient;
        const double f = -result.at.value;
        Eigen::VectorXd d = -h_inv * g;
        double slope = g.dot(d);
        if (!(slope < 0.0) || !d.allFinite()) {
            h_inv = Eigen::MatrixXd::Identity(g.size(), g.size());
            d = -g;
            slope = g.dot(d);
            fresh = true;
        }

        double step = 1.0;
        std::optional<Evaluation> trial;
        Eigen::VectorXd x_new;
        bool accepted = false;
        const double flat = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
        for (int k = 0; k < kMaxBacktracks; ++k) {
            x_new = result.x + step * d;
            trial = objective(x_new);
            if (trial && std::isfinite(trial->value)) {
                const double f_new = -trial->value;
                // Near the optimum the objective is flat to rounding; progress
                // is then judged by the stationarity measure instead.
                accepted = f_new <= f + kArmijo * step * slope ||
                           (f_new <= f + flat && trial->stationarity < result.at.stationarity);
                if (accepted) break;
            }
            step *= 0.5;
        }

        if (!accepted) {
            if (!fresh) {
                h_inv = inverse_curvature(curvature, result.x);
                fresh = true;
                continue;
            }
            result.message = "line search failed";
            break;
        }

        ++result.iterations;
        const double previous = result.at.stationarity;
        const Eigen::VectorXd s = x_new - result.x;
        const Eigen::VectorXd yv = -trial->gradient - g;
        result.x = x_new;
        result.at = *trial;
        fresh = false;

        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            const Eigen::VectorXd hy = h_inv * yv;
            const double rho = 1.0 / sy;
            h_inv += (rho * rho * yv.dot(hy) + rho) * (s * s.transpose()) -
                     rho * (hy * s.transpose() + s * hy.transpose());
        }

        // Tiny steps are fine while they keep shrinking the gradient.
        if (s.lpNorm<Eigen::Infinity>() < options.step_tolerance &&
            result.at.stationarity > options.tolerance && !(result.at.stationarity < 0.5 * previous)) {
            if (++stalls > 1) {
                result.message = "step tolerance reached";
                break;
            }
            h_inv = inverse_curvature(curvature, result.x);
            fresh = true;
        } else {
            stalls = 0;
        }
    }
    return result;
}

}  // namespace ptsr::optim
