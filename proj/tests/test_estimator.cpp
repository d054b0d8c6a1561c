#include "ptsr/estimator.hpp"

#include <cmath>

#include "doctest.h"
#include "model_helpers.hpp"
#include "oracles.hpp"
#include "ptsr/errors.hpp"
#include "ptsr/filter.hpp"
#include "ptsr/simulate.hpp"

using namespace ptsr;
using helpers::make_params;
using helpers::make_spec;

namespace {

SimulationResult sim(const ModelSpec& spec, const ParameterVector& g, std::size_t n, std::uint64_t seed) {
    return simulate({spec, g, n, 500, std::nullopt, seed});
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("starting values for an intercept-only model") {
    const ModelSpec spec = make_spec(0, 0, 0);
    const auto d = sim(spec, make_params(0.8, {}, {}, {}, 3.0), 400, 1);
    const ParameterVector g = starting_values(spec, d.y, d.x);
    CHECK(g.alpha == doctest::Approx(d.y.array().log().mean()).epsilon(1e-13));
    CHECK(g.beta.size() == 0);
    CHECK(g.dispersion >= 0.01);
}

TEST_CASE("starting values for a constant series") {
    const ModelSpec spec = make_spec(1, 1, 0);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(50, 2.5);
    const ParameterVector g = starting_values(spec, y, Eigen::MatrixXd(50, 0));
    CHECK(g.alpha == doctest::Approx(std::log(2.5)).epsilon(1e-14));
    CHECK(g.ar[0] == 0.0);
    CHECK(g.ma[0] == 0.0);
    CHECK(std::isfinite(g.dispersion));
}

TEST_CASE("starting value errors") {
    const ModelSpec spec = make_spec(0, 0, 2);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(30, 2);
    x.col(1) = 2.0 * x.col(0);
    CHECK_THROWS_AS(starting_values(spec, Eigen::VectorXd::Ones(30), x), SingularMatrixError);
    CHECK_THROWS_AS(starting_values(spec, Eigen::VectorXd::Ones(4), Eigen::MatrixXd::Random(4, 2)),
                    std::invalid_argument);
}

TEST_CASE("static gamma fit matches a golden-section search") {
    const ModelSpec spec = make_spec(0, 0, 0);
    const auto d = sim(spec, make_params(1.1, {}, {}, {}, 2.0), 1000, 2);
    const FitResult r = fit(spec, d.y, d.x);
    REQUIRE(r.converged);
    const double best = golden_section_max(
        [&](double a) {
            ParameterVector g = r.estimate;
            g.alpha = a;
            return oracle::reference_loglik(spec, g, d.y, d.x);
        },
        0.0, 2.0);
    CHECK(std::abs(r.estimate.alpha - best) < 1e-6);
    CHECK(r.estimate.alpha == doctest::Approx(std::log(d.y.mean())).epsilon(1e-10));
}

TEST_CASE("fit of a simulated gamma ARMA model") {
    const ModelSpec spec = make_spec(1, 1, 1);
    const ParameterVector truth = make_params(0.2, {0.5}, {0.4}, {0.1}, 10.0);
    const auto d = sim(spec, truth, 2000, 3);
    const ParameterVector start = starting_values(spec, d.y, d.x);
    const FitResult r = fit(spec, d.y, d.x);
    REQUIRE(r.converged);
    CHECK(r.n == 2000);
    CHECK(log_likelihood(spec, start, d.y, d.x) < r.loglik);
    CHECK(r.loglik == doctest::Approx(log_likelihood(spec, r.estimate, d.y, d.x)).epsilon(1e-14));
    CHECK(score(spec, r.estimate, d.y, d.x).lpNorm<Eigen::Infinity>() <= 1e-8);
    REQUIRE(r.vcov.has_value());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.information);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    for (Eigen::Index i = 0; i < r.std_errors.size(); ++i) {
        CHECK(r.std_errors[i] == doctest::Approx(std::sqrt((*r.vcov)(i, i))).epsilon(1e-15));
        CHECK(std::abs(r.estimate.flat()[i] - truth.flat()[i]) < 4.0 * r.std_errors[i]);
    }

    SUBCASE("refit from the estimate is a fixed point") {
        FitOptions opts;
        opts.start = r.estimate;
        const FitResult again = fit(spec, d.y, d.x, opts);
        CHECK(again.converged);
        CHECK(again.iterations <= 2);
        CHECK(std::abs(again.loglik - r.loglik) < 1e-10);
    }
}

TEST_CASE("fits converge across families and links") {
    struct Case {
        ModelSpec spec;
        ParameterVector truth;
    };
    const Case all[] = {
        {make_spec(1, 1, 1, true, Family::InverseGaussian), make_params(0.3, {0.4}, {0.5}, {0.05}, 20.0)},
        {make_spec(2, 0, 0, false, Family::Gamma, LinkKind::Identity, LinkKind::Identity),
         make_params(1.0, {}, {0.3, 0.2}, {}, 5.0)},
        {make_spec(1, 1, 0, false, Family::Gamma, LinkKind::Sqrt, LinkKind::Sqrt),
         make_params(0.8, {}, {0.3}, {0.05}, 8.0)},
        {make_spec(0, 2, 2, false, Family::InverseGaussian, LinkKind::Log, LinkKind::Identity),
         make_params(0.5, {0.3, -0.4}, {}, {0.1, 0.05}, 15.0)},
        {make_spec(1, 0, 1, false, Family::Gamma, LinkKind::Log, LinkKind::Identity),
         make_params(0.3, {0.5}, {0.1}, {}, 4.0)},
    };
    std::uint64_t seed = 40;
    for (const auto& c : all) {
        const auto d = sim(c.spec, c.truth, 1500, ++seed);
        const ParameterVector start = starting_values(c.spec, d.y, d.x);
        const FitResult r = fit(c.spec, d.y, d.x);
        INFO("case seed ", seed, " message ", r.message);
        CHECK(r.converged);
        CHECK(r.score_norm <= 1e-8);
        CHECK(r.loglik >= log_likelihood(c.spec, start, d.y, d.x) - 1e-12);
        REQUIRE(r.vcov.has_value());
        for (Eigen::Index i = 0; i < r.std_errors.size(); ++i) {
            CHECK(std::abs(r.estimate.flat()[i] - c.truth.flat()[i]) < 5.0 * r.std_errors[i]);
        }
    }
}

TEST_CASE("permuting covariate columns permutes beta") {
    const ModelSpec spec = make_spec(1, 0, 2, true);
    const auto d = sim(spec, make_params(0.1, {0.6, -0.3}, {0.3}, {}, 6.0), 800, 9);
    Eigen::MatrixXd swapped(d.x.rows(), 2);
    swapped.col(0) = d.x.col(1);
    swapped.col(1) = d.x.col(0);
    const FitResult a = fit(spec, d.y, d.x);
    const FitResult b = fit(spec, d.y, swapped);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(std::abs(a.loglik - b.loglik) < 1e-10);
    CHECK(a.estimate.beta[0] == doctest::Approx(b.estimate.beta[1]).epsilon(1e-7));
    CHECK(a.estimate.beta[1] == doctest::Approx(b.estimate.beta[0]).epsilon(1e-7));
}

TEST_CASE("iteration limit reports non-convergence") {
    const ModelSpec spec = make_spec(1, 1, 0);
    const auto d = sim(spec, make_params(0.3, {}, {0.4}, {0.1}, 5.0), 500, 5);
    FitOptions opts;
    opts.max_iterations = 1;
    const FitResult r = fit(spec, d.y, d.x, opts);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.score_norm > opts.gradient_tolerance);
}

TEST_CASE("fit errors") {
    const ModelSpec spec = make_spec(0, 0, 1, false, Family::Gamma, LinkKind::Identity, LinkKind::Identity);
    const auto d = sim(make_spec(0, 0, 1), make_params(0.3, {0.5}, {}, {}, 5.0), 200, 6);
    FitOptions opts;
    opts.start = make_params(-5.0, {0.0}, {}, {}, 1.0);
    CHECK_THROWS_AS(fit(spec, d.y, d.x, opts), RangeError);
    FitOptions bad;
    bad.gradient_tolerance = 0.0;
    CHECK_THROWS_AS(fit(spec, d.y, d.x, bad), std::invalid_argument);
}
