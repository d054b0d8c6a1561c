#include "ptsr/inference.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "model_helpers.hpp"
#include "ptsr/errors.hpp"
#include "ptsr/simulate.hpp"
#include "ptsr/special.hpp"

using namespace ptsr;

namespace {

/// A fit with a hand-made covariance for arithmetic checks.
FitResult synthetic_fit(const Eigen::VectorXd& estimate, const Eigen::MatrixXd& vcov, std::size_t n = 100) {
    const ModelSpec spec = helpers::make_spec(0, 0, static_cast<std::size_t>(estimate.size() - 2));
    FitResult f;
    f.estimate = ParameterVector::from_flat(spec, estimate);
    f.vcov = vcov;
    f.information = vcov.inverse();
    f.std_errors = vcov.diagonal().cwiseSqrt();
    f.n = n;
    f.converged = true;
    return f;
}

FitResult real_fit() {
    const ModelSpec spec = helpers::make_spec(1, 1, 1);
    const auto d = simulate({spec, helpers::make_params(0.2, {0.5}, {0.4}, {0.1}, 10.0), 1500, 500, std::nullopt, 31});
    return fit(spec, d.y, d.x);
}

}  // namespace

TEST_CASE("confidence interval arithmetic") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(3, 3);
    v(1, 1) = 0.01;
    const FitResult f = synthetic_fit(helpers::vec({0.0, 0.5, 1.0}), v);
    const Interval ci = confidence_interval(f, 1, 0.95);
    CHECK(ci.lower == doctest::Approx(0.5 - 1.959963984540054 * 0.1).epsilon(1e-14));
    CHECK(ci.upper == doctest::Approx(0.5 + 1.959963984540054 * 0.1).epsilon(1e-14));
    CHECK(ci.lower == doctest::Approx(0.304).epsilon(1e-3));
    CHECK(ci.upper == doctest::Approx(0.696).epsilon(1e-3));

    const Interval wide = confidence_interval(f, 1, 0.99);
    CHECK(wide.lower < ci.lower);
    CHECK(wide.upper > ci.upper);

    CHECK_THROWS_AS(confidence_interval(f, 1, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(confidence_interval(f, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(confidence_interval(f, 3, 0.95), std::out_of_range);
}

TEST_CASE("z statistic arithmetic") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(3, 3);
    v(1, 1) = 0.01;
    const FitResult f = synthetic_fit(helpers::vec({0.0, 0.5, 1.0}), v);
    const ZTest same = z_statistic(f, 1, 0.5);
    CHECK(same.z == 0.0);
    CHECK(same.p_value == 1.0);
    const ZTest five = z_statistic(f, 1, 0.0);
    CHECK(five.z == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(five.p_value == doctest::Approx(5.733031437583878e-07).epsilon(1e-10));
}

TEST_CASE("missing covariance is reported") {
    FitResult f = synthetic_fit(helpers::vec({0.0, 0.5, 1.0}), Eigen::MatrixXd::Identity(3, 3));
    f.vcov.reset();
    CHECK_THROWS_AS(confidence_interval(f, 0, 0.95), SingularMatrixError);
    CHECK_THROWS_AS(z_statistic(f, 0, 0.0), SingularMatrixError);
    LinearRestriction r{Eigen::MatrixXd::Identity(1, 3), helpers::vec({0.0})};
    CHECK_THROWS_AS(wald_test(f, r), SingularMatrixError);
}

TEST_CASE("one-restriction Wald equals squared z") {
    const FitResult f = real_fit();
    REQUIRE(f.vcov.has_value());
    for (std::size_t i = 0; i < 5; ++i) {
        LinearRestriction r{Eigen::MatrixXd::Zero(1, 5), helpers::vec({0.1})};
        r.a(0, static_cast<Eigen::Index>(i)) = 1.0;
        const WaldTest w = wald_test(f, r);
        const ZTest z = z_statistic(f, i, 0.1);
        CHECK(w.df == 1);
        CHECK(std::abs(w.statistic - z.z * z.z) <= 1e-10 * std::max(1.0, w.statistic));
        CHECK(w.p_value == doctest::Approx(z.p_value).epsilon(1e-9));
    }
}

TEST_CASE("Wald statistic is zero at b = A estimate") {
    const FitResult f = real_fit();
    LinearRestriction r;
    r.a = Eigen::MatrixXd::Zero(2, 5);
    r.a(0, 2) = 1.0;
    r.a(1, 3) = 1.0;
    r.b = r.a * f.estimate.flat();
    const WaldTest w = wald_test(f, r);
    CHECK(w.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w.df == 2);
    CHECK(w.p_value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Wald statistic is invariant to row scaling and nonnegative") {
    const FitResult f = real_fit();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        LinearRestriction r;
        r.a.resize(2, 5);
        for (Eigen::Index i = 0; i < r.a.size(); ++i) r.a.data()[i] = normal(rng);
        r.b = helpers::vec({normal(rng), normal(rng)});
        const WaldTest w = wald_test(f, r);
        CHECK(w.statistic >= 0.0);
        LinearRestriction scaled = r;
        const double c = trial % 2 == 0 ? -3.5 : 0.02;
        scaled.a.row(1) *= c;
        scaled.b[1] *= c;
        CHECK(std::abs(wald_test(f, scaled).statistic - w.statistic) <= 1e-10 * std::max(1.0, w.statistic));
    }
}

TEST_CASE("CI and z-test duality") {
    const FitResult f = real_fit();
    for (double a : {0.01, 0.05, 0.1, 0.3}) {
        for (std::size_t i = 0; i < 5; ++i) {
            const Interval ci = confidence_interval(f, i, 1.0 - a);
            for (double delta : {-4.0, -2.0, -1.0, 0.0, 1.5, 3.0}) {
                const double value = f.estimate.flat()[static_cast<Eigen::Index>(i)] +
                                     delta * f.std_errors[static_cast<Eigen::Index>(i)];
                const bool excluded = value < ci.lower || value > ci.upper;
                CHECK(excluded == (z_statistic(f, i, value).p_value < a));
            }
        }
    }
}

TEST_CASE("restriction validation") {
    const FitResult f = real_fit();
    LinearRestriction dup;
    dup.a = Eigen::MatrixXd::Zero(2, 5);
    dup.a(0, 1) = 1.0;
    dup.a(1, 1) = 2.0;
    dup.b = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(wald_test(f, dup), SingularMatrixError);
    LinearRestriction too_many{Eigen::MatrixXd::Identity(5, 5), Eigen::VectorXd::Zero(5)};
    CHECK_THROWS_AS(wald_test(f, too_many), DimensionError);
    LinearRestriction wrong_width{Eigen::MatrixXd::Identity(1, 4), Eigen::VectorXd::Zero(1)};
    CHECK_THROWS_AS(wald_test(f, wrong_width), DimensionError);
}

TEST_CASE("restriction parsing") {
    const std::vector<std::string> names = helpers::make_spec(1, 1, 2).parameter_names();
    const LinearRestriction r = parse_restriction("ar1=0, ma1 = 0", names);
    REQUIRE(r.a.rows() == 2);
    CHECK(r.a(0, 3) == 1.0);
    CHECK(r.a(1, 4) == 1.0);
    CHECK(r.a.row(0).sum() == 1.0);
    CHECK(r.b.isZero());

    const LinearRestriction eq = parse_restriction("beta1 - beta2 = 0.5", names);
    CHECK(eq.a(0, 1) == 1.0);
    CHECK(eq.a(0, 2) == -1.0);
    CHECK(eq.b[0] == 0.5);

    const LinearRestriction scaled = parse_restriction("2*ar1 + -0.5*ma1 = -1", names);
    CHECK(scaled.a(0, 3) == 2.0);
    CHECK(scaled.a(0, 4) == -0.5);
    CHECK(scaled.b[0] == -1.0);

    CHECK_THROWS_AS(parse_restriction("ar2=0", names), std::invalid_argument);
    CHECK_THROWS_AS(parse_restriction("ar1", names), std::invalid_argument);
    CHECK_THROWS_AS(parse_restriction("ar1=x", names), std::invalid_argument);
    CHECK_THROWS_AS(parse_restriction("ar1=0,,ma1=0", names), std::invalid_argument);
    CHECK_THROWS_AS(parse_restriction("=1", names), std::invalid_argument);
}

TEST_CASE("normal and chi-square helpers") {
    CHECK(special::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(std::abs(special::normal_cdf(special::normal_quantile(1e-10)) - 1e-10) < 1e-22);
    CHECK(special::normal_cdf(0.0) == 0.5);
    CHECK(special::chi_square_upper_tail(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(special::chi_square_upper_tail(5.991464547107979, 2.0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(special::chi_square_upper_tail(0.0, 3.0) == 1.0);
}
