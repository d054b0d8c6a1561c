#include "ptsr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "model_helpers.hpp"
#include "ptsr/diagnostics.hpp"
#include "ptsr/errors.hpp"
#include "ptsr/estimator.hpp"

using namespace ptsr;

namespace {

SimulationRequest request(const ModelSpec& spec, const ParameterVector& g, std::size_t n, std::uint64_t seed) {
    SimulationRequest req;
    req.spec = spec;
    req.gamma = g;
    req.n = n;
    req.seed = seed;
    return req;
}

double sample_sd(const Eigen::VectorXd& v) {
    const double m = v.mean();
    return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("i.i.d. gamma mean") {
    const SimulationResult r =
        simulate(request(helpers::make_spec(0, 0, 0), helpers::make_params(1.0, {}, {}, {}, 2.0), 1000000, 11));
    const double se = sample_sd(r.y) / 1000.0;
    CHECK(std::abs(r.y.mean() - std::exp(1.0)) < 3.0 * se);
    CHECK((r.mu.array() == std::exp(1.0)).all());
}

TEST_CASE("same seed gives identical output") {
    const ModelSpec spec = helpers::make_spec(2, 1, 2, true, Family::InverseGaussian);
    const ParameterVector g = helpers::make_params(0.1, {0.3, -0.2}, {0.3, 0.2}, {0.1}, 30.0);
    const SimulationResult a = simulate(request(spec, g, 500, 99));
    const SimulationResult b = simulate(request(spec, g, 500, 99));
    const SimulationResult c = simulate(request(spec, g, 500, 100));
    CHECK(std::memcmp(a.y.data(), b.y.data(), sizeof(double) * 500) == 0);
    CHECK(std::memcmp(a.x.data(), b.x.data(), sizeof(double) * 1000) == 0);
    CHECK(a.y != c.y);
    CHECK(a.x.rows() == 500);
    CHECK(a.x.cols() == 2);
    CHECK(a.x.minCoeff() >= 0.0);
    CHECK(a.x.maxCoeff() < 1.0);
}

TEST_CASE("supplied covariates are used and trimmed") {
    const ModelSpec spec = helpers::make_spec(1, 0, 1);
    const ParameterVector g = helpers::make_params(0.0, {1.0}, {0.2}, {}, 10.0);
    SimulationRequest req = request(spec, g, 50, 3);
    req.burn_in = 10;
    req.x = Eigen::MatrixXd(Eigen::VectorXd::LinSpaced(60, 0.0, 5.9));
    const SimulationResult r = simulate(req);
    CHECK(r.x == req.x->bottomRows(50));
    req.x = Eigen::MatrixXd::Zero(59, 1);
    CHECK_THROWS_AS(simulate(req), DimensionError);
}

TEST_CASE("errors are a martingale difference sequence") {
    for (Family fam : {Family::Gamma, Family::InverseGaussian}) {
        const ModelSpec spec = helpers::make_spec(1, 1, 1, false, fam);
        // small inverse Gaussian shapes let the error feedback explode over long runs
        const double disp = fam == Family::Gamma ? 10.0 : 30.0;
        const ParameterVector g = helpers::make_params(0.2, {0.5}, {0.4}, {0.1}, disp);
        const std::size_t n = 100000;
        const SimulationResult r = simulate(request(spec, g, n, 21));
        const Eigen::VectorXd e = r.y - r.mu;
        CHECK(std::abs(e.mean()) < 3.0 * sample_sd(e) / std::sqrt(double(n)));
        const AcfResult a = acf(e, 5);
        for (Eigen::Index h = 0; h < 5; ++h) CHECK(std::abs(a.values[h]) < 3.0 / std::sqrt(double(n)));
    }
}

TEST_CASE("conditional calibration") {
    for (Family fam : {Family::Gamma, Family::InverseGaussian}) {
        const ModelSpec spec = helpers::make_spec(2, 1, 1, true, fam, LinkKind::Log, LinkKind::Log);
        const double disp = fam == Family::Gamma ? 6.0 : 30.0;
        const ParameterVector g = helpers::make_params(0.3, {0.4}, {0.3, 0.2}, {0.05}, disp);
        const std::size_t n = 100000;
        const SimulationResult r = simulate(request(spec, g, n, 31));
        Eigen::VectorXd u(static_cast<Eigen::Index>(n));
        for (Eigen::Index t = 0; t < u.size(); ++t) u[t] = spec.family.cdf(r.y[t], r.mu[t], g.dispersion);
        CHECK(ks_test(u, [](double v) { return std::clamp(v, 0.0, 1.0); }).p_value > 0.01);
    }
}

TEST_CASE("explosive recursion reports the index") {
    const ModelSpec spec = helpers::make_spec(0, 0, 0, false, Family::Gamma, LinkKind::Identity);
    SimulationRequest req = request(spec, helpers::make_params(-1.0, {}, {}, {}, 1.0), 10, 1);
    try {
        simulate(req);
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(e.index() == 0);
    }
    req.n = 0;
    CHECK_THROWS_AS(simulate(req), std::invalid_argument);
}

TEST_CASE("fits on simulated data recover the truth") {
    const ModelSpec spec = helpers::make_spec(1, 1, 1);
    const ParameterVector truth = helpers::make_params(0.2, {0.5}, {0.4}, {0.1}, 10.0);
    const Eigen::VectorXd g0 = truth.flat();
    const int replicates = 200;
    int all_within = 0;
    int converged = 0;
    for (int rep = 0; rep < replicates; ++rep) {
        const SimulationResult d = simulate(request(spec, truth, 4000, 7000 + static_cast<std::uint64_t>(rep)));
        const FitResult f = fit(spec, d.y, d.x);
        converged += f.converged;
        const Eigen::VectorXd diff = (f.estimate.flat() - g0).cwiseAbs();
        all_within += (diff.array() < 4.0 * f.std_errors.array()).all();
    }
    MESSAGE("within 4 SE: " << all_within << "/" << replicates);
    CHECK(converged == replicates);
    CHECK(all_within >= 95 * replicates / 100);
}
