#include "ptsr/special.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "ptsr/errors.hpp"

namespace ptsr::special {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("normal_quantile: probability must lie in (0, 1)");
    }
    // erfc_inv keeps full relative precision in the lower tail.
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

double erfcx(double x) {
    if (x < 0.0) {
        throw DomainError("erfcx: argument must be >= 0");
    }
    if (x < 20.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    // Asymptotic series; the truncation error at x = 20 is below 1e-16.
    const double inv2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= -(2.0 * k - 1.0) * inv2;
        sum += term;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

double chi_square_upper_tail(double x, double df) {
    if (!(df > 0.0)) {
        throw DomainError("chi_square_upper_tail: degrees of freedom must be > 0");
    }
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double kolmogorov_upper_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    const double p = 2.0 * sum;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

}  // namespace ptsr::special
