#pragma once

// Scalar special functions shared by the distribution, inference and
// diagnostics modules.

namespace ptsr::special {

/// Standard normal CDF, accurate in both tails.
double normal_cdf(double z);

/// Standard normal quantile for u in (0, 1). Throws DomainError otherwise.
double normal_quantile(double u);

/// Scaled complementary error function exp(x^2) erfc(x), for x >= 0.
double erfcx(double x);

/// Upper tail P(X > x) of a chi-square variable with `df` degrees of freedom.
double chi_square_upper_tail(double x, double df);

/// Asymptotic Kolmogorov distribution tail P(K > lambda).
double kolmogorov_upper_tail(double lambda);

}  // namespace ptsr::special
