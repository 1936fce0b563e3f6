#pragma once

namespace truncmeta {

/// Natural log of the gamma function, x > 0.
double log_gamma(double x);

double erf(double x);
double erfc(double x);

double std_normal_pdf(double x);

/// Standard normal CDF, absolute error below 1e-14. Throws on non-finite input.
double std_normal_cdf(double x);

/// Inverse standard normal CDF on (0,1): rational approximation (AS241)
/// refined by one Newton step on the CDF.
double std_normal_quantile(double p);

/// Regularized lower incomplete gamma P(a,x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double regularized_gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a,b) for x in [0,1], a,b > 0.
double regularized_beta(double x, double a, double b);

/// Chi-square CDF with df degrees of freedom. df >= 1, x >= 0.
double chi_square_cdf(double x, int df);
/// Upper tail P(X > x) of the chi-square distribution.
double chi_square_survival(double x, int df);
/// Inverse chi-square CDF for p in [0,1).
double chi_square_quantile(double p, int df);

/// Two-sided p-value of a t statistic, df > 0. Returns values in (0,1].
double student_t_two_sided_p(double t, double df);

}  // namespace truncmeta
