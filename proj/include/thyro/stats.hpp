#pragma once

namespace thyro {

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction;
/// absolute error below 1e-10 over the parameter ranges used here.
double reg_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with nu degrees of freedom.
double student_t_cdf(double t, double nu);

/// CDF of Binomial(n, p) at k (inclusive), through the incomplete beta.
double binomial_cdf(int k, int n, double p);

}  // namespace thyro
