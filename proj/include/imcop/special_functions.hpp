#pragma once

#include "imcop/types.hpp"

namespace imcop {

// Regularized incomplete gamma functions, P(a,x) + Q(a,x) = 1.
double lower_gamma_regularized(double a, double x);
double upper_gamma_regularized(double a, double x);

// x such that P(a,x) = p.
double inverse_lower_gamma(double a, double p);

double normal_cdf(double x);
double normal_quantile(double p);

// CDF of the Gamma(shape, rate) distribution at x (shape need not be integer).
double gamma_cdf(double shape, double rate, double x);

// chi-square quantile, used by goodness-of-fit checks
double chi_square_quantile(int dof, double p);

// One-sample Kolmogorov-Smirnov / DKW threshold sqrt(log(2/alpha)/(2n)).
double ks_critical(double alpha, Index n);

// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace imcop
