#pragma once

#include <vector>

#include "khl/transfer.hpp"

namespace khl {

// A monomial-basis polynomial tied to the transfer function it approximates.
// pb_norm is the coefficient norm sum_j beta_j^2 2^j; sup_error is the
// measured max |p(a) - target(a)| over the reference grid on [-1, 1].
struct PolynomialApprox {
  std::vector<double> beta;
  double pb_norm = 0.0;
  double sup_error = 0.0;
  TransferKind target;

  int degree() const { return static_cast<int>(beta.size()) - 1; }
};

// Coefficient budget kept in log space: the worst-case bound overflows
// double precision already at moderate Lipschitz constants.
struct LogBudget {
  double log_b = 0.0;
  bool below_min_lipschitz = false;  // set when L < 3, outside the stated regime
};

// sum_j beta_j^2 2^j, accumulated in increasing j with compensated summation.
double pb_norm(const std::vector<double>& beta);

// log(2 L^4 + exp(7 L log(2L/eps) + 3)), evaluated as a log-sum-exp.
LogBudget b_bound_sigmoid(double L, double eps);

// Lowest-degree Chebyshev truncation of the sigmoid transfer whose measured
// sup error on a uniform grid is <= eps, converted to monomial coefficients.
// For L >= 3 the result's pb_norm is checked against b_bound_sigmoid.
PolynomialApprox approx_sigmoid_chebyshev(double L, double eps, int grid_size = 10001,
                                          int degree_cap = 60);

// Odd-degree truncation of the erf transfer's Taylor series:
// beta_0 = 1/2, beta_{2n+1} = (-1)^n (sqrt(pi) L)^{2n+1} / (sqrt(pi) n! (2n+1)).
PolynomialApprox erf_taylor_coeffs(double L, int degree, int grid_size = 10001);

double horner(const std::vector<double>& beta, double a);

}  // namespace khl
