#pragma once

#include <vector>

namespace khl {

enum class Transfer { ZeroOne, Sigmoid, Erf, PiecewiseLinear };

// A transfer function maps a margin value to [0, 1], read as the probability
// of label 1. The three continuous variants are L-Lipschitz:
//
//   sigmoid(a)  = 1 / (1 + exp(-4 L a))
//   erf(a)      = (1 + erf(sqrt(pi) L a)) / 2
//   pw(a)       = clamp(1/2 + L a, 0, 1)
//   zero_one(a) = [a >= 0]
//
// L = 0 is accepted and degenerates to the constant 1/2 for the continuous
// variants. L is ignored for ZeroOne.
struct TransferKind {
  Transfer variant = Transfer::Sigmoid;
  double lipschitz = 1.0;

  static TransferKind zero_one();
  static TransferKind sigmoid(double lipschitz);
  static TransferKind erf(double lipschitz);
  static TransferKind piecewise_linear(double lipschitz);
};

double eval_transfer(const TransferKind& kind, double a);

// Max |phi(a_{i+1}) - phi(a_i)| / (a_{i+1} - a_i) over adjacent grid pairs.
// The grid must be strictly increasing with at least two points in [-1, 1].
double lipschitz_check(const TransferKind& kind, const std::vector<double>& grid);

}  // namespace khl
