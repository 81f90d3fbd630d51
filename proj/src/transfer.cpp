#include "khl/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace khl {

namespace {

TransferKind checked(Transfer variant, double lipschitz) {
  if (!std::isfinite(lipschitz) || lipschitz < 0.0) {
    throw std::invalid_argument("transfer: Lipschitz constant must be finite and >= 0");
  }
  return TransferKind{variant, lipschitz};
}

}  // namespace

TransferKind TransferKind::zero_one() { return TransferKind{Transfer::ZeroOne, 0.0}; }
TransferKind TransferKind::sigmoid(double lipschitz) { return checked(Transfer::Sigmoid, lipschitz); }
TransferKind TransferKind::erf(double lipschitz) { return checked(Transfer::Erf, lipschitz); }
TransferKind TransferKind::piecewise_linear(double lipschitz) {
  return checked(Transfer::PiecewiseLinear, lipschitz);
}

double eval_transfer(const TransferKind& kind, double a) {
  if (!std::isfinite(a)) throw std::domain_error("eval_transfer: non-finite argument");
  const double L = kind.lipschitz;
  switch (kind.variant) {
    case Transfer::ZeroOne:
      return a >= 0.0 ? 1.0 : 0.0;
    case Transfer::Sigmoid:
      return 1.0 / (1.0 + std::exp(-4.0 * L * a));
    case Transfer::Erf:
      return 0.5 * (1.0 + std::erf(std::sqrt(std::numbers::pi) * L * a));
    case Transfer::PiecewiseLinear:
      return std::max(std::min(0.5 + L * a, 1.0), 0.0);
  }
  throw std::logic_error("eval_transfer: unknown variant");
}

double lipschitz_check(const TransferKind& kind, const std::vector<double>& grid) {
  if (grid.size() < 2) {
    throw std::invalid_argument("lipschitz_check: grid needs at least two points");
  }
  double max_slope = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a0 = grid[i];
    const double a1 = grid[i + 1];
    if (!(a1 > a0)) {
      throw std::invalid_argument("lipschitz_check: grid must be strictly increasing");
    }
    if (a0 < -1.0 || a1 > 1.0) {
      throw std::invalid_argument("lipschitz_check: grid must lie in [-1, 1]");
    }
    const double slope = std::abs(eval_transfer(kind, a1) - eval_transfer(kind, a0)) / (a1 - a0);
    max_slope = std::max(max_slope, slope);
  }
  return max_slope;
}

}  // namespace khl
