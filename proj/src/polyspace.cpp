#include "khl/polyspace.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "khl/errors.hpp"

namespace khl {

namespace {

// Kahan-compensated accumulator. Zero terms are skipped so that padding a
// coefficient sequence with zeros cannot perturb the compensation state.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    if (v == 0.0) return;
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Chebyshev coefficients of f on [-1,1] by Gauss-Chebyshev quadrature at
// quad_nodes first-kind nodes; c[0] carries the conventional 1/2 factor so
// that p(x) = sum_k c_k T_k(x).
std::vector<double> chebyshev_coeffs(const TransferKind& target, int count, int quad_nodes) {
  std::vector<double> f(static_cast<std::size_t>(quad_nodes));
  std::vector<double> theta(static_cast<std::size_t>(quad_nodes));
  for (int i = 0; i < quad_nodes; ++i) {
    theta[i] = (i + 0.5) * std::numbers::pi / quad_nodes;
    f[i] = eval_transfer(target, std::cos(theta[i]));
  }
  std::vector<double> c(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Kahan acc;
    for (int i = 0; i < quad_nodes; ++i) acc.add(f[i] * std::cos(k * theta[i]));
    c[k] = 2.0 / quad_nodes * acc.sum;
  }
  c[0] *= 0.5;
  return c;
}

// Expand sum_{k<=degree} c_k T_k(x) into monomial coefficients via the
// T_{k+1} = 2x T_k - T_{k-1} recurrence, compensated per coefficient.
std::vector<double> cheb_to_monomial(const std::vector<double>& c, int degree) {
  std::vector<Kahan> beta(static_cast<std::size_t>(degree) + 1);
  auto add_poly = [&](const std::vector<double>& t, double w) {
    for (std::size_t j = 0; j < t.size(); ++j) beta[j].add(w * t[j]);
  };

  std::vector<double> t_prev{1.0};       // T_0
  std::vector<double> t_cur{0.0, 1.0};   // T_1
  add_poly(t_prev, c[0]);
  if (degree >= 1) add_poly(t_cur, c[1]);
  for (int k = 2; k <= degree; ++k) {
    std::vector<double> t_next(static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t j = 0; j < t_cur.size(); ++j) t_next[j + 1] += 2.0 * t_cur[j];
    for (std::size_t j = 0; j < t_prev.size(); ++j) t_next[j] -= t_prev[j];
    add_poly(t_next, c[static_cast<std::size_t>(k)]);
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }

  std::vector<double> out(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) out[j] = beta[j].sum;
  return out;
}

double clenshaw(const std::vector<double>& c, int degree, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree; k >= 1; --k) {
    const double b0 = 2.0 * x * b1 - b2 + c[static_cast<std::size_t>(k)];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

}  // namespace

double horner(const std::vector<double>& beta, double a) {
  double v = 0.0;
  for (std::size_t j = beta.size(); j-- > 0;) v = v * a + beta[j];
  return v;
}

double pb_norm(const std::vector<double>& beta) {
  Kahan acc;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    acc.add(std::ldexp(beta[j] * beta[j], static_cast<int>(j)));
  }
  return acc.sum;
}

LogBudget b_bound_sigmoid(double L, double eps) {
  if (!std::isfinite(L) || !(L > 0.0)) {
    throw std::invalid_argument("b_bound_sigmoid: L must be finite and positive");
  }
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("b_bound_sigmoid: eps must lie in (0, 1)");
  }
  const double a = std::log(2.0 * L * L * L * L);
  const double b = 7.0 * L * std::log(2.0 * L / eps) + 3.0;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return LogBudget{hi + std::log1p(std::exp(lo - hi)), L < 3.0};
}

PolynomialApprox approx_sigmoid_chebyshev(double L, double eps, int grid_size, int degree_cap) {
  if (!std::isfinite(L) || L < 0.0 || L > 12.0) {
    throw std::invalid_argument("approx_sigmoid_chebyshev: L must lie in [0, 12]");
  }
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("approx_sigmoid_chebyshev: eps must lie in (0, 1)");
  }
  if (grid_size < 1001) {
    throw std::invalid_argument("approx_sigmoid_chebyshev: grid_size must be >= 1001");
  }
  if (degree_cap < 0) {
    throw std::invalid_argument("approx_sigmoid_chebyshev: degree cap must be >= 0");
  }

  const TransferKind target = TransferKind::sigmoid(L);
  const std::vector<double> cheb = chebyshev_coeffs(target, degree_cap + 1, 2048);

  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  std::vector<double> target_vals(static_cast<std::size_t>(grid_size));
  for (int g = 0; g < grid_size; ++g) {
    grid[g] = -1.0 + 2.0 * g / (grid_size - 1);
    target_vals[g] = eval_transfer(target, grid[g]);
  }

  double best_error = std::numeric_limits<double>::infinity();
  int best_degree = -1;
  for (int d = 0; d <= degree_cap; ++d) {
    const std::vector<double> beta = cheb_to_monomial(cheb, d);
    double sup = 0.0;
    for (int g = 0; g < grid_size; ++g) {
      sup = std::max(sup, std::abs(horner(beta, grid[g]) - target_vals[g]));
    }
    if (sup < best_error) {
      best_error = sup;
      best_degree = d;
    }
    if (sup > eps) continue;

    // The monomial form must still agree with the numerically stable
    // Chebyshev evaluation, otherwise the conversion lost precision.
    double disagreement = 0.0;
    for (int g = 0; g < grid_size; ++g) {
      disagreement = std::max(disagreement, std::abs(horner(beta, grid[g]) - clenshaw(cheb, d, grid[g])));
    }
    if (disagreement > eps / 10.0) {
      throw approximation_error(
          "approx_sigmoid_chebyshev: monomial conversion unstable at degree " + std::to_string(d),
          sup, d);
    }

    const double pbn = pb_norm(beta);
    if (L >= 3.0 && std::log(pbn) > b_bound_sigmoid(L, eps).log_b) {
      throw approximation_error(
          "approx_sigmoid_chebyshev: coefficient norm exceeds the budget at degree " +
              std::to_string(d),
          sup, d);
    }
    return PolynomialApprox{beta, pbn, sup, target};
  }
  throw approximation_error("approx_sigmoid_chebyshev: no degree <= " + std::to_string(degree_cap) +
                                " reaches sup error " + std::to_string(eps) +
                                " (best " + std::to_string(best_error) + " at degree " +
                                std::to_string(best_degree) + ")",
                            best_error, best_degree);
}

PolynomialApprox erf_taylor_coeffs(double L, int degree, int grid_size) {
  if (degree % 2 == 0) throw std::invalid_argument("erf_taylor_coeffs: degree must be odd");
  if (degree < 1 || degree > 80) {
    throw std::invalid_argument("erf_taylor_coeffs: degree must lie in [1, 80]");
  }
  if (!std::isfinite(L) || L < 0.0) {
    throw std::invalid_argument("erf_taylor_coeffs: L must be finite and >= 0");
  }
  if (grid_size < 2) throw std::invalid_argument("erf_taylor_coeffs: grid_size must be >= 2");

  std::vector<double> beta(static_cast<std::size_t>(degree) + 1, 0.0);
  beta[0] = 0.5;
  const double z2 = std::numbers::pi * L * L;  // (sqrt(pi) L)^2
  double term = L;                             // n = 0 coefficient
  for (int n = 0; 2 * n + 1 <= degree; ++n) {
    beta[static_cast<std::size_t>(2 * n + 1)] = term;
    term *= -(z2 / (n + 1)) * (double(2 * n + 1) / double(2 * n + 3));
  }

  const TransferKind target = TransferKind::erf(L);
  double sup = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    const double a = -1.0 + 2.0 * g / (grid_size - 1);
    sup = std::max(sup, std::abs(horner(beta, a) - eval_transfer(target, a)));
  }
  const double pbn = pb_norm(beta);
  return PolynomialApprox{std::move(beta), pbn, sup, target};
}

}  // namespace khl
