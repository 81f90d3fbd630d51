#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "khl/errors.hpp"
#include "khl/polyspace.hpp"
#include "khl/rng.hpp"

using namespace khl;

TEST_CASE("pb_norm hand values") {
  CHECK(pb_norm({}) == 0.0);
  CHECK(pb_norm({1.0}) == 1.0);
  CHECK(pb_norm({0.0, 1.0}) == 2.0);
  CHECK(pb_norm({0.5, 0.5, 0.5}) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("pb_norm ignores appended zeros") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> beta;
    const int len = 1 + static_cast<int>(rng.below(20));
    for (int j = 0; j < len; ++j) beta.push_back(2.0 * rng.uniform01() - 1.0);
    const double base = pb_norm(beta);
    beta.insert(beta.end(), 5, 0.0);
    CHECK(pb_norm(beta) == base);
  }
}

TEST_CASE("b_bound_sigmoid reference values") {
  // logsumexp(ln 162, 21 ln 60 + 3) etc., from tests/reference_values.py
  CHECK(b_bound_sigmoid(3.0, 0.1).log_b == doctest::Approx(88.98123580666412).epsilon(1e-14));
  CHECK(b_bound_sigmoid(3.0, 0.05).log_b == doctest::Approx(103.53732659842296).epsilon(1e-14));
  CHECK(b_bound_sigmoid(5.0, 0.1).log_b == doctest::Approx(164.18095650958318).epsilon(1e-14));
  // eps -> 1^- limit: logsumexp(ln 162, 21 ln 6 + 3)
  CHECK(b_bound_sigmoid(3.0, 1.0 - 1e-12).log_b ==
        doctest::Approx(40.626948853810156).epsilon(1e-12));
}

TEST_CASE("b_bound_sigmoid is decreasing in eps") {
  CHECK(b_bound_sigmoid(3.0, 0.01).log_b > b_bound_sigmoid(3.0, 0.1).log_b);
  double prev = b_bound_sigmoid(4.0, 0.001).log_b;
  for (double eps : {0.01, 0.1, 0.5, 0.9}) {
    const double cur = b_bound_sigmoid(4.0, eps).log_b;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("b_bound_sigmoid regime flag and validation") {
  CHECK_FALSE(b_bound_sigmoid(3.0, 0.1).below_min_lipschitz);
  CHECK(b_bound_sigmoid(2.0, 0.1).below_min_lipschitz);
  CHECK_THROWS_AS(b_bound_sigmoid(3.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(b_bound_sigmoid(3.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(b_bound_sigmoid(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(b_bound_sigmoid(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("chebyshev sigmoid approximation meets its contract") {
  const auto approx = approx_sigmoid_chebyshev(3.0, 0.05);
  CHECK(approx.sup_error <= 0.05);
  CHECK(std::log(approx.pb_norm) <= b_bound_sigmoid(3.0, 0.05).log_b);
  CHECK(approx.target.variant == Transfer::Sigmoid);
  CHECK(approx.target.lipschitz == 3.0);

  // sup_error is the measured max: re-evaluating on the same grid stays within it
  const int grid_size = 10001;
  double measured = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    const double a = -1.0 + 2.0 * g / (grid_size - 1);
    measured = std::max(measured,
                        std::abs(horner(approx.beta, a) - eval_transfer(approx.target, a)));
  }
  CHECK(measured == approx.sup_error);
}

TEST_CASE("chebyshev approximation picks the lowest admissible degree") {
  const auto loose = approx_sigmoid_chebyshev(3.0, 0.2);
  const auto tight = approx_sigmoid_chebyshev(3.0, 0.01);
  CHECK(loose.degree() <= tight.degree());
  CHECK(tight.sup_error <= 0.01);
}

TEST_CASE("sigmoid minus one half is odd") {
  const auto approx = approx_sigmoid_chebyshev(3.0, 0.05);
  REQUIRE(approx.beta.size() >= 3);
  CHECK(approx.beta[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t j = 2; j < approx.beta.size(); j += 2) {
    CHECK(std::abs(approx.beta[j]) <= 1e-9);
  }
}

TEST_CASE("degenerate L = 0 sigmoid is the constant 1/2") {
  const auto approx = approx_sigmoid_chebyshev(0.0, 0.05);
  REQUIRE(approx.beta.size() == 1);
  CHECK(approx.beta[0] == 0.5);
  CHECK(approx.sup_error == 0.0);
  CHECK(approx.pb_norm == 0.25);
}

TEST_CASE("chebyshev construction failure reports the best degree") {
  CHECK_THROWS_AS(approx_sigmoid_chebyshev(12.0, 0.001), approximation_error);
  try {
    approx_sigmoid_chebyshev(12.0, 0.001);
  } catch (const approximation_error& e) {
    CHECK(e.best_error > 0.001);
    CHECK(e.best_degree >= 0);
    CHECK(e.best_degree <= 60);
  }
}

TEST_CASE("chebyshev argument validation") {
  CHECK_THROWS_AS(approx_sigmoid_chebyshev(12.5, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(approx_sigmoid_chebyshev(-1.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(approx_sigmoid_chebyshev(3.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(approx_sigmoid_chebyshev(3.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(approx_sigmoid_chebyshev(3.0, 0.05, 100), std::invalid_argument);
}

TEST_CASE("erf taylor coefficients") {
  const auto p1 = erf_taylor_coeffs(1.0, 7);
  CHECK(p1.beta[0] == 0.5);
  CHECK(p1.beta[1] == 1.0);  // (sqrt(pi) L)^1 / (sqrt(pi) 0! 1) at L = 1
  CHECK(p1.beta[2] == 0.0);
  CHECK(p1.beta[3] < 0.0);  // alternating signs

  const auto p2 = erf_taylor_coeffs(2.0, 7);
  CHECK(p2.beta[0] == 0.5);
  CHECK(p2.beta[1] == 2.0);

  CHECK_THROWS_AS(erf_taylor_coeffs(1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(erf_taylor_coeffs(1.0, -3), std::invalid_argument);
  CHECK_THROWS_AS(erf_taylor_coeffs(1.0, 81), std::invalid_argument);
}

TEST_CASE("erf coefficient norm grows steeply with L") {
  const double small = erf_taylor_coeffs(1.0, 61).pb_norm;
  const double large = erf_taylor_coeffs(3.0, 61).pb_norm;
  CHECK(large > 1e6 * small);
}

TEST_CASE("erf taylor truncation error decreases past the dominance point") {
  // L = 1: terms peak around n = pi, so degrees 7..31 are in the tail
  double prev = erf_taylor_coeffs(1.0, 7).sup_error;
  for (int d = 9; d <= 31; d += 2) {
    const double cur = erf_taylor_coeffs(1.0, d).sup_error;
    CHECK(cur < prev);
    prev = cur;
  }
  // L = 3: terms peak around n = 9 pi; past degree ~59 the tail decreases
  prev = erf_taylor_coeffs(3.0, 59).sup_error;
  for (int d = 61; d <= 79; d += 2) {
    const double cur = erf_taylor_coeffs(3.0, d).sup_error;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("horner evaluates the monomial form") {
  CHECK(horner({}, 0.3) == 0.0);
  CHECK(horner({2.0}, 0.3) == 2.0);
  CHECK(horner({1.0, -2.0, 3.0}, 0.5) == doctest::Approx(1.0 - 1.0 + 0.75).epsilon(1e-15));
}
