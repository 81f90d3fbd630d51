#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "khl/kernel.hpp"

namespace khl {

// Predictor x -> sum_j alpha_j K(anchor_j, x), feasible for the ball
// constraint alpha' K alpha <= B (within 1e-6 relative slack). anchors may
// be empty for synthetic Gram instances; prediction then throws.
struct DualPredictor {
  std::vector<double> alpha;
  std::vector<Point> anchors;
  KernelSpec spec;
  double b_budget = 1.0;
};

enum class StepSchedule { Constant, InverseSqrt };
enum class BatchMode { Full, SingleSample };

struct SolverOptions {
  // Default: 10 * m * ceil(1/tolerance^2), capped at 1e6.
  std::optional<std::int64_t> max_iters;
  StepSchedule schedule = StepSchedule::InverseSqrt;
  // Step constant c (eta_t = c or c/sqrt(t)); 0 selects
  // sqrt(B) / max_i sqrt(K_ii), the subgradient-norm bound from the diagonal.
  double step_constant = 0.0;
  std::uint64_t seed = 0;
  double tolerance = 1e-3;
  BatchMode batch = BatchMode::Full;
};

struct SolveReport {
  double final_objective = 0.0;
  std::vector<double> objective_trace;  // best-so-far, sampled once per epoch
  std::int64_t iters_used = 0;
  bool constraint_active = false;
};

// Mean absolute residual (1/m) sum_i |(K alpha)_i - y_i|.
double objective(const std::vector<double>& alpha, const GramMatrix& gram,
                 const std::vector<int>& labels);

// Projected subgradient descent on the dual problem
//   min (1/m) sum_i |(K alpha)_i - y_i|  s.t.  alpha' K alpha <= B,
// stepping along the functional subgradient and projecting onto the ball by
// exact rescaling. Deterministic for fixed options (including seed).
std::pair<DualPredictor, SolveReport> solve_erm(const GramMatrix& gram,
                                                const std::vector<int>& labels,
                                                double b_budget,
                                                const SolverOptions& opts = {},
                                                std::vector<Point> anchors = {});

double predict_raw(const DualPredictor& pred, const Point& x);
double predict_prob(const DualPredictor& pred, const Point& x);  // raw clipped to [0,1]
int predict_label(const DualPredictor& pred, const Point& x);    // raw >= 1/2, ties to 1

// Validating constructor for externally supplied coefficients (model files).
DualPredictor make_dual_predictor(std::vector<double> alpha, std::vector<Point> anchors,
                                  const KernelSpec& spec, double b_budget);

struct OracleResult {
  std::vector<double> alpha;
  double objective = 0.0;
};

// Independent small-instance oracle (m <= 6): scans a uniform grid over the
// feasible box [-sqrt(B/lambda), sqrt(B/lambda)]^m (lambda the smallest
// positive Gram eigenvalue), filters by feasibility, then refines the best
// grid points by shrinking coordinate and coordinate-pair searches.
OracleResult exhaustive_erm_small(const GramMatrix& gram, const std::vector<int>& labels,
                                  double b_budget, int grid_resolution);

}  // namespace khl
