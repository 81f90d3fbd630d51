#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "khl/kernel.hpp"
#include "khl/polyspace.hpp"
#include "khl/solver.hpp"
#include "khl/transfer.hpp"

namespace khl {

struct LabeledSample {
  Point x;
  int y = 0;  // 0 or 1
};

struct Dataset {
  std::vector<LabeledSample> samples;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  std::size_t dim() const { return samples.empty() ? 0 : samples.front().x.size(); }
};

enum class LabelNoise { Probabilistic, DeterministicThreshold };

struct GeneratorSpec {
  int dim = 2;
  Point w_star;  // unit norm within 1e-9
  TransferKind transfer;
  LabelNoise label_noise = LabelNoise::Probabilistic;
  std::uint64_t seed = 0;
};

// Draws x uniformly on the unit sphere, sets p = phi(<w*, x>), then
// y ~ Bernoulli(p) (probabilistic) or y = [p >= 1/2] (deterministic).
Dataset generate(const GeneratorSpec& spec, std::int64_t m);

using ProbPredictor = std::function<double(const Point&)>;
using LabelPredictor = std::function<int(const Point&)>;

// (1/m) sum |h(x_i) - y_i| for h mapping into [0,1].
double abs_error(const ProbPredictor& h, const Dataset& data);

double zero_one_error(const LabelPredictor& h, const Dataset& data);

// Fraction of samples misclassified by sign(<w, x>) or within margin mu:
// mean of [ [<w,x> > 0] != y  or  |<w,x>| <= mu ].
double margin_error(const Point& w, double mu, const Dataset& data);

// ceil( ((2L + 3 sqrt(2 ln(8/delta))) / eps)^2 )
std::int64_t sample_size_hphi(double L, double eps, double delta);

enum class SampleBoundVariant { Erm, Mainres };

struct SampleSize {
  std::int64_t m = 0;
  bool overflow = false;  // saturated at INT64_MAX
};

// Erm: ceil( 2B/eps^2 (2 + 9 sqrt(ln(8/delta)))^2 );  Mainres: 8B in place of 2B.
SampleSize sample_size_hb(double b_budget, double eps, double delta, SampleBoundVariant variant);
SampleSize sample_size_hb(const LogBudget& b_budget, double eps, double delta,
                          SampleBoundVariant variant);
// Pre-ceiling value, for ratio checks.
double sample_size_hb_real(double b_budget, double eps, double delta, SampleBoundVariant variant);

enum class MarginTransfer { PiecewiseLinear, Sigmoid };

// PiecewiseLinear: 1/(2 mu).  Sigmoid: (1/(4 mu)) ln((2 - eps)/eps).
double l_for_margin(MarginTransfer transfer, double mu, double eps = 0.0);

struct DominationReport {
  std::int64_t violations = 0;
  double max_excess = 0.0;  // max over samples of loss - bound (<= 0 when clean)
  double mean_loss = 0.0;
  double margin_error_rate = 0.0;
  double eps_slack = 0.0;  // eps/2 for Sigmoid, 0 for PiecewiseLinear
};

// Per-sample check of |phi(<w,x>) - y| <= [mu-margin mistake] (+ eps/2 for
// Sigmoid), with phi configured at the matching l_for_margin constant.
// Violations are counted beyond a 1e-12 floating-point guard.
DominationReport margin_domination_check(const Point& w, double mu, const Dataset& data,
                                         MarginTransfer transfer, double eps = 0.0);

struct CrossValRow {
  double b_budget = 0.0;
  double train_objective = 0.0;
  double holdout_zero_one = 0.0;
  bool selected = false;
};

struct CrossValResult {
  double best_b = 0.0;
  DualPredictor predictor;
  std::vector<CrossValRow> rows;
};

// Trains one predictor per grid value on train, scores zero-one error on
// holdout, returns the argmin (ties to the smallest B). The grid is
// deduplicated; train and holdout must be disjoint (not checked).
CrossValResult cross_validate_b(const Dataset& train, const Dataset& holdout,
                                const std::vector<double>& b_grid, const SolverOptions& opts,
                                const KernelSpec& spec = {});

// Deterministic shuffle split; holdout_fraction in (0,1).
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double holdout_fraction,
                                          std::uint64_t split_seed);

struct ErrorReport {
  double abs_error = 0.0;
  double zero_one_error = 0.0;
  std::map<double, double> margin_errors;
};

}  // namespace khl
