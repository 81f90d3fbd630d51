#include "khl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "khl/rng.hpp"

namespace khl {

namespace {

constexpr double kUnitTolerance = 1e-9;

void check_unit(const Point& w) {
  if (std::abs(norm(w) - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("expected a unit-norm vector");
  }
}

void check_nonempty(const Dataset& data) {
  if (data.samples.empty()) throw std::invalid_argument("empty dataset");
}

double sample_bound_factor(SampleBoundVariant variant) {
  return variant == SampleBoundVariant::Erm ? 2.0 : 8.0;
}

const char* transfer_name(Transfer t) {
  switch (t) {
    case Transfer::ZeroOne: return "zeroone";
    case Transfer::Sigmoid: return "sig";
    case Transfer::Erf: return "erf";
    case Transfer::PiecewiseLinear: return "pw";
  }
  return "?";
}

}  // namespace

Dataset generate(const GeneratorSpec& spec, std::int64_t m) {
  if (spec.dim < 1) throw std::invalid_argument("generate: dim must be >= 1");
  if (m < 1) throw std::invalid_argument("generate: m must be >= 1");
  if (spec.w_star.size() != static_cast<std::size_t>(spec.dim)) {
    throw std::invalid_argument("generate: w_star dimension mismatch");
  }
  check_unit(spec.w_star);

  Rng rng(spec.seed);
  Dataset data;
  data.samples.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    LabeledSample s;
    s.x = rng.unit_sphere(spec.dim);
    const double p = eval_transfer(spec.transfer, dot(spec.w_star, s.x));
    if (spec.label_noise == LabelNoise::Probabilistic) {
      s.y = rng.uniform01() < p ? 1 : 0;
    } else {
      s.y = p >= 0.5 ? 1 : 0;
    }
    data.samples.push_back(std::move(s));
  }

  std::ostringstream prov;
  prov << "generator(dim=" << spec.dim << ",transfer=" << transfer_name(spec.transfer.variant)
       << ",L=" << spec.transfer.lipschitz
       << ",noise=" << (spec.label_noise == LabelNoise::Probabilistic ? "prob" : "det")
       << ",seed=" << spec.seed << ",m=" << m << ")";
  data.provenance = prov.str();
  return data;
}

double abs_error(const ProbPredictor& h, const Dataset& data) {
  check_nonempty(data);
  double s = 0.0;
  for (const auto& sample : data.samples) s += std::abs(h(sample.x) - sample.y);
  return s / static_cast<double>(data.size());
}

double zero_one_error(const LabelPredictor& h, const Dataset& data) {
  check_nonempty(data);
  std::int64_t mistakes = 0;
  for (const auto& sample : data.samples) mistakes += h(sample.x) != sample.y;
  return static_cast<double>(mistakes) / static_cast<double>(data.size());
}

double margin_error(const Point& w, double mu, const Dataset& data) {
  check_unit(w);
  if (!(mu > 0.0)) throw std::invalid_argument("margin_error: mu must be positive");
  check_nonempty(data);
  std::int64_t bad = 0;
  for (const auto& sample : data.samples) {
    const double a = dot(w, sample.x);
    const int predicted = a > 0.0 ? 1 : 0;
    bad += (predicted != sample.y) || (std::abs(a) <= mu);
  }
  return static_cast<double>(bad) / static_cast<double>(data.size());
}

std::int64_t sample_size_hphi(double L, double eps, double delta) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("sample_size_hphi: L must be positive");
  }
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("sample_size_hphi: eps and delta must lie in (0, 1)");
  }
  const double t = (2.0 * L + 3.0 * std::sqrt(2.0 * std::log(8.0 / delta))) / eps;
  const double m = std::ceil(t * t);
  if (!(m < 9.2e18)) throw std::overflow_error("sample_size_hphi: result exceeds int64 range");
  return static_cast<std::int64_t>(m);
}

double sample_size_hb_real(double b_budget, double eps, double delta,
                           SampleBoundVariant variant) {
  if (!(b_budget >= 1.0)) throw std::invalid_argument("sample_size_hb: B must be >= 1");
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("sample_size_hb: eps and delta must lie in (0, 1)");
  }
  const double c = 2.0 + 9.0 * std::sqrt(std::log(8.0 / delta));
  return sample_bound_factor(variant) * b_budget / (eps * eps) * c * c;
}

SampleSize sample_size_hb(double b_budget, double eps, double delta, SampleBoundVariant variant) {
  const double real = sample_size_hb_real(b_budget, eps, delta, variant);
  const double max_i64 = 9223372036854775807.0;  // 2^63 - 1
  if (!(real < max_i64)) return SampleSize{std::numeric_limits<std::int64_t>::max(), true};
  return SampleSize{static_cast<std::int64_t>(std::ceil(real)), false};
}

SampleSize sample_size_hb(const LogBudget& b_budget, double eps, double delta,
                          SampleBoundVariant variant) {
  if (!(b_budget.log_b >= 0.0)) throw std::invalid_argument("sample_size_hb: B must be >= 1");
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("sample_size_hb: eps and delta must lie in (0, 1)");
  }
  const double c = 2.0 + 9.0 * std::sqrt(std::log(8.0 / delta));
  const double log_m = std::log(sample_bound_factor(variant)) + b_budget.log_b -
                       2.0 * std::log(eps) + 2.0 * std::log(c);
  const double log_i64_max = 43.668272375276554;  // ln(2^63 - 1)
  if (log_m >= log_i64_max) return SampleSize{std::numeric_limits<std::int64_t>::max(), true};
  return sample_size_hb(std::exp(b_budget.log_b), eps, delta, variant);
}

double l_for_margin(MarginTransfer transfer, double mu, double eps) {
  if (!(mu > 0.0)) throw std::invalid_argument("l_for_margin: mu must be positive");
  if (transfer == MarginTransfer::PiecewiseLinear) return 1.0 / (2.0 * mu);
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("l_for_margin: eps must lie in (0, 1) for the sigmoid");
  }
  return std::log((2.0 - eps) / eps) / (4.0 * mu);
}

DominationReport margin_domination_check(const Point& w, double mu, const Dataset& data,
                                         MarginTransfer transfer, double eps) {
  check_unit(w);
  if (!(mu > 0.0)) throw std::invalid_argument("margin_domination_check: mu must be positive");
  check_nonempty(data);

  const double L = l_for_margin(transfer, mu, eps);
  const TransferKind kind = transfer == MarginTransfer::PiecewiseLinear
                                ? TransferKind::piecewise_linear(L)
                                : TransferKind::sigmoid(L);
  DominationReport report;
  report.eps_slack = transfer == MarginTransfer::Sigmoid ? eps / 2.0 : 0.0;
  report.max_excess = -std::numeric_limits<double>::infinity();

  double loss_sum = 0.0;
  std::int64_t mistakes = 0;
  for (const auto& sample : data.samples) {
    const double a = dot(w, sample.x);
    const double loss = std::abs(eval_transfer(kind, a) - sample.y);
    const bool mistake = ((a > 0.0 ? 1 : 0) != sample.y) || (std::abs(a) <= mu);
    const double bound = (mistake ? 1.0 : 0.0) + report.eps_slack;
    const double excess = loss - bound;
    report.max_excess = std::max(report.max_excess, excess);
    if (excess > 1e-12) ++report.violations;
    loss_sum += loss;
    mistakes += mistake;
  }
  report.mean_loss = loss_sum / static_cast<double>(data.size());
  report.margin_error_rate = static_cast<double>(mistakes) / static_cast<double>(data.size());
  return report;
}

CrossValResult cross_validate_b(const Dataset& train, const Dataset& holdout,
                                const std::vector<double>& b_grid, const SolverOptions& opts,
                                const KernelSpec& spec) {
  if (b_grid.empty()) throw std::invalid_argument("cross_validate_b: empty B grid");
  for (double b : b_grid) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw std::invalid_argument("cross_validate_b: B grid values must be positive");
    }
  }
  check_nonempty(train);
  check_nonempty(holdout);

  std::vector<double> grid = b_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<Point> anchors;
  anchors.reserve(train.size());
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& s : train.samples) {
    anchors.push_back(s.x);
    labels.push_back(s.y);
  }
  const GramMatrix g = gram(anchors, spec);

  CrossValResult result;
  result.best_b = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  for (double b : grid) {
    auto [pred, report] = solve_erm(g, labels, b, opts, anchors);
    const double err = zero_one_error(
        [&pred](const Point& x) { return predict_label(pred, x); }, holdout);
    result.rows.push_back(CrossValRow{b, report.final_objective, err, false});
    if (err < best_err) {  // strict: ties keep the smallest B
      best_err = err;
      result.best_b = b;
      result.predictor = std::move(pred);
    }
  }
  for (auto& row : result.rows) row.selected = row.b_budget == result.best_b;
  return result;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double holdout_fraction,
                                          std::uint64_t split_seed) {
  check_nonempty(data);
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: holdout fraction must lie in (0, 1)");
  }
  const std::size_t m = data.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(split_seed);
  for (std::size_t i = m; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::size_t holdout_count =
      static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(m)));
  holdout_count = std::clamp<std::size_t>(holdout_count, 1, m - 1);

  Dataset train, holdout;
  train.provenance = data.provenance + "|train";
  holdout.provenance = data.provenance + "|holdout";
  for (std::size_t i = 0; i < m; ++i) {
    auto& dst = i < holdout_count ? holdout : train;
    dst.samples.push_back(data.samples[order[i]]);
  }
  return {std::move(train), std::move(holdout)};
}

}  // namespace khl
