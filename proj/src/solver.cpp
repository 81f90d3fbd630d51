#include "khl/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "khl/errors.hpp"
#include "khl/rng.hpp"

namespace khl {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_matrix(const GramMatrix& g) {
  return Eigen::Map<const RowMajor>(g.entries.data(), static_cast<Eigen::Index>(g.size),
                                    static_cast<Eigen::Index>(g.size));
}

void check_instance(const GramMatrix& gram, const std::vector<int>& labels) {
  if (gram.size == 0) throw std::invalid_argument("solver: empty Gram matrix");
  if (gram.entries.size() != gram.size * gram.size) {
    throw std::invalid_argument("solver: malformed Gram matrix");
  }
  if (labels.size() != gram.size) throw std::invalid_argument("solver: label count mismatch");
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("solver: labels must be 0 or 1");
  }
}

// PSD gate: Cholesky of K + (1e-6 m) I succeeds iff the smallest eigenvalue
// is no worse than the tolerated -1e-6 m.
void check_psd(const GramMatrix& gram) {
  const auto k = as_matrix(gram);
  const double shift = 1e-6 * static_cast<double>(gram.size);
  Eigen::MatrixXd shifted = k;
  shifted.diagonal().array() += shift;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("solve_erm: Gram matrix is not positive semidefinite");
  }
}

double quadratic_form(const GramMatrix& gram, const std::vector<double>& alpha) {
  const auto k = as_matrix(gram);
  Eigen::Map<const Eigen::VectorXd> a(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
  return a.dot(k * a);
}

struct Best {
  double objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd alpha;
};

}  // namespace

double objective(const std::vector<double>& alpha, const GramMatrix& gram,
                 const std::vector<int>& labels) {
  check_instance(gram, labels);
  if (alpha.size() != gram.size) throw std::invalid_argument("objective: alpha size mismatch");
  const auto k = as_matrix(gram);
  Eigen::Map<const Eigen::VectorXd> a(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
  const Eigen::VectorXd pred = k * a;
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += std::abs(pred[static_cast<Eigen::Index>(i)] - labels[i]);
  }
  return s / static_cast<double>(labels.size());
}

std::pair<DualPredictor, SolveReport> solve_erm(const GramMatrix& gram,
                                                const std::vector<int>& labels, double b_budget,
                                                const SolverOptions& opts,
                                                std::vector<Point> anchors) {
  check_instance(gram, labels);
  if (!(b_budget > 0.0) || !std::isfinite(b_budget)) {
    throw std::invalid_argument("solve_erm: B must be positive and finite");
  }
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("solve_erm: tolerance must be > 0");
  if (opts.step_constant < 0.0 || !std::isfinite(opts.step_constant)) {
    throw std::invalid_argument("solve_erm: step constant must be >= 0 (0 = auto)");
  }
  if (opts.max_iters && *opts.max_iters < 1) {
    throw std::invalid_argument("solve_erm: max_iters must be >= 1");
  }
  if (!anchors.empty() && anchors.size() != gram.size) {
    throw std::invalid_argument("solve_erm: anchor count mismatch");
  }
  for (auto& a : anchors) a = unit_ball_point(std::move(a));
  check_psd(gram);

  const auto k = as_matrix(gram);
  const std::int64_t m = static_cast<std::int64_t>(gram.size);

  std::int64_t max_iters;
  if (opts.max_iters) {
    max_iters = *opts.max_iters;
  } else {
    const double per_sample = 10.0 * static_cast<double>(m) *
                              std::ceil(1.0 / (opts.tolerance * opts.tolerance));
    max_iters = static_cast<std::int64_t>(std::min(per_sample, 1e6));
  }

  double diag_max = 0.0;
  for (std::int64_t i = 0; i < m; ++i) diag_max = std::max(diag_max, gram.at(i, i));
  const double grad_bound = std::sqrt(std::max(diag_max, 1e-300));
  const double step_c =
      opts.step_constant > 0.0 ? opts.step_constant : std::sqrt(b_budget) / grad_bound;

  Eigen::VectorXd y(m);
  for (std::int64_t i = 0; i < m; ++i) y[i] = labels[static_cast<std::size_t>(i)];

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd k_alpha = Eigen::VectorXd::Zero(m);
  Best best;
  best.alpha = alpha;

  SolveReport report;
  const std::int64_t epochs =
      opts.batch == BatchMode::Full ? max_iters : (max_iters + m - 1) / m;
  const std::int64_t trace_stride = std::max<std::int64_t>(1, epochs / 1024);

  auto step_size = [&](std::int64_t t) {
    return opts.schedule == StepSchedule::Constant ? step_c
                                                   : step_c / std::sqrt(static_cast<double>(t));
  };

  auto record = [&](std::int64_t epoch, double current) {
    if (!std::isfinite(current)) throw divergence_error("solve_erm: non-finite objective");
    if (current < best.objective) {
      best.objective = current;
      best.alpha = alpha;
    }
    if (epoch % trace_stride == 0 || epoch == epochs) {
      report.objective_trace.push_back(best.objective);
    }
  };

  if (opts.batch == BatchMode::Full) {
    for (std::int64_t t = 1; t <= max_iters; ++t) {
      k_alpha.noalias() = k * alpha;
      const double q = alpha.dot(k_alpha);
      if (q > b_budget) {
        const double f = std::sqrt(b_budget / q);
        alpha *= f;
        k_alpha *= f;
      }
      double obj = 0.0;
      for (std::int64_t i = 0; i < m; ++i) obj += std::abs(k_alpha[i] - y[i]);
      obj /= static_cast<double>(m);
      record(t, obj);
      report.iters_used = t;
      if (best.objective == 0.0) break;

      const double eta = step_size(t) / static_cast<double>(m);
      for (std::int64_t i = 0; i < m; ++i) {
        const double r = k_alpha[i] - y[i];
        if (r > 0.0) {
          alpha[i] -= eta;
        } else if (r < 0.0) {
          alpha[i] += eta;
        }
      }
    }
  } else {
    Rng rng(opts.seed);
    double q = 0.0;
    std::int64_t t = 0;
    for (std::int64_t epoch = 1; epoch <= epochs && t < max_iters; ++epoch) {
      for (std::int64_t j = 0; j < m && t < max_iters; ++j) {
        ++t;
        const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
        const double r = k_alpha[i] - y[i];
        const double s = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
        if (s != 0.0) {
          const double delta = -step_size(t) * s;
          q += 2.0 * delta * k_alpha[i] + delta * delta * k(i, i);
          alpha[i] += delta;
          k_alpha.noalias() += delta * k.col(i);
        }
        if (q > b_budget) {
          const double f = std::sqrt(b_budget / q);
          alpha *= f;
          k_alpha *= f;
          q = b_budget;
        }
      }
      // Refresh the cached products once per epoch so rounding cannot drift.
      k_alpha.noalias() = k * alpha;
      q = alpha.dot(k_alpha);
      if (q > b_budget) {
        const double f = std::sqrt(b_budget / q);
        alpha *= f;
        k_alpha *= f;
        q = b_budget;
      }
      double obj = 0.0;
      for (std::int64_t i = 0; i < m; ++i) obj += std::abs(k_alpha[i] - y[i]);
      obj /= static_cast<double>(m);
      record(epoch, obj);
      report.iters_used = t;
      if (best.objective == 0.0) break;
    }
  }

  report.final_objective = best.objective;
  if (report.objective_trace.empty() || report.objective_trace.back() != best.objective) {
    report.objective_trace.push_back(best.objective);
  }

  DualPredictor pred;
  pred.alpha.assign(best.alpha.data(), best.alpha.data() + m);
  pred.anchors = std::move(anchors);
  pred.spec = gram.spec;
  pred.b_budget = b_budget;
  report.constraint_active =
      quadratic_form(gram, pred.alpha) >= b_budget * (1.0 - 1e-6);
  return {std::move(pred), std::move(report)};
}

double predict_raw(const DualPredictor& pred, const Point& x) {
  if (pred.anchors.empty() && !pred.alpha.empty()) {
    throw std::logic_error("predict_raw: predictor has no anchor points");
  }
  if (pred.anchors.size() != pred.alpha.size()) {
    throw std::logic_error("predict_raw: anchor/coefficient size mismatch");
  }
  const Point xb = unit_ball_point(x);
  double s = 0.0;
  for (std::size_t j = 0; j < pred.alpha.size(); ++j) {
    s += pred.alpha[j] * composed_kernel(pred.anchors[j], xb, pred.spec);
  }
  return s;
}

double predict_prob(const DualPredictor& pred, const Point& x) {
  return std::clamp(predict_raw(pred, x), 0.0, 1.0);
}

int predict_label(const DualPredictor& pred, const Point& x) {
  return predict_raw(pred, x) >= 0.5 ? 1 : 0;
}

DualPredictor make_dual_predictor(std::vector<double> alpha, std::vector<Point> anchors,
                                  const KernelSpec& spec, double b_budget) {
  if (!(b_budget > 0.0) || !std::isfinite(b_budget)) {
    throw std::invalid_argument("make_dual_predictor: B must be positive and finite");
  }
  if (alpha.size() != anchors.size()) {
    throw std::invalid_argument("make_dual_predictor: anchor/coefficient size mismatch");
  }
  if (alpha.empty()) throw std::invalid_argument("make_dual_predictor: empty predictor");
  const GramMatrix g = gram(anchors, spec);
  const double q = quadratic_form(g, alpha);
  if (!(q <= b_budget * (1.0 + 1e-6))) {
    throw std::invalid_argument("make_dual_predictor: coefficients violate the norm budget");
  }
  DualPredictor pred;
  pred.anchors.reserve(anchors.size());
  for (auto& a : anchors) pred.anchors.push_back(unit_ball_point(std::move(a)));
  pred.alpha = std::move(alpha);
  pred.spec = spec;
  pred.b_budget = b_budget;
  return pred;
}

OracleResult exhaustive_erm_small(const GramMatrix& gram, const std::vector<int>& labels,
                                  double b_budget, int grid_resolution) {
  check_instance(gram, labels);
  const std::size_t m = gram.size;
  if (m > 6) throw resource_error("exhaustive_erm_small: only instances with m <= 6");
  if (grid_resolution < 2 || grid_resolution > 41) {
    throw std::invalid_argument("exhaustive_erm_small: grid_resolution must lie in [2, 41]");
  }
  if (!(b_budget > 0.0)) throw std::invalid_argument("exhaustive_erm_small: B must be positive");

  const auto k = as_matrix(gram);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  if (es.info() != Eigen::Success) {
    throw std::invalid_argument("exhaustive_erm_small: eigendecomposition failed");
  }
  const Eigen::VectorXd eigs = es.eigenvalues();
  const double eig_max = eigs[eigs.size() - 1];
  const double eig_floor = 1e-12 * std::max(1.0, eig_max);
  double lambda_min_pos = eig_max;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > eig_floor) lambda_min_pos = std::min(lambda_min_pos, eigs[i]);
  }
  const double radius = std::sqrt(b_budget / lambda_min_pos);

  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) y[static_cast<Eigen::Index>(i)] = labels[i];

  auto eval_point = [&](const Eigen::VectorXd& a, double& obj) {
    const Eigen::VectorXd ka = k * a;
    if (a.dot(ka) > b_budget * (1.0 + 1e-9)) return false;
    obj = (ka - y).lpNorm<1>() / static_cast<double>(m);
    return true;
  };

  // The refinement runs in eigenbasis coordinates c = Lambda^{1/2} U' alpha,
  // where the constraint is the round ball |c|^2 <= B and projection is an
  // exact rescale: predictions become M c with M = U Lambda^{1/2}. Directions
  // with negligible eigenvalue are frozen at zero.
  const Eigen::MatrixXd u = es.eigenvectors();
  Eigen::VectorXd sqrt_eigs(eigs.size());
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    sqrt_eigs[i] = eigs[i] > eig_floor ? std::sqrt(eigs[i]) : 0.0;
  }
  const Eigen::MatrixXd pred_of_c = u * sqrt_eigs.asDiagonal();
  auto eval_projected_c = [&](Eigen::VectorXd& c, double& obj) {
    const double q = c.squaredNorm();
    if (q > b_budget) c *= std::sqrt(b_budget / q);
    obj = (pred_of_c * c - y).lpNorm<1>() / static_cast<double>(m);
  };
  auto alpha_of_c = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd scaled(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      scaled[i] = sqrt_eigs[i] > 0.0 ? c[i] / sqrt_eigs[i] : 0.0;
    }
    return Eigen::VectorXd(u * scaled);
  };

  // Coarse scan, keeping the few best feasible grid points as starts.
  constexpr int kStarts = 5;
  std::vector<std::pair<double, Eigen::VectorXd>> starts;
  Eigen::VectorXd a(static_cast<Eigen::Index>(m));
  std::vector<int> idx(m, 0);
  const auto grid_value = [&](int i) {
    return -radius + 2.0 * radius * i / (grid_resolution - 1);
  };
  while (true) {
    for (std::size_t d = 0; d < m; ++d) a[static_cast<Eigen::Index>(d)] = grid_value(idx[d]);
    double obj;
    if (eval_point(a, obj)) {
      if (starts.size() < kStarts) {
        starts.emplace_back(obj, a);
        std::sort(starts.begin(), starts.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
      } else if (obj < starts.back().first) {
        starts.back() = {obj, a};
        std::sort(starts.begin(), starts.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
      }
    }
    std::size_t d = 0;
    while (d < m && ++idx[d] == grid_resolution) idx[d++] = 0;
    if (d == m) break;
  }
  // The origin is always feasible; include it in case the grid misses it.
  {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    double obj;
    eval_point(zero, obj);
    starts.emplace_back(obj, zero);
  }

  // Local refinement around each start, in c-space. Coordinate and
  // coordinate-pair line scans alone can stall on the kinks of the absolute
  // loss, so every round also scans a batch of seeded random directions; the
  // scan radius expands on improvement and shrinks otherwise.
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  const double sqrt_b = std::sqrt(b_budget);
  const double h = sqrt_b / (grid_resolution - 1);
  std::uint64_t start_index = 0;
  for (auto& [start_obj, start] : starts) {
    Rng dir_rng(0x9e3779b9u + start_index++);
    Eigen::VectorXd cur = sqrt_eigs.asDiagonal() * (u.transpose() * start);
    double cur_obj = start_obj;
    eval_projected_c(cur, cur_obj);
    double rho = 4.0 * h;
    for (int round = 0; round < 400 && rho > 1e-12 * sqrt_b; ++round) {
      bool improved = false;
      auto try_candidate = [&](Eigen::VectorXd cand) {
        double obj;
        eval_projected_c(cand, obj);
        if (obj < cur_obj) {
          cur_obj = obj;
          cur = cand;
          improved = true;
        }
      };
      auto line_scan = [&](const Eigen::VectorXd& dir) {
        for (int s = 0; s <= 32; ++s) {
          try_candidate(cur + rho * (s / 16.0 - 1.0) * dir);
        }
      };
      for (std::size_t d = 0; d < m; ++d) {
        line_scan(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(m),
                                        static_cast<Eigen::Index>(d)));
      }
      for (std::size_t d1 = 0; d1 + 1 < m; ++d1) {
        for (std::size_t d2 = d1 + 1; d2 < m; ++d2) {
          for (int s1 = 0; s1 <= 8; ++s1) {
            for (int s2 = 0; s2 <= 8; ++s2) {
              Eigen::VectorXd cand = cur;
              cand[static_cast<Eigen::Index>(d1)] += rho * (s1 / 4.0 - 1.0);
              cand[static_cast<Eigen::Index>(d2)] += rho * (s2 / 4.0 - 1.0);
              try_candidate(std::move(cand));
            }
          }
        }
      }
      for (int r = 0; r < 48; ++r) {
        Eigen::VectorXd dir(static_cast<Eigen::Index>(m));
        for (std::size_t d = 0; d < m; ++d) dir[static_cast<Eigen::Index>(d)] = dir_rng.normal();
        const double len = dir.norm();
        if (len > 1e-12) line_scan(dir / len);
      }
      // Valley floor: for every k, scan the null space of the k rows with
      // the smallest |residual| - the directions along which a polyhedral
      // descent path continues when kink hyperplanes are nearly parallel.
      {
        const Eigen::VectorXd r = pred_of_c * cur - y;
        std::vector<Eigen::Index> order(static_cast<std::size_t>(r.size()));
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
        std::sort(order.begin(), order.end(), [&r](Eigen::Index a, Eigen::Index b) {
          return std::abs(r[a]) < std::abs(r[b]);
        });
        Eigen::MatrixXd rows(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t k = 1; k < m; ++k) {
          rows.row(static_cast<Eigen::Index>(k) - 1) = pred_of_c.row(order[k - 1]);
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows.topRows(static_cast<Eigen::Index>(k)),
                                                Eigen::ComputeFullV);
          const auto& v = svd.matrixV();
          for (Eigen::Index j = svd.rank(); j < v.cols(); ++j) line_scan(v.col(j));
        }
      }
      rho = improved ? std::min(rho * 1.5, sqrt_b) : rho * 0.5;
    }
    if (cur_obj < best_obj) {
      best_obj = cur_obj;
      best_c = cur;
    }
  }

  const Eigen::VectorXd best_alpha = alpha_of_c(best_c);
  OracleResult result;
  result.alpha.assign(best_alpha.data(), best_alpha.data() + m);
  // Report the objective in the original coordinates; null-direction
  // components were frozen at zero so the two agree to rounding.
  double final_obj;
  if (!eval_point(best_alpha, final_obj)) final_obj = best_obj;
  result.objective = final_obj;
  return result;
}

}  // namespace khl
