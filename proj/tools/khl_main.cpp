// khl: learn kernel halfspaces by absolute-loss ERM over a norm ball in the
// composed-kernel RKHS. Subcommands: gen, train, eval, sweep, approx, bounds.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "khl/errors.hpp"
#include "khl/eval.hpp"
#include "khl/io.hpp"
#include "khl/kernel.hpp"
#include "khl/polyspace.hpp"
#include "khl/solver.hpp"
#include "khl/transfer.hpp"

namespace {

using namespace khl;

struct GenConfig {
  int dim = 2;
  std::int64_t m = 0;
  std::string transfer = "sig";
  double lipschitz = 3.0;
  std::string labels = "prob";
  std::uint64_t seed = 0;
  std::vector<double> w_star;
  std::string out;
};

struct TrainConfig {
  std::string data;
  double b_budget = 0.0;
  double log_b = std::numeric_limits<double>::quiet_NaN();
  double nu = 0.5;
  std::uint64_t seed = 0;
  std::int64_t max_iters = 2000;
  std::string step = "invsqrt";
  double step_c = 0.0;
  std::string batch = "full";
  double tolerance = 1e-3;
  std::string out;
};

struct EvalConfig {
  std::string model;
  std::string data;
  std::vector<double> mus;
  std::vector<double> margin_w;
  std::string json_out;
  std::string csv_out;
};

struct SweepConfig {
  int dim = 5;
  std::int64_t m = 2000;
  std::string transfer = "sig";
  double lipschitz = 3.0;
  std::string labels = "prob";
  std::vector<double> grid = {1.0, 10.0, 100.0, 1000.0, 10000.0};
  int seeds = 5;
  std::uint64_t seed_base = 0;
  double holdout_frac = 0.2;
  double nu = 0.5;
  std::int64_t max_iters = 2000;
  std::uint64_t solver_seed = 0;
  std::string out;
  std::string json_out;
};

struct ApproxConfig {
  std::string target = "sig";
  double lipschitz = 3.0;
  double eps = 0.05;
  int degree = 61;
  int grid_size = 10001;
  std::string out;
};

struct BoundsConfig {
  double lipschitz = 3.0;
  double eps = 0.1;
  double delta = 0.05;
  double mu = 0.0;
  double b_budget = 0.0;
};

// Expands "--config FILE" into "--key=value" tokens inserted right after the
// subcommand, so that explicitly passed flags (parsed later, take-last
// policy) override the file. The file is flat key=value, '#' comments.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2) return args;

  std::string config_path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.find('=') == std::string::npos) {
      throw std::runtime_error("config file '" + config_path + "': expected key=value, got '" +
                               line + "'");
    }
    injected.push_back("--" + line);
  }
  args.insert(args.begin() + 2, injected.begin(), injected.end());
  return args;
}

TransferKind make_transfer(const std::string& name, double lipschitz) {
  if (name == "zeroone") return TransferKind::zero_one();
  if (name == "sig") return TransferKind::sigmoid(lipschitz);
  if (name == "erf") return TransferKind::erf(lipschitz);
  if (name == "pw") return TransferKind::piecewise_linear(lipschitz);
  throw std::invalid_argument("unknown transfer '" + name + "'");
}

SolverOptions solver_options(std::int64_t max_iters, const std::string& step, double step_c,
                             const std::string& batch, double tolerance, std::uint64_t seed) {
  SolverOptions opts;
  opts.max_iters = max_iters;
  opts.schedule = step == "constant" ? StepSchedule::Constant : StepSchedule::InverseSqrt;
  opts.step_constant = step_c;
  opts.batch = batch == "single" ? BatchMode::SingleSample : BatchMode::Full;
  opts.tolerance = tolerance;
  opts.seed = seed;
  return opts;
}

GeneratorSpec generator_spec(int dim, const std::string& transfer, double lipschitz,
                             const std::string& labels, std::uint64_t seed,
                             std::vector<double> w_star) {
  GeneratorSpec spec;
  spec.dim = dim;
  if (w_star.empty()) {
    spec.w_star = Point(static_cast<std::size_t>(dim), 0.0);
    spec.w_star[0] = 1.0;
  } else {
    spec.w_star = std::move(w_star);
  }
  spec.transfer = make_transfer(transfer, lipschitz);
  spec.label_noise =
      labels == "det" ? LabelNoise::DeterministicThreshold : LabelNoise::Probabilistic;
  spec.seed = seed;
  return spec;
}

int cmd_gen(const GenConfig& cfg) {
  const GeneratorSpec spec =
      generator_spec(cfg.dim, cfg.transfer, cfg.lipschitz, cfg.labels, cfg.seed, cfg.w_star);
  const Dataset data = generate(spec, cfg.m);
  save_dataset_csv(data, cfg.out);
  std::int64_t positives = 0;
  for (const auto& s : data.samples) positives += s.y;
  std::cout << "wrote " << cfg.out << ": m=" << data.size() << " dim=" << data.dim()
            << " positives=" << positives << " ("
            << format_double(static_cast<double>(positives) / static_cast<double>(data.size()))
            << ")\n";
  return 0;
}

int cmd_train(const TrainConfig& cfg) {
  // Worst-case budgets blow up the step scale long before they overflow a
  // double; reject anything beyond float range and point at cross-validation.
  const double b_cap = std::numeric_limits<float>::max();
  double b = cfg.b_budget;
  if (!std::isnan(cfg.log_b)) {
    if (cfg.log_b > std::log(b_cap)) {
      throw std::runtime_error(
          "log-B " + format_double(cfg.log_b) +
          " exceeds the float range; worst-case budgets are not trainable directly -- "
          "cross-validate a practical B with 'khl sweep'");
    }
    b = std::exp(cfg.log_b);
  }
  if (b > b_cap) {
    throw std::runtime_error(
        "B " + format_double(b) +
        " exceeds the float range; worst-case budgets are not trainable directly -- "
        "cross-validate a practical B with 'khl sweep'");
  }

  const Dataset data = load_dataset_csv(cfg.data);
  std::vector<Point> points;
  std::vector<int> labels;
  points.reserve(data.size());
  for (const auto& s : data.samples) {
    points.push_back(s.x);
    labels.push_back(s.y);
  }
  KernelSpec spec;
  spec.nu = cfg.nu;
  const GramMatrix g = gram(points, spec);
  const SolverOptions opts =
      solver_options(cfg.max_iters, cfg.step, cfg.step_c, cfg.batch, cfg.tolerance, cfg.seed);
  const auto [pred, report] = solve_erm(g, labels, b, opts, points);
  save_model_json(pred, ModelMetadata{cfg.seed, report.final_objective}, cfg.out);
  std::cout << "trained on " << cfg.data << ": m=" << data.size() << " B=" << format_double(b)
            << "\n  objective=" << format_double(report.final_objective)
            << " iters=" << report.iters_used
            << " constraint_active=" << (report.constraint_active ? "yes" : "no") << "\n  model -> "
            << cfg.out << "\n";
  return 0;
}

int cmd_eval(const EvalConfig& cfg) {
  const LoadedModel model = load_model_json(cfg.model);
  const Dataset data = load_dataset_csv(cfg.data);
  if (!model.predictor.anchors.empty() && model.predictor.anchors.front().size() != data.dim()) {
    throw std::runtime_error("model dimension " +
                             std::to_string(model.predictor.anchors.front().size()) +
                             " does not match dataset dimension " + std::to_string(data.dim()));
  }

  ErrorReport report;
  double raw_objective = 0.0;
  for (const auto& s : data.samples) {
    const double raw = predict_raw(model.predictor, s.x);
    raw_objective += std::abs(raw - s.y);
    report.abs_error += std::abs(std::clamp(raw, 0.0, 1.0) - s.y);
    report.zero_one_error += (raw >= 0.5 ? 1 : 0) != s.y;
  }
  const auto m = static_cast<double>(data.size());
  raw_objective /= m;
  report.abs_error /= m;
  report.zero_one_error /= m;

  if (!cfg.mus.empty()) {
    if (cfg.margin_w.empty()) {
      throw std::runtime_error("--mu requires --margin-w (a unit-norm halfspace direction)");
    }
    for (double mu : cfg.mus) {
      report.margin_errors[mu] = margin_error(cfg.margin_w, mu, data);
    }
  }

  std::cout << "abs_error=" << format_double(report.abs_error)
            << "\nzero_one_error=" << format_double(report.zero_one_error)
            << "\nobjective=" << format_double(raw_objective) << "\n";
  for (const auto& [mu, err] : report.margin_errors) {
    std::cout << "margin_error(mu=" << format_double(mu) << ")=" << format_double(err) << "\n";
  }
  if (!cfg.json_out.empty()) write_text_file(cfg.json_out, error_report_json(report, raw_objective));
  if (!cfg.csv_out.empty()) write_text_file(cfg.csv_out, error_report_csv(report, raw_objective));
  return 0;
}

int cmd_sweep(const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  for (int s = 0; s < cfg.seeds; ++s) {
    const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(s);
    const GeneratorSpec spec =
        generator_spec(cfg.dim, cfg.transfer, cfg.lipschitz, cfg.labels, seed, {});
    const Dataset data = generate(spec, cfg.m);
    // split seed decoupled from the generator stream
    const auto [train, holdout] = split_dataset(data, cfg.holdout_frac, seed ^ 0x5feed5eedULL);
    const SolverOptions opts =
        solver_options(cfg.max_iters, "invsqrt", 0.0, "full", 1e-3, cfg.solver_seed);
    KernelSpec kspec;
    kspec.nu = cfg.nu;
    const CrossValResult result = cross_validate_b(train, holdout, cfg.grid, opts, kspec);
    for (const auto& row : result.rows) {
      rows.push_back(SweepRow{seed, row.b_budget, row.train_objective, row.holdout_zero_one,
                              row.selected});
    }
  }
  write_text_file(cfg.out, sweep_csv(rows));
  if (!cfg.json_out.empty()) write_text_file(cfg.json_out, sweep_json(rows));
  std::cout << "wrote " << cfg.out << ": " << rows.size() << " rows ("
            << cfg.seeds << " seeds x " << rows.size() / std::max(cfg.seeds, 1) << " B values)\n";
  return 0;
}

int cmd_approx(const ApproxConfig& cfg) {
  PolynomialApprox approx;
  if (cfg.target == "sig") {
    approx = approx_sigmoid_chebyshev(cfg.lipschitz, cfg.eps, cfg.grid_size);
  } else if (cfg.target == "erf") {
    approx = erf_taylor_coeffs(cfg.lipschitz, cfg.degree, cfg.grid_size);
  } else {
    throw std::invalid_argument("unknown approximation target '" + cfg.target + "'");
  }
  std::cout << "target=" << cfg.target << " L=" << format_double(cfg.lipschitz)
            << " degree=" << approx.degree()
            << "\nsup_error=" << format_double(approx.sup_error)
            << "\nlog_pb_norm=" << format_double(std::log(approx.pb_norm)) << "\n";
  if (!cfg.out.empty()) {
    write_text_file(cfg.out, approx_report_json(approx));
    std::cout << "report -> " << cfg.out << "\n";
  }
  return 0;
}

int cmd_bounds(const BoundsConfig& cfg) {
  const auto print = [](const std::string& name, const std::string& value) {
    std::cout << name;
    for (std::size_t i = name.size(); i < 34; ++i) std::cout << ' ';
    std::cout << value << "\n";
  };
  const auto sample_str = [](const SampleSize& s) {
    return s.overflow ? std::string("overflow (> 2^63 - 1)") : std::to_string(s.m);
  };

  print("m_hphi(L,eps,delta)", std::to_string(sample_size_hphi(cfg.lipschitz, cfg.eps, cfg.delta)));
  const LogBudget budget = b_bound_sigmoid(cfg.lipschitz, cfg.eps);
  print("log_B_sigmoid(L,eps)",
        format_double(budget.log_b) + (budget.below_min_lipschitz ? "  [warning: L < 3]" : ""));
  print("m_hb_erm(worst-case B)",
        sample_str(sample_size_hb(budget, cfg.eps, cfg.delta, SampleBoundVariant::Erm)));
  print("m_hb_mainres(worst-case B)",
        sample_str(sample_size_hb(budget, cfg.eps, cfg.delta, SampleBoundVariant::Mainres)));
  if (cfg.b_budget > 0.0) {
    print("m_hb_erm(B)",
          sample_str(sample_size_hb(cfg.b_budget, cfg.eps, cfg.delta, SampleBoundVariant::Erm)));
    print("m_hb_mainres(B)",
          sample_str(
              sample_size_hb(cfg.b_budget, cfg.eps, cfg.delta, SampleBoundVariant::Mainres)));
  }
  if (cfg.mu > 0.0) {
    print("L_pw(mu)", format_double(l_for_margin(MarginTransfer::PiecewiseLinear, cfg.mu)));
    print("L_sig(mu,eps)",
          format_double(l_for_margin(MarginTransfer::Sigmoid, cfg.mu, cfg.eps)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel halfspace learning with the zero-one loss"};
  app.require_subcommand(1);
  std::string config_path;  // shared sink; only the active subcommand reads one

  GenConfig gen_cfg;
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
  gen->add_option("--dim", gen_cfg.dim, "ambient dimension")->check(CLI::PositiveNumber);
  gen->add_option("--m", gen_cfg.m, "number of samples")->required()->check(CLI::PositiveNumber);
  gen->add_option("--transfer", gen_cfg.transfer, "zeroone|sig|erf|pw")
      ->check(CLI::IsMember({"zeroone", "sig", "erf", "pw"}));
  gen->add_option("--L", gen_cfg.lipschitz, "Lipschitz constant")->check(CLI::NonNegativeNumber);
  gen->add_option("--labels", gen_cfg.labels, "prob|det")->check(CLI::IsMember({"prob", "det"}));
  gen->add_option("--seed", gen_cfg.seed, "generator seed");
  gen->add_option("--wstar", gen_cfg.w_star, "target direction (default e1)")->delimiter(',');
  gen->add_option("--out", gen_cfg.out, "output CSV path")->required();

  TrainConfig train_cfg;
  auto* train = app.add_subcommand("train", "solve the dual ERM and write a model JSON");
  train->add_option("--data", train_cfg.data, "training dataset CSV")->required();
  auto* b_opt = train->add_option("--B", train_cfg.b_budget, "norm budget B");
  auto* logb_opt = train->add_option("--log-B", train_cfg.log_b, "natural log of B");
  b_opt->excludes(logb_opt);
  logb_opt->excludes(b_opt);
  train->add_option("--nu", train_cfg.nu, "kernel composition parameter");
  train->add_option("--seed", train_cfg.seed, "solver seed");
  train->add_option("--max-iters", train_cfg.max_iters, "iteration budget")
      ->check(CLI::PositiveNumber);
  train->add_option("--step", train_cfg.step, "constant|invsqrt")
      ->check(CLI::IsMember({"constant", "invsqrt"}));
  train->add_option("--step-c", train_cfg.step_c, "step constant (0 = auto)");
  train->add_option("--batch", train_cfg.batch, "full|single")
      ->check(CLI::IsMember({"full", "single"}));
  train->add_option("--tolerance", train_cfg.tolerance, "solver tolerance");
  train->add_option("--out", train_cfg.out, "output model path")->required();

  EvalConfig eval_cfg;
  auto* evalc = app.add_subcommand("eval", "score a model on a dataset");
  evalc->add_option("--model", eval_cfg.model, "model JSON path")->required();
  evalc->add_option("--data", eval_cfg.data, "dataset CSV path")->required();
  evalc->add_option("--mu", eval_cfg.mus, "margin values")->delimiter(',');
  evalc->add_option("--margin-w", eval_cfg.margin_w, "halfspace direction for margin errors")
      ->delimiter(',');
  evalc->add_option("--json", eval_cfg.json_out, "write the report as JSON");
  evalc->add_option("--csv", eval_cfg.csv_out, "write the report as CSV");

  SweepConfig sweep_cfg;
  auto* sweep = app.add_subcommand("sweep", "cross-validate B over a seed matrix");
  sweep->add_option("--dim", sweep_cfg.dim, "ambient dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--m", sweep_cfg.m, "samples per seed")->check(CLI::PositiveNumber);
  sweep->add_option("--transfer", sweep_cfg.transfer, "zeroone|sig|erf|pw")
      ->check(CLI::IsMember({"zeroone", "sig", "erf", "pw"}));
  sweep->add_option("--L", sweep_cfg.lipschitz, "Lipschitz constant")
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--labels", sweep_cfg.labels, "prob|det")
      ->check(CLI::IsMember({"prob", "det"}));
  sweep->add_option("--grid", sweep_cfg.grid, "B grid")->delimiter(',');
  sweep->add_option("--seeds", sweep_cfg.seeds, "number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("--seed-base", sweep_cfg.seed_base, "first generator seed");
  sweep->add_option("--holdout-frac", sweep_cfg.holdout_frac, "holdout fraction");
  sweep->add_option("--nu", sweep_cfg.nu, "kernel composition parameter");
  sweep->add_option("--max-iters", sweep_cfg.max_iters, "iteration budget per B")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--solver-seed", sweep_cfg.solver_seed, "solver seed");
  sweep->add_option("--out", sweep_cfg.out, "output CSV path")->required();
  sweep->add_option("--json", sweep_cfg.json_out, "also write the report as JSON");

  ApproxConfig approx_cfg;
  auto* approx = app.add_subcommand("approx", "polynomial approximation reports");
  approx->add_option("--target", approx_cfg.target, "sig|erf")
      ->check(CLI::IsMember({"sig", "erf"}));
  approx->add_option("--L", approx_cfg.lipschitz, "Lipschitz constant")
      ->check(CLI::NonNegativeNumber);
  approx->add_option("--eps", approx_cfg.eps, "target sup error (sig)");
  approx->add_option("--degree", approx_cfg.degree, "truncation degree (erf, odd)");
  approx->add_option("--grid-size", approx_cfg.grid_size, "measurement grid size");
  approx->add_option("--out", approx_cfg.out, "output JSON path");

  BoundsConfig bounds_cfg;
  auto* bounds = app.add_subcommand("bounds", "closed-form sample sizes and budgets");
  bounds->add_option("--L", bounds_cfg.lipschitz, "Lipschitz constant");
  bounds->add_option("--eps", bounds_cfg.eps, "accuracy eps");
  bounds->add_option("--delta", bounds_cfg.delta, "confidence delta");
  bounds->add_option("--mu", bounds_cfg.mu, "margin (adds the L conversions)");
  bounds->add_option("--B", bounds_cfg.b_budget, "practical budget (adds its sample sizes)");

  for (auto* sub : app.get_subcommands({})) {
    sub->add_option("--config", config_path, "flat key=value config file (flags override it)");
    for (auto* opt : sub->get_options()) {
      if (opt->get_expected_min() > 0) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    args.erase(args.begin());  // program name
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_cfg);
    if (train->parsed()) {
      if (!b_opt->count() && !logb_opt->count()) {
        std::cerr << "error: one of --B or --log-B is required\n";
        return 2;
      }
      if (b_opt->count() && !(train_cfg.b_budget > 0.0)) {
        std::cerr << "error: --B must be positive\n";
        return 2;
      }
      return cmd_train(train_cfg);
    }
    if (evalc->parsed()) return cmd_eval(eval_cfg);
    if (sweep->parsed()) return cmd_sweep(sweep_cfg);
    if (approx->parsed()) return cmd_approx(approx_cfg);
    if (bounds->parsed()) return cmd_bounds(bounds_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
