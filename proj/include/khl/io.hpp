#pragma once

#include <cstdint>
#include <string>

#include "khl/eval.hpp"
#include "khl/polyspace.hpp"
#include "khl/solver.hpp"

namespace khl {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

// Dataset CSV: header "x1,...,xd,y", one sample per row, labels 0/1.
void save_dataset_csv(const Dataset& data, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

struct ModelMetadata {
  std::uint64_t seed = 0;
  double objective = 0.0;
};

// Model JSON: {nu, B, alpha[], anchors[][], metadata{seed, objective}}.
void save_model_json(const DualPredictor& pred, const ModelMetadata& meta,
                     const std::string& path);
struct LoadedModel {
  DualPredictor predictor;
  ModelMetadata metadata;
};
LoadedModel load_model_json(const std::string& path);

// Approximation report JSON (format_version 1): target, lipschitz, degree,
// coefficients, log_pb_norm, sup_error.
std::string approx_report_json(const PolynomialApprox& approx);

// Error report as JSON (format_version 1) and as flat metric,value CSV.
std::string error_report_json(const ErrorReport& report, double raw_objective);
std::string error_report_csv(const ErrorReport& report, double raw_objective);

struct SweepRow {
  std::uint64_t seed = 0;
  double b_budget = 0.0;
  double train_objective = 0.0;
  double holdout_zero_one = 0.0;
  bool selected = false;
};

// Sweep CSV: header "seed,B,train_objective,holdout_zero_one,selected".
std::string sweep_csv(const std::vector<SweepRow>& rows);
// Same rows as JSON (format_version 1).
std::string sweep_json(const std::vector<SweepRow>& rows);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace khl
