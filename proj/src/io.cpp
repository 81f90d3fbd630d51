#include "khl/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <system_error>

#include <json.hpp>

namespace khl {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view field, const std::string& path, std::size_t line) {
  double v = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    parse_fail(path, line, "malformed number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& contents) {
  auto out = open_for_write(path);
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
  if (data.samples.empty()) throw std::invalid_argument("save_dataset_csv: empty dataset");
  const std::size_t dim = data.dim();
  std::ostringstream out;
  for (std::size_t d = 1; d <= dim; ++d) out << "x" << d << ",";
  out << "y\n";
  for (const auto& s : data.samples) {
    if (s.x.size() != dim) throw std::invalid_argument("save_dataset_csv: ragged dataset");
    for (double c : s.x) out << format_double(c) << ",";
    out << s.y << "\n";
  }
  write_text_file(path, out.str());
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  const auto header = split_csv(line);
  if (header.size() < 2 || header.back() != "y") {
    parse_fail(path, 1, "expected header x1,...,xd,y");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t d = 0; d < dim; ++d) {
    if (header[d] != "x" + std::to_string(d + 1)) {
      parse_fail(path, 1, "expected header x1,...,xd,y");
    }
  }

  Dataset data;
  data.provenance = path;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    const auto fields = split_csv(line);
    if (fields.size() != dim + 1) {
      parse_fail(path, line_no, "expected " + std::to_string(dim + 1) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    LabeledSample s;
    s.x.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      s.x.push_back(parse_double(fields[d], path, line_no));
    }
    if (fields[dim] == "0") {
      s.y = 0;
    } else if (fields[dim] == "1") {
      s.y = 1;
    } else {
      parse_fail(path, line_no, "label must be 0 or 1, got '" + std::string(fields[dim]) + "'");
    }
    try {
      s.x = unit_ball_point(std::move(s.x));
    } catch (const std::domain_error& e) {
      parse_fail(path, line_no, e.what());
    }
    data.samples.push_back(std::move(s));
  }
  if (data.samples.empty()) parse_fail(path, line_no, "dataset has no rows");
  return data;
}

void save_model_json(const DualPredictor& pred, const ModelMetadata& meta,
                     const std::string& path) {
  json j;
  j["nu"] = pred.spec.nu;
  j["B"] = pred.b_budget;
  j["alpha"] = pred.alpha;
  j["anchors"] = pred.anchors;
  j["metadata"] = {{"seed", meta.seed}, {"objective", meta.objective}};
  auto out = open_for_write(path);
  out << j.dump(2) << "\n";
}

LoadedModel load_model_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    KernelSpec spec;
    spec.nu = j.at("nu").get<double>();
    const double b = j.at("B").get<double>();
    auto alpha = j.at("alpha").get<std::vector<double>>();
    auto anchors = j.at("anchors").get<std::vector<Point>>();
    LoadedModel model;
    model.predictor = make_dual_predictor(std::move(alpha), std::move(anchors), spec, b);
    model.metadata.seed = j.at("metadata").at("seed").get<std::uint64_t>();
    model.metadata.objective = j.at("metadata").at("objective").get<double>();
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string approx_report_json(const PolynomialApprox& approx) {
  json j;
  j["format_version"] = 1;
  j["target"] = approx.target.variant == Transfer::Erf ? "erf" : "sig";
  j["lipschitz"] = approx.target.lipschitz;
  j["degree"] = approx.degree();
  j["coefficients"] = approx.beta;
  j["log_pb_norm"] = std::log(approx.pb_norm);
  j["sup_error"] = approx.sup_error;
  return j.dump(2) + "\n";
}

std::string error_report_json(const ErrorReport& report, double raw_objective) {
  json j;
  j["format_version"] = 1;
  j["abs_error"] = report.abs_error;
  j["zero_one_error"] = report.zero_one_error;
  j["objective"] = raw_objective;
  json margins = json::object();
  for (const auto& [mu, err] : report.margin_errors) {
    margins[format_double(mu)] = err;
  }
  j["margin_errors"] = margins;
  return j.dump(2) + "\n";
}

std::string error_report_csv(const ErrorReport& report, double raw_objective) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "abs_error," << format_double(report.abs_error) << "\n";
  out << "zero_one_error," << format_double(report.zero_one_error) << "\n";
  out << "objective," << format_double(raw_objective) << "\n";
  for (const auto& [mu, err] : report.margin_errors) {
    out << "margin_error_mu_" << format_double(mu) << "," << format_double(err) << "\n";
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "seed,B,train_objective,holdout_zero_one,selected\n";
  for (const auto& r : rows) {
    out << r.seed << "," << format_double(r.b_budget) << "," << format_double(r.train_objective)
        << "," << format_double(r.holdout_zero_one) << "," << (r.selected ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  json j;
  j["format_version"] = 1;
  j["cells"] = json::array();
  for (const auto& r : rows) {
    j["cells"].push_back({{"seed", r.seed},
                          {"B", r.b_budget},
                          {"train_objective", r.train_objective},
                          {"holdout_zero_one", r.holdout_zero_one},
                          {"selected", r.selected}});
  }
  return j.dump(2) + "\n";
}

}  // namespace khl
