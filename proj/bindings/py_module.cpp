#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "khl/eval.hpp"
#include "khl/io.hpp"
#include "khl/kernel.hpp"
#include "khl/polyspace.hpp"
#include "khl/solver.hpp"
#include "khl/transfer.hpp"

namespace py = pybind11;
using namespace khl;

PYBIND11_MODULE(_khl, m) {
  m.doc() = "kernel halfspace learning with the zero-one loss";

  py::enum_<Transfer>(m, "Transfer")
      .value("ZeroOne", Transfer::ZeroOne)
      .value("Sigmoid", Transfer::Sigmoid)
      .value("Erf", Transfer::Erf)
      .value("PiecewiseLinear", Transfer::PiecewiseLinear);

  py::class_<TransferKind>(m, "TransferKind")
      .def_readonly("variant", &TransferKind::variant)
      .def_readonly("lipschitz", &TransferKind::lipschitz)
      .def_static("zero_one", &TransferKind::zero_one)
      .def_static("sigmoid", &TransferKind::sigmoid, py::arg("lipschitz"))
      .def_static("erf", &TransferKind::erf, py::arg("lipschitz"))
      .def_static("piecewise_linear", &TransferKind::piecewise_linear, py::arg("lipschitz"));

  m.def("eval_transfer", &eval_transfer, py::arg("kind"), py::arg("a"));
  m.def("lipschitz_check", &lipschitz_check, py::arg("kind"), py::arg("grid"));

  py::enum_<BaseKernel>(m, "BaseKernel").value("LinearDot", BaseKernel::LinearDot);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init([](double nu) {
             KernelSpec spec;
             spec.nu = nu;
             return spec;
           }),
           py::arg("nu") = 0.5)
      .def_readwrite("nu", &KernelSpec::nu);

  py::class_<GramMatrix>(m, "GramMatrix")
      .def_readonly("size", &GramMatrix::size)
      .def_readonly("entries", &GramMatrix::entries)
      .def_readonly("spec", &GramMatrix::spec)
      .def("at", &GramMatrix::at, py::arg("i"), py::arg("j"));

  m.def("composed_kernel", &composed_kernel, py::arg("x"), py::arg("y"),
        py::arg("spec") = KernelSpec{});
  m.def("gram", &gram, py::arg("points"), py::arg("spec") = KernelSpec{});
  m.def("truncated_kernel", &truncated_kernel, py::arg("x"), py::arg("y"), py::arg("degree"));
  m.def("explicit_feature_map", &explicit_feature_map, py::arg("x"), py::arg("degree"),
        py::arg("max_entries") = std::size_t{10'000'000});
  m.def("gram_eigenvalues", &gram_eigenvalues, py::arg("gram"));
  m.def("unit_ball_point", &unit_ball_point, py::arg("x"));

  py::class_<PolynomialApprox>(m, "PolynomialApprox")
      .def_readonly("beta", &PolynomialApprox::beta)
      .def_readonly("pb_norm", &PolynomialApprox::pb_norm)
      .def_readonly("sup_error", &PolynomialApprox::sup_error)
      .def_readonly("target", &PolynomialApprox::target)
      .def("degree", &PolynomialApprox::degree);

  py::class_<LogBudget>(m, "LogBudget")
      .def(py::init([](double log_b) { return LogBudget{log_b, false}; }), py::arg("log_b"))
      .def_readonly("log_b", &LogBudget::log_b)
      .def_readonly("below_min_lipschitz", &LogBudget::below_min_lipschitz);

  m.def("pb_norm", &pb_norm, py::arg("beta"));
  m.def("b_bound_sigmoid", &b_bound_sigmoid, py::arg("lipschitz"), py::arg("eps"));
  m.def("approx_sigmoid_chebyshev", &approx_sigmoid_chebyshev, py::arg("lipschitz"),
        py::arg("eps"), py::arg("grid_size") = 10001, py::arg("degree_cap") = 60);
  m.def("erf_taylor_coeffs", &erf_taylor_coeffs, py::arg("lipschitz"), py::arg("degree"),
        py::arg("grid_size") = 10001);
  m.def("horner", &horner, py::arg("beta"), py::arg("a"));

  py::enum_<StepSchedule>(m, "StepSchedule")
      .value("Constant", StepSchedule::Constant)
      .value("InverseSqrt", StepSchedule::InverseSqrt);
  py::enum_<BatchMode>(m, "BatchMode")
      .value("Full", BatchMode::Full)
      .value("SingleSample", BatchMode::SingleSample);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("max_iters", &SolverOptions::max_iters)
      .def_readwrite("schedule", &SolverOptions::schedule)
      .def_readwrite("step_constant", &SolverOptions::step_constant)
      .def_readwrite("seed", &SolverOptions::seed)
      .def_readwrite("tolerance", &SolverOptions::tolerance)
      .def_readwrite("batch", &SolverOptions::batch);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("final_objective", &SolveReport::final_objective)
      .def_readonly("objective_trace", &SolveReport::objective_trace)
      .def_readonly("iters_used", &SolveReport::iters_used)
      .def_readonly("constraint_active", &SolveReport::constraint_active);

  py::class_<DualPredictor>(m, "DualPredictor")
      .def_readonly("alpha", &DualPredictor::alpha)
      .def_readonly("anchors", &DualPredictor::anchors)
      .def_readonly("spec", &DualPredictor::spec)
      .def_readonly("b_budget", &DualPredictor::b_budget);

  m.def("objective", &objective, py::arg("alpha"), py::arg("gram"), py::arg("labels"));
  m.def("solve_erm", &solve_erm, py::arg("gram"), py::arg("labels"), py::arg("b_budget"),
        py::arg("opts") = SolverOptions{}, py::arg("anchors") = std::vector<Point>{});
  m.def("predict_raw", &predict_raw, py::arg("pred"), py::arg("x"));
  m.def("predict_prob", &predict_prob, py::arg("pred"), py::arg("x"));
  m.def("predict_label", &predict_label, py::arg("pred"), py::arg("x"));
  m.def("make_dual_predictor", &make_dual_predictor, py::arg("alpha"), py::arg("anchors"),
        py::arg("spec"), py::arg("b_budget"));

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("alpha", &OracleResult::alpha)
      .def_readonly("objective", &OracleResult::objective);
  m.def("exhaustive_erm_small", &exhaustive_erm_small, py::arg("gram"), py::arg("labels"),
        py::arg("b_budget"), py::arg("grid_resolution"));

  py::class_<LabeledSample>(m, "LabeledSample")
      .def(py::init([](Point x, int y) { return LabeledSample{std::move(x), y}; }), py::arg("x"),
           py::arg("y"))
      .def_readonly("x", &LabeledSample::x)
      .def_readonly("y", &LabeledSample::y);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("samples", &Dataset::samples)
      .def_readwrite("provenance", &Dataset::provenance)
      .def("size", &Dataset::size)
      .def("dim", &Dataset::dim);

  py::enum_<LabelNoise>(m, "LabelNoise")
      .value("Probabilistic", LabelNoise::Probabilistic)
      .value("DeterministicThreshold", LabelNoise::DeterministicThreshold);

  py::class_<GeneratorSpec>(m, "GeneratorSpec")
      .def(py::init<>())
      .def_readwrite("dim", &GeneratorSpec::dim)
      .def_readwrite("w_star", &GeneratorSpec::w_star)
      .def_readwrite("transfer", &GeneratorSpec::transfer)
      .def_readwrite("label_noise", &GeneratorSpec::label_noise)
      .def_readwrite("seed", &GeneratorSpec::seed);

  m.def("generate", &generate, py::arg("spec"), py::arg("m"));
  m.def("abs_error", &abs_error, py::arg("predict_prob"), py::arg("data"));
  m.def("zero_one_error", &zero_one_error, py::arg("predict_label"), py::arg("data"));
  m.def("margin_error", &margin_error, py::arg("w"), py::arg("mu"), py::arg("data"));
  m.def("sample_size_hphi", &sample_size_hphi, py::arg("lipschitz"), py::arg("eps"),
        py::arg("delta"));

  py::enum_<SampleBoundVariant>(m, "SampleBoundVariant")
      .value("Erm", SampleBoundVariant::Erm)
      .value("Mainres", SampleBoundVariant::Mainres);

  py::class_<SampleSize>(m, "SampleSize")
      .def_readonly("m", &SampleSize::m)
      .def_readonly("overflow", &SampleSize::overflow);

  m.def("sample_size_hb",
        py::overload_cast<double, double, double, SampleBoundVariant>(&sample_size_hb),
        py::arg("b_budget"), py::arg("eps"), py::arg("delta"), py::arg("variant"));
  m.def("sample_size_hb",
        py::overload_cast<const LogBudget&, double, double, SampleBoundVariant>(&sample_size_hb),
        py::arg("b_budget"), py::arg("eps"), py::arg("delta"), py::arg("variant"));
  m.def("sample_size_hb_real", &sample_size_hb_real, py::arg("b_budget"), py::arg("eps"),
        py::arg("delta"), py::arg("variant"));

  py::enum_<MarginTransfer>(m, "MarginTransfer")
      .value("PiecewiseLinear", MarginTransfer::PiecewiseLinear)
      .value("Sigmoid", MarginTransfer::Sigmoid);

  m.def("l_for_margin", &l_for_margin, py::arg("transfer"), py::arg("mu"), py::arg("eps") = 0.0);

  py::class_<DominationReport>(m, "DominationReport")
      .def_readonly("violations", &DominationReport::violations)
      .def_readonly("max_excess", &DominationReport::max_excess)
      .def_readonly("mean_loss", &DominationReport::mean_loss)
      .def_readonly("margin_error_rate", &DominationReport::margin_error_rate)
      .def_readonly("eps_slack", &DominationReport::eps_slack);

  m.def("margin_domination_check", &margin_domination_check, py::arg("w"), py::arg("mu"),
        py::arg("data"), py::arg("transfer"), py::arg("eps") = 0.0);

  py::class_<CrossValRow>(m, "CrossValRow")
      .def_readonly("b_budget", &CrossValRow::b_budget)
      .def_readonly("train_objective", &CrossValRow::train_objective)
      .def_readonly("holdout_zero_one", &CrossValRow::holdout_zero_one)
      .def_readonly("selected", &CrossValRow::selected);

  py::class_<CrossValResult>(m, "CrossValResult")
      .def_readonly("best_b", &CrossValResult::best_b)
      .def_readonly("predictor", &CrossValResult::predictor)
      .def_readonly("rows", &CrossValResult::rows);

  m.def("cross_validate_b", &cross_validate_b, py::arg("train"), py::arg("holdout"),
        py::arg("b_grid"), py::arg("opts"), py::arg("spec") = KernelSpec{});
  m.def("split_dataset", &split_dataset, py::arg("data"), py::arg("holdout_fraction"),
        py::arg("split_seed"));

  m.def("save_dataset_csv", &save_dataset_csv, py::arg("data"), py::arg("path"));
  m.def("load_dataset_csv", &load_dataset_csv, py::arg("path"));
  m.def("save_model_json",
        [](const DualPredictor& pred, std::uint64_t seed, double objective,
           const std::string& path) {
          save_model_json(pred, ModelMetadata{seed, objective}, path);
        },
        py::arg("pred"), py::arg("seed"), py::arg("objective"), py::arg("path"));
  m.def("load_model_json", [](const std::string& path) {
    auto model = load_model_json(path);
    return py::make_tuple(std::move(model.predictor), model.metadata.seed,
                          model.metadata.objective);
  }, py::arg("path"));
}
