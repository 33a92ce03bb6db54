#include "forgecast/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;

namespace {

using namespace forgecast;

Dataset dataset_from(const Matrix& features, const Vector& labels) {
  return Dataset(features, labels);
}

SplitSpec split_from(Index total, Index train_end, Index valid_len, Index test_len) {
  return make_split(total, train_end, valid_len, test_len);
}

ForgettingParams params_from(const std::string& kind, const Vector& eta) {
  ForgettingParams p;
  p.kind = mechanism_from_string(kind);
  p.eta = eta;
  if (p.eta.size() != param_dim(p.kind)) {
    throw std::invalid_argument("eta has the wrong length for mechanism " + kind);
  }
  return p;
}

WilcoxonMode wilcoxon_mode_from(const std::string& mode) {
  if (mode == "auto") return WilcoxonMode::Auto;
  if (mode == "exact") return WilcoxonMode::Exact;
  if (mode == "normal") return WilcoxonMode::Normal;
  throw std::invalid_argument("wilcoxon mode must be auto|exact|normal");
}

}  // namespace

PYBIND11_MODULE(_forgecast, m) {
  m.doc() = "Time-series prediction under distribution shift via learned forgetting "
            "mechanisms: weighted ridge regression, implicit bilevel gradients, "
            "baselines, and the experiment harness.";

  m.def(
      "generate",
      [](const std::string& kind, std::uint64_t seed, Index length, double noise_sd) {
        SeriesSpec spec{dgp_from_string(kind), length, noise_sd};
        spec.validate();
        const RawSeries series = generate(spec, seed);
        py::dict out;
        out["y"] = series.y;
        out["theta"] = series.theta;
        out["regime"] = series.regime;
        return out;
      },
      py::arg("kind"), py::arg("seed"), py::arg("length") = 3000, py::arg("noise_sd") = 0.05,
      "Draw a synthetic AR(1) series under the named drift setting.");

  m.def(
      "to_supervised",
      [](const std::vector<double>& y, int lags) {
        const Dataset ds = make_lag_dataset(y, lags);
        return py::make_tuple(ds.features(), ds.labels());
      },
      py::arg("y"), py::arg("lags") = 3,
      "Lagged autoregressive design: returns (features, labels).");

  m.def(
      "weight_vector",
      [](const std::string& kind, const Vector& eta, const Array& ages) {
        return weight_vector(params_from(kind, eta), ages);
      },
      py::arg("kind"), py::arg("eta"), py::arg("ages"));

  m.def(
      "weight_jacobian",
      [](const std::string& kind, const Vector& eta, const Array& ages) {
        return weight_jacobian(params_from(kind, eta), ages);
      },
      py::arg("kind"), py::arg("eta"), py::arg("ages"));

  m.def(
      "solve_ridge",
      [](const Matrix& features, const Vector& labels, const Array& weights, double penalty) {
        const Dataset ds = dataset_from(features, labels);
        const RidgeSolution sol =
            solve_prefix(ds, ds.size(), weights, SolverConfig{penalty, HessianMode::Exact});
        return sol.theta;
      },
      py::arg("features"), py::arg("labels"), py::arg("weights"), py::arg("penalty") = 0.0,
      "Closed-form weighted ridge coefficients.");

  m.def(
      "upper_gradient",
      [](const std::string& kind, const Vector& eta, const Matrix& features,
         const Vector& labels, Index train_end, Index valid_len, double penalty,
         const std::string& hessian) {
        const Dataset ds = dataset_from(features, labels);
        const SplitSpec split = make_split(ds.size(), train_end, valid_len,
                                           std::max<Index>(1, ds.size() - train_end - valid_len));
        std::vector<Index> subset(static_cast<std::size_t>(split.valid_size()));
        std::iota(subset.begin(), subset.end(), split.train_end);
        const UpperGradient g =
            upper_gradient(params_from(kind, eta), ds, split, subset,
                           SolverConfig{penalty, hessian_mode_from_string(hessian)});
        return py::make_tuple(g.gradient, g.valid_loss);
      },
      py::arg("kind"), py::arg("eta"), py::arg("features"), py::arg("labels"),
      py::arg("train_end"), py::arg("valid_len"), py::arg("penalty") = 0.0,
      py::arg("hessian") = "exact",
      "Total derivative of the validation loss with respect to eta, plus the loss.");

  m.def(
      "fit_forgetting",
      [](const Matrix& features, const Vector& labels, Index train_end, Index valid_len,
         const std::string& kind, double penalty, const std::string& hessian, double step_size,
         double momentum, int epochs, int batch_size, int restarts, std::uint64_t seed) {
        const Dataset ds = dataset_from(features, labels);
        const SplitSpec split = make_split(ds.size(), train_end, valid_len,
                                           std::max<Index>(1, ds.size() - train_end - valid_len));
        OptimizerConfig opt;
        opt.step_size = step_size;
        opt.momentum = momentum;
        opt.epochs = epochs;
        opt.batch_size = batch_size;
        opt.restarts = restarts;
        opt.rng_seed = seed;
        const BilevelResult result =
            fit(ds, split, mechanism_from_string(kind),
                SolverConfig{penalty, hessian_mode_from_string(hessian)}, opt);
        py::dict out;
        out["eta"] = result.best_eta.eta;
        out["valid_loss"] = result.best_valid_loss;
        out["theta"] = result.final_model.theta;
        out["best_restart"] = result.best_restart;
        return out;
      },
      py::arg("features"), py::arg("labels"), py::arg("train_end"), py::arg("valid_len"),
      py::arg("kind") = "exponential", py::arg("penalty") = 1e-4, py::arg("hessian") = "exact",
      py::arg("step_size") = 0.1, py::arg("momentum") = 0.9, py::arg("epochs") = 50,
      py::arg("batch_size") = 32, py::arg("restarts") = 5, py::arg("seed") = 0,
      "Gradient-based search over the forgetting parameters; returns the refit model.");

  m.def(
      "mse",
      [](const std::vector<double>& predictions, const std::vector<double>& labels) {
        return mse(predictions, labels);
      },
      py::arg("predictions"), py::arg("labels"));

  m.def(
      "wilcoxon_signed_rank",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::string& mode) {
        const WilcoxonResult r = wilcoxon_signed_rank(a, b, wilcoxon_mode_from(mode));
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("a"), py::arg("b"), py::arg("mode") = "auto",
      "Paired signed-rank test; returns (W+, two-sided p).");

  m.def(
      "kalman_predict",
      [](const Matrix& features, const Vector& labels, Index rows, double obs_var,
         double state_var, double init_cov) {
        const Dataset ds = dataset_from(features, labels);
        Vector theta;
        const Vector preds =
            kalman_one_step_predictions(ds, rows, StateSpaceConfig{obs_var, state_var, init_cov},
                                        &theta);
        return py::make_tuple(preds, theta);
      },
      py::arg("features"), py::arg("labels"), py::arg("rows"), py::arg("obs_var") = 1.0,
      py::arg("state_var") = 0.0, py::arg("init_cov") = 1e6,
      "One-step-ahead Kalman predictions and the final filtered coefficients.");

  m.def(
      "run_config",
      [](const std::string& path) {
        const ExperimentConfig cfg = load_config(path);
        const ExperimentArtifacts artifacts = run_experiment(cfg);
        return format_table_text(artifacts.table);
      },
      py::arg("path"), "Execute an experiment config file; returns the result table as text.");
}
