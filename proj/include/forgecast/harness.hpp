#pragma once

#include "forgecast/baselines.hpp"
#include "forgecast/config.hpp"
#include "forgecast/evaluation.hpp"
#include "forgecast/ingest.hpp"

#include <optional>

namespace forgecast {

/// Per-(method, dataset, run) selection record: validation score of the
/// winning hyperparameter choice plus a human-readable summary of what won.
struct Diagnostic {
  std::string method;
  std::string dataset;
  std::int64_t run = 0;
  double valid_mse = 0.0;
  double chosen_ridge = 0.0;  // NaN when the method has no ridge stage
  std::string detail;
};

struct RunFailure {
  std::string dataset;
  std::string method;
  std::int64_t run = 0;
  std::string message;
};

struct TraceDump {
  std::string dataset;
  std::string method;
  std::int64_t run = 0;
  std::vector<RestartTrace> traces;
};

/// Weight-versus-age curve of a fitted method, materialized at write time.
struct WeightCurveDump {
  enum class Kind { Mechanism, Window, Uniform };
  std::string dataset;
  std::string method;
  std::int64_t run = 0;
  Kind kind = Kind::Uniform;
  ForgettingParams params;
  Index window = 0;
  Index max_age = 0;
};

struct ExperimentArtifacts {
  ExperimentTable table;
  std::vector<RunResult> runs;          // failed runs removed pairwise
  std::vector<Diagnostic> diagnostics;  // every successful method fit
  std::vector<RunFailure> failures;
  std::vector<TraceDump> traces;
  std::vector<WeightCurveDump> weight_curves;
};

/// One method on one prepared split. `seed` drives any stochastic component
/// (optimizer restarts and shuffles); the ridge penalty is grid-searched by
/// validation MSE, ties keeping the smallest penalty.
struct MethodOutput {
  double test_mse = 0.0;
  double valid_mse = 0.0;
  double chosen_ridge = 0.0;
  std::string detail;
  std::vector<RestartTrace> traces;
  std::optional<ForgettingParams> learned;
  std::optional<Index> window;
};

MethodOutput run_method_on_split(const MethodSpec& method, const Dataset& data,
                                 const SplitSpec& split, const ExperimentConfig& cfg,
                                 std::uint64_t seed);

/// Seeded Monte Carlo benchmark over the configured synthetic settings.
ExperimentArtifacts run_synthetic(const ExperimentConfig& cfg);

/// Expanding walk-forward evaluation over CSV-ingested series; runs are
/// (series, fold) pairs encoded as series_index * 1000 + fold_index.
ExperimentArtifacts run_expanding_cv(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment, writes all artifact files under
/// cfg.output_dir and reports failures on stderr.
ExperimentArtifacts run_experiment(const ExperimentConfig& cfg);

void write_artifact_files(const ExperimentConfig& cfg, const ExperimentArtifacts& artifacts);

}  // namespace forgecast
