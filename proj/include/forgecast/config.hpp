#pragma once

#include "forgecast/bilevel.hpp"
#include "forgecast/synthgen.hpp"

#include <filesystem>
#include <vector>

namespace forgecast {

struct MethodSpec {
  std::string name;
  OptimizerConfig optimizer;  // relevant for grad_exp / grad_mixed_decay
};

/// Monte Carlo benchmark over seeded synthetic series. Split boundaries are
/// expressed on the raw series axis; after `lags` values are consumed per
/// feature row the supervised split shrinks accordingly.
struct SyntheticSpec {
  std::vector<DgpKind> kinds{DgpKind::Stat};
  int runs = 192;
  Index length = 3000;
  double noise_sd = 0.05;
  Index train_end = 2875;
  Index valid_len = 100;
  Index test_len = 25;
  int lags = 3;
};

struct ExpandingCvSpec {
  Index initial_train_days = 1512;  // 252 trading days x 6 years
  Index valid_days = 150;
  Index test_days = 150;
  Index step_days = 150;
};

struct FactorColumns {
  std::string mr = "MR";
  std::string sb = "SB";
  std::string hl = "HL";
  std::string rf = "RF";
};

struct RealSpec {
  std::string csv_path;
  std::string task = "volatility";  // volatility | factor | raw_lags
  int lags = 5;
  std::string date_column = "date";
  std::vector<std::string> series_columns;
  FactorColumns factors;
  ExpandingCvSpec cv;
};

enum class WeightsDump { None, Grad, All };

struct ExperimentConfig {
  std::string experiment = "synthetic";  // synthetic | real
  SyntheticSpec synthetic;
  RealSpec real;
  std::vector<MethodSpec> methods;
  std::vector<double> ridge_grid{1e-3, 1e-4, 1e-5, 1e-6, 0.0};
  HessianMode hessian_mode = HessianMode::Exact;
  OptimizerConfig optimizer;
  int window_grid_count = 25;
  double grid_tail_weight = 0.01;
  std::vector<double> state_space_ratios{1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  std::string output_dir = "out";
  std::uint64_t base_seed = 0;
  int parallelism = 0;  // 0 = hardware concurrency
  bool emit_traces = true;
  WeightsDump emit_weights = WeightsDump::Grad;
  double alpha = 0.05;

  void validate() const;
};

extern const std::vector<std::string> kRegisteredMethods;

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json_text(const std::string& text);

}  // namespace forgecast
