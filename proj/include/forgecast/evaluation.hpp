#pragma once

#include "forgecast/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace forgecast {

double mse(std::span<const double> predictions, std::span<const double> labels);

struct WilcoxonResult {
  double statistic = 0.0;  // W+ (rank sum of positive differences)
  double p_value = 1.0;    // two-sided
};

enum class WilcoxonMode { Auto, Exact, Normal };

/// Paired signed-rank test on differences a - b. Zero differences are
/// dropped; ties get midranks. Auto mode uses exact enumeration of all sign
/// patterns for effective n <= 20 and the tie-corrected normal approximation
/// with continuity correction beyond that. All differences zero yields
/// statistic 0, p 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMode mode = WilcoxonMode::Auto);

struct RunResult {
  std::string method;
  std::string dataset;
  std::int64_t run = 0;
  double test_mse = 0.0;
};

struct TableCell {
  double mean_mse = 0.0;
  int runs = 0;
  bool best = false;
  bool starred = false;
  std::optional<double> p_vs_best;
};

/// Per-method x per-dataset mean MSE grid: the lowest mean per dataset is
/// flagged best (mean ties break by method-name order) and every other method
/// is starred when the paired test against the best is significant and its
/// mean is larger.
struct ExperimentTable {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  std::vector<std::vector<TableCell>> cells;  // [method][dataset]
  std::vector<std::string> notes;
};

ExperimentTable build_table(const std::vector<RunResult>& results, double alpha = 0.05);

std::string format_table_text(const ExperimentTable& table);
void write_table_csv(const ExperimentTable& table, const std::filesystem::path& path);
void write_runs_csv(const std::vector<RunResult>& results, const std::filesystem::path& path);
std::vector<RunResult> read_runs_csv(const std::filesystem::path& path);

}  // namespace forgecast
