#include "forgecast/evaluation.hpp"

#include "forgecast/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace forgecast {

double mse(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw std::invalid_argument("mse: sequences must have equal nonzero length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - labels[i];
    total += e * e;
  }
  return total / static_cast<double>(predictions.size());
}

namespace {

/// Midranks of |d| (1-based average ranks within tie groups).
std::vector<double> absolute_midranks(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
    i = j + 1;
  }
  return ranks;
}

WilcoxonResult wilcoxon_exact(const std::vector<double>& diffs,
                              const std::vector<double>& ranks) {
  const std::size_t n = diffs.size();
  // Doubled ranks are integers even with midrank ties.
  std::vector<long long> ranks2(n);
  long long w2_obs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ranks2[i] = std::llround(2.0 * ranks[i]);
    if (diffs[i] > 0.0) w2_obs += ranks2[i];
  }
  const std::uint64_t patterns = 1ULL << n;
  std::uint64_t count_le = 0;
  std::uint64_t count_ge = 0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    long long s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) s += ranks2[i];
    }
    if (s <= w2_obs) ++count_le;
    if (s >= w2_obs) ++count_ge;
  }
  const double tail = static_cast<double>(std::min(count_le, count_ge));
  const double p = std::min(1.0, 2.0 * tail / static_cast<double>(patterns));
  return WilcoxonResult{static_cast<double>(w2_obs) / 2.0, p};
}

WilcoxonResult wilcoxon_normal(const std::vector<double>& diffs,
                               const std::vector<double>& ranks) {
  const double n = static_cast<double>(diffs.size());
  double w_plus = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0.0) w_plus += ranks[i];
  }
  const double mean = n * (n + 1.0) / 4.0;
  double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  // Tie correction: subtract sum(t^3 - t)/48 over tie groups of |d|.
  std::vector<double> abs_d(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) abs_d[i] = std::abs(diffs[i]);
  std::sort(abs_d.begin(), abs_d.end());
  std::size_t i = 0;
  while (i < abs_d.size()) {
    std::size_t j = i;
    while (j + 1 < abs_d.size() && abs_d[j + 1] == abs_d[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    variance -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  if (!(variance > 0.0)) {
    return WilcoxonResult{w_plus, 1.0};
  }
  double centered = std::abs(w_plus - mean) - 0.5;  // continuity correction
  if (centered < 0.0) centered = 0.0;
  const double z = centered / std::sqrt(variance);
  const double p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return WilcoxonResult{w_plus, p};
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMode mode) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("wilcoxon: sequences must have equal nonzero length");
  }
  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw std::invalid_argument("wilcoxon: non-finite difference");
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) {
    return WilcoxonResult{0.0, 1.0};
  }
  const std::vector<double> ranks = absolute_midranks(diffs);
  const bool exact = mode == WilcoxonMode::Exact ||
                     (mode == WilcoxonMode::Auto && diffs.size() <= 20);
  if (exact) {
    if (diffs.size() > 24) {
      throw std::invalid_argument("wilcoxon: exact enumeration limited to n <= 24");
    }
    return wilcoxon_exact(diffs, ranks);
  }
  return wilcoxon_normal(diffs, ranks);
}

namespace {

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);  // 3 significant digits
  return buf;
}

}  // namespace

ExperimentTable build_table(const std::vector<RunResult>& results, double alpha) {
  if (results.empty()) {
    throw std::invalid_argument("build_table: no results");
  }
  ExperimentTable table;
  // method -> dataset -> run -> mse, preserving first-appearance order.
  std::map<std::string, std::map<std::string, std::map<std::int64_t, double>>> grid;
  for (const RunResult& r : results) {
    if (!std::isfinite(r.test_mse) || r.test_mse < 0.0) {
      throw std::invalid_argument("build_table: invalid mse for " + r.method + "/" + r.dataset);
    }
    if (std::find(table.methods.begin(), table.methods.end(), r.method) == table.methods.end()) {
      table.methods.push_back(r.method);
    }
    if (std::find(table.datasets.begin(), table.datasets.end(), r.dataset) ==
        table.datasets.end()) {
      table.datasets.push_back(r.dataset);
    }
    auto [it, inserted] = grid[r.method][r.dataset].emplace(r.run, r.test_mse);
    if (!inserted) {
      throw std::invalid_argument("build_table: duplicate run " + std::to_string(r.run) +
                                  " for " + r.method + "/" + r.dataset);
    }
  }

  // Pairing: within a dataset every present method must cover the same runs.
  for (const std::string& ds : table.datasets) {
    std::optional<std::set<std::int64_t>> reference;
    std::string reference_method;
    for (const std::string& m : table.methods) {
      const auto mit = grid.find(m);
      if (mit == grid.end()) continue;
      const auto dit = mit->second.find(ds);
      if (dit == mit->second.end()) continue;
      std::set<std::int64_t> runs;
      for (const auto& [run, _] : dit->second) runs.insert(run);
      if (!reference) {
        reference = std::move(runs);
        reference_method = m;
      } else if (runs != *reference) {
        std::ostringstream oss;
        oss << "build_table: unpaired runs on dataset " << ds << " between " << reference_method
            << " and " << m << "; offending ids:";
        std::set<std::int64_t> diff;
        std::set_symmetric_difference(reference->begin(), reference->end(), runs.begin(),
                                      runs.end(), std::inserter(diff, diff.begin()));
        for (std::int64_t id : diff) oss << ' ' << id;
        throw std::invalid_argument(oss.str());
      }
    }
  }

  table.cells.assign(table.methods.size(),
                     std::vector<TableCell>(table.datasets.size(), TableCell{}));

  for (std::size_t dj = 0; dj < table.datasets.size(); ++dj) {
    const std::string& ds = table.datasets[dj];
    // Means.
    std::vector<std::size_t> present;
    for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
      const auto mit = grid.find(table.methods[mi]);
      if (mit == grid.end()) continue;
      const auto dit = mit->second.find(ds);
      if (dit == mit->second.end() || dit->second.empty()) continue;
      double total = 0.0;
      for (const auto& [_, v] : dit->second) total += v;
      TableCell& cell = table.cells[mi][dj];
      cell.runs = static_cast<int>(dit->second.size());
      cell.mean_mse = total / static_cast<double>(dit->second.size());
      present.push_back(mi);
    }
    if (present.empty()) continue;
    // Best: lowest mean, mean ties broken by method-name order.
    std::size_t best = present.front();
    for (std::size_t mi : present) {
      const double cur = table.cells[mi][dj].mean_mse;
      const double inc = table.cells[best][dj].mean_mse;
      if (cur < inc || (cur == inc && table.methods[mi] < table.methods[best])) {
        best = mi;
      }
    }
    table.cells[best][dj].best = true;
    const auto& best_runs = grid[table.methods[best]][ds];
    std::vector<double> best_losses;
    best_losses.reserve(best_runs.size());
    for (const auto& [_, v] : best_runs) best_losses.push_back(v);
    for (std::size_t mi : present) {
      if (mi == best) continue;
      std::vector<double> losses;
      losses.reserve(best_losses.size());
      for (const auto& [_, v] : grid[table.methods[mi]][ds]) losses.push_back(v);
      const WilcoxonResult w = wilcoxon_signed_rank(losses, best_losses);
      TableCell& cell = table.cells[mi][dj];
      cell.p_vs_best = w.p_value;
      cell.starred = w.p_value < alpha && cell.mean_mse > table.cells[best][dj].mean_mse;
    }
  }
  return table;
}

std::string format_table_text(const ExperimentTable& table) {
  std::vector<std::size_t> widths(table.datasets.size());
  std::size_t method_width = 6;  // "method"
  for (const std::string& m : table.methods) method_width = std::max(method_width, m.size());
  std::vector<std::vector<std::string>> rendered(table.methods.size());
  for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
    rendered[mi].resize(table.datasets.size());
    for (std::size_t dj = 0; dj < table.datasets.size(); ++dj) {
      const TableCell& cell = table.cells[mi][dj];
      std::string text = cell.runs == 0 ? "--" : format_sci(cell.mean_mse);
      if (cell.starred) text += '*';
      if (cell.best) text += " [best]";
      rendered[mi][dj] = std::move(text);
    }
  }
  for (std::size_t dj = 0; dj < table.datasets.size(); ++dj) {
    widths[dj] = table.datasets[dj].size();
    for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
      widths[dj] = std::max(widths[dj], rendered[mi][dj].size());
    }
  }
  std::ostringstream oss;
  oss << std::left;
  oss.width(static_cast<std::streamsize>(method_width));
  oss << "method";
  for (std::size_t dj = 0; dj < table.datasets.size(); ++dj) {
    oss << "  ";
    oss.width(static_cast<std::streamsize>(widths[dj]));
    oss << table.datasets[dj];
  }
  oss << '\n';
  for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
    oss.width(static_cast<std::streamsize>(method_width));
    oss << table.methods[mi];
    for (std::size_t dj = 0; dj < table.datasets.size(); ++dj) {
      oss << "  ";
      oss.width(static_cast<std::streamsize>(widths[dj]));
      oss << rendered[mi][dj];
    }
    oss << '\n';
  }
  oss << "(*: mean MSE significantly larger than the best method's, paired "
         "Wilcoxon signed-rank)\n";
  for (const std::string& note : table.notes) {
    oss << "note: " << note << '\n';
  }
  return oss.str();
}

void write_table_csv(const ExperimentTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "method";
  for (const std::string& ds : table.datasets) {
    out << ',' << ds << "_mse," << ds << "_flag";
  }
  out << '\n';
  for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
    out << table.methods[mi];
    for (std::size_t dj = 0; dj < table.datasets.size(); ++dj) {
      const TableCell& cell = table.cells[mi][dj];
      out << ',';
      if (cell.runs > 0) out << format_sci(cell.mean_mse);
      out << ',' << (cell.best ? "best" : (cell.starred ? "star" : ""));
    }
    out << '\n';
  }
}

void write_runs_csv(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  std::vector<RunResult> sorted = results;
  std::sort(sorted.begin(), sorted.end(), [](const RunResult& a, const RunResult& b) {
    return std::tie(a.dataset, a.method, a.run) < std::tie(b.dataset, b.method, b.run);
  });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "method,dataset,run,mse\n";
  char buf[40];
  for (const RunResult& r : sorted) {
    std::snprintf(buf, sizeof buf, "%.17g", r.test_mse);
    out << r.method << ',' << r.dataset << ',' << r.run << ',' << buf << '\n';
  }
}

std::vector<RunResult> read_runs_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  const Index method_col = csv.column("method");
  const Index dataset_col = csv.column("dataset");
  const Index run_col = csv.column("run");
  const Index mse_col = csv.column("mse");
  std::vector<RunResult> out;
  out.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    RunResult r;
    r.method = row[static_cast<std::size_t>(method_col)];
    r.dataset = row[static_cast<std::size_t>(dataset_col)];
    r.run = static_cast<std::int64_t>(
        parse_csv_double(row[static_cast<std::size_t>(run_col)], i + 2));
    r.test_mse = parse_csv_double(row[static_cast<std::size_t>(mse_col)], i + 2);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace forgecast
