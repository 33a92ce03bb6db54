#include "forgecast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace forgecast {

std::vector<Series> load_returns_csv(const std::filesystem::path& path,
                                     const std::string& date_column,
                                     const std::vector<std::string>& value_columns) {
  if (value_columns.empty()) {
    throw std::invalid_argument("load_returns_csv: needs at least one value column");
  }
  const CsvTable csv = read_csv(path);
  const auto date_idx = static_cast<std::size_t>(csv.column(date_column));

  for (std::size_t i = 1; i < csv.rows.size(); ++i) {
    if (csv.rows[i][date_idx] <= csv.rows[i - 1][date_idx]) {
      throw std::runtime_error("load_returns_csv: non-monotone date '" +
                               csv.rows[i][date_idx] + "' at line " + std::to_string(i + 2));
    }
  }

  std::vector<Series> out;
  out.reserve(value_columns.size());
  for (const std::string& name : value_columns) {
    const auto col = static_cast<std::size_t>(csv.column(name));
    Series s;
    s.name = name;
    bool seen = false;
    double prev = 0.0;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      const std::string& cell = csv.rows[i][col];
      if (csv_cell_missing(cell)) {
        if (!seen) continue;  // leading missing rows dropped
        s.dates.push_back(csv.rows[i][date_idx]);
        s.values.push_back(prev);  // forward fill
        continue;
      }
      prev = parse_csv_double(cell, i + 2);
      if (!std::isfinite(prev)) {
        throw std::runtime_error("load_returns_csv: non-finite value at line " +
                                 std::to_string(i + 2));
      }
      seen = true;
      s.dates.push_back(csv.rows[i][date_idx]);
      s.values.push_back(prev);
    }
    if (s.values.empty()) {
      throw std::runtime_error("load_returns_csv: column '" + name + "' has no observations");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Series> align_series(const std::vector<Series>& input) {
  if (input.empty()) return {};
  std::string start = input.front().dates.front();
  for (const Series& s : input) {
    start = std::max(start, s.dates.front());
  }
  std::vector<Series> out;
  out.reserve(input.size());
  for (const Series& s : input) {
    const auto it = std::lower_bound(s.dates.begin(), s.dates.end(), start);
    const auto offset = static_cast<std::size_t>(it - s.dates.begin());
    Series trimmed;
    trimmed.name = s.name;
    trimmed.dates.assign(s.dates.begin() + static_cast<std::ptrdiff_t>(offset), s.dates.end());
    trimmed.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(offset),
                          s.values.end());
    out.push_back(std::move(trimmed));
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].dates != out.front().dates) {
      for (std::size_t j = 0; j < std::min(out[i].dates.size(), out.front().dates.size());
           ++j) {
        if (out[i].dates[j] != out.front().dates[j]) {
          throw std::invalid_argument("align_series: date mismatch between '" +
                                      out.front().name + "' and '" + out[i].name + "' at '" +
                                      out.front().dates[j] + "' vs '" + out[i].dates[j] + "'");
        }
      }
      throw std::invalid_argument("align_series: '" + out.front().name + "' and '" +
                                  out[i].name + "' cover different date ranges");
    }
  }
  return out;
}

Dataset build_lag_features(const Series& series, int lags, bool absolute) {
  if (static_cast<int>(series.values.size()) <= lags) {
    throw std::invalid_argument("build_lag_features: series '" + series.name + "' has " +
                                std::to_string(series.values.size()) +
                                " observations, needs more than " + std::to_string(lags));
  }
  if (!absolute) {
    return make_lag_dataset(series.values, lags);
  }
  std::vector<double> transformed(series.values.size());
  std::transform(series.values.begin(), series.values.end(), transformed.begin(),
                 [](double v) { return std::abs(v); });
  return make_lag_dataset(transformed, lags);
}

Dataset build_factor_dataset(const Series& y, const Series& mr, const Series& sb,
                             const Series& hl, const Series& rf) {
  const Series* all[] = {&y, &mr, &sb, &hl, &rf};
  for (const Series* s : all) {
    if (s->dates.size() != y.dates.size()) {
      throw std::invalid_argument("build_factor_dataset: '" + s->name + "' has " +
                                  std::to_string(s->dates.size()) + " rows, '" + y.name +
                                  "' has " + std::to_string(y.dates.size()));
    }
    for (std::size_t i = 0; i < y.dates.size(); ++i) {
      if (s->dates[i] != y.dates[i]) {
        throw std::invalid_argument("build_factor_dataset: date mismatch between '" + y.name +
                                    "' and '" + s->name + "' at '" + y.dates[i] + "' vs '" +
                                    s->dates[i] + "'");
      }
    }
  }
  const auto n = static_cast<Index>(y.values.size());
  Matrix features(n, 4);
  Vector labels(n);
  for (Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    features(i, 0) = 1.0;
    features(i, 1) = mr.values[u];
    features(i, 2) = sb.values[u];
    features(i, 3) = hl.values[u];
    labels[i] = y.values[u] - rf.values[u];
  }
  return Dataset(std::move(features), std::move(labels));
}

}  // namespace forgecast
