#include "forgecast/core.hpp"

#include <string>
#include <utility>

namespace forgecast {

Dataset::Dataset(Matrix features, Vector labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (labels_.size() < 1) {
    throw std::invalid_argument("Dataset: needs at least one sample");
  }
  if (features_.rows() != labels_.size()) {
    throw std::invalid_argument(
        "Dataset: feature rows (" + std::to_string(features_.rows()) +
        ") do not match labels length (" + std::to_string(labels_.size()) + ")");
  }
  if (features_.cols() < 1) {
    throw std::invalid_argument("Dataset: feature dimension must be >= 1");
  }
  if (!features_.allFinite() || !labels_.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entry");
  }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows,
                           const std::vector<double>& labels) {
  if (rows.empty()) {
    throw std::invalid_argument("Dataset: needs at least one sample");
  }
  const std::size_t d = rows.front().size();
  Matrix features(static_cast<Index>(rows.size()), static_cast<Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw std::invalid_argument(
          "Dataset: ragged feature row at index " + std::to_string(i) + " (" +
          std::to_string(rows[i].size()) + " entries, expected " + std::to_string(d) + ")");
    }
    for (std::size_t j = 0; j < d; ++j) {
      features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  Vector y = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  return Dataset(std::move(features), std::move(y));
}

SplitSpec make_split(Index total, Index train_end, Index valid_len, Index test_len) {
  if (train_end < 1 || valid_len < 1 || test_len < 1) {
    throw std::invalid_argument("make_split: all segment lengths must be >= 1");
  }
  if (train_end + valid_len + test_len > total) {
    throw std::invalid_argument(
        "make_split: segments need " + std::to_string(train_end + valid_len + test_len) +
        " samples but only " + std::to_string(total) + " are available");
  }
  return SplitSpec{train_end, train_end + valid_len, train_end + valid_len + test_len};
}

Array ages_of(const SplitSpec& split) {
  if (split.train_end < 1) {
    throw std::invalid_argument("ages_of: empty training segment");
  }
  Array ages(split.train_end);
  for (Index tau = 0; tau < split.train_end; ++tau) {
    ages[tau] = static_cast<double>(split.train_end - 1 - tau);
  }
  return ages;
}

Dataset make_lag_dataset(std::span<const double> values, int lags) {
  if (lags < 1) {
    throw std::invalid_argument("make_lag_dataset: lags must be >= 1");
  }
  const Index n = static_cast<Index>(values.size()) - lags;
  if (n < 1) {
    throw std::invalid_argument(
        "make_lag_dataset: series of length " + std::to_string(values.size()) +
        " is too short for " + std::to_string(lags) + " lags");
  }
  Matrix features(n, lags);
  Vector labels(n);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < lags; ++j) {
      features(i, j) = values[static_cast<std::size_t>(i + lags - 1 - j)];
    }
    labels[i] = values[static_cast<std::size_t>(i + lags)];
  }
  return Dataset(std::move(features), std::move(labels));
}

}  // namespace forgecast
