#pragma once

#include "forgecast/types.hpp"

#include <span>
#include <vector>

namespace forgecast {

/// Immutable supervised sample container. Row t of features() pairs with
/// labels()[t]; the row index is the observation step.
class Dataset {
 public:
  Dataset(Matrix features, Vector labels);

  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           const std::vector<double>& labels);

  Index size() const { return labels_.size(); }
  Index dim() const { return features_.cols(); }
  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }

 private:
  Matrix features_;
  Vector labels_;
};

/// Contiguous train | validation | test segments over the 0-based sample
/// axis: train = [0, train_end), validation = [train_end, valid_end),
/// test = [valid_end, test_end).
struct SplitSpec {
  Index train_end = 0;
  Index valid_end = 0;
  Index test_end = 0;

  Index train_size() const { return train_end; }
  Index valid_size() const { return valid_end - train_end; }
  Index test_size() const { return test_end - valid_end; }
};

SplitSpec make_split(Index total, Index train_end, Index valid_len, Index test_len);

/// Sample ages in observation steps: ages[tau] = train_end - 1 - tau, so the
/// newest training sample has age 0. Stored as doubles; mechanism formulas
/// accept fractional ages.
Array ages_of(const SplitSpec& split);

enum class LossKind { SquaredError };

inline double squared_error(double prediction, double label) {
  const double e = prediction - label;
  return e * e;
}

/// Autoregressive design from a raw series: sample i has label values[i+lags]
/// and features (values[i+lags-1], ..., values[i]), most recent lag first.
Dataset make_lag_dataset(std::span<const double> values, int lags);

}  // namespace forgecast
