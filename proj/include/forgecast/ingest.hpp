#pragma once

#include "forgecast/core.hpp"
#include "forgecast/csv.hpp"

#include <vector>

namespace forgecast {

/// A dated value sequence for one instrument, already forward-filled and
/// trimmed of leading missing observations. Dates are ISO-style strings and
/// strictly increasing.
struct Series {
  std::string name;
  std::vector<std::string> dates;
  std::vector<double> values;
};

/// Loads one or more value columns from a dated CSV. Missing cells are
/// forward-filled from the previous observation; rows before a series' first
/// observation are dropped for that series. Non-monotone dates and
/// unparseable cells are rejected with the offending line number.
std::vector<Series> load_returns_csv(const std::filesystem::path& path,
                                     const std::string& date_column,
                                     const std::vector<std::string>& value_columns);

/// Trims each series to the latest common start date and checks the
/// remaining dates agree pairwise.
std::vector<Series> align_series(const std::vector<Series>& input);

/// Lagged design over a single series: label f(Y_t), features
/// (f(Y_{t-1}), ..., f(Y_{t-lags})) where f is |.| when `absolute` is set.
Dataset build_lag_features(const Series& series, int lags = 5, bool absolute = true);

/// Factor regression design: label y - rf, features (1, mr, sb, hl). All
/// five series must be date-aligned; the first mismatch is reported.
Dataset build_factor_dataset(const Series& y, const Series& mr, const Series& sb,
                             const Series& hl, const Series& rf);

}  // namespace forgecast
