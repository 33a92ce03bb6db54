#pragma once

#include "forgecast/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace forgecast {

/// The four drift settings of the synthetic benchmark, all AR(1) data
/// generating processes differing in how the coefficient moves:
///   FixedRegime   theta_t = -0.9 for t in [1000, 2000], 0.9 otherwise
///   RandomWalk    theta_t = 1 - t/1500
///   RandomRegime  theta switches between -0.5 and 0.9; with current run
///                 length r the regime survives one more step with
///                 probability 0.99998255^r
///   Stat          theta_t = -0.5 (no shift)
enum class DgpKind { FixedRegime, RandomWalk, RandomRegime, Stat };

DgpKind dgp_from_string(std::string_view name);
std::string_view to_string(DgpKind kind);

struct SeriesSpec {
  DgpKind kind = DgpKind::Stat;
  Index length = 3000;
  double noise_sd = 0.05;

  void validate() const;  // length >= 4, noise_sd > 0
};

struct RawSeries {
  std::vector<double> y;
  std::vector<double> theta;   // coefficient applied at each step
  std::vector<int> regime;     // 1-based regime id; 0 where not applicable
};

/// Seeded draw of a raw series. Y_0 := 0, so Y_1 is pure noise. The
/// `y1_override` hook (combined with noise_sd = 0, which disables sampling)
/// exists for unit tests only and is not reachable from the CLI.
RawSeries generate(const SeriesSpec& spec, std::uint64_t seed,
                   std::optional<double> y1_override = std::nullopt);

/// AR(3) design: predicts Y_t from (Y_{t-1}, Y_{t-2}, Y_{t-3}).
Dataset to_supervised(std::span<const double> y);

/// Mean regime duration implied by the per-step survival probabilities
/// p^r: sum over r >= 0 of prod_{k<=r} p^k, by direct summation.
double expected_regime_duration(double survival_base);

}  // namespace forgecast
