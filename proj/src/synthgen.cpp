#include "forgecast/synthgen.hpp"

#include <cmath>
#include <random>
#include <string>

namespace forgecast {

DgpKind dgp_from_string(std::string_view name) {
  if (name == "fixed_regime") return DgpKind::FixedRegime;
  if (name == "random_walk") return DgpKind::RandomWalk;
  if (name == "random_regime") return DgpKind::RandomRegime;
  if (name == "stat") return DgpKind::Stat;
  throw std::invalid_argument("unknown dgp kind: " + std::string(name));
}

std::string_view to_string(DgpKind kind) {
  switch (kind) {
    case DgpKind::FixedRegime: return "fixed_regime";
    case DgpKind::RandomWalk: return "random_walk";
    case DgpKind::RandomRegime: return "random_regime";
    case DgpKind::Stat: return "stat";
  }
  throw std::logic_error("unreachable dgp kind");
}

void SeriesSpec::validate() const {
  if (length < 4) {
    throw std::invalid_argument("series: length must be >= 4 to build three lags");
  }
  if (!(noise_sd > 0.0)) {
    throw std::invalid_argument("series: noise_sd must be > 0");
  }
}

namespace {

constexpr double kRegimeSurvivalBase = 0.99998255;
constexpr double kRegimeTheta[2] = {-0.5, 0.9};

}  // namespace

RawSeries generate(const SeriesSpec& spec, std::uint64_t seed,
                   std::optional<double> y1_override) {
  if (spec.length < 4) {
    throw std::invalid_argument("series: length must be >= 4");
  }
  const Index n = spec.length;
  RawSeries out;
  out.y.resize(static_cast<std::size_t>(n));
  out.theta.resize(static_cast<std::size_t>(n));
  out.regime.assign(static_cast<std::size_t>(n), 0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sd > 0.0 ? spec.noise_sd : 1.0);
  const auto draw_noise = [&]() { return spec.noise_sd > 0.0 ? noise(rng) : 0.0; };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // RandomRegime state; the initial regime is uniform on the two regimes.
  int regime = 0;
  long run_length = 1;
  if (spec.kind == DgpKind::RandomRegime) {
    regime = static_cast<int>(rng() & 1ULL);
  }

  double prev = 0.0;  // Y_0 := 0
  for (Index i = 0; i < n; ++i) {
    const long t = static_cast<long>(i) + 1;  // 1-based observation step
    double theta = 0.0;
    switch (spec.kind) {
      case DgpKind::FixedRegime:
        theta = (t >= 1000 && t <= 2000) ? -0.9 : 0.9;
        out.regime[static_cast<std::size_t>(i)] = (t >= 1000 && t <= 2000) ? 2 : 1;
        break;
      case DgpKind::RandomWalk:
        theta = 1.0 - static_cast<double>(t) / 1500.0;
        break;
      case DgpKind::RandomRegime:
        if (t > 1) {
          const double survive =
              std::pow(kRegimeSurvivalBase, static_cast<double>(run_length));
          if (unit(rng) < survive) {
            ++run_length;
          } else {
            regime ^= 1;
            run_length = 1;
          }
        }
        theta = kRegimeTheta[regime];
        out.regime[static_cast<std::size_t>(i)] = regime + 1;
        break;
      case DgpKind::Stat:
        theta = -0.5;
        break;
    }
    double value = theta * prev + draw_noise();
    if (i == 0 && y1_override) {
      value = *y1_override;
    }
    out.y[static_cast<std::size_t>(i)] = value;
    out.theta[static_cast<std::size_t>(i)] = theta;
    prev = value;
  }
  return out;
}

Dataset to_supervised(std::span<const double> y) {
  return make_lag_dataset(y, 3);
}

double expected_regime_duration(double survival_base) {
  // E[D] = sum_{r>=0} prod_{k=1..r} p^k = sum_{r>=0} p^{r(r+1)/2}
  double total = 0.0;
  double term = 1.0;
  long r = 1;
  while (term > 1e-16 && r < 10000000L) {
    total += term;
    term *= std::pow(survival_base, static_cast<double>(r));
    ++r;
  }
  return total;
}

}  // namespace forgecast
