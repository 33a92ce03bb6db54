#include "forgecast/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace forgecast {

std::vector<Index> window_grid(Index train_size, int count) {
  if (train_size < 1 || count < 1) {
    throw std::invalid_argument("window_grid: needs train_size >= 1 and count >= 1");
  }
  const double lo = std::min<double>(5.0, static_cast<double>(train_size));
  const double hi = static_cast<double>(train_size);
  std::vector<Index> values;
  values.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double frac = count == 1 ? 1.0 : static_cast<double>(j) / (count - 1);
    const auto w = static_cast<Index>(std::llround(lo + frac * (hi - lo)));
    values.push_back(std::clamp<Index>(w, 1, train_size));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

double window_to_eta1(double window, double tail_weight) {
  if (!(window > 0.0) || !(tail_weight > 0.0 && tail_weight < 1.0)) {
    throw std::invalid_argument("window_to_eta1: needs window > 0 and tail_weight in (0,1)");
  }
  return std::log(1.0 / tail_weight) / window;
}

double validation_mse(const Dataset& data, const SplitSpec& split, const Vector& theta) {
  const auto X = data.features().middleRows(split.train_end, split.valid_size());
  const auto y = data.labels().segment(split.train_end, split.valid_size());
  return (y - X * theta).squaredNorm() / static_cast<double>(split.valid_size());
}

BaselineFit fit_stationary(const Dataset& data, const SplitSpec& split,
                           const SolverConfig& solver) {
  BaselineFit out;
  const Array ones = Array::Ones(split.train_end);
  out.train_model = solve(data, split, ones, solver);
  out.valid_mse = validation_mse(data, split, out.train_model.theta);
  out.final_model = refit_weighted(data, split, ones, 1.0, solver);
  return out;
}

BaselineFit fit_window(const Dataset& data, const SplitSpec& split, const SolverConfig& solver,
                       const std::vector<Index>& windows) {
  if (windows.empty()) {
    throw std::invalid_argument("fit_window: empty window grid");
  }
  const Array ages = ages_of(split);
  BaselineFit best;
  bool found = false;
  double best_mse = std::numeric_limits<double>::infinity();
  std::string last_error;

  // Descending order so ties keep the longest window (largest effective
  // sample size).
  for (auto it = windows.rbegin(); it != windows.rend(); ++it) {
    const Index w = *it;
    if (w < 1 || w > split.train_end) {
      throw std::invalid_argument("fit_window: window " + std::to_string(w) +
                                  " outside [1, train_size]");
    }
    const Array weights = (ages < static_cast<double>(w)).cast<double>();
    try {
      RidgeSolution model = solve(data, split, weights, solver);
      const double mse = validation_mse(data, split, model.theta);
      if (mse < best_mse) {
        best_mse = mse;
        best.train_model = std::move(model);
        best.chosen = static_cast<double>(w);
        found = true;
      }
    } catch (const SingularMatrixError& e) {
      last_error = e.what();
    }
  }
  if (!found) {
    throw SingularMatrixError("fit_window: every candidate fit was singular (last: " +
                              last_error + ")");
  }
  best.valid_mse = best_mse;
  const Array weights = (ages < best.chosen).cast<double>();
  best.final_model = refit_weighted(data, split, weights, 1.0, solver);
  return best;
}

BaselineFit fit_grid_exp(const Dataset& data, const SplitSpec& split, const SolverConfig& solver,
                         const std::vector<Index>& windows, double tail_weight) {
  if (windows.empty()) {
    throw std::invalid_argument("fit_grid_exp: empty window grid");
  }
  std::vector<double> etas;
  etas.reserve(windows.size());
  for (Index w : windows) etas.push_back(window_to_eta1(static_cast<double>(w), tail_weight));
  std::sort(etas.begin(), etas.end());  // ascending: ties keep the smallest eta1

  const Array ages = ages_of(split);
  BaselineFit best;
  bool found = false;
  double best_mse = std::numeric_limits<double>::infinity();
  std::string last_error;

  for (double eta1 : etas) {
    const ForgettingParams params = ForgettingParams::exponential(eta1);
    try {
      RidgeSolution model = solve(data, split, weight_vector(params, ages), solver);
      const double mse = validation_mse(data, split, model.theta);
      if (mse < best_mse) {
        best_mse = mse;
        best.train_model = std::move(model);
        best.chosen = eta1;
        found = true;
      }
    } catch (const SingularMatrixError& e) {
      last_error = e.what();
    }
  }
  if (!found) {
    throw SingularMatrixError("fit_grid_exp: every candidate fit was singular (last: " +
                              last_error + ")");
  }
  best.valid_mse = best_mse;
  best.final_model = refit(data, split, ForgettingParams::exponential(best.chosen), solver);
  return best;
}

void StateSpaceConfig::validate() const {
  if (!(obs_var > 0.0) || !(state_var >= 0.0) || !(init_cov > 0.0)) {
    throw std::invalid_argument("state space: obs_var and init_cov must be > 0, state_var >= 0");
  }
}

std::vector<StateSpaceConfig> default_state_space_grid() {
  std::vector<StateSpaceConfig> grid;
  for (int e = -8; e <= -1; ++e) {
    grid.push_back(StateSpaceConfig{1.0, std::pow(10.0, e), 1e6});
  }
  return grid;
}

Vector kalman_one_step_predictions(const Dataset& data, Index rows,
                                   const StateSpaceConfig& cfg, Vector* final_theta) {
  cfg.validate();
  if (rows < 1 || rows > data.size()) {
    throw std::invalid_argument("kalman: rows out of range");
  }
  const Index d = data.dim();
  Vector theta = Vector::Zero(d);
  Matrix cov = cfg.init_cov * Matrix::Identity(d, d);
  Vector preds(rows);

  for (Index t = 0; t < rows; ++t) {
    const Vector x = data.features().row(t).transpose();
    cov.diagonal().array() += cfg.state_var;  // random-walk transition
    preds[t] = x.dot(theta);
    const Vector cx = cov * x;
    const double innovation_var = x.dot(cx) + cfg.obs_var;
    if (!(innovation_var > 0.0) || !std::isfinite(innovation_var)) {
      throw std::runtime_error("kalman: non-positive innovation variance at step " +
                               std::to_string(t));
    }
    const Vector gain = cx / innovation_var;
    theta.noalias() += gain * (data.labels()[t] - preds[t]);
    // Joseph form keeps the covariance symmetric PSD.
    const Matrix a = Matrix::Identity(d, d) - gain * x.transpose();
    cov = a * cov * a.transpose() + cfg.obs_var * gain * gain.transpose();
  }
  if (final_theta != nullptr) *final_theta = theta;
  return preds;
}

KalmanFit kalman_fit_predict(const Dataset& data, const SplitSpec& split,
                             const std::vector<StateSpaceConfig>& grid) {
  if (grid.empty()) {
    throw std::invalid_argument("kalman_fit_predict: empty config grid");
  }
  KalmanFit best;
  double best_mse = std::numeric_limits<double>::infinity();
  for (const StateSpaceConfig& cfg : grid) {
    Vector final_theta;
    const Vector preds = kalman_one_step_predictions(data, split.test_end, cfg, &final_theta);
    const auto valid_pred = preds.segment(split.train_end, split.valid_size());
    const auto valid_y = data.labels().segment(split.train_end, split.valid_size());
    const double mse =
        (valid_y - valid_pred).squaredNorm() / static_cast<double>(split.valid_size());
    if (mse < best_mse) {
      best_mse = mse;
      best.test_predictions = preds.segment(split.valid_end, split.test_size());
      best.chosen = cfg;
      best.final_theta = std::move(final_theta);
    }
  }
  best.valid_mse = best_mse;
  return best;
}

}  // namespace forgecast
