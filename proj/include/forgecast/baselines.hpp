#pragma once

#include "forgecast/bilevel.hpp"

#include <vector>

namespace forgecast {

/// 25 integer window lengths linearly spaced over [5, train_size]
/// (deduplicated, ascending).
std::vector<Index> window_grid(Index train_size, int count = 25);

/// Decay rate whose weight at age `window` equals `tail_weight` (default
/// 0.01), mapping the window grid onto an eta1 grid of comparable spans.
double window_to_eta1(double window, double tail_weight = 0.01);

/// Shared result shape so the harness can treat every baseline uniformly:
/// `train_model` is the fit on the training segment used for validation
/// scoring; `final_model` additionally absorbs the validation samples and is
/// what predicts the test segment.
struct BaselineFit {
  RidgeSolution train_model;
  RidgeSolution final_model;
  double valid_mse = 0.0;
  double chosen = 0.0;  // window length or eta1; unused for stationary
};

/// Mean squared one-step error of `theta` over the validation segment.
double validation_mse(const Dataset& data, const SplitSpec& split, const Vector& theta);

/// Unweighted fit (no forgetting).
BaselineFit fit_stationary(const Dataset& data, const SplitSpec& split,
                           const SolverConfig& solver);

/// Uniform weights on the last w training samples, w selected from `windows`
/// by validation MSE (ties prefer the longest window). The final model keeps
/// the cutoff anchored at the training boundary and gives validation samples
/// weight 1, so the effective window ends at the validation boundary.
BaselineFit fit_window(const Dataset& data, const SplitSpec& split, const SolverConfig& solver,
                       const std::vector<Index>& windows);

/// Exponential decay with eta1 grid-searched over window_to_eta1(windows)
/// (ties prefer the smallest eta1); the final model uses the same refit
/// convention as the gradient-based methods.
BaselineFit fit_grid_exp(const Dataset& data, const SplitSpec& split, const SolverConfig& solver,
                         const std::vector<Index>& windows, double tail_weight = 0.01);

/// Random-walk-coefficient observation model: theta_t = theta_{t-1} + nu_t
/// with nu ~ N(0, state_var*I), y_t = x_t^T theta_t + eps_t with
/// eps ~ N(0, obs_var), prior theta_0 = 0, P_0 = init_cov*I. One-step
/// predictions are invariant to a common rescaling of the three variances.
struct StateSpaceConfig {
  double obs_var = 1.0;
  double state_var = 1e-4;
  double init_cov = 1e6;

  void validate() const;
};

/// Default grid: state-to-observation variance ratios 1e-8 .. 1e-1 at
/// obs_var = 1 with a diffuse prior, exploiting the scale invariance of the
/// one-step predictions.
std::vector<StateSpaceConfig> default_state_space_grid();

/// Kalman one-step-ahead predictions x_t^T theta_{t|t-1} over the first
/// `rows` samples. Optionally reports the final filtered mean.
Vector kalman_one_step_predictions(const Dataset& data, Index rows,
                                   const StateSpaceConfig& cfg, Vector* final_theta = nullptr);

struct KalmanFit {
  Vector test_predictions;
  StateSpaceConfig chosen;
  double valid_mse = 0.0;
  Vector final_theta;
};

/// Filters each candidate config through train+validation, picks the config
/// with the lowest one-step validation MSE (ties prefer the earlier grid
/// entry), and returns that filter's one-step predictions over the test
/// segment.
KalmanFit kalman_fit_predict(const Dataset& data, const SplitSpec& split,
                             const std::vector<StateSpaceConfig>& grid);

}  // namespace forgecast
