#pragma once

#include "forgecast/ridge.hpp"

#include <cstdint>
#include <vector>

namespace forgecast {

/// Mini-batch SGD-with-momentum settings for the upper-level search over eta.
struct OptimizerConfig {
  double step_size = 0.1;
  double momentum = 0.9;
  int epochs = 50;
  int batch_size = 32;
  int restarts = 5;
  double init_low = 0.0;
  double init_high = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct RestartTrace {
  Vector final_eta;
  std::vector<double> valid_loss;  // full-validation loss after each epoch
  bool failed = false;
};

struct BilevelResult {
  ForgettingParams best_eta;
  double best_valid_loss = 0.0;  // full-validation loss of the winning restart
  std::vector<RestartTrace> restart_traces;
  RidgeSolution final_model;  // refit on train + validation
  int best_restart = -1;
};

/// Gradient-based search over the forgetting parameters. Each restart draws
/// eta uniformly from [init_low, init_high]^dim, then runs `epochs` passes of
/// mini-batch updates over shuffled validation indices: the gradient is the
/// implicit total derivative of the batch loss, the velocity update is
/// v <- momentum*v - step_size*g, eta <- eta + v, followed by projection onto
/// eta >= 0. The lower-level fit is re-solved in closed form at every step,
/// so the argmin assumption behind the implicit gradient holds exactly.
/// Restarts that hit a singular solve are recorded as failed; the winner is
/// the non-failed restart with the lowest final full-validation loss.
BilevelResult fit(const Dataset& data, const SplitSpec& split, MechanismKind kind,
                  const SolverConfig& solver, const OptimizerConfig& opt);

/// Final fit on train + validation: training sample tau keeps its mechanism
/// weight alpha(train_end - 1 - tau; eta) while every validation sample gets
/// the age-zero weight alpha(0; eta).
RidgeSolution refit(const Dataset& data, const SplitSpec& split, const ForgettingParams& eta,
                    const SolverConfig& solver);

/// Same refit combination rule with explicit training weights (used by the
/// window and grid-search baselines, which share the convention).
RidgeSolution refit_weighted(const Dataset& data, const SplitSpec& split,
                             const Array& train_weights, double valid_weight,
                             const SolverConfig& solver);

double predict(const RidgeSolution& model, const Vector& features);

}  // namespace forgecast
