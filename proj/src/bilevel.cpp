#include "forgecast/bilevel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace forgecast {

void OptimizerConfig::validate() const {
  if (!(step_size >= 0.0)) throw std::invalid_argument("optimizer: step_size must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("optimizer: momentum must lie in [0, 1)");
  }
  if (epochs < 1 || batch_size < 1 || restarts < 1) {
    throw std::invalid_argument("optimizer: epochs, batch_size and restarts must be >= 1");
  }
  if (!(init_low <= init_high)) {
    throw std::invalid_argument("optimizer: init_low must be <= init_high");
  }
}

BilevelResult fit(const Dataset& data, const SplitSpec& split, MechanismKind kind,
                  const SolverConfig& solver, const OptimizerConfig& opt) {
  opt.validate();
  if (split.valid_size() < 1) {
    throw std::invalid_argument("bilevel: validation segment is empty");
  }
  const int dim = param_dim(kind);

  std::vector<Index> valid_idx(static_cast<std::size_t>(split.valid_size()));
  std::iota(valid_idx.begin(), valid_idx.end(), split.train_end);

  BilevelResult result;
  result.restart_traces.resize(static_cast<std::size_t>(opt.restarts));
  std::string last_error;

  for (int r = 0; r < opt.restarts; ++r) {
    RestartTrace& trace = result.restart_traces[static_cast<std::size_t>(r)];
    std::mt19937_64 rng(splitmix64(opt.rng_seed + static_cast<std::uint64_t>(r)));
    std::uniform_real_distribution<double> init(opt.init_low, opt.init_high);

    ForgettingParams params;
    params.kind = kind;
    params.eta.resize(dim);
    for (int i = 0; i < dim; ++i) params.eta[i] = init(rng);
    params.eta = params.eta.cwiseMax(0.0);

    Vector velocity = Vector::Zero(dim);
    try {
      for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        std::shuffle(valid_idx.begin(), valid_idx.end(), rng);
        for (std::size_t start = 0; start < valid_idx.size();
             start += static_cast<std::size_t>(opt.batch_size)) {
          const std::size_t len =
              std::min<std::size_t>(static_cast<std::size_t>(opt.batch_size),
                                    valid_idx.size() - start);
          const std::span<const Index> batch(valid_idx.data() + start, len);
          const UpperGradient g = upper_gradient(params, data, split, batch, solver);
          velocity = opt.momentum * velocity - opt.step_size * g.gradient;
          params.eta = (params.eta + velocity).cwiseMax(0.0);
        }
        trace.valid_loss.push_back(validation_loss(params, data, split, solver));
      }
    } catch (const SingularMatrixError& e) {
      trace.failed = true;
      last_error = e.what();
    }
    trace.final_eta = params.eta;
  }

  double best = std::numeric_limits<double>::infinity();
  int best_restart = -1;
  for (int r = 0; r < opt.restarts; ++r) {
    const RestartTrace& trace = result.restart_traces[static_cast<std::size_t>(r)];
    if (trace.failed) continue;
    const double loss = trace.valid_loss.back();
    if (loss < best) {
      best = loss;
      best_restart = r;
    }
  }
  if (best_restart < 0) {
    throw std::runtime_error("bilevel: all restarts failed (last error: " + last_error + ")");
  }

  result.best_restart = best_restart;
  result.best_valid_loss = best;
  result.best_eta.kind = kind;
  result.best_eta.eta = result.restart_traces[static_cast<std::size_t>(best_restart)].final_eta;
  result.final_model = refit(data, split, result.best_eta, solver);
  return result;
}

RidgeSolution refit_weighted(const Dataset& data, const SplitSpec& split,
                             const Array& train_weights, double valid_weight,
                             const SolverConfig& solver) {
  if (train_weights.size() != split.train_end) {
    throw std::invalid_argument("refit: training weights must cover the training segment");
  }
  Array w(split.valid_end);
  w.head(split.train_end) = train_weights;
  w.tail(split.valid_size()) = valid_weight;
  return solve_prefix(data, split.valid_end, w, solver);
}

RidgeSolution refit(const Dataset& data, const SplitSpec& split, const ForgettingParams& eta,
                    const SolverConfig& solver) {
  eta.validate();
  return refit_weighted(data, split, weight_vector(eta, ages_of(split)), weight(eta, 0.0),
                        solver);
}

double predict(const RidgeSolution& model, const Vector& features) {
  if (features.size() != model.theta.size()) {
    throw std::invalid_argument("predict: feature dimension mismatch");
  }
  return features.dot(model.theta);
}

}  // namespace forgecast
