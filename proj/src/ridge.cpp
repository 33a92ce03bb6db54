#include "forgecast/ridge.hpp"

#include <cmath>
#include <string>

namespace forgecast {

namespace {

constexpr double kPivotTolerance = 1e-12;  // relative to the largest gram diagonal

void check_weights(const Array& weights, Index rows) {
  if (weights.size() != rows) {
    throw std::invalid_argument(
        "ridge: weight vector length " + std::to_string(weights.size()) +
        " does not match fitted rows " + std::to_string(rows));
  }
  if (!weights.allFinite() || (weights < 0.0).any()) {
    throw std::invalid_argument("ridge: weights must be finite and >= 0");
  }
  if ((weights == 0.0).all()) {
    throw std::invalid_argument("ridge: all-zero weight vector (effective sample size 0)");
  }
}

}  // namespace

HessianMode hessian_mode_from_string(std::string_view name) {
  if (name == "exact") return HessianMode::Exact;
  if (name == "identity") return HessianMode::Identity;
  throw std::invalid_argument("unknown hessian mode: " + std::string(name));
}

std::string_view to_string(HessianMode mode) {
  return mode == HessianMode::Exact ? "exact" : "identity";
}

double lower_objective(const Dataset& data, const SplitSpec& split, const Array& weights,
                       const Vector& theta, const SolverConfig& cfg) {
  const Index n = split.train_end;
  if (weights.size() != n) {
    throw std::invalid_argument("lower_objective: weights length must equal train size");
  }
  if (theta.size() != data.dim()) {
    throw std::invalid_argument("lower_objective: theta dimension mismatch");
  }
  const auto X = data.features().topRows(n);
  const auto y = data.labels().head(n);
  const Array r = (y - X * theta).array();
  return (weights * r.square()).sum() + cfg.ridge_penalty * theta.squaredNorm();
}

RidgeSolution solve_prefix(const Dataset& data, Index rows, const Array& weights,
                           const SolverConfig& cfg) {
  if (rows < 1 || rows > data.size()) {
    throw std::invalid_argument("ridge: fitted rows out of range");
  }
  if (cfg.ridge_penalty < 0.0) {
    throw std::invalid_argument("ridge: penalty must be >= 0");
  }
  check_weights(weights, rows);

  const Index d = data.dim();
  const auto X = data.features().topRows(rows);
  const auto y = data.labels().head(rows);

  Matrix gram = Matrix::Zero(d, d);
  const Matrix scaled = (X.array().colwise() * weights.sqrt()).matrix();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += cfg.ridge_penalty;

  Eigen::LDLT<Matrix> ldlt(gram);
  const double max_diag = gram.diagonal().maxCoeff();
  const double tol = kPivotTolerance * max_diag;
  const Index defect = (ldlt.vectorD().array() <= tol).count();
  if (ldlt.info() != Eigen::Success || defect > 0) {
    throw SingularMatrixError(
        "ridge: gram matrix is singular (rank " + std::to_string(d - defect) + " of " +
        std::to_string(d) + ", defect " + std::to_string(defect) +
        ", penalty=" + std::to_string(cfg.ridge_penalty) + ")");
  }

  RidgeSolution out;
  out.theta = ldlt.solve(X.transpose() * (weights * y.array()).matrix());
  out.gram = std::move(gram);
  out.residuals = y - X * out.theta;
  out.gram_ldlt = std::move(ldlt);
  out.fitted_rows = rows;
  return out;
}

RidgeSolution solve(const Dataset& data, const SplitSpec& split, const Array& weights,
                    const SolverConfig& cfg) {
  return solve_prefix(data, split.train_end, weights, cfg);
}

Matrix implicit_jacobian(const RidgeSolution& solution, const Dataset& data,
                         const Matrix& weight_jac, const SolverConfig& cfg) {
  const Index n = solution.fitted_rows;
  if (weight_jac.rows() != n) {
    throw std::invalid_argument("implicit_jacobian: weight jacobian rows must match fit");
  }
  const auto X = data.features().topRows(n);

  // d(grad_theta lower)/d eta_j = -2 sum_tau (dw_tau/d eta_j) x_tau r_tau
  const Matrix dgrad =
      -2.0 * (X.transpose() *
              (weight_jac.array().colwise() * solution.residuals.array()).matrix());

  if (cfg.hessian_mode == HessianMode::Identity) {
    return -dgrad;
  }
  if (solution.gram_ldlt.info() != Eigen::Success) {
    throw SingularMatrixError("implicit_jacobian: gram factorization unavailable");
  }
  // Hessian of the lower objective is 2*gram.
  return -0.5 * solution.gram_ldlt.solve(dgrad);
}

UpperGradient upper_gradient(const ForgettingParams& eta, const Dataset& data,
                             const SplitSpec& split, std::span<const Index> valid_subset,
                             const SolverConfig& cfg) {
  if (valid_subset.empty()) {
    throw std::invalid_argument("upper_gradient: validation subset is empty");
  }
  for (Index t : valid_subset) {
    if (t < split.train_end || t >= split.valid_end) {
      throw std::invalid_argument("upper_gradient: index " + std::to_string(t) +
                                  " is outside the validation segment");
    }
  }

  const Array ages = ages_of(split);
  const Array w = weight_vector(eta, ages);
  const RidgeSolution sol = solve(data, split, w, cfg);
  const Matrix dtheta = implicit_jacobian(sol, data, weight_jacobian(eta, ages), cfg);

  Vector grad_theta = Vector::Zero(data.dim());
  double loss = 0.0;
  for (Index t : valid_subset) {
    const double r = data.labels()[t] - data.features().row(t).dot(sol.theta);
    loss += r * r;
    grad_theta.noalias() += -2.0 * r * data.features().row(t).transpose();
  }
  return UpperGradient{dtheta.transpose() * grad_theta, loss};
}

double validation_loss(const ForgettingParams& eta, const Dataset& data,
                       const SplitSpec& split, const SolverConfig& cfg) {
  const Array w = weight_vector(eta, ages_of(split));
  const RidgeSolution sol = solve(data, split, w, cfg);
  const auto X = data.features().middleRows(split.train_end, split.valid_size());
  const auto y = data.labels().segment(split.train_end, split.valid_size());
  return (y - X * sol.theta).squaredNorm();
}

}  // namespace forgecast
