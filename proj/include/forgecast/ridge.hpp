#pragma once

#include "forgecast/core.hpp"
#include "forgecast/forgetting.hpp"

#include <span>

namespace forgecast {

enum class HessianMode { Exact, Identity };

HessianMode hessian_mode_from_string(std::string_view name);
std::string_view to_string(HessianMode mode);

struct SolverConfig {
  double ridge_penalty = 0.0;
  HessianMode hessian_mode = HessianMode::Exact;
};

/// Closed-form weighted ridge solution together with the artifacts implicit
/// differentiation needs. gram = sum_tau w_tau x_tau x_tau^T + penalty*I;
/// the lower-level Hessian is exactly 2*gram, and that factor of two is kept
/// explicit wherever the Hessian enters a formula.
struct RidgeSolution {
  Vector theta;
  Matrix gram;
  Vector residuals;  // y_tau - x_tau^T theta over the fitted rows
  Eigen::LDLT<Matrix> gram_ldlt;
  Index fitted_rows = 0;
};

/// sum_tau w_tau (y_tau - x_tau^T theta)^2 + penalty * |theta|^2 over the
/// training segment.
double lower_objective(const Dataset& data, const SplitSpec& split, const Array& weights,
                       const Vector& theta, const SolverConfig& cfg);

/// Weighted ridge on the first `rows` samples. Rejects all-zero weight
/// vectors (the argmin is undefined at effective sample size zero) and
/// reports the rank defect when the gram matrix is singular.
RidgeSolution solve_prefix(const Dataset& data, Index rows, const Array& weights,
                           const SolverConfig& cfg);

/// Lower-level argmin over the training segment of `split`.
RidgeSolution solve(const Dataset& data, const SplitSpec& split, const Array& weights,
                    const SolverConfig& cfg);

/// d theta_hat / d eta, shape d x dim(eta), by differentiating the argmin:
/// column j = -(2*gram)^{-1} * d(grad_theta lower)/d eta_j evaluated at
/// theta_hat, with d(grad_theta lower)/d eta_j = -2 sum_tau (dw_tau/d eta_j)
/// x_tau r_tau. In Identity mode the inverse Hessian is replaced by the
/// identity matrix. `weight_jac` rows must cover the fitted samples.
Matrix implicit_jacobian(const RidgeSolution& solution, const Dataset& data,
                         const Matrix& weight_jac, const SolverConfig& cfg);

struct UpperGradient {
  Vector gradient;
  double valid_loss = 0.0;
};

/// Total derivative of the validation loss restricted to `valid_subset`
/// (0-based dataset indices inside the validation segment) with respect to
/// eta, chaining grad_theta of the subset loss through the implicit
/// Jacobian. The subset loss has no direct eta dependence.
UpperGradient upper_gradient(const ForgettingParams& eta, const Dataset& data,
                             const SplitSpec& split, std::span<const Index> valid_subset,
                             const SolverConfig& cfg);

/// Full-validation loss at the lower-level argmin for the given eta.
double validation_loss(const ForgettingParams& eta, const Dataset& data,
                       const SplitSpec& split, const SolverConfig& cfg);

}  // namespace forgecast
