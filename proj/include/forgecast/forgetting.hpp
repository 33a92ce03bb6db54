#pragma once

#include "forgecast/types.hpp"

namespace forgecast {

enum class MechanismKind { Exponential, MixedDecay };

int param_dim(MechanismKind kind);
std::string_view to_string(MechanismKind kind);
MechanismKind mechanism_from_string(std::string_view name);

/// Parametric weight-versus-age family alpha(age; eta).
///
/// Exponential:  alpha = exp(-eta1 * age)
/// MixedDecay:   alpha = exp(-eta1 * age - eta2 * age^2 - eta3 * log(age + 1))
///
/// With eta >= 0 every weight lies in (0, 1] and alpha(0; eta) = 1. The
/// optimizer keeps eta on the nonnegative orthant by projection; the struct
/// itself only requires finite entries so that finite-difference probes can
/// evaluate slightly outside it. validate() applies the strict contract.
struct ForgettingParams {
  MechanismKind kind = MechanismKind::Exponential;
  Vector eta;

  static ForgettingParams exponential(double eta1);
  static ForgettingParams mixed_decay(double eta1, double eta2, double eta3);
  static ForgettingParams zeros(MechanismKind kind);

  void validate() const;
};

double weight(const ForgettingParams& params, double age);

/// Elementwise alpha(age; eta) over an age vector.
Array weight_vector(const ForgettingParams& params, const Array& ages);

/// Jacobian d alpha(age_i; eta) / d eta_j, shape |ages| x dim(eta).
Matrix weight_jacobian(const ForgettingParams& params, const Array& ages);

}  // namespace forgecast
