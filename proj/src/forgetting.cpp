#include "forgecast/forgetting.hpp"

#include <cmath>
#include <string>

namespace forgecast {

int param_dim(MechanismKind kind) {
  return kind == MechanismKind::Exponential ? 1 : 3;
}

std::string_view to_string(MechanismKind kind) {
  return kind == MechanismKind::Exponential ? "exponential" : "mixed_decay";
}

MechanismKind mechanism_from_string(std::string_view name) {
  if (name == "exponential") return MechanismKind::Exponential;
  if (name == "mixed_decay") return MechanismKind::MixedDecay;
  throw std::invalid_argument("unknown mechanism kind: " + std::string(name));
}

ForgettingParams ForgettingParams::exponential(double eta1) {
  ForgettingParams p;
  p.kind = MechanismKind::Exponential;
  p.eta = Vector::Constant(1, eta1);
  return p;
}

ForgettingParams ForgettingParams::mixed_decay(double eta1, double eta2, double eta3) {
  ForgettingParams p;
  p.kind = MechanismKind::MixedDecay;
  p.eta.resize(3);
  p.eta << eta1, eta2, eta3;
  return p;
}

ForgettingParams ForgettingParams::zeros(MechanismKind kind) {
  ForgettingParams p;
  p.kind = kind;
  p.eta = Vector::Zero(param_dim(kind));
  return p;
}

void ForgettingParams::validate() const {
  if (eta.size() != param_dim(kind)) {
    throw std::invalid_argument(
        "ForgettingParams: eta has " + std::to_string(eta.size()) + " entries, expected " +
        std::to_string(param_dim(kind)) + " for " + std::string(to_string(kind)));
  }
  if (!eta.allFinite()) {
    throw std::invalid_argument("ForgettingParams: non-finite eta entry");
  }
  if ((eta.array() < 0.0).any()) {
    throw std::invalid_argument("ForgettingParams: eta entries must be >= 0");
  }
}

double weight(const ForgettingParams& params, double age) {
  if (params.kind == MechanismKind::Exponential) {
    return std::exp(-(params.eta[0] * age));
  }
  return std::exp(-(params.eta[0] * age + params.eta[1] * age * age +
                    params.eta[2] * std::log(age + 1.0)));
}

Array weight_vector(const ForgettingParams& params, const Array& ages) {
  if (params.kind == MechanismKind::Exponential) {
    return (-(params.eta[0] * ages)).exp();
  }
  return (-(params.eta[0] * ages + params.eta[1] * ages.square() +
            params.eta[2] * (ages + 1.0).log()))
      .exp();
}

Matrix weight_jacobian(const ForgettingParams& params, const Array& ages) {
  const Array w = weight_vector(params, ages);
  Matrix jac(ages.size(), param_dim(params.kind));
  jac.col(0) = -(ages * w);
  if (params.kind == MechanismKind::MixedDecay) {
    jac.col(1) = -(ages.square() * w);
    jac.col(2) = -((ages + 1.0).log() * w);
  }
  return jac;
}

}  // namespace forgecast
