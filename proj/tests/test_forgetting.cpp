#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "forgecast/forgetting.hpp"

#include <cmath>
#include <random>

using namespace forgecast;

namespace {

// Central finite differences of weight() in eta, the independent check for
// every analytic jacobian below.
Matrix fd_jacobian(const ForgettingParams& params, const Array& ages, double step) {
  Matrix jac(ages.size(), params.eta.size());
  for (Index j = 0; j < params.eta.size(); ++j) {
    ForgettingParams hi = params;
    ForgettingParams lo = params;
    hi.eta[j] += step;
    lo.eta[j] -= step;
    const Array up = weight_vector(hi, ages);
    const Array dn = weight_vector(lo, ages);
    jac.col(j) = ((up - dn) / (2.0 * step)).matrix();
  }
  return jac;
}

}  // namespace

TEST_CASE("weight closed forms") {
  CHECK(weight(ForgettingParams::exponential(3.7), 0.0) == 1.0);
  CHECK(weight(ForgettingParams::exponential(0.0), 17.0) == 1.0);

  const ForgettingParams half = ForgettingParams::exponential(std::log(2.0));
  CHECK(weight(half, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(weight(half, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(weight(half, 2.0) == doctest::Approx(0.25).epsilon(1e-15));

  // Pure log term decays as 1/(age+1).
  const ForgettingParams harmonic = ForgettingParams::mixed_decay(0.0, 0.0, 1.0);
  CHECK(weight(harmonic, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(weight(harmonic, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(weight(harmonic, 3.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("weight_vector elementwise application") {
  Array ages(3);
  ages << 2, 1, 0;

  const Array uniform = weight_vector(ForgettingParams::exponential(0.0), ages);
  CHECK((uniform == 1.0).all());

  const Array zeros = weight_vector(ForgettingParams::mixed_decay(0, 0, 0), ages);
  CHECK((zeros == 1.0).all());

  const Array half = weight_vector(ForgettingParams::exponential(std::log(2.0)), ages);
  CHECK(half[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half[2] == 1.0);
}

TEST_CASE("weight_jacobian closed forms") {
  Array ages(3);
  ages << 0, 1, 2;
  const Matrix jac = weight_jacobian(ForgettingParams::exponential(0.0), ages);
  REQUIRE(jac.rows() == 3);
  REQUIRE(jac.cols() == 1);
  CHECK(jac(0, 0) == 0.0);
  CHECK(jac(1, 0) == -1.0);
  CHECK(jac(2, 0) == -2.0);

  Array one(1);
  one << 1;
  const Matrix mixed = weight_jacobian(ForgettingParams::mixed_decay(0, 0, 0), one);
  REQUIRE(mixed.cols() == 3);
  CHECK(mixed(0, 0) == -1.0);
  CHECK(mixed(0, 1) == -1.0);
  CHECK(mixed(0, 2) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("jacobian matches central differences on a fixed instance") {
  Array ages(11);
  for (Index i = 0; i < 11; ++i) ages[i] = static_cast<double>(i);
  const ForgettingParams params = ForgettingParams::exponential(0.3);
  const Matrix jac = weight_jacobian(params, ages);
  const Matrix fd = fd_jacobian(params, ages, 1e-5);
  for (Index i = 0; i < jac.rows(); ++i) {
    if (std::abs(fd(i, 0)) > 1e-10) {
      CHECK(std::abs(jac(i, 0) - fd(i, 0)) / std::abs(fd(i, 0)) < 1e-6);
    } else {
      CHECK(std::abs(jac(i, 0)) < 1e-10);
    }
  }
}

TEST_CASE("jacobian matches central differences on random draws") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> eta_draw(1e-3, 1.0);
  std::uniform_int_distribution<int> age_draw(0, 10);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ForgettingParams params;
    params.kind = trial % 2 == 0 ? MechanismKind::Exponential : MechanismKind::MixedDecay;
    params.eta.resize(param_dim(params.kind));
    for (Index j = 0; j < params.eta.size(); ++j) params.eta[j] = eta_draw(rng);
    Array ages(1);
    ages << static_cast<double>(age_draw(rng));
    const Matrix jac = weight_jacobian(params, ages);
    const Matrix fd = fd_jacobian(params, ages, 1e-5);
    const double denom = std::max(fd.cwiseAbs().maxCoeff(), 1e-9);
    worst = std::max(worst, (jac - fd).cwiseAbs().maxCoeff() / denom);
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("weights stay in (0, 1] with nonnegative eta") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> eta_draw(0.0, 1.0);
  Array ages(42);
  for (Index i = 0; i < ages.size(); ++i) ages[i] = static_cast<double>(41 - i);
  for (int trial = 0; trial < 50; ++trial) {
    ForgettingParams params;
    params.kind = trial % 2 == 0 ? MechanismKind::Exponential : MechanismKind::MixedDecay;
    params.eta.resize(param_dim(params.kind));
    for (Index j = 0; j < params.eta.size(); ++j) params.eta[j] = eta_draw(rng);
    const Array w = weight_vector(params, ages);
    CHECK((w > 0.0).all());
    CHECK((w <= 1.0).all());
    CHECK(w[ages.size() - 1] == 1.0);  // age 0
  }
}

TEST_CASE("exponential weight is strictly decreasing in age for positive eta") {
  const ForgettingParams params = ForgettingParams::exponential(0.07);
  double prev = weight(params, 0.0);
  for (int age = 1; age <= 200; ++age) {
    const double cur = weight(params, static_cast<double>(age));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("exponential coincides with mixed decay at (eta1, 0, 0)") {
  Array ages(101);
  for (Index i = 0; i < ages.size(); ++i) ages[i] = static_cast<double>(i);
  for (double eta1 : {0.0, 0.01, 0.3, 2.0}) {
    const Array a = weight_vector(ForgettingParams::exponential(eta1), ages);
    const Array b = weight_vector(ForgettingParams::mixed_decay(eta1, 0.0, 0.0), ages);
    CHECK(((a - b).abs() <= 1e-12).all());
  }
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS(ForgettingParams::exponential(-0.1).validate(), std::invalid_argument);
  ForgettingParams wrong_arity;
  wrong_arity.kind = MechanismKind::MixedDecay;
  wrong_arity.eta = Vector::Zero(1);
  CHECK_THROWS_AS(wrong_arity.validate(), std::invalid_argument);
  CHECK_NOTHROW(ForgettingParams::mixed_decay(0.0, 0.5, 1.0).validate());
  CHECK(param_dim(MechanismKind::Exponential) == 1);
  CHECK(param_dim(MechanismKind::MixedDecay) == 3);
  CHECK(mechanism_from_string("exponential") == MechanismKind::Exponential);
  CHECK(mechanism_from_string("mixed_decay") == MechanismKind::MixedDecay);
  CHECK_THROWS_AS(mechanism_from_string("bogus"), std::invalid_argument);
}
