#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "forgecast/ridge.hpp"
#include "forgecast/synthgen.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace forgecast;

namespace {

Dataset ones_feature_dataset(const std::vector<double>& labels) {
  Matrix x = Matrix::Ones(static_cast<Index>(labels.size()), 1);
  Vector y = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  return Dataset(std::move(x), std::move(y));
}

struct RandomInstance {
  Dataset data;
  SplitSpec split;
  ForgettingParams eta;
  SolverConfig cfg;
};

RandomInstance draw_instance(std::mt19937_64& rng, int trial) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> d_draw(1, 3);
  const Index d = d_draw(rng);
  std::uniform_int_distribution<Index> t_draw(d + 3, 50);
  const Index t_star = t_draw(rng);
  const Index valid_len = 5;
  const Index total = t_star + valid_len + 1;

  Matrix x(total, d);
  for (Index i = 0; i < total; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = gauss(rng);
  }
  Vector coef(d);
  for (Index j = 0; j < d; ++j) coef[j] = gauss(rng);
  Vector y = x * coef;
  for (Index i = 0; i < total; ++i) y[i] += 0.1 * gauss(rng);

  RandomInstance out{Dataset(std::move(x), std::move(y)),
                     make_split(total, t_star, valid_len, 1),
                     ForgettingParams{},
                     SolverConfig{}};
  out.eta.kind = trial % 2 == 0 ? MechanismKind::Exponential : MechanismKind::MixedDecay;
  out.eta.eta.resize(param_dim(out.eta.kind));
  for (Index j = 0; j < out.eta.eta.size(); ++j) out.eta.eta[j] = unit(rng);
  out.cfg.ridge_penalty = trial % 4 < 2 ? 0.0 : 1e-4;
  return out;
}

std::vector<Index> full_validation(const SplitSpec& split) {
  std::vector<Index> idx(static_cast<std::size_t>(split.valid_size()));
  std::iota(idx.begin(), idx.end(), split.train_end);
  return idx;
}

// Independent oracle: central finite differences of the validation loss
// through the closed-form solve.
Vector fd_upper_gradient(const ForgettingParams& eta, const Dataset& data,
                         const SplitSpec& split, const SolverConfig& cfg, double step) {
  Vector grad(eta.eta.size());
  for (Index j = 0; j < eta.eta.size(); ++j) {
    ForgettingParams hi = eta;
    ForgettingParams lo = eta;
    hi.eta[j] += step;
    lo.eta[j] -= step;
    grad[j] =
        (validation_loss(hi, data, split, cfg) - validation_loss(lo, data, split, cfg)) /
        (2.0 * step);
  }
  return grad;
}

}  // namespace

TEST_CASE("lower_objective evaluates the weighted penalized loss") {
  const Dataset ds = ones_feature_dataset({2.0, 4.0, 0.0, 0.0});
  const SplitSpec split = make_split(4, 2, 1, 1);
  Vector theta = Vector::Zero(1);
  Array w = Array::Ones(2);
  SolverConfig cfg;

  CHECK(lower_objective(ds, split, w, theta, cfg) == 20.0);

  Array zero_w = Array::Zero(2);
  theta[0] = -123.0;
  CHECK(lower_objective(ds, split, zero_w, theta, cfg) == 0.0);

  theta[0] = 3.5;
  Array w13(2);
  w13 << 1.0, 3.0;
  // Hand evaluation: 1*(2-3.5)^2 + 3*(4-3.5)^2 = 2.25 + 0.75
  CHECK(lower_objective(ds, split, w13, theta, cfg) == doctest::Approx(3.0).epsilon(1e-15));

  cfg.ridge_penalty = 2.0;
  CHECK(lower_objective(ds, split, w13, theta, cfg) ==
        doctest::Approx(3.0 + 2.0 * 3.5 * 3.5).epsilon(1e-15));

  Vector wrong_dim(2);
  CHECK_THROWS_AS(lower_objective(ds, split, w13, wrong_dim, cfg), std::invalid_argument);
}

TEST_CASE("solve recovers weighted means on constant features") {
  const Dataset ds = ones_feature_dataset({2.0, 4.0, 0.0, 0.0});
  const SplitSpec split = make_split(4, 2, 1, 1);
  SolverConfig cfg;

  const RidgeSolution uniform = solve(ds, split, Array::Ones(2), cfg);
  CHECK(uniform.theta[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(uniform.fitted_rows == 2);
  CHECK(uniform.residuals[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(uniform.residuals[1] == doctest::Approx(1.0).epsilon(1e-15));

  Array w(2);
  w << 1.0, 3.0;
  // Normal equations by hand: theta = (1*2 + 3*4) / (1 + 3) = 3.5
  const RidgeSolution weighted = solve(ds, split, w, cfg);
  CHECK(weighted.theta[0] == doctest::Approx(3.5).epsilon(1e-15));

  cfg.ridge_penalty = 1e12;
  const RidgeSolution shrunk = solve(ds, split, w, cfg);
  CHECK(shrunk.theta.norm() < 1e-6);
}

TEST_CASE("solve reports singularity with the rank defect") {
  Matrix x(3, 2);
  x << 1, 1, 2, 2, 3, 3;  // duplicated column: rank 1
  Vector y(3);
  y << 1, 2, 3;
  const Dataset ds(x, y);
  const SplitSpec split = make_split(3, 1, 1, 1);
  SolverConfig cfg;
  Array w = Array::Ones(1);
  CHECK_THROWS_WITH_AS(solve(ds, split, w, cfg), doctest::Contains("rank"),
                       SingularMatrixError);

  cfg.ridge_penalty = 1e-6;
  CHECK_NOTHROW(solve(ds, split, w, cfg));
}

TEST_CASE("solve rejects invalid weights") {
  const Dataset ds = ones_feature_dataset({1.0, 2.0, 3.0});
  const SplitSpec split = make_split(3, 1, 1, 1);
  SolverConfig cfg;
  CHECK_THROWS_WITH_AS(solve(ds, split, Array::Zero(1), cfg),
                       doctest::Contains("effective sample size"), std::invalid_argument);
  Array negative = Array::Constant(1, -0.5);
  CHECK_THROWS_AS(solve(ds, split, negative, cfg), std::invalid_argument);
  CHECK_THROWS_AS(solve(ds, split, Array::Ones(2), cfg), std::invalid_argument);
}

TEST_CASE("normal equations hold at the solution") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomInstance inst = draw_instance(rng, trial);
    SolverConfig cfg{1e-4, HessianMode::Exact};
    const Array w = weight_vector(inst.eta, ages_of(inst.split));
    const RidgeSolution sol = solve(inst.data, inst.split, w, cfg);
    const auto X = inst.data.features().topRows(inst.split.train_end);
    const auto y = inst.data.labels().head(inst.split.train_end);
    const Vector b = X.transpose() * (w * y.array()).matrix();
    const double rel = (sol.gram * sol.theta - b).norm() / std::max(1.0, b.norm());
    CHECK(rel <= 1e-8);
  }
}

TEST_CASE("closed-form solution minimizes the lower objective") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const RandomInstance inst = draw_instance(rng, trial);
    SolverConfig cfg{1e-3, HessianMode::Exact};
    const Array w = weight_vector(inst.eta, ages_of(inst.split));
    const RidgeSolution sol = solve(inst.data, inst.split, w, cfg);
    const double at_min = lower_objective(inst.data, inst.split, w, sol.theta, cfg);
    for (int k = 0; k < 100; ++k) {
      Vector delta(sol.theta.size());
      for (Index j = 0; j < delta.size(); ++j) delta[j] = gauss(rng);
      delta *= 1e-3 / delta.norm();
      CHECK(lower_objective(inst.data, inst.split, w, sol.theta + delta, cfg) >= at_min);
    }
  }
}

TEST_CASE("solve is invariant to joint weight and penalty rescaling") {
  std::mt19937_64 rng(13);
  const RandomInstance inst = draw_instance(rng, 0);
  const Array w = weight_vector(inst.eta, ages_of(inst.split));
  const RidgeSolution base = solve(inst.data, inst.split, w, SolverConfig{1e-4});

  // Power-of-two scaling commutes with every floating-point operation.
  const RidgeSolution x4 = solve(inst.data, inst.split, 4.0 * w, SolverConfig{4.0 * 1e-4});
  CHECK((x4.theta - base.theta).cwiseAbs().maxCoeff() == 0.0);

  const RidgeSolution x3 = solve(inst.data, inst.split, 3.0 * w, SolverConfig{3.0 * 1e-4});
  CHECK((x3.theta - base.theta).cwiseAbs().maxCoeff() <=
        1e-12 * std::max(1.0, base.theta.cwiseAbs().maxCoeff()));
}

TEST_CASE("implicit jacobian vanishes without weight sensitivity or residuals") {
  const Dataset ds = ones_feature_dataset({2.0, 4.0, 3.0, 0.0});
  const SplitSpec split = make_split(4, 2, 1, 1);
  SolverConfig cfg;
  const RidgeSolution sol = solve(ds, split, Array::Ones(2), cfg);

  const Matrix zero_jac = Matrix::Zero(2, 1);
  CHECK(implicit_jacobian(sol, ds, zero_jac, cfg).cwiseAbs().maxCoeff() == 0.0);

  // Perfect fit: labels equal a linear function of the features exactly.
  const Dataset exact = ones_feature_dataset({5.0, 5.0, 5.0, 5.0});
  const RidgeSolution fit = solve(exact, split, Array::Ones(2), cfg);
  REQUIRE(fit.residuals.cwiseAbs().maxCoeff() <= 1e-14);
  Matrix jac(2, 1);
  jac << -0.3, -0.7;
  CHECK(implicit_jacobian(fit, exact, jac, cfg).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("implicit jacobian matches the scalar closed form") {
  // One training sample (x=1, y=1) with weight w = exp(-eta), penalty 0.1:
  // theta_hat = w/(w+0.1), d theta / d eta = -0.1 w / (w+0.1)^2.
  const Dataset ds = ones_feature_dataset({1.0, 0.0, 0.0});
  const SplitSpec split = make_split(3, 1, 1, 1);
  SolverConfig cfg{0.1, HessianMode::Exact};
  const double eta = 0.5;
  const double w = std::exp(-eta);

  Array weights(1);
  weights << w;
  const RidgeSolution sol = solve(ds, split, weights, cfg);
  CHECK(sol.theta[0] == doctest::Approx(w / (w + 0.1)).epsilon(1e-14));

  Matrix weight_jac(1, 1);
  weight_jac << -w;  // dw/d eta
  const Matrix dtheta = implicit_jacobian(sol, ds, weight_jac, cfg);
  const double analytic = -0.1 * w / ((w + 0.1) * (w + 0.1));
  CHECK(dtheta(0, 0) == doctest::Approx(analytic).epsilon(1e-12));

  // Finite differences through solve.
  const double h = 1e-6;
  Array w_hi(1), w_lo(1);
  w_hi << std::exp(-(eta + h));
  w_lo << std::exp(-(eta - h));
  const double fd = (solve(ds, split, w_hi, cfg).theta[0] -
                     solve(ds, split, w_lo, cfg).theta[0]) /
                    (2.0 * h);
  CHECK(std::abs(dtheta(0, 0) - fd) / std::abs(fd) < 1e-6);
}

TEST_CASE("upper gradient is zero at a perfect validation fit") {
  const Dataset ds = ones_feature_dataset({2.0, 4.0, 3.0, 0.0});
  const SplitSpec split = make_split(4, 2, 1, 1);
  const auto idx = full_validation(split);
  const UpperGradient g = upper_gradient(ForgettingParams::exponential(0.0), ds, split, idx,
                                         SolverConfig{});
  CHECK(g.valid_loss == 0.0);
  CHECK(g.gradient.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("upper gradient matches finite differences on an AR toy series") {
  const SeriesSpec spec{DgpKind::FixedRegime, 60, 0.05};
  const RawSeries series = generate(spec, 2022);
  const Dataset ds = to_supervised(series.y);
  const SplitSpec split = make_split(ds.size(), 40, 10, 7);
  const auto idx = full_validation(split);

  for (double penalty : {1e-4, 0.0}) {
    const SolverConfig cfg{penalty, HessianMode::Exact};
    const ForgettingParams eta = ForgettingParams::exponential(0.2);
    const UpperGradient g = upper_gradient(eta, ds, split, idx, cfg);
    const Vector fd = fd_upper_gradient(eta, ds, split, cfg, 1e-5);
    const double denom = std::max(fd.cwiseAbs().maxCoeff(), 1e-10);
    CHECK((g.gradient - fd).cwiseAbs().maxCoeff() / denom < 1e-5);
    CHECK(g.valid_loss > 0.0);
  }
}

TEST_CASE("upper gradient matches finite differences on random instances") {
  std::mt19937_64 rng(321);
  int accepted = 0;
  int attempts = 0;
  double worst = 0.0;
  while (accepted < 50 && attempts < 600) {
    ++attempts;
    const RandomInstance inst = draw_instance(rng, attempts);
    const auto idx = full_validation(inst.split);
    try {
      const UpperGradient g = upper_gradient(inst.eta, inst.data, inst.split, idx, inst.cfg);
      const Vector fd = fd_upper_gradient(inst.eta, inst.data, inst.split, inst.cfg, 1e-5);
      if (fd.cwiseAbs().maxCoeff() < 1e-2) continue;  // below the fd noise floor
      worst = std::max(worst,
                       (g.gradient - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff());
      ++accepted;
    } catch (const SingularMatrixError&) {
      continue;  // sharp decay at penalty 0 can defeat the gram matrix
    }
  }
  REQUIRE(accepted == 50);
  CHECK(worst < 1e-5);
}

TEST_CASE("identity hessian mode yields a descent direction in the scalar case") {
  std::mt19937_64 rng(55);
  int tested = 0;
  for (int trial = 0; tested < 20 && trial < 100; ++trial) {
    RandomInstance inst = draw_instance(rng, 2 * trial);  // exponential mechanism
    if (inst.data.dim() != 1) continue;
    inst.cfg.ridge_penalty = 1e-4;
    const auto idx = full_validation(inst.split);

    inst.cfg.hessian_mode = HessianMode::Exact;
    const UpperGradient exact = upper_gradient(inst.eta, inst.data, inst.split, idx, inst.cfg);
    inst.cfg.hessian_mode = HessianMode::Identity;
    const UpperGradient ident = upper_gradient(inst.eta, inst.data, inst.split, idx, inst.cfg);

    if (exact.gradient.cwiseAbs().maxCoeff() < 1e-12) continue;
    // With d = 1 the exact gradient is the identity-mode gradient scaled by
    // 1/(2*gram), so signs agree and identity mode still descends.
    CHECK(exact.gradient.dot(ident.gradient) >= 0.0);
    const Array w = weight_vector(inst.eta, ages_of(inst.split));
    const double gram = solve(inst.data, inst.split, w, inst.cfg).gram(0, 0);
    CHECK(ident.gradient[0] / (2.0 * gram) ==
          doctest::Approx(exact.gradient[0]).epsilon(1e-9));
    ++tested;
  }
  CHECK(tested == 20);
}
