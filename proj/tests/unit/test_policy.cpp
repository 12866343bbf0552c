#include "ddcsf/policy.hpp"

#include <doctest.h>

#include <random>

using namespace ddcsf;

namespace {

Matrix random_features(Eigen::Index k, Eigen::Index n, unsigned seed) {
  std::srand(seed);
  return (Matrix::Random(k, n).array() + 1.0).matrix() * 0.5;
}

GpiConfig tiny_gpi() {
  GpiConfig c;
  c.n_cycles = 2;
  c.steps_per_episode = 50;
  c.exploration_steps = 500;
  c.eval_episodes = 3;
  c.td_epochs = 1;
  c.seed = 4;
  return c;
}

}  // namespace

TEST_CASE("reward weights recover a linear reward") {
  const Matrix f = random_features(5, 300, 1);
  const Vector w0 = Vector::LinSpaced(5, -1.0, 1.0);
  std::vector<double> r(300);
  for (Eigen::Index n = 0; n < 300; ++n) r[static_cast<std::size_t>(n)] = w0.dot(f.col(n));
  const RewardWeights w = fit_reward_weights(f, r, 1e-10);
  CHECK((w.w - w0).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(w.residual < 1e-6);

  std::vector<double> zeros(300, 0.0);
  CHECK(fit_reward_weights(f, zeros, 1e-3).w.norm() == 0.0);
  CHECK_THROWS_AS(fit_reward_weights(f, std::span<const double>(zeros).first(10), 1e-3), DimensionError);
}

TEST_CASE("value with identity SF is the immediate reward estimate") {
  const RewardWeights w{Vector::LinSpaced(4, 1, 4), 0.0};
  const SuccessorMatrix sf{Matrix::Identity(4, 4), 0.0, SfMethod::analytic};
  const Vector f = Vector::Unit(4, 2);
  CHECK(value(w, sf, f) == 3.0);
}

TEST_CASE("bilinear dynamics recover a generating tensor") {
  const ActionFeatureBasis actions(4, 2.0);
  const Eigen::Index k = 3;
  std::srand(2);
  const Matrix p0 = Matrix::Random(k, k * actions.size());
  const Matrix f = random_features(k, 500, 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  std::vector<double> angles(500);
  Matrix next(k, 500);
  BilinearActionModel truth{p0};
  for (Eigen::Index n = 0; n < 500; ++n) {
    angles[static_cast<std::size_t>(n)] = ang(rng);
    next.col(n) = truth.predict(f.col(n), actions(angles[static_cast<std::size_t>(n)]));
  }
  const BilinearActionModel fit = fit_bilinear_dynamics(f, angles, next, actions, 1e-10);
  CHECK(fit.state_size() == k);
  CHECK(fit.action_size() == actions.size());
  CHECK((fit.P - p0).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("greedy action breaks ties towards the first candidate") {
  const ActionFeatureBasis actions(4, 2.0);
  const RewardWeights w{Vector::Zero(3), 0.0};
  const SuccessorMatrix sf{Matrix::Identity(3, 3), 0.9, SfMethod::analytic};
  const BilinearActionModel model{Matrix::Ones(3, 12)};
  const std::vector<double> cands = action_candidates(8);
  REQUIRE(cands.size() == 8);
  CHECK(greedy_action(Vector::Ones(3), 0.0, w, sf, model, 0.9, actions, cands) == cands[0]);
  CHECK_THROWS_AS(greedy_action(Vector::Ones(3), 0.0, w, sf, model, 0.9, actions, {}), ConfigError);
}

TEST_CASE("zero reward gives zero returns") {
  RewardField field;
  field.magnitude = 0.0;
  const auto returns = evaluate_random_walk(5, 100, EnvironmentSpec{}, field, SeedSequence(1));
  REQUIRE(returns.size() == 5);
  for (double r : returns) CHECK(r == 0.0);
}

TEST_CASE("condition names") {
  CHECK(parse_condition("LATENT") == Condition::latent);
  CHECK(parse_condition(to_string(Condition::inferred)) == Condition::inferred);
  CHECK(parse_condition("observed") == Condition::observed);
  CHECK_THROWS_AS(parse_condition("oracle"), ConfigError);
}

TEST_CASE("inferred tracking requires a model") {
  const AgentContext ctx{StateFeatureBasis::from_spec(BasisSpec{}, EnvironmentSpec{}.internal_wall),
                         ActionFeatureBasis::from_spec(BasisSpec{}), std::nullopt};
  CHECK_THROWS_AS(FeatureTracker(Condition::inferred, ctx), ConfigError);
  FeatureTracker latent(Condition::latent, ctx);
  const Point2 s(0.2, 0.3), o(0.9, 0.9);
  CHECK((latent.update(s, o) - ctx.basis(s)).norm() == 0.0);
  FeatureTracker observed(Condition::observed, ctx);
  CHECK((observed.update(s, o) - ctx.basis(o)).norm() == 0.0);
}

TEST_CASE("GPI smoke run is deterministic") {
  const AgentContext ctx{StateFeatureBasis::from_spec(BasisSpec{}, EnvironmentSpec{}.internal_wall),
                         ActionFeatureBasis::from_spec(BasisSpec{}), std::nullopt};
  for (SfMethod method : {SfMethod::td_wake, SfMethod::analytic}) {
    GpiConfig cfg = tiny_gpi();
    cfg.sf_method = method;
    const GpiResult a = generalized_policy_iteration(cfg, Condition::latent, ctx, EnvironmentSpec{}, RewardField{});
    const GpiResult b = generalized_policy_iteration(cfg, Condition::latent, ctx, EnvironmentSpec{}, RewardField{});
    CHECK(a.returns.size() == 2);
    CHECK(a.returns == b.returns);
    CHECK(a.agent.sf.U == b.agent.sf.U);
    CHECK_NOTHROW(a.agent.check_shapes());
  }
  GpiConfig bad = tiny_gpi();
  bad.discount = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
