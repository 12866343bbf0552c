#include "ddcsf/environment.hpp"
#include "ddcsf/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ddcsf;

TEST_CASE("segments intersect, touching counts") {
  const Segment wall{Point2(0.5, 0.0), Point2(0.5, 0.6)};
  CHECK(segments_intersect(Point2(0.4, 0.3), Point2(0.6, 0.3), wall));
  CHECK(segments_intersect(Point2(0.4, 0.6), Point2(0.6, 0.6), wall));
  CHECK_FALSE(segments_intersect(Point2(0.4, 0.7), Point2(0.6, 0.7), wall));
  CHECK_FALSE(segments_intersect(Point2(0.1, 0.1), Point2(0.4, 0.4), wall));
  // Collinear overlap.
  CHECK(segments_intersect(Point2(0.5, 0.5), Point2(0.5, 0.9), wall));
}

TEST_CASE("distance to segment") {
  const Segment s{Point2(0.0, 0.0), Point2(1.0, 0.0)};
  CHECK(distance_to_segment(Point2(0.5, 0.3), s) == doctest::Approx(0.3));
  CHECK(distance_to_segment(Point2(2.0, 0.0), s) == doctest::Approx(1.0));
  CHECK(distance_to_segment(Point2(-3.0, 4.0), s) == doctest::Approx(5.0));
}

TEST_CASE("wrap_angle lands in [0, 2pi)") {
  const double two_pi = 2.0 * std::numbers::pi;
  for (double a : {-7.0, -two_pi, -0.1, 0.0, 1.0, two_pi, 13.0}) {
    const double w = wrap_angle(a);
    CHECK(w >= 0.0);
    CHECK(w < two_pi);
    CHECK(std::remainder(w - a, two_pi) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("step keeps the agent in the box and never through the wall") {
  EnvironmentSpec env;
  Rng rng(5);
  Point2 s(0.45, 0.3);
  for (int i = 0; i < 20000; ++i) {
    const Point2 next = step(s, std::nullopt, env, rng);
    CHECK(in_unit_box(next));
    if ((next - s).norm() > 0.0) {
      CHECK_FALSE(segments_intersect(s, next, env.internal_wall));
      CHECK((next - s).norm() <= env.step_length + 1e-12);
    }
    s = next;
  }
}

TEST_CASE("directed step moves exactly step_length when unobstructed") {
  EnvironmentSpec env;
  Rng rng(1);
  const Point2 s(0.2, 0.8);
  const Point2 n = step(s, 0.0, env, rng);
  CHECK(n.x() == doctest::Approx(0.26));
  CHECK(n.y() == doctest::Approx(0.8));
  // East from just left of the wall is blocked.
  const Point2 b = step(Point2(0.47, 0.3), 0.0, env, rng);
  CHECK(b.x() == doctest::Approx(0.47));
}

TEST_CASE("observation noise has the configured spread") {
  EnvironmentSpec env;
  Rng rng(9);
  const Point2 s(0.5, 0.8);
  double sx = 0, sxx = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double d = observe(s, env, rng).x() - s.x();
    sx += d;
    sxx += d * d;
  }
  CHECK(std::abs(sx / n) < 4 * env.obs_noise_sigma / std::sqrt(n));
  CHECK(std::sqrt(sxx / n) == doctest::Approx(env.obs_noise_sigma).epsilon(0.02));
}

TEST_CASE("reward is an indicator ball") {
  const RewardField f{Point2(0.25, 0.5), 0.1, 2.0};
  CHECK(reward(f.goal_center, f) == 2.0);
  CHECK(reward(Point2(0.25 + 0.1 + 1e-9, 0.5), f) == 0.0);
  CHECK(reward(Point2(0.25, 0.41), f) == 2.0);
}

TEST_CASE("rollout lengths and determinism") {
  EnvironmentSpec env;
  RewardField f;
  Rng a(42), b(42);
  const Trajectory t1 = rollout(random_walk_policy(), 300, env, f, a);
  const Trajectory t2 = rollout(random_walk_policy(), 300, env, f, b);
  CHECK(t1.size() == 300);
  CHECK(t1.observed.size() == 300);
  CHECK(t1.rewards.size() == 300);
  t1.validate();
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1.latent[i] == t2.latent[i]);
    CHECK(t1.observed[i] == t2.observed[i]);
  }
}

TEST_CASE("random_walk_episodes are ordered and independent of scheduling") {
  EnvironmentSpec env;
  RewardField f;
  const SeedSequence seeds(3);
  const auto e1 = random_walk_episodes(6, 50, env, f, seeds, "x");
  const auto e2 = random_walk_episodes(6, 50, env, f, seeds, "x");
  REQUIRE(e1.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    Rng rng = seeds.stream("x", i);
    const Trajectory ref = rollout(random_walk_policy(), 50, env, f, rng);
    CHECK(e1[i].latent == ref.latent);
    CHECK(e2[i].observed == e1[i].observed);
  }
}

TEST_CASE("initial states avoid the wall and fill the box") {
  EnvironmentSpec env;
  Rng rng(2);
  double mx = 0, my = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Point2 p = sample_initial_state(env, rng);
    CHECK(in_unit_box(p));
    mx += p.x();
    my += p.y();
  }
  CHECK(mx / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(my / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("invalid specs are rejected") {
  EnvironmentSpec env;
  env.step_length = 0.0;
  CHECK_THROWS_AS(env.validate(), ConfigError);
  RewardField f;
  f.goal_radius = -1.0;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  Trajectory t;
  t.latent = {Point2(0.1, 0.1)};
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("seed streams are stable and distinct") {
  const SeedSequence s(7);
  CHECK(s.derive("sleep/cycle=3") == SeedSequence(7).derive("sleep/cycle=3"));
  CHECK(s.derive("sleep/cycle=3") != s.derive("sleep/cycle=4"));
  CHECK(s.derive("a", 0) != s.derive("a", 1));
  CHECK(s.child("a").master() == s.derive("a"));
}
