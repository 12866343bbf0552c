#pragma once

#include "ddcsf/geometry.hpp"
#include "ddcsf/rng.hpp"
#include "ddcsf/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ddcsf {

/**
 * Unit box with one internal wall segment. Moves are fixed-length steps in
 * a chosen or uniformly random direction; the outer walls clamp each
 * coordinate into [0, 1] and a move whose (clamped) segment touches the
 * internal wall is rejected, leaving the agent in place.
 */
struct EnvironmentSpec {
  Segment internal_wall{Point2(0.5, 0.0), Point2(0.5, 0.6)};
  double step_length = 0.06;
  double obs_noise_sigma = 0.1;
  /// Std of the Gaussian whose normalised draw gives the random direction.
  /// Any positive value gives the same uniform law on the circle, which is
  /// what sample_direction draws from directly.
  double direction_noise_sigma = 1.0;

  void validate() const;
  bool operator==(const EnvironmentSpec& o) const {
    return internal_wall.a == o.internal_wall.a && internal_wall.b == o.internal_wall.b &&
           step_length == o.step_length && obs_noise_sigma == o.obs_noise_sigma &&
           direction_noise_sigma == o.direction_noise_sigma;
  }
};

/// reward(s) = magnitude * 1[|s - goal_center| <= goal_radius]
struct RewardField {
  Point2 goal_center{0.25, 0.5};
  double goal_radius = 0.1;
  double magnitude = 1.0;

  void validate() const;
  bool operator==(const RewardField&) const = default;
};

struct Trajectory {
  std::vector<Point2> latent;
  std::vector<Point2> observed;
  /// Optional. Direction taken after step t (same length as latent, or one
  /// shorter when the final move is not recorded).
  std::vector<double> actions;
  /// Optional. reward(s_t).
  std::vector<double> rewards;

  std::size_t size() const { return latent.size(); }
  /// Throws ConfigError on length mismatch or latent states outside the box.
  void validate() const;
};

/// Maps the current latent state to a direction; std::nullopt means random.
using DirectionPolicy = std::function<std::optional<double>(const Point2& state, Rng& rng)>;

DirectionPolicy random_walk_policy();

double sample_direction(const EnvironmentSpec& spec, Rng& rng);

/// Applies the wall constraint to a proposed move from s.
Point2 constrain_move(const Point2& s, const Point2& proposal, const EnvironmentSpec& spec);

/// One latent transition. A random direction costs one uniform draw.
Point2 step(const Point2& s, std::optional<double> direction, const EnvironmentSpec& spec, Rng& rng);

/// o = s + xi, xi ~ N(0, sigma_o^2 I); not clamped.
Point2 observe(const Point2& s, const EnvironmentSpec& spec, Rng& rng);

double reward(const Point2& s, const RewardField& field);

/// Uniform over the box, rejecting points on the internal wall.
Point2 sample_initial_state(const EnvironmentSpec& spec, Rng& rng);

Trajectory rollout(const DirectionPolicy& policy, std::size_t n_steps, const EnvironmentSpec& spec,
                   const RewardField& field, Rng& rng);

/// Runs `n_episodes` random-walk rollouts with independent streams
/// seeds.derive(name, i) (OpenMP over episodes); results ordered by episode.
std::vector<Trajectory> random_walk_episodes(std::size_t n_episodes, std::size_t steps_per_episode,
                                             const EnvironmentSpec& spec, const RewardField& field,
                                             const SeedSequence& seeds, std::string_view name);

}  // namespace ddcsf
