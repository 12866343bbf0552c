#include "ddcsf/environment.hpp"

#include <cmath>
#include <numbers>

namespace ddcsf {

void EnvironmentSpec::validate() const {
  if (!(step_length > 0.0) || !std::isfinite(step_length)) throw ConfigError("environment: step_length must be > 0");
  if (!(obs_noise_sigma >= 0.0) || !std::isfinite(obs_noise_sigma))
    throw ConfigError("environment: obs_noise_sigma must be >= 0");
  if (!(direction_noise_sigma > 0.0)) throw ConfigError("environment: direction_noise_sigma must be > 0");
  if (!in_unit_box(internal_wall.a) || !in_unit_box(internal_wall.b))
    throw ConfigError("environment: internal wall endpoints must lie in the unit box");
}

void RewardField::validate() const {
  if (!goal_center.allFinite()) throw ConfigError("reward: goal_center must be finite");
  if (!(goal_radius >= 0.0) || !std::isfinite(goal_radius)) throw ConfigError("reward: goal_radius must be >= 0");
  if (!std::isfinite(magnitude)) throw ConfigError("reward: magnitude must be finite");
}

void Trajectory::validate() const {
  const std::size_t n = latent.size();
  const bool actions_ok = actions.empty() || actions.size() == n || actions.size() + 1 == n;
  const bool rewards_ok = rewards.empty() || rewards.size() == n;
  if (observed.size() != n || !actions_ok || !rewards_ok)
    throw ConfigError("trajectory: column lengths disagree");
  for (const auto& s : latent) {
    if (!in_unit_box(s)) throw ConfigError("trajectory: latent state outside the unit box");
  }
}

DirectionPolicy random_walk_policy() {
  return [](const Point2&, Rng&) -> std::optional<double> { return std::nullopt; };
}

double sample_direction(const EnvironmentSpec&, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  return angle(rng);
}

Point2 constrain_move(const Point2& s, const Point2& proposal, const EnvironmentSpec& spec) {
  const Point2 q = clamp_to_unit_box(proposal);
  if (segments_intersect(s, q, spec.internal_wall)) return s;
  return q;
}

Point2 step(const Point2& s, std::optional<double> direction, const EnvironmentSpec& spec, Rng& rng) {
  const double theta = direction ? *direction : sample_direction(spec, rng);
  const Point2 proposal = s + spec.step_length * Point2(std::cos(theta), std::sin(theta));
  return constrain_move(s, proposal, spec);
}

Point2 observe(const Point2& s, const EnvironmentSpec& spec, Rng& rng) {
  if (spec.obs_noise_sigma == 0.0) return s;
  std::normal_distribution<double> noise(0.0, spec.obs_noise_sigma);
  const double dx = noise(rng);
  const double dy = noise(rng);
  return s + Point2(dx, dy);
}

double reward(const Point2& s, const RewardField& field) {
  return (s - field.goal_center).norm() <= field.goal_radius ? field.magnitude : 0.0;
}

Point2 sample_initial_state(const EnvironmentSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double x = u(rng);
    const double y = u(rng);
    const Point2 s(x, y);
    if (distance_to_segment(s, spec.internal_wall) > 0.0) return s;
  }
}

Trajectory rollout(const DirectionPolicy& policy, std::size_t n_steps, const EnvironmentSpec& spec,
                   const RewardField& field, Rng& rng) {
  if (n_steps < 1) throw ConfigError("rollout: n_steps must be >= 1");
  Trajectory traj;
  traj.latent.reserve(n_steps);
  traj.observed.reserve(n_steps);
  traj.actions.reserve(n_steps);
  traj.rewards.reserve(n_steps);
  Point2 s = sample_initial_state(spec, rng);
  for (std::size_t t = 0; t < n_steps; ++t) {
    traj.latent.push_back(s);
    traj.observed.push_back(observe(s, spec, rng));
    traj.rewards.push_back(reward(s, field));
    const auto chosen = policy(s, rng);
    const double theta = chosen ? *chosen : sample_direction(spec, rng);
    traj.actions.push_back(wrap_angle(theta));
    s = step(s, theta, spec, rng);
  }
  return traj;
}

std::vector<Trajectory> random_walk_episodes(std::size_t n_episodes, std::size_t steps_per_episode,
                                             const EnvironmentSpec& spec, const RewardField& field,
                                             const SeedSequence& seeds, std::string_view name) {
  std::vector<Trajectory> out(n_episodes);
  const auto policy = random_walk_policy();
  const auto n = static_cast<long long>(n_episodes);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    Rng rng = seeds.stream(name, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = rollout(policy, steps_per_episode, spec, field, rng);
  }
  return out;
}

}  // namespace ddcsf
