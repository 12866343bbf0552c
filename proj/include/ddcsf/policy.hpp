#pragma once

#include "ddcsf/environment.hpp"
#include "ddcsf/features.hpp"
#include "ddcsf/rng.hpp"
#include "ddcsf/ssm.hpp"
#include "ddcsf/successor.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ddcsf {

/// Which state representation the agent computes its features from.
enum class Condition {
  latent,    ///< psi(s_t), direct access to the latent state
  inferred,  ///< mu_t(O_t) from the recognition model
  observed   ///< psi(o_t), observations taken as noise-free states
};

std::string_view to_string(Condition c);
Condition parse_condition(std::string_view s);

/// Immediate reward r ~ w^T feat.
struct RewardWeights {
  Vector w;
  /// RMS residual of the fit on its training pairs.
  double residual = 0.0;
};

/// E[feat_{t+1} | feat_t, a_t] ~ P (feat_t (x) phi(a_t)); P is K x (K A),
/// column index k * A + j for feature k and action feature j.
struct BilinearActionModel {
  Matrix P;

  Eigen::Index state_size() const { return P.rows(); }
  Eigen::Index action_size() const { return P.rows() == 0 ? 0 : P.cols() / P.rows(); }
  Vector predict(const Eigen::Ref<const Vector>& feat, const Eigen::Ref<const Vector>& action_feat) const;
};

/// One observed transition for fit_bilinear_dynamics.
struct ActionTransition {
  Vector feat;
  double action = 0.0;
  Vector feat_next;
};

struct GpiConfig {
  double discount = 0.99;
  int n_cycles = 500;
  int steps_per_episode = 500;
  int action_candidates = 16;
  bool positive_return_filter = true;
  int eval_episodes = 100;
  /// epsilon-greedy exploration, decayed linearly to 0 over the first
  /// `epsilon_decay_fraction` of the cycles.
  double epsilon = 0.1;
  double epsilon_decay_fraction = 0.5;
  /// Random-walk transitions used to fit P and to initialise w, T and U.
  int exploration_steps = 10'000;
  /// Per-sample ridges.
  double ridge_reward = 1e-3;
  double ridge_dynamics = 1e-3;
  double ridge_transition = 1e-3;
  /// Normalised step size of the online T^pi update.
  double lr_transition = 0.05;
  SfMethod sf_method = SfMethod::td_wake;
  TdSchedule td_schedule;
  /// Inferred condition: refit W by a sleep phase under T^pi after each
  /// update. Off by default.
  bool refit_recognition = false;
  long sleep_samples_per_cycle = 3'000;
  /// Passes over the exploration sequences when U starts from TD.
  int td_epochs = 20;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const GpiConfig& o) const;
};

/// Evenly spaced angles 2 pi j / n, j = 0..n-1.
std::vector<double> action_candidates(int n);

/// Everything an agent needs besides its learned parameters.
struct AgentContext {
  StateFeatureBasis basis;
  ActionFeatureBasis actions;
  /// Required for Condition::inferred; filtering uses its T and W.
  std::optional<StateSpaceModel> ssm;
};

struct Agent {
  Condition condition = Condition::latent;
  RewardWeights reward;
  SuccessorMatrix sf;
  BilinearActionModel dynamics;
  /// T^pi on the condition's features. For the inferred condition this is
  /// also the filter's prediction model.
  TransitionModel transition;
  /// Inferred condition only: recognition model matched to T^pi.
  std::optional<RecognitionModel> recognition;
  std::vector<double> candidates;
  /// TD updates applied so far (schedule index).
  long long td_steps = 0;

  void check_shapes() const;
};

RewardWeights fit_reward_weights(std::span<const Vector> feats, std::span<const double> rewards, double ridge);
RewardWeights fit_reward_weights(const Eigen::Ref<const Matrix>& feats, std::span<const double> rewards,
                                 double ridge);

/// w^T U feat.
double value(const RewardWeights& w, const SuccessorMatrix& sf, const Eigen::Ref<const Vector>& feat);

BilinearActionModel fit_bilinear_dynamics(std::span<const ActionTransition> transitions,
                                          const ActionFeatureBasis& actions, double ridge);
/// Column-paired form: feats and next are K x N, angles has N entries.
BilinearActionModel fit_bilinear_dynamics(const Eigen::Ref<const Matrix>& feats, std::span<const double> angles,
                                          const Eigen::Ref<const Matrix>& next, const ActionFeatureBasis& actions,
                                          double ridge);

/// r_here + gamma w^T U P (feat (x) phi(a)).
double q_value(const Eigen::Ref<const Vector>& feat, double angle, double r_here, const RewardWeights& w,
               const SuccessorMatrix& sf, const BilinearActionModel& model, double discount,
               const ActionFeatureBasis& actions);

/// argmax of q_value over the candidates, ties to the lowest index.
double greedy_action(const Eigen::Ref<const Vector>& feat, double r_here, const RewardWeights& w,
                     const SuccessorMatrix& sf, const BilinearActionModel& model, double discount,
                     const ActionFeatureBasis& actions, std::span<const double> candidates);

/// Precomputed greedy policy: Q(c) - r_here = gamma * phi(c)^T M feat.
class GreedyPolicy {
 public:
  GreedyPolicy(const Agent& agent, const ActionFeatureBasis& actions);

  Vector q_values(const Eigen::Ref<const Vector>& feat, double r_here) const;
  /// Index into the agent's candidates.
  std::size_t choose(const Eigen::Ref<const Vector>& feat) const;
  double angle(std::size_t index) const { return candidates_[index]; }

 private:
  Matrix m_;        // A x K
  Matrix phi_;      // A x C
  double discount_;
  std::vector<double> candidates_;
};

/// Turns the stream of (s_t, o_t) into the condition's features.
class FeatureTracker {
 public:
  /// Filters with the context's SSM.
  FeatureTracker(Condition condition, const AgentContext& context);
  /// Filters with the agent's T^pi and recognition model.
  FeatureTracker(const Agent& agent, const AgentContext& context);

  void reset();
  const Vector& update(const Point2& s, const Point2& o);
  const Vector& current() const { return feat_; }

 private:
  Condition condition_;
  const AgentContext* ctx_;
  const Matrix* t_ = nullptr;
  const Matrix* w_ = nullptr;
  Vector feat_;
  Vector mu_;
  Vector input_;
};

struct Episode {
  Trajectory trajectory;
  /// K x n, the condition's features along the episode.
  Matrix features;
  double total_reward = 0.0;
};

/// Fixed-length episode from a uniform start; with probability epsilon the
/// action is a uniformly random direction, otherwise greedy.
Episode run_episode(const Agent& agent, const AgentContext& context, const EnvironmentSpec& env,
                    const RewardField& field, std::size_t steps, double epsilon, Rng& rng);

/// Random-walk exploration episodes, features computed for `condition`.
std::vector<Episode> explore(Condition condition, const AgentContext& context, const EnvironmentSpec& env,
                             const RewardField& field, std::size_t total_steps, std::size_t episode_length,
                             const SeedSequence& seeds);

/// Agent that evaluates the random-walk policy: P, w, T and U fitted from
/// `episodes` (U from T through the configured SF back end, or TD).
Agent random_walk_agent(Condition condition, const AgentContext& context, std::span<const Episode> episodes,
                        const GpiConfig& config, const EnvironmentSpec& env);

struct GpiResult {
  Agent agent;
  /// Undiscounted return of each cycle's episode.
  std::vector<double> returns;
  /// Whether the cycle's episode updated the agent.
  std::vector<char> updated;
};

/**
 * Starts from random_walk_agent on `config.exploration_steps` transitions,
 * then alternates epsilon-greedy episodes with updates of w, T^pi and the
 * SFs on episodes that pass the positive-return filter.
 * Errors from the SF back end are rethrown with the cycle index.
 */
GpiResult generalized_policy_iteration(const GpiConfig& config, Condition condition, const AgentContext& context,
                                       const EnvironmentSpec& env, const RewardField& field);

/// Greedy returns over `n_episodes` uniform starts (OpenMP over episodes,
/// stream seeds.derive(name, i)); ordered by episode.
std::vector<double> evaluate_policy(const Agent& agent, const AgentContext& context, int n_episodes,
                                    std::size_t steps, const EnvironmentSpec& env, const RewardField& field,
                                    const SeedSequence& seeds, std::string_view name = "eval");

/// Same protocol under the random-walk policy.
std::vector<double> evaluate_random_walk(int n_episodes, std::size_t steps, const EnvironmentSpec& env,
                                         const RewardField& field, const SeedSequence& seeds,
                                         std::string_view name = "eval-random");

}  // namespace ddcsf
