#include "ddcsf/policy.hpp"

#include "ddcsf/kernels.hpp"
#include "ddcsf/linalg.hpp"
#include "ddcsf/wakesleep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace ddcsf {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::latent: return "latent";
    case Condition::inferred: return "inferred";
    case Condition::observed: return "observed";
  }
  return "latent";
}

Condition parse_condition(std::string_view s) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "latent") return Condition::latent;
  if (v == "inferred") return Condition::inferred;
  if (v == "observed") return Condition::observed;
  throw ConfigError("unknown condition '" + std::string(s) + "'");
}

void GpiConfig::validate() const {
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("gpi: discount must lie in [0, 1)");
  if (n_cycles < 0) throw ConfigError("gpi: n_cycles must be >= 0");
  if (steps_per_episode < 2) throw ConfigError("gpi: steps_per_episode must be >= 2");
  if (action_candidates < 1) throw ConfigError("gpi: action_candidates must be >= 1");
  if (eval_episodes < 1) throw ConfigError("gpi: eval_episodes must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("gpi: epsilon must lie in [0, 1]");
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0))
    throw ConfigError("gpi: epsilon_decay_fraction must lie in (0, 1]");
  if (exploration_steps < 2) throw ConfigError("gpi: exploration_steps must be >= 2");
  if (ridge_reward < 0.0 || ridge_dynamics < 0.0 || ridge_transition < 0.0)
    throw ConfigError("gpi: ridges must be >= 0");
  if (!(lr_transition > 0.0 && lr_transition <= 1.0)) throw ConfigError("gpi: lr_transition must lie in (0, 1]");
  if (!(td_schedule.lr0 > 0.0) || !(td_schedule.k0 > 0.0)) throw ConfigError("gpi: td schedule must be positive");
  if (td_epochs < 1) throw ConfigError("gpi: td_epochs must be >= 1");
  if (sleep_samples_per_cycle < 2) throw ConfigError("gpi: sleep_samples_per_cycle must be >= 2");
}

bool GpiConfig::operator==(const GpiConfig& o) const {
  return discount == o.discount && n_cycles == o.n_cycles && steps_per_episode == o.steps_per_episode &&
         action_candidates == o.action_candidates && positive_return_filter == o.positive_return_filter &&
         eval_episodes == o.eval_episodes && epsilon == o.epsilon &&
         epsilon_decay_fraction == o.epsilon_decay_fraction && exploration_steps == o.exploration_steps &&
         ridge_reward == o.ridge_reward && ridge_dynamics == o.ridge_dynamics &&
         ridge_transition == o.ridge_transition && lr_transition == o.lr_transition && sf_method == o.sf_method &&
         td_schedule.lr0 == o.td_schedule.lr0 && td_schedule.k0 == o.td_schedule.k0 && td_epochs == o.td_epochs &&
         sleep_samples_per_cycle == o.sleep_samples_per_cycle && refit_recognition == o.refit_recognition && seed == o.seed;
}

std::vector<double> action_candidates(int n) {
  if (n < 1) throw ConfigError("action_candidates: need at least one");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / n;
  return out;
}

Vector BilinearActionModel::predict(const Eigen::Ref<const Vector>& feat,
                                    const Eigen::Ref<const Vector>& action_feat) const {
  require_size(feat.size(), state_size(), "BilinearActionModel feat");
  require_size(feat.size() * action_feat.size(), P.cols(), "BilinearActionModel action features");
  Matrix x(P.cols(), 1);
  kernels::kron_columns(feat, action_feat, x);
  return P * x.col(0);
}

void Agent::check_shapes() const {
  const Eigen::Index k = reward.w.size();
  require_size(sf.U.rows(), k, "agent U rows");
  require_size(sf.U.cols(), k, "agent U cols");
  require_size(dynamics.P.rows(), k, "agent P rows");
  require_size(transition.T.rows(), k, "agent T rows");
  require_size(transition.T.cols(), k, "agent T cols");
  if (k == 0 || dynamics.P.cols() % k != 0) throw DimensionError("agent P cols must be a multiple of K");
  if (candidates.empty()) throw ConfigError("agent has no action candidates");
}

RewardWeights fit_reward_weights(const Eigen::Ref<const Matrix>& feats, std::span<const double> rewards,
                                 double ridge) {
  const auto n = static_cast<Eigen::Index>(rewards.size());
  if (n == 0) throw ConfigError("fit_reward_weights: no samples");
  require_size(feats.cols(), n, "fit_reward_weights samples");
  const Eigen::Map<const Eigen::RowVectorXd> r(rewards.data(), n);
  RidgeAccumulator acc(feats.rows(), 1);
  acc.add_batch(feats, r);
  RewardWeights out;
  out.w = acc.solve(ridge).row(0).transpose();
  out.residual = std::sqrt((r - out.w.transpose() * feats).squaredNorm() / static_cast<double>(n));
  return out;
}

RewardWeights fit_reward_weights(std::span<const Vector> feats, std::span<const double> rewards, double ridge) {
  if (feats.empty()) throw ConfigError("fit_reward_weights: no samples");
  require_size(static_cast<Eigen::Index>(feats.size()), static_cast<Eigen::Index>(rewards.size()),
               "fit_reward_weights samples");
  Matrix x(feats[0].size(), static_cast<Eigen::Index>(feats.size()));
  for (std::size_t i = 0; i < feats.size(); ++i) {
    require_size(feats[i].size(), x.rows(), "fit_reward_weights feature");
    x.col(static_cast<Eigen::Index>(i)) = feats[i];
  }
  return fit_reward_weights(x, rewards, ridge);
}

double value(const RewardWeights& w, const SuccessorMatrix& sf, const Eigen::Ref<const Vector>& feat) {
  require_size(w.w.size(), sf.U.rows(), "value w");
  require_size(feat.size(), sf.U.cols(), "value feat");
  return w.w.dot(sf.U * feat);
}

BilinearActionModel fit_bilinear_dynamics(const Eigen::Ref<const Matrix>& feats, std::span<const double> angles,
                                          const Eigen::Ref<const Matrix>& next, const ActionFeatureBasis& actions,
                                          double ridge) {
  const auto n = static_cast<Eigen::Index>(angles.size());
  if (n == 0) throw ConfigError("fit_bilinear_dynamics: no transitions");
  require_size(feats.cols(), n, "fit_bilinear_dynamics feats");
  require_size(next.cols(), n, "fit_bilinear_dynamics next");
  require_size(next.rows(), feats.rows(), "fit_bilinear_dynamics next rows");
  const Eigen::Index a = actions.size();
  Matrix phi(a, n);
  for (Eigen::Index t = 0; t < n; ++t) actions.encode(angles[static_cast<std::size_t>(t)], phi.col(t));
  Matrix x(feats.rows() * a, n);
  kernels::kron_columns(feats, phi, x);
  RidgeAccumulator acc(x.rows(), feats.rows());
  acc.add_batch(x, next);
  return {acc.solve(ridge)};
}

BilinearActionModel fit_bilinear_dynamics(std::span<const ActionTransition> transitions,
                                          const ActionFeatureBasis& actions, double ridge) {
  if (transitions.empty()) throw ConfigError("fit_bilinear_dynamics: no transitions");
  const Eigen::Index k = transitions[0].feat.size();
  const auto n = static_cast<Eigen::Index>(transitions.size());
  Matrix cur(k, n), next(k, n);
  std::vector<double> angles;
  angles.reserve(transitions.size());
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto& tr = transitions[static_cast<std::size_t>(t)];
    require_size(tr.feat.size(), k, "fit_bilinear_dynamics feat");
    require_size(tr.feat_next.size(), k, "fit_bilinear_dynamics feat_next");
    cur.col(t) = tr.feat;
    next.col(t) = tr.feat_next;
    angles.push_back(tr.action);
  }
  return fit_bilinear_dynamics(cur, angles, next, actions, ridge);
}

double q_value(const Eigen::Ref<const Vector>& feat, double angle, double r_here, const RewardWeights& w,
               const SuccessorMatrix& sf, const BilinearActionModel& model, double discount,
               const ActionFeatureBasis& actions) {
  require_size(w.w.size(), sf.U.rows(), "q_value w");
  require_size(model.P.rows(), sf.U.cols(), "q_value P");
  return r_here + discount * w.w.dot(sf.U * model.predict(feat, actions(angle)));
}

double greedy_action(const Eigen::Ref<const Vector>& feat, double r_here, const RewardWeights& w,
                     const SuccessorMatrix& sf, const BilinearActionModel& model, double discount,
                     const ActionFeatureBasis& actions, std::span<const double> candidates) {
  if (candidates.empty()) throw ConfigError("greedy_action: no candidates");
  std::size_t best = 0;
  double best_q = q_value(feat, candidates[0], r_here, w, sf, model, discount, actions);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double q = q_value(feat, candidates[i], r_here, w, sf, model, discount, actions);
    if (q > best_q) {
      best_q = q;
      best = i;
    }
  }
  return candidates[best];
}

GreedyPolicy::GreedyPolicy(const Agent& agent, const ActionFeatureBasis& actions)
    : discount_(agent.sf.discount), candidates_(agent.candidates) {
  agent.check_shapes();
  const Eigen::Index k = agent.reward.w.size();
  const Eigen::Index a = actions.size();
  require_size(agent.dynamics.P.cols(), k * a, "GreedyPolicy action features");
  const Vector v = agent.dynamics.P.transpose() * (agent.sf.U.transpose() * agent.reward.w);
  m_ = Eigen::Map<const Matrix>(v.data(), a, k);
  phi_.resize(a, static_cast<Eigen::Index>(candidates_.size()));
  for (std::size_t c = 0; c < candidates_.size(); ++c) actions.encode(candidates_[c], phi_.col(static_cast<Eigen::Index>(c)));
}

Vector GreedyPolicy::q_values(const Eigen::Ref<const Vector>& feat, double r_here) const {
  require_size(feat.size(), m_.cols(), "GreedyPolicy feat");
  Vector q = phi_.transpose() * (m_ * feat);
  return (discount_ * q).array() + r_here;
}

std::size_t GreedyPolicy::choose(const Eigen::Ref<const Vector>& feat) const {
  const Vector q = q_values(feat, 0.0);
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q[i] > q[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

FeatureTracker::FeatureTracker(Condition condition, const AgentContext& context)
    : condition_(condition), ctx_(&context) {
  if (condition == Condition::inferred && !context.ssm) throw ConfigError("inferred condition needs a trained SSM");
  const Eigen::Index k = context.basis.size();
  feat_ = Vector::Zero(k);
  if (condition == Condition::inferred) {
    context.ssm->check_shapes();
    require_size(context.ssm->size(), k, "FeatureTracker SSM");
    t_ = &context.ssm->transition.T;
    w_ = &context.ssm->recognition.W;
    input_.resize(2 * k);
  }
  reset();
}

FeatureTracker::FeatureTracker(const Agent& agent, const AgentContext& context)
    : FeatureTracker(agent.condition, context) {
  if (condition_ == Condition::inferred) {
    if (!agent.recognition) throw ConfigError("inferred agent has no recognition model");
    const Eigen::Index k = context.basis.size();
    require_size(agent.transition.T.rows(), k, "FeatureTracker T");
    require_size(agent.recognition->W.rows(), k, "FeatureTracker W rows");
    require_size(agent.recognition->W.cols(), 2 * k, "FeatureTracker W cols");
    t_ = &agent.transition.T;
    w_ = &agent.recognition->W;
  }
}

void FeatureTracker::reset() {
  if (condition_ == Condition::inferred) mu_ = ctx_->ssm->prior;
}

const Vector& FeatureTracker::update(const Point2& s, const Point2& o) {
  switch (condition_) {
    case Condition::latent: ctx_->basis.encode(s, feat_); break;
    case Condition::observed: ctx_->basis.encode(o, feat_); break;
    case Condition::inferred: {
      const Eigen::Index k = ctx_->basis.size();
      input_.head(k).noalias() = *t_ * mu_;
      ctx_->basis.encode(o, input_.tail(k));
      feat_.noalias() = *w_ * input_;
      mu_ = feat_;
      break;
    }
  }
  return feat_;
}

Episode run_episode(const Agent& agent, const AgentContext& context, const EnvironmentSpec& env,
                    const RewardField& field, std::size_t steps, double epsilon, Rng& rng) {
  if (steps < 1) throw ConfigError("run_episode: steps must be >= 1");
  const GreedyPolicy policy(agent, context.actions);
  FeatureTracker tracker(agent, context);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Episode ep;
  Trajectory& traj = ep.trajectory;
  traj.latent.reserve(steps);
  traj.observed.reserve(steps);
  traj.actions.reserve(steps);
  traj.rewards.reserve(steps);
  ep.features.resize(context.basis.size(), static_cast<Eigen::Index>(steps));
  Point2 s = sample_initial_state(env, rng);
  for (std::size_t t = 0; t < steps; ++t) {
    const Point2 o = observe(s, env, rng);
    const Vector& f = tracker.update(s, o);
    ep.features.col(static_cast<Eigen::Index>(t)) = f;
    const double r = reward(s, field);
    ep.total_reward += r;
    double angle;
    if (epsilon > 0.0 && unit(rng) < epsilon) {
      angle = sample_direction(env, rng);
    } else {
      angle = policy.angle(policy.choose(f));
    }
    traj.latent.push_back(s);
    traj.observed.push_back(o);
    traj.actions.push_back(angle);
    traj.rewards.push_back(r);
    s = step(s, angle, env, rng);
  }
  return ep;
}

std::vector<Episode> explore(Condition condition, const AgentContext& context, const EnvironmentSpec& env,
                             const RewardField& field, std::size_t total_steps, std::size_t episode_length,
                             const SeedSequence& seeds) {
  if (episode_length < 2) throw ConfigError("explore: episode_length must be >= 2");
  const std::size_t n = (total_steps + episode_length - 1) / episode_length;
  std::vector<Trajectory> trajs = random_walk_episodes(n, episode_length, env, field, seeds, "explore");
  std::vector<Episode> out(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    FeatureTracker tracker(condition, context);
    Episode& ep = out[idx];
    ep.trajectory = std::move(trajs[idx]);
    const auto len = static_cast<Eigen::Index>(ep.trajectory.size());
    ep.features.resize(context.basis.size(), len);
    for (Eigen::Index t = 0; t < len; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      ep.features.col(t) = tracker.update(ep.trajectory.latent[ti], ep.trajectory.observed[ti]);
    }
    for (double r : ep.trajectory.rewards) ep.total_reward += r;
  }
  return out;
}

namespace {

SuccessorMatrix successor_from_transition(const Matrix& t, double discount, SfMethod method) {
  if (method == SfMethod::fixed_point) {
    const Eigen::Index k = t.rows();
    SuccessorMatrix out{Matrix(k, k), discount, SfMethod::fixed_point};
    const FixedPointSolver solver;
    for (Eigen::Index i = 0; i < k; ++i) out.U.col(i) = sf_fixed_point(t, discount, Vector::Unit(k, i), solver);
    return out;
  }
  return sf_analytic(t, discount);
}

// Pairs (f_t, f_{t+1}) within episodes, concatenated.
struct Pairs {
  Matrix cur, next;
  std::vector<double> angles;
};

Pairs episode_pairs(std::span<const Episode> episodes) {
  Eigen::Index total = 0;
  for (const auto& ep : episodes) total += std::max<Eigen::Index>(0, ep.features.cols() - 1);
  if (total == 0) throw ConfigError("need episodes with at least two steps");
  const Eigen::Index k = episodes[0].features.rows();
  Pairs p{Matrix(k, total), Matrix(k, total), {}};
  p.angles.reserve(static_cast<std::size_t>(total));
  Eigen::Index col = 0;
  for (const auto& ep : episodes) {
    const Eigen::Index n = ep.features.cols() - 1;
    if (n <= 0) continue;
    p.cur.middleCols(col, n) = ep.features.leftCols(n);
    p.next.middleCols(col, n) = ep.features.rightCols(n);
    if (ep.trajectory.actions.size() < static_cast<std::size_t>(n))
      throw ConfigError("episode is missing actions for its transitions");
    p.angles.insert(p.angles.end(), ep.trajectory.actions.begin(), ep.trajectory.actions.begin() + n);
    col += n;
  }
  return p;
}

std::vector<Matrix> td_sequences(Condition condition, const AgentContext& context, std::span<const Episode> episodes,
                                 const GpiConfig& config, const EnvironmentSpec& env) {
  std::vector<Matrix> seqs;
  if (config.sf_method == SfMethod::td_sleep && condition == Condition::inferred) {
    // Simulated latent sequences from the generative model.
    const SeedSequence seeds = SeedSequence(config.seed).child("td-sleep");
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      Rng rng = seeds.stream("sequence", i);
      const Trajectory traj = sleep_sample(*context.ssm, episodes[i].trajectory.size(), env.step_length, env, rng);
      seqs.push_back(context.basis.encode_batch(traj.latent));
    }
    return seqs;
  }
  for (const auto& ep : episodes) seqs.push_back(ep.features);
  return seqs;
}

}  // namespace

Agent random_walk_agent(Condition condition, const AgentContext& context, std::span<const Episode> episodes,
                        const GpiConfig& config, const EnvironmentSpec& env) {
  config.validate();
  if (episodes.empty()) throw ConfigError("random_walk_agent: no episodes");
  const Pairs p = episode_pairs(episodes);
  const auto n = static_cast<double>(p.cur.cols());

  Agent agent;
  agent.condition = condition;
  agent.candidates = action_candidates(config.action_candidates);
  agent.dynamics = fit_bilinear_dynamics(p.cur, p.angles, p.next, context.actions, config.ridge_dynamics * n);

  Eigen::Index total = 0;
  for (const auto& ep : episodes) total += ep.features.cols();
  Matrix feats(context.basis.size(), total);
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(total));
  Eigen::Index col = 0;
  for (const auto& ep : episodes) {
    feats.middleCols(col, ep.features.cols()) = ep.features;
    col += ep.features.cols();
    if (ep.trajectory.rewards.size() != static_cast<std::size_t>(ep.features.cols()))
      throw ConfigError("random_walk_agent: episode rewards missing");
    rewards.insert(rewards.end(), ep.trajectory.rewards.begin(), ep.trajectory.rewards.end());
  }
  agent.reward = fit_reward_weights(feats, rewards, config.ridge_reward * static_cast<double>(total));

  if (condition == Condition::inferred) {
    // The exploration posteriors came from this filter; keep it.
    agent.transition = context.ssm->transition;
    agent.recognition = context.ssm->recognition;
  } else {
    RidgeAccumulator acc(p.cur.rows(), p.cur.rows());
    acc.add_batch(p.cur, p.next);
    agent.transition.T = acc.solve(config.ridge_transition * n);
  }

  if (config.sf_method == SfMethod::td_sleep || config.sf_method == SfMethod::td_wake) {
    const std::vector<Matrix> seqs = td_sequences(condition, context, episodes, config, env);
    TdLearnConfig td{config.td_schedule, config.td_epochs, true, 0};
    const Eigen::Index k = context.basis.size();
    agent.sf = {learn_sf_td(seqs, config.discount, td, Matrix::Identity(k, k)), config.discount, config.sf_method};
    for (const auto& s : seqs) agent.td_steps += config.td_epochs * std::max<Eigen::Index>(0, s.cols() - 1);
  } else {
    agent.sf = successor_from_transition(agent.transition.T, config.discount, config.sf_method);
  }
  return agent;
}

GpiResult generalized_policy_iteration(const GpiConfig& config, Condition condition, const AgentContext& context,
                                       const EnvironmentSpec& env, const RewardField& field) {
  config.validate();
  env.validate();
  field.validate();
  const SeedSequence seeds(config.seed);
  const auto steps = static_cast<std::size_t>(config.steps_per_episode);
  const std::vector<Episode> exploration =
      explore(condition, context, env, field, static_cast<std::size_t>(config.exploration_steps), steps,
              seeds.child("gpi/explore"));

  GpiResult result{random_walk_agent(condition, context, exploration, config, env), {}, {}};
  Agent& agent = result.agent;
  const Eigen::Index k = context.basis.size();

  RidgeAccumulator reward_stats(k, 1);
  for (const auto& ep : exploration) {
    const Eigen::Map<const Eigen::RowVectorXd> r(ep.trajectory.rewards.data(), ep.features.cols());
    reward_stats.add_batch(ep.features, r);
  }

  WakeSleepConfig sleep_cfg;
  sleep_cfg.sleep_samples_per_cycle = config.sleep_samples_per_cycle;
  sleep_cfg.sleep_noise_sigma = env.step_length;

  const double decay_cycles = config.epsilon_decay_fraction * config.n_cycles;
  for (int cycle = 0; cycle < config.n_cycles; ++cycle) {
    const double eps = config.epsilon * std::max(0.0, 1.0 - cycle / decay_cycles);
    Rng rng = seeds.stream("gpi/cycle", static_cast<std::uint64_t>(cycle));
    const Episode ep = run_episode(agent, context, env, field, steps, eps, rng);
    result.returns.push_back(ep.total_reward);
    const bool update = !config.positive_return_filter || ep.total_reward > 0.0;
    result.updated.push_back(update ? 1 : 0);
    if (!update) continue;

    try {
      const Matrix& f = ep.features;
      const Eigen::Map<const Eigen::RowVectorXd> r(ep.trajectory.rewards.data(), f.cols());
      reward_stats.add_batch(f, r);
      agent.reward.w = reward_stats.solve(config.ridge_reward * static_cast<double>(reward_stats.count())).row(0).transpose();

      // Normalised online form of the wake-phase T update along the episode.
      Matrix t = agent.transition.T;
      for (Eigen::Index i = 0; i + 1 < f.cols(); ++i) {
        const double norm2 = f.col(i).squaredNorm();
        if (norm2 <= 0.0) continue;
        const Vector err = f.col(i + 1) - t * f.col(i);
        t.noalias() += (config.lr_transition / norm2) * err * f.col(i).transpose();
      }
      if (condition == Condition::inferred) {
        agent.transition.T = backtrack_update(agent.transition.T, t, [&](const Matrix& cand) {
          return filter_radius(*agent.recognition, {cand}) < sleep_cfg.max_filter_radius;
        });
        if (config.refit_recognition) {
          StateSpaceModel model = *context.ssm;
          model.transition = agent.transition;
          model.recognition = *agent.recognition;
          agent.recognition = sleep_phase(model, sleep_cfg, env, seeds, "gpi/sleep/cycle=" + std::to_string(cycle),
                                          sleep_cfg.lr_W);
        }
      } else {
        agent.transition.T = t;
      }

      if (config.sf_method == SfMethod::td_sleep || config.sf_method == SfMethod::td_wake) {
        const Matrix seq = f;
        TdLearnConfig td{config.td_schedule, 1, true, agent.td_steps};
        agent.sf.U = learn_sf_td(std::span<const Matrix>(&seq, 1), config.discount, td, agent.sf.U);
        agent.td_steps += f.cols() - 1;
      } else {
        agent.sf = successor_from_transition(agent.transition.T, config.discount, config.sf_method);
      }
    } catch (const NumericError& e) {
      throw NumericError("gpi cycle " + std::to_string(cycle) + ": " + e.what());
    }
  }
  return result;
}

std::vector<double> evaluate_policy(const Agent& agent, const AgentContext& context, int n_episodes,
                                    std::size_t steps, const EnvironmentSpec& env, const RewardField& field,
                                    const SeedSequence& seeds, std::string_view name) {
  if (n_episodes < 1) throw ConfigError("evaluate_policy: n_episodes must be >= 1");
  agent.check_shapes();
  std::vector<double> returns(static_cast<std::size_t>(n_episodes));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_episodes; ++i) {
    Rng rng = seeds.stream(name, static_cast<std::uint64_t>(i));
    returns[static_cast<std::size_t>(i)] = run_episode(agent, context, env, field, steps, 0.0, rng).total_reward;
  }
  return returns;
}

std::vector<double> evaluate_random_walk(int n_episodes, std::size_t steps, const EnvironmentSpec& env,
                                         const RewardField& field, const SeedSequence& seeds, std::string_view name) {
  if (n_episodes < 1) throw ConfigError("evaluate_random_walk: n_episodes must be >= 1");
  const auto trajs = random_walk_episodes(static_cast<std::size_t>(n_episodes), steps, env, field, seeds, name);
  std::vector<double> returns;
  returns.reserve(trajs.size());
  for (const auto& t : trajs) {
    double sum = 0.0;
    for (double r : t.rewards) sum += r;
    returns.push_back(sum);
  }
  return returns;
}

}  // namespace ddcsf
