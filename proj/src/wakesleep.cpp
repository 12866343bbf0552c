#include "ddcsf/wakesleep.hpp"

#include "ddcsf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ddcsf {

std::string_view to_string(UpdateMode m) {
  switch (m) {
    case UpdateMode::batch: return "batch";
    case UpdateMode::minibatch: return "minibatch";
    case UpdateMode::online: return "online";
  }
  return "batch";
}

UpdateMode parse_update_mode(std::string_view s) {
  if (s == "batch") return UpdateMode::batch;
  if (s == "minibatch") return UpdateMode::minibatch;
  if (s == "online") return UpdateMode::online;
  throw ConfigError("unknown update mode '" + std::string(s) + "'");
}

void WakeSleepConfig::validate() const {
  if (n_cycles < 0) throw ConfigError("wake_sleep: n_cycles must be >= 0");
  if (sleep_samples_per_cycle < 1 || wake_observations_per_cycle < 1)
    throw ConfigError("wake_sleep: sample counts must be >= 1");
  if (sleep_sequence_length < 2 || wake_episode_length < 2)
    throw ConfigError("wake_sleep: sequence lengths must be >= 2");
  if (batch_size < 1) throw ConfigError("wake_sleep: batch_size must be >= 1");
  if (!(batch_step > 0.0 && batch_step <= 1.0)) throw ConfigError("wake_sleep: batch_step must lie in (0, 1]");
  if (!(max_filter_radius > 0.0)) throw ConfigError("wake_sleep: max_filter_radius must be > 0");
  if (!(lr_W > 0.0) || !(lr_T > 0.0)) throw ConfigError("wake_sleep: learning rates must be > 0");
  if (!(lr_decay_cycles > 0.0)) throw ConfigError("wake_sleep: lr_decay_cycles must be > 0");
  if (ridge_W < 0.0 || ridge_T < 0.0 || ridge_obs < 0.0 || ridge_decoder < 0.0)
    throw ConfigError("wake_sleep: ridges must be >= 0");
  if (!(sleep_noise_sigma >= 0.0)) throw ConfigError("wake_sleep: sleep_noise_sigma must be >= 0");
  if (!(initial_obs_noise >= 0.0)) throw ConfigError("wake_sleep: initial_obs_noise must be >= 0");
  if (heldout_steps < 2) throw ConfigError("wake_sleep: heldout_steps must be >= 2");
}

double filter_radius(const RecognitionModel& rec, const TransitionModel& model) {
  const Eigen::Index k = model.size();
  require_size(rec.W.rows(), k, "filter_radius W rows");
  require_size(rec.W.cols(), 2 * k, "filter_radius W cols");
  const Matrix a = rec.W.leftCols(k) * model.T;
  if (!a.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> eig(a, false);
  if (eig.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double wake_prediction_error(const StateSpaceModel& model, std::span<const Point2> observations) {
  if (observations.size() < 2) return 0.0;
  const Matrix mus = run_filter(observations, model.prior, model.recognition, model.transition, model.basis);
  const Eigen::Index n = mus.cols();
  const Matrix err = mus.rightCols(n - 1) - model.transition.T * mus.leftCols(n - 1);
  return err.colwise().norm().mean();
}

double sleep_residual(const StateSpaceModel& model, const Trajectory& traj) {
  if (traj.size() == 0) return 0.0;
  const Matrix mus = run_filter(traj.observed, model.prior, model.recognition, model.transition, model.basis);
  const Matrix targets = model.basis.encode_batch(traj.latent);
  return (targets - mus).colwise().squaredNorm().mean();
}

namespace {

// Splits `total` samples into sequences of `length` (the last one shorter).
std::vector<std::size_t> sequence_lengths(long total, long length) {
  std::vector<std::size_t> lens;
  for (long done = 0; done < total; done += length) lens.push_back(static_cast<std::size_t>(std::min(length, total - done)));
  return lens;
}

struct SleepData {
  std::vector<Trajectory> sequences;
  std::vector<Matrix> inputs;   // 2K x L
  std::vector<Matrix> targets;  // K x L
};

SleepData collect_sleep(const StateSpaceModel& model, const WakeSleepConfig& cfg, const EnvironmentSpec& env,
                        const SeedSequence& seeds, const std::string& stream) {
  const auto lens = sequence_lengths(cfg.sleep_samples_per_cycle, cfg.sleep_sequence_length);
  const auto n = static_cast<long long>(lens.size());
  SleepData data;
  data.sequences.resize(lens.size());
  data.inputs.resize(lens.size());
  data.targets.resize(lens.size());
  const Eigen::Index k = model.size();
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    Rng rng = seeds.stream(stream, static_cast<std::uint64_t>(i));
    Trajectory traj = sleep_sample(model, lens[idx], cfg.sleep_noise_sigma, env, rng);
    const Matrix mus = run_filter(traj.observed, model.prior, model.recognition, model.transition, model.basis);
    const auto len = static_cast<Eigen::Index>(traj.size());
    Matrix x(2 * k, len);
    x.col(0).head(k) = model.transition.T * model.prior;
    if (len > 1) x.topRightCorner(k, len - 1) = model.transition.T * mus.leftCols(len - 1);
    x.bottomRows(k) = model.basis.encode_batch(traj.observed);
    data.targets[idx] = model.basis.encode_batch(traj.latent);
    data.inputs[idx] = std::move(x);
    data.sequences[idx] = std::move(traj);
  }
  return data;
}

struct WakeData {
  std::vector<Trajectory> episodes;
  std::vector<Matrix> mus;
};

WakeData collect_wake(const StateSpaceModel& model, const WakeSleepConfig& cfg, const EnvironmentSpec& env,
                      const DirectionPolicy& behavior, const SeedSequence& seeds, int cycle) {
  const auto lens = sequence_lengths(cfg.wake_observations_per_cycle, cfg.wake_episode_length);
  const auto n = static_cast<long long>(lens.size());
  WakeData data;
  data.episodes.resize(lens.size());
  data.mus.resize(lens.size());
  const std::string stream = "wake/cycle=" + std::to_string(cycle);
  const RewardField no_reward{Point2::Zero(), 0.0, 0.0};
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    Rng rng = seeds.stream(stream, static_cast<std::uint64_t>(i));
    data.episodes[idx] = rollout(behavior, lens[idx], env, no_reward, rng);
    data.mus[idx] = run_filter(data.episodes[idx].observed, model.prior, model.recognition, model.transition,
                               model.basis);
  }
  return data;
}

RecognitionModel update_recognition(const StateSpaceModel& model, const SleepData& data, const WakeSleepConfig& cfg,
                                    double lr) {
  const Eigen::Index k = model.size();
  if (cfg.mode == UpdateMode::batch) {
    RidgeAccumulator acc(2 * k, k);
    for (std::size_t i = 0; i < data.inputs.size(); ++i) acc.add_batch(data.inputs[i], data.targets[i]);
    const Matrix& w = model.recognition.W;
    return {w + cfg.batch_step * (acc.solve(cfg.ridge_W * static_cast<double>(acc.count()), w) - w)};
  }
  const Eigen::Index bs = cfg.mode == UpdateMode::online ? 1 : cfg.batch_size;
  Matrix w = model.recognition.W;
  for (std::size_t i = 0; i < data.inputs.size(); ++i) {
    const Matrix& x = data.inputs[i];
    const Matrix& y = data.targets[i];
    for (Eigen::Index c0 = 0; c0 < x.cols(); c0 += bs) {
      const Eigen::Index w_cols = std::min(bs, x.cols() - c0);
      const Matrix resid = y.middleCols(c0, w_cols) - w * x.middleCols(c0, w_cols);
      w.noalias() += (lr / static_cast<double>(w_cols)) * resid * x.middleCols(c0, w_cols).transpose();
    }
  }
  return {w};
}

TransitionModel update_transition(const StateSpaceModel& model, const WakeData& data, const WakeSleepConfig& cfg,
                                  double lr) {
  const Eigen::Index k = model.size();
  if (cfg.mode == UpdateMode::batch) {
    RidgeAccumulator acc(k, k);
    for (const auto& mus : data.mus) {
      const Eigen::Index n = mus.cols();
      if (n < 2) continue;
      acc.add_batch(mus.leftCols(n - 1), mus.rightCols(n - 1));
    }
    const Matrix& t = model.transition.T;
    return {t + cfg.batch_step * (acc.solve(cfg.ridge_T * static_cast<double>(acc.count()), t) - t)};
  }
  TransitionModel t = model.transition;
  const Eigen::Index bs = cfg.mode == UpdateMode::online ? 1 : cfg.batch_size;
  for (const auto& mus : data.mus) {
    const Eigen::Index pairs = mus.cols() - 1;
    for (Eigen::Index c0 = 0; c0 < pairs; c0 += bs) {
      const Eigen::Index w_cols = std::min(bs, pairs - c0);
      t = wake_update_T_batch(t, mus.middleCols(c0, w_cols), mus.middleCols(c0 + 1, w_cols), lr);
    }
  }
  return t;
}

// Residuals are taken against the one-step predictive DDC T mu_{t-1}: the
// filtered posterior mu_t is itself a function of o_t, so fitting against it
// explains away the observation noise.
ObservationModel update_observation(const StateSpaceModel& model, const WakeData& data, const WakeSleepConfig& cfg) {
  long total = 0;
  for (const auto& ep : data.episodes) total += static_cast<long>(ep.size());
  const Eigen::Index k = model.size();
  Matrix predictive(k, total);
  std::vector<Point2> obs;
  obs.reserve(static_cast<std::size_t>(total));
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < data.episodes.size(); ++i) {
    const Matrix& mus = data.mus[i];
    const Eigen::Index n = mus.cols();
    predictive.col(col) = model.transition.T * model.prior;
    if (n > 1) predictive.middleCols(col + 1, n - 1).noalias() = model.transition.T * mus.leftCols(n - 1);
    col += n;
    obs.insert(obs.end(), data.episodes[i].observed.begin(), data.episodes[i].observed.end());
  }
  ObservationModel out = model.observation;
  if (cfg.learn_observation_map) {
    const Matrix prev = model.observation.C;
    out.C = fit_observation_model(predictive, obs, cfg.ridge_obs * static_cast<double>(total), prev).C;
    if (cfg.mode == UpdateMode::batch) out.C = prev + cfg.batch_step * (out.C - prev);
  }
  out.noise_sigma = observation_noise(out.C, predictive, obs);
  return out;
}

void require_finite(const StateSpaceModel& model, int cycle, const char* phase) {
  if (!model.finite()) {
    throw NumericError("wake-sleep diverged: non-finite parameters after " + std::string(phase) + " phase of cycle " +
                       std::to_string(cycle));
  }
}

}  // namespace

Matrix backtrack_update(const Matrix& from, const Matrix& to, const std::function<bool(const Matrix&)>& stable) {
  for (double step = 1.0; step >= 1.0 / 64.0; step *= 0.5) {
    Matrix candidate = from + step * (to - from);
    if (stable(candidate)) return candidate;
  }
  return from;
}

RecognitionModel sleep_phase(const StateSpaceModel& model, const WakeSleepConfig& config, const EnvironmentSpec& env,
                             const SeedSequence& seeds, std::string_view stream, double lr, double* residual) {
  const SleepData sleep = collect_sleep(model, config, env, seeds, std::string(stream));
  const RecognitionModel fitted = update_recognition(model, sleep, config, lr);
  RecognitionModel out{backtrack_update(model.recognition.W, fitted.W, [&](const Matrix& w) {
    return filter_radius({w}, model.transition) < config.max_filter_radius;
  })};
  if (residual) {
    StateSpaceModel updated = model;
    updated.recognition = out;
    double sum = 0.0;
    long count = 0;
    for (const auto& seq : sleep.sequences) {
      sum += sleep_residual(updated, seq) * static_cast<double>(seq.size());
      count += static_cast<long>(seq.size());
    }
    *residual = sum / static_cast<double>(count);
  }
  return out;
}

WakeSleepResult run_wake_sleep(const WakeSleepConfig& config, const EnvironmentSpec& env, StateSpaceModel init,
                               const DirectionPolicy& behavior) {
  config.validate();
  env.validate();
  init.check_shapes();
  const SeedSequence seeds(config.seed);

  Rng heldout_rng = seeds.stream("heldout");
  const RewardField no_reward{Point2::Zero(), 0.0, 0.0};
  const Trajectory heldout = rollout(behavior, static_cast<std::size_t>(config.heldout_steps), env, no_reward, heldout_rng);
  Rng probe_rng = seeds.stream("sleep-probe");

  WakeSleepResult result{std::move(init), {}, {}};
  StateSpaceModel& model = result.model;
  {
    const Trajectory probe = sleep_sample(model, static_cast<std::size_t>(config.sleep_sequence_length),
                                          config.sleep_noise_sigma, env, probe_rng);
    result.initial = {0, sleep_residual(model, probe), wake_prediction_error(model, heldout.observed)};
  }

  double previous = result.initial.wake_pred_error;
  for (int cycle = 1; cycle <= config.n_cycles; ++cycle) {
    const double decay = 1.0 / (1.0 + (cycle - 1) / config.lr_decay_cycles);

    double resid = 0.0;
    model.recognition =
        sleep_phase(model, config, env, seeds, "sleep/cycle=" + std::to_string(cycle), config.lr_W * decay, &resid);
    require_finite(model, cycle, "sleep");

    const WakeData wake = collect_wake(model, config, env, behavior, seeds, cycle);
    model.transition.T = backtrack_update(model.transition.T, update_transition(model, wake, config, config.lr_T * decay).T,
                                   [&](const Matrix& t) {
                                     return filter_radius(model.recognition, {t}) < config.max_filter_radius;
                                   });
    model.observation = update_observation(model, wake, config);
    require_finite(model, cycle, "wake");

    const double pred = wake_prediction_error(model, heldout.observed);
    result.diagnostics.push_back({cycle, resid, pred});

    if (config.early_stopping && previous > 0.0 && (previous - pred) / previous < config.early_stopping_rel_tol) break;
    previous = pred;
  }
  return result;
}

WakeSleepResult run_wake_sleep(const WakeSleepConfig& config, const EnvironmentSpec& env,
                               const StateFeatureBasis& basis) {
  config.validate();
  StateSpaceModel init =
      initial_model(basis, config.ridge_decoder, config.transition_init_scale, config.initial_obs_noise);
  return run_wake_sleep(config, env, std::move(init), random_walk_policy());
}

}  // namespace ddcsf
