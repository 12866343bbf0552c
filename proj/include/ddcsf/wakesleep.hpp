#pragma once

#include "ddcsf/environment.hpp"
#include "ddcsf/features.hpp"
#include "ddcsf/ssm.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace ddcsf {

/// How the sleep (W) and wake (T) updates are applied within a cycle.
enum class UpdateMode {
  batch,      ///< closed-form ridge regression on the cycle's data
  minibatch,  ///< gradient steps on fixed-order mini-batches
  online      ///< one gradient step per sample
};

std::string_view to_string(UpdateMode m);
UpdateMode parse_update_mode(std::string_view s);

struct WakeSleepConfig {
  int n_cycles = 50;
  long sleep_samples_per_cycle = 30'000;
  long wake_observations_per_cycle = 50'000;
  /// Sleep samples are drawn as independent sequences of this length.
  long sleep_sequence_length = 100;
  /// Wake observations are collected in episodes of this length.
  long wake_episode_length = 500;
  UpdateMode mode = UpdateMode::batch;
  int batch_size = 256;
  /// Batch mode moves W and T this fraction of the way to the closed-form fit.
  double batch_step = 0.5;
  /// Updates that would push the spectral radius of the filter's recurrent
  /// map W[:, :K] T to this value or above are backtracked by step halving.
  double max_filter_radius = 0.98;
  double lr_W = 1e-2;
  double lr_T = 1e-2;
  /// Learning rates decay as lr / (1 + cycle / lr_decay_cycles).
  double lr_decay_cycles = 10.0;
  /// Ridges for W, T and C are per sample and shrink towards the current
  /// parameters rather than zero.
  double ridge_W = 1e-3;
  double ridge_T = 1e-3;
  double ridge_obs = 1e-3;
  double ridge_decoder = 1e-6;
  double sleep_noise_sigma = 0.06;
  double transition_init_scale = 1.0;
  double initial_obs_noise = 0.1;
  /// When false the wake phase keeps C and re-estimates only the noise.
  bool learn_observation_map = false;
  /// Length of the held-out random-walk trajectory used for diagnostics.
  long heldout_steps = 5'000;
  bool early_stopping = false;
  double early_stopping_rel_tol = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const WakeSleepConfig&) const = default;
};

struct CycleDiagnostics {
  int cycle = 0;
  /// Mean |psi(s_t) - mu_t|^2 over the cycle's sleep samples after the W update.
  double sleep_residual = 0.0;
  /// Mean |mu_{t+1} - T mu_t| over the held-out trajectory after the cycle.
  double wake_pred_error = 0.0;
};

struct WakeSleepResult {
  StateSpaceModel model;
  /// One entry per executed cycle.
  std::vector<CycleDiagnostics> diagnostics;
  /// Diagnostics of the initial model (cycle 0).
  CycleDiagnostics initial;
};

/// Exact spectral radius of W[:, :K] T, the filter's recurrent map.
double filter_radius(const RecognitionModel& rec, const TransitionModel& model);

/// Moves from `from` towards `to` with steps 1, 1/2, ..., 1/64 and returns
/// the first candidate `stable` accepts, or `from` if none is.
Matrix backtrack_update(const Matrix& from, const Matrix& to, const std::function<bool(const Matrix&)>& stable);

/**
 * One sleep phase: samples config.sleep_samples_per_cycle steps from `model`
 * on streams seeds.derive(stream, i), filters them with the current W and
 * returns the updated recognition model (backtracked to keep the filter
 * radius below config.max_filter_radius). When `residual` is given it
 * receives the mean |psi(s) - mu|^2 on those samples under the new W.
 */
RecognitionModel sleep_phase(const StateSpaceModel& model, const WakeSleepConfig& config, const EnvironmentSpec& env,
                             const SeedSequence& seeds, std::string_view stream, double lr,
                             double* residual = nullptr);

/// Mean |mu_{t+1} - T mu_t| along the filtered trajectory.
double wake_prediction_error(const StateSpaceModel& model, std::span<const Point2> observations);

/// Mean |psi(s_t) - mu_t|^2 when filtering `traj.observed`.
double sleep_residual(const StateSpaceModel& model, const Trajectory& traj);

/**
 * Alternates sleep-phase recognition training on samples from the current
 * generative model with wake-phase updates of T and the observation model on
 * posteriors inferred from environment rollouts under `behavior`.
 * Throws NumericError if any parameter becomes non-finite.
 */
WakeSleepResult run_wake_sleep(const WakeSleepConfig& config, const EnvironmentSpec& env, StateSpaceModel init,
                               const DirectionPolicy& behavior);

/// Starts from initial_model(basis, ...) under the random-walk policy.
WakeSleepResult run_wake_sleep(const WakeSleepConfig& config, const EnvironmentSpec& env,
                               const StateFeatureBasis& basis);

}  // namespace ddcsf
