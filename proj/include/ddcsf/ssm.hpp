#pragma once

#include "ddcsf/environment.hpp"
#include "ddcsf/features.hpp"
#include "ddcsf/rng.hpp"
#include "ddcsf/types.hpp"

#include <span>

namespace ddcsf {

/// Latent dynamics in DDC space: E[psi(s_{t+1}) | s_t] = T psi(s_t).
struct TransitionModel {
  Matrix T;

  Eigen::Index size() const { return T.rows(); }
  static TransitionModel identity(Eigen::Index k, double scale = 1.0) {
    return {scale * Matrix::Identity(k, k)};
  }
};

/// E[o | s] ~ C psi(s) with independent Gaussian noise per axis.
struct ObservationModel {
  Eigen::Matrix<double, 2, Eigen::Dynamic> C;
  Point2 noise_sigma = Point2::Zero();
};

/// Linear recursive filter mu_t = W [T mu_{t-1}; psi(o_t)], W is K x 2K.
struct RecognitionModel {
  Matrix W;

  /// [0 | I]: trust the current observation only.
  static RecognitionModel observation_only(Eigen::Index k);
  /// [I | 0]: pure prediction.
  static RecognitionModel prediction_only(Eigen::Index k);
};

/// Everything needed to simulate from and filter with the learned model.
struct StateSpaceModel {
  StateFeatureBasis basis;
  MeanDecoder decoder;
  TransitionModel transition;
  ObservationModel observation;
  RecognitionModel recognition;
  /// Belief before the first observation (DDC of the uniform box).
  DdcVector prior;

  Eigen::Index size() const { return basis.size(); }
  void check_shapes() const;
  bool finite() const;
};

/// T mu.
DdcVector predict_prior(const Eigen::Ref<const DdcVector>& mu, const TransitionModel& model);

/// [T mu_prev; psi(o)], the recognition model's input.
Vector recognition_input(const Eigen::Ref<const DdcVector>& mu_prev, const Point2& o, const TransitionModel& model,
                         const StateFeatureBasis& basis);

DdcVector recognize(const Eigen::Ref<const DdcVector>& mu_prev, const Point2& o, const RecognitionModel& rec,
                    const TransitionModel& model, const StateFeatureBasis& basis);

/// Posterior DDCs for an observation sequence, one column per time step,
/// starting from `prior`.
Matrix run_filter(std::span<const Point2> observations, const DdcVector& prior, const RecognitionModel& rec,
                  const TransitionModel& model, const StateFeatureBasis& basis);

/// One sleep-phase training sample: filter state before o, observation, and
/// the latent state it was emitted from.
struct SleepSample {
  DdcVector mu_prev;
  Point2 o;
  Point2 s;
};

/**
 * Gradient step on sum_t |psi(s_t) - W x_t|^2 with x_t = [T mu_prev; psi(o_t)]:
 * W' = W + lr * mean_t (psi(s_t) - W x_t) x_t^T. Averaging keeps lr
 * independent of batch size.
 */
RecognitionModel sleep_update_W(const RecognitionModel& rec, std::span<const SleepSample> batch,
                                const TransitionModel& model, const StateFeatureBasis& basis, double lr);

/// Online wake update T' = T + lr (mu_next - T mu_t) mu_t^T.
TransitionModel wake_update_T(const TransitionModel& model, const Eigen::Ref<const DdcVector>& mu_t,
                              const Eigen::Ref<const DdcVector>& mu_next, double lr);

/// Mini-batch form: T' = T + lr * mean_n (next_n - T cur_n) cur_n^T.
/// Columns of `current` and `next` are paired.
TransitionModel wake_update_T_batch(const TransitionModel& model, const Eigen::Ref<const Matrix>& current,
                                    const Eigen::Ref<const Matrix>& next, double lr);

/// Closed-form minimiser of sum |next - T cur|^2 + ridge |T|^2.
TransitionModel fit_transition(const Eigen::Ref<const Matrix>& current, const Eigen::Ref<const Matrix>& next,
                               double ridge);

/// Closed-form minimiser of sum |target - W x|^2 + ridge |W|^2; inputs and
/// targets are column-paired.
RecognitionModel fit_recognition(const Eigen::Ref<const Matrix>& inputs, const Eigen::Ref<const Matrix>& targets,
                                 double ridge);

/// Regresses o_t on mu_t; noise_sigma is the RMS residual per axis.
ObservationModel fit_observation_model(const Eigen::Ref<const Matrix>& mus, std::span<const Point2> observations,
                                       double ridge);
/// As above with the ridge shrinking C towards `center` (2 x K).
ObservationModel fit_observation_model(const Eigen::Ref<const Matrix>& mus, std::span<const Point2> observations,
                                       double ridge, const Matrix& center);

/// Per-axis RMS of o_t - C mu_t.
Point2 observation_noise(const Eigen::Ref<const Matrix>& c, const Eigen::Ref<const Matrix>& mus,
                         std::span<const Point2> observations);

/**
 * Simulates the generative model. s_0 is uniform over the box; then
 * s_{t+1} ~ N(decode_mean(T psi(s_t)), sleep_noise_sigma^2 I) passed through
 * the environment's wall constraint, and o_t ~ N(C psi(s_t), diag(noise^2)).
 * Returns latent and observed sequences of length n_steps (no actions or
 * rewards).
 */
Trajectory sleep_sample(const StateSpaceModel& model, std::size_t n_steps, double sleep_noise_sigma,
                        const EnvironmentSpec& spec, Rng& rng);

/// Builds the documented initialisation: decoder fit on a grid, T = scale * I,
/// W = [0 | I], C = decoder readout with `initial_obs_noise` per axis.
StateSpaceModel initial_model(const StateFeatureBasis& basis, double decoder_ridge, double transition_scale,
                              double initial_obs_noise);

}  // namespace ddcsf
