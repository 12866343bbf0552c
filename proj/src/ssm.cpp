#include "ddcsf/ssm.hpp"

#include "ddcsf/linalg.hpp"

#include <cmath>

namespace ddcsf {

namespace {
constexpr int kDecoderGrid = 40;
}

RecognitionModel RecognitionModel::observation_only(Eigen::Index k) {
  Matrix w = Matrix::Zero(k, 2 * k);
  w.rightCols(k).setIdentity();
  return {w};
}

RecognitionModel RecognitionModel::prediction_only(Eigen::Index k) {
  Matrix w = Matrix::Zero(k, 2 * k);
  w.leftCols(k).setIdentity();
  return {w};
}

void StateSpaceModel::check_shapes() const {
  const Eigen::Index k = size();
  require_size(decoder.size(), k, "model decoder");
  require_size(transition.T.rows(), k, "model T rows");
  require_size(transition.T.cols(), k, "model T cols");
  require_size(observation.C.cols(), k, "model C cols");
  require_size(recognition.W.rows(), k, "model W rows");
  require_size(recognition.W.cols(), 2 * k, "model W cols");
  require_size(prior.size(), k, "model prior");
}

bool StateSpaceModel::finite() const {
  return decoder.alpha.allFinite() && transition.T.allFinite() && observation.C.allFinite() &&
         observation.noise_sigma.allFinite() && recognition.W.allFinite() && prior.allFinite();
}

DdcVector predict_prior(const Eigen::Ref<const DdcVector>& mu, const TransitionModel& model) {
  require_size(mu.size(), model.T.cols(), "predict_prior");
  return model.T * mu;
}

Vector recognition_input(const Eigen::Ref<const DdcVector>& mu_prev, const Point2& o, const TransitionModel& model,
                         const StateFeatureBasis& basis) {
  const Eigen::Index k = basis.size();
  require_size(mu_prev.size(), k, "recognition_input mu");
  require_size(model.T.rows(), k, "recognition_input T");
  Vector x(2 * k);
  x.head(k).noalias() = model.T * mu_prev;
  basis.encode(o, x.tail(k));
  return x;
}

DdcVector recognize(const Eigen::Ref<const DdcVector>& mu_prev, const Point2& o, const RecognitionModel& rec,
                    const TransitionModel& model, const StateFeatureBasis& basis) {
  require_size(rec.W.cols(), 2 * basis.size(), "recognize W cols");
  return rec.W * recognition_input(mu_prev, o, model, basis);
}

Matrix run_filter(std::span<const Point2> observations, const DdcVector& prior, const RecognitionModel& rec,
                  const TransitionModel& model, const StateFeatureBasis& basis) {
  const Eigen::Index k = basis.size();
  require_size(prior.size(), k, "run_filter prior");
  require_size(rec.W.rows(), k, "run_filter W rows");
  require_size(rec.W.cols(), 2 * k, "run_filter W cols");
  const auto n = static_cast<Eigen::Index>(observations.size());
  Matrix mus(k, n);
  // Batch-encode observations, then run the (inherently serial) recursion.
  const Matrix obs_feats = basis.encode_batch(observations);
  const auto w_pred = rec.W.leftCols(k);
  const auto w_obs = rec.W.rightCols(k);
  Vector prev = prior;
  Vector predicted(k);
  for (Eigen::Index t = 0; t < n; ++t) {
    predicted.noalias() = model.T * prev;
    mus.col(t).noalias() = w_pred * predicted;
    mus.col(t).noalias() += w_obs * obs_feats.col(t);
    prev = mus.col(t);
  }
  return mus;
}

RecognitionModel sleep_update_W(const RecognitionModel& rec, std::span<const SleepSample> batch,
                                const TransitionModel& model, const StateFeatureBasis& basis, double lr) {
  if (!(lr > 0.0)) throw ConfigError("sleep_update_W: lr must be > 0");
  if (batch.empty()) return rec;
  const Eigen::Index k = basis.size();
  require_size(rec.W.rows(), k, "sleep_update_W W rows");
  require_size(rec.W.cols(), 2 * k, "sleep_update_W W cols");
  Matrix grad = Matrix::Zero(k, 2 * k);
  for (const auto& sample : batch) {
    const Vector x = recognition_input(sample.mu_prev, sample.o, model, basis);
    const Vector residual = basis(sample.s) - rec.W * x;
    grad.noalias() += residual * x.transpose();
  }
  return {rec.W + (lr / static_cast<double>(batch.size())) * grad};
}

TransitionModel wake_update_T(const TransitionModel& model, const Eigen::Ref<const DdcVector>& mu_t,
                              const Eigen::Ref<const DdcVector>& mu_next, double lr) {
  if (!(lr > 0.0)) throw ConfigError("wake_update_T: lr must be > 0");
  require_size(mu_t.size(), model.T.cols(), "wake_update_T mu_t");
  require_size(mu_next.size(), model.T.rows(), "wake_update_T mu_next");
  const Vector err = mu_next - model.T * mu_t;
  return {model.T + lr * err * mu_t.transpose()};
}

TransitionModel wake_update_T_batch(const TransitionModel& model, const Eigen::Ref<const Matrix>& current,
                                    const Eigen::Ref<const Matrix>& next, double lr) {
  if (!(lr > 0.0)) throw ConfigError("wake_update_T_batch: lr must be > 0");
  require_size(current.rows(), model.T.cols(), "wake_update_T_batch current");
  require_size(next.rows(), model.T.rows(), "wake_update_T_batch next");
  require_size(next.cols(), current.cols(), "wake_update_T_batch samples");
  if (current.cols() == 0) return model;
  const Matrix err = next - model.T * current;
  return {model.T + (lr / static_cast<double>(current.cols())) * err * current.transpose()};
}

TransitionModel fit_transition(const Eigen::Ref<const Matrix>& current, const Eigen::Ref<const Matrix>& next,
                               double ridge) {
  require_size(next.cols(), current.cols(), "fit_transition samples");
  RidgeAccumulator acc(current.rows(), next.rows());
  acc.add_batch(current, next);
  return {acc.solve(ridge)};
}

RecognitionModel fit_recognition(const Eigen::Ref<const Matrix>& inputs, const Eigen::Ref<const Matrix>& targets,
                                 double ridge) {
  require_size(targets.cols(), inputs.cols(), "fit_recognition samples");
  require_size(inputs.rows(), 2 * targets.rows(), "fit_recognition input dim");
  RidgeAccumulator acc(inputs.rows(), targets.rows());
  acc.add_batch(inputs, targets);
  return {acc.solve(ridge)};
}

ObservationModel fit_observation_model(const Eigen::Ref<const Matrix>& mus, std::span<const Point2> observations,
                                       double ridge) {
  return fit_observation_model(mus, observations, ridge, Matrix::Zero(2, mus.rows()));
}

ObservationModel fit_observation_model(const Eigen::Ref<const Matrix>& mus, std::span<const Point2> observations,
                                       double ridge, const Matrix& center) {
  const auto n = static_cast<Eigen::Index>(observations.size());
  if (n == 0) throw ConfigError("fit_observation_model: no samples");
  require_size(mus.cols(), n, "fit_observation_model samples");
  Matrix targets(2, n);
  for (Eigen::Index t = 0; t < n; ++t) targets.col(t) = observations[static_cast<std::size_t>(t)];
  RidgeAccumulator acc(mus.rows(), 2);
  acc.add_batch(mus, targets);
  ObservationModel out;
  out.C = acc.solve(ridge, center);
  out.noise_sigma = observation_noise(out.C, mus, observations);
  return out;
}

Point2 observation_noise(const Eigen::Ref<const Matrix>& c, const Eigen::Ref<const Matrix>& mus,
                         std::span<const Point2> observations) {
  const auto n = static_cast<Eigen::Index>(observations.size());
  if (n == 0) throw ConfigError("observation_noise: no samples");
  require_size(mus.cols(), n, "observation_noise samples");
  require_size(c.cols(), mus.rows(), "observation_noise C");
  Matrix targets(2, n);
  for (Eigen::Index t = 0; t < n; ++t) targets.col(t) = observations[static_cast<std::size_t>(t)];
  const Matrix resid = targets - c * mus;
  return (resid.array().square().rowwise().sum() / static_cast<double>(n)).sqrt().matrix();
}

Trajectory sleep_sample(const StateSpaceModel& model, std::size_t n_steps, double sleep_noise_sigma,
                        const EnvironmentSpec& spec, Rng& rng) {
  if (n_steps < 1) throw ConfigError("sleep_sample: n_steps must be >= 1");
  if (!(sleep_noise_sigma >= 0.0)) throw ConfigError("sleep_sample: sleep_noise_sigma must be >= 0");
  model.check_shapes();
  std::normal_distribution<double> unit(0.0, 1.0);
  Trajectory traj;
  traj.latent.reserve(n_steps);
  traj.observed.reserve(n_steps);
  Point2 s = sample_initial_state(spec, rng);
  Vector feat(model.size());
  for (std::size_t t = 0; t < n_steps; ++t) {
    model.basis.encode(s, feat);
    traj.latent.push_back(s);
    const double ex = unit(rng);
    const double ey = unit(rng);
    const Point2 mean_obs = model.observation.C * feat;
    traj.observed.emplace_back(mean_obs.x() + model.observation.noise_sigma.x() * ex,
                               mean_obs.y() + model.observation.noise_sigma.y() * ey);
    if (t + 1 == n_steps) break;
    const Point2 mean_next = decode_mean(model.transition.T * feat, model.decoder);
    const double nx = unit(rng);
    const double ny = unit(rng);
    const Point2 proposal = mean_next + sleep_noise_sigma * Point2(nx, ny);
    s = constrain_move(s, proposal, spec);
  }
  return traj;
}

StateSpaceModel initial_model(const StateFeatureBasis& basis, double decoder_ridge, double transition_scale,
                              double initial_obs_noise) {
  const Eigen::Index k = basis.size();
  MeanDecoder decoder = fit_mean_decoder_on_grid(basis, kDecoderGrid, decoder_ridge);
  ObservationModel obs{decoder.alpha, Point2::Constant(initial_obs_noise)};
  StateSpaceModel model{basis,
                        decoder,
                        TransitionModel::identity(k, transition_scale),
                        obs,
                        RecognitionModel::observation_only(k),
                        uniform_prior(basis)};
  return model;
}

}  // namespace ddcsf
