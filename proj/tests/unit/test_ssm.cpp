#include "ddcsf/ssm.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddcsf;

namespace {

StateFeatureBasis single_centre() { return StateFeatureBasis({Point2(0.5, 0.5)}, 0.3); }

Matrix random_columns(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::srand(seed);
  return (Matrix::Random(rows, cols).array() + 1.0).matrix() * 0.5;
}

}  // namespace

TEST_CASE("predict_prior applies T") {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  Vector mu(2);
  mu << 0.2, 0.7;
  const Vector out = predict_prior(mu, TransitionModel{swap});
  CHECK(out[0] == 0.7);
  CHECK(out[1] == 0.2);
  CHECK_THROWS_AS(predict_prior(Vector::Zero(3), TransitionModel{swap}), DimensionError);
}

TEST_CASE("recognition extremes: observation only and prediction only") {
  const auto basis = StateFeatureBasis::lattice(3, 3, 0.3);
  const TransitionModel t = TransitionModel::identity(9, 0.5);
  const Vector mu = Vector::LinSpaced(9, 0.1, 0.9);
  const Point2 o(0.2, 0.8);
  CHECK((recognize(mu, o, RecognitionModel::observation_only(9), t, basis) - basis(o)).norm() < 1e-15);
  CHECK((recognize(mu, o, RecognitionModel::prediction_only(9), t, basis) - 0.5 * mu).norm() < 1e-15);
}

TEST_CASE("run_filter with observation-only recognition encodes each observation") {
  const auto basis = StateFeatureBasis::lattice(3, 3, 0.3);
  const std::vector<Point2> obs{{0.1, 0.1}, {0.4, 0.9}, {0.7, 0.3}};
  const Matrix mus = run_filter(obs, Vector::Zero(9), RecognitionModel::observation_only(9),
                                TransitionModel::identity(9), basis);
  REQUIRE(mus.cols() == 3);
  for (int i = 0; i < 3; ++i) CHECK((mus.col(i) - basis(obs[static_cast<std::size_t>(i)])).norm() < 1e-14);
}

TEST_CASE("run_filter matches the step-by-step recursion") {
  const auto basis = StateFeatureBasis::lattice(3, 3, 0.3);
  const Matrix w = 0.3 * random_columns(9, 18, 11);
  const TransitionModel t{0.8 * Matrix::Identity(9, 9)};
  const std::vector<Point2> obs{{0.1, 0.1}, {0.4, 0.9}, {0.7, 0.3}, {0.5, 0.5}};
  Vector mu = Vector::Constant(9, 0.2);
  const Matrix mus = run_filter(obs, mu, RecognitionModel{w}, t, basis);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    mu = recognize(mu, obs[i], RecognitionModel{w}, t, basis);
    CHECK((mus.col(static_cast<Eigen::Index>(i)) - mu).norm() < 1e-12);
  }
}

TEST_CASE("sleep_update_W single-feature gradient step") {
  const auto basis = single_centre();
  const Point2 c(0.5, 0.5);
  // Prediction input 1, observation input exp(-1/2) one width away, target psi(c) = 1.
  const Point2 o = c + Point2(0.3, 0.0);
  const std::vector<SleepSample> batch{{Vector::Ones(1), o, c}};
  const RecognitionModel w0{Matrix::Zero(1, 2)};
  const RecognitionModel w1 = sleep_update_W(w0, batch, TransitionModel::identity(1), basis, 0.5);
  CHECK(w1.W(0, 0) == doctest::Approx(0.5));
  CHECK(w1.W(0, 1) == doctest::Approx(0.5 * std::exp(-0.5)));
  // A perfect recogniser does not move.
  const RecognitionModel fixed{(Matrix(1, 2) << 1.0, 0.0).finished()};
  CHECK(sleep_update_W(fixed, batch, TransitionModel::identity(1), basis, 0.5).W == fixed.W);
  CHECK_THROWS_AS(sleep_update_W(w0, batch, TransitionModel::identity(1), basis, 0.0), ConfigError);
}

TEST_CASE("wake_update_T single-feature delta rule") {
  const TransitionModel t{Matrix::Zero(1, 1)};
  const TransitionModel out = wake_update_T(t, Vector::Ones(1), Vector::Constant(1, 2.0), 0.1);
  CHECK(out.T(0, 0) == doctest::Approx(0.2));
  const Matrix cur = Vector::Ones(1), nxt = Vector::Constant(1, 2.0);
  CHECK(wake_update_T_batch(t, cur, nxt, 0.1).T(0, 0) == doctest::Approx(0.2));
}

TEST_CASE("least-squares fits recover the generating maps") {
  const Matrix mus = random_columns(6, 400, 21);
  std::srand(22);
  const Matrix t0 = 0.3 * Matrix::Random(6, 6);
  const Matrix next = t0 * mus;
  CHECK((fit_transition(mus, next, 1e-10).T - t0).cwiseAbs().maxCoeff() < 1e-6);

  const Matrix c0 = Matrix::Random(2, 6);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.1);
  const Matrix big = random_columns(6, 20000, 23);
  std::vector<Point2> obs;
  for (Eigen::Index n = 0; n < 20000; ++n) obs.emplace_back(c0 * big.col(n) + Point2(noise(rng), noise(rng)));
  const ObservationModel fit = fit_observation_model(big, obs, 1e-8);
  CHECK((fit.C - c0).cwiseAbs().maxCoeff() < 0.05);
  CHECK(fit.noise_sigma.x() == doctest::Approx(0.1).epsilon(0.05));
  CHECK(fit.noise_sigma.y() == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("initial model shapes and sleep samples") {
  const auto basis = StateFeatureBasis::from_spec(BasisSpec{}, EnvironmentSpec{}.internal_wall);
  const StateSpaceModel m = initial_model(basis, 1e-6, 1.0, 0.1);
  CHECK_NOTHROW(m.check_shapes());
  CHECK(m.finite());
  Rng rng(9);
  const Trajectory tr = sleep_sample(m, 2000, 0.06, EnvironmentSpec{}, rng);
  CHECK(tr.latent.size() == 2000);
  CHECK(tr.observed.size() == 2000);
  CHECK_NOTHROW(tr.validate());
  // Observations centre on the decoded state with the model's noise.
  Point2 bias = Point2::Zero();
  double var = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Point2 d = tr.observed[i] - decode_mean(basis(tr.latent[i]), m.decoder);
    bias += d;
    var += d.squaredNorm();
  }
  bias /= 2000.0;
  CHECK(bias.norm() < 0.01);
  CHECK(std::sqrt(var / 4000.0) == doctest::Approx(0.1).epsilon(0.1));
  CHECK_THROWS_AS(sleep_sample(m, 0, 0.06, EnvironmentSpec{}, rng), ConfigError);
}
