#include "ddcsf/successor.hpp"

#include "ddcsf/linalg.hpp"

#include <cmath>
#include <sstream>

namespace ddcsf {

std::string_view to_string(SfMethod m) {
  switch (m) {
    case SfMethod::analytic: return "analytic";
    case SfMethod::fixed_point: return "fixed-point";
    case SfMethod::td_sleep: return "td-sleep";
    case SfMethod::td_wake: return "td-wake";
  }
  return "analytic";
}

SfMethod parse_sf_method(std::string_view s) {
  std::string v(s);
  for (auto& c : v) {
    if (c == '_') c = '-';
  }
  if (v == "analytic") return SfMethod::analytic;
  if (v == "fixed-point") return SfMethod::fixed_point;
  if (v == "td-sleep") return SfMethod::td_sleep;
  if (v == "td-wake") return SfMethod::td_wake;
  throw ConfigError("unknown sf method '" + std::string(s) + "'");
}

void FixedPointSolver::validate() const {
  if (!(tau > 0.0) || !(dt > 0.0) || dt / tau > 1.0)
    throw ConfigError("fixed-point solver: need 0 < dt/tau <= 1");
  if (!(tol > 0.0)) throw ConfigError("fixed-point solver: tol must be > 0");
  if (max_iters < 1) throw ConfigError("fixed-point solver: max_iters must be >= 1");
}

void DiscreteMdp::validate() const {
  if (P.rows() != P.cols() || P.rows() == 0) throw ConfigError("DiscreteMdp: P must be square and non-empty");
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("DiscreteMdp: discount must lie in [0, 1)");
  if ((P.array() < 0.0).any()) throw ConfigError("DiscreteMdp: negative transition probability");
  if (((P.rowwise().sum().array() - 1.0).abs() > 1e-12).any())
    throw ConfigError("DiscreteMdp: rows must sum to 1");
}

double spectral_radius(const Eigen::Ref<const Matrix>& a, int iterations) {
  require_size(a.rows(), a.cols(), "spectral_radius");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(1.0 + 3.0 * static_cast<double>(i));
  x.normalize();
  const int start = iterations / 2;
  double log_sum = 0.0;
  int counted = 0;
  for (int it = 0; it < iterations; ++it) {
    Vector y = a * x;
    const double g = y.norm();
    if (g == 0.0) return 0.0;
    if (it >= start) {
      log_sum += std::log(g);
      ++counted;
    }
    x = y / g;
  }
  return counted ? std::exp(log_sum / counted) : 0.0;
}

void require_contraction(const Eigen::Ref<const Matrix>& transition, double discount) {
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  if (!transition.allFinite()) throw NumericError("transition matrix has non-finite entries");
  const double rho = spectral_radius(discount * transition);
  if (!(rho < 1.0)) {
    std::ostringstream msg;
    msg << "successor features need a contraction: spectral radius of gamma*T is " << rho;
    throw NumericError(msg.str());
  }
}

SuccessorMatrix sf_analytic(const Eigen::Ref<const Matrix>& transition, double discount) {
  require_size(transition.rows(), transition.cols(), "sf_analytic");
  require_contraction(transition, discount);
  const Eigen::Index k = transition.rows();
  const Matrix a = Matrix::Identity(k, k) - discount * transition;
  return {checked_solve(a, Matrix::Identity(k, k), 1e-8), discount, SfMethod::analytic};
}

DdcVector sf_fixed_point(const Eigen::Ref<const Matrix>& transition, double discount,
                         const Eigen::Ref<const DdcVector>& mu, const FixedPointSolver& solver,
                         std::vector<double>* residual_trace) {
  solver.validate();
  require_size(transition.rows(), transition.cols(), "sf_fixed_point");
  require_size(mu.size(), transition.rows(), "sf_fixed_point mu");
  require_contraction(transition, discount);
  const double rate = solver.dt / solver.tau;
  const Matrix gt = discount * transition;
  Vector x = Vector::Zero(mu.size());
  Vector residual(mu.size());
  for (long it = 0; it < solver.max_iters; ++it) {
    residual.noalias() = gt * x;
    residual += mu - x;
    if (residual_trace) residual_trace->push_back(residual.lpNorm<Eigen::Infinity>());
    const double step = rate * residual.lpNorm<Eigen::Infinity>();
    x += rate * residual;
    if (!x.allFinite()) throw NumericError("sf_fixed_point: iterate became non-finite");
    if (step < solver.tol) return x;
  }
  std::ostringstream msg;
  msg << "sf_fixed_point: no convergence after " << solver.max_iters << " iterations (residual "
      << residual.lpNorm<Eigen::Infinity>() << ")";
  throw NumericError(msg.str());
}

Vector td_error(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Vector>& feat_t,
                const Eigen::Ref<const Vector>& feat_next, double discount) {
  require_size(u.cols(), feat_t.size(), "td_error feat_t");
  require_size(u.cols(), feat_next.size(), "td_error feat_next");
  require_size(u.rows(), feat_t.size(), "td_error U rows");
  Vector delta = feat_t;
  delta.noalias() += discount * (u * feat_next);
  delta.noalias() -= u * feat_t;
  return delta;
}

Vector td_step(Matrix& u, const Eigen::Ref<const Vector>& feat_t, const Eigen::Ref<const Vector>& feat_next,
               double discount, double lr) {
  if (!(lr > 0.0)) throw ConfigError("sf_td_update: lr must be > 0");
  Vector delta = td_error(u, feat_t, feat_next, discount);
  u.noalias() += (lr * delta) * feat_t.transpose();
  return delta;
}

Matrix sf_td_update(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Vector>& feat_t,
                    const Eigen::Ref<const Vector>& feat_next, double discount, double lr) {
  Matrix out = u;
  td_step(out, feat_t, feat_next, discount, lr);
  return out;
}

DdcVector distributional_sf(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const DdcVector>& mu) {
  require_size(mu.size(), u.cols(), "distributional_sf");
  return u * mu;
}

Matrix discrete_sr_oracle(const DiscreteMdp& mdp) {
  mdp.validate();
  const Eigen::Index n = mdp.P.rows();
  const Matrix a = Matrix::Identity(n, n) - mdp.discount * mdp.P;
  return checked_solve(a, Matrix::Identity(n, n), 1e-10);
}

Matrix learn_sf_td(std::span<const Matrix> sequences, double discount, const TdLearnConfig& config,
                   const Matrix& initial) {
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("learn_sf_td: discount must lie in [0, 1)");
  if (config.epochs < 0) throw ConfigError("learn_sf_td: epochs must be >= 0");
  require_size(initial.rows(), initial.cols(), "learn_sf_td initial");
  double scale = 1.0;
  if (config.normalize_by_feature_norm) {
    double sum = 0.0;
    long long count = 0;
    for (const auto& seq : sequences) {
      require_size(seq.rows(), initial.rows(), "learn_sf_td features");
      sum += seq.colwise().squaredNorm().sum();
      count += seq.cols();
    }
    if (count > 0 && sum > 0.0) scale = sum / static_cast<double>(count);
  }
  Matrix u = initial;
  if (config.start_step < 0) throw ConfigError("learn_sf_td: start_step must be >= 0");
  long long k = config.start_step;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& seq : sequences) {
      require_size(seq.rows(), u.rows(), "learn_sf_td features");
      for (Eigen::Index t = 0; t + 1 < seq.cols(); ++t) {
        td_step(u, seq.col(t), seq.col(t + 1), discount, config.schedule.at(k) / scale);
        ++k;
      }
    }
  }
  if (!u.allFinite()) throw NumericError("learn_sf_td: U became non-finite");
  return u;
}

}  // namespace ddcsf
