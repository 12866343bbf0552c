#pragma once

#include "ddcsf/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddcsf {

enum class SfMethod { analytic, fixed_point, td_sleep, td_wake };

std::string_view to_string(SfMethod m);
/// Accepts "analytic", "fixed-point", "td-sleep", "td-wake" (underscores too).
SfMethod parse_sf_method(std::string_view s);

/// Successor features M ~ U feat; discount in [0, 1).
struct SuccessorMatrix {
  Matrix U;
  double discount = 0.0;
  SfMethod method = SfMethod::analytic;

  Eigen::Index size() const { return U.rows(); }
};

/// Euler integration of tau dx/dt = -x + gamma T x + mu.
struct FixedPointSolver {
  double tau = 1.0;
  double dt = 1.0;
  long max_iters = 1'000'000;
  /// Stop once the inf-norm of the Euler increment drops below tol.
  double tol = 1e-10;

  void validate() const;
};

/// Policy-conditioned Markov chain for the tabular oracle.
struct DiscreteMdp {
  Matrix P;
  double discount = 0.0;

  void validate() const;
};

/// Dominant eigenvalue magnitude by power iteration (geometric mean of the
/// growth factors over the second half of the iterations).
double spectral_radius(const Eigen::Ref<const Matrix>& a, int iterations = 50);

/// Throws NumericError naming the estimated radius if rho(gamma T) >= 1.
void require_contraction(const Eigen::Ref<const Matrix>& transition, double discount);

/// U = (I - gamma T)^-1 by dense LU solve with a residual check.
SuccessorMatrix sf_analytic(const Eigen::Ref<const Matrix>& transition, double discount);

/// Integrates the linear dynamics to equilibrium, x_inf = (I - gamma T)^-1 mu.
/// When `residual_trace` is given, the inf-norm of -x + gamma T x + mu is
/// appended at every iteration. Throws NumericError on max_iters.
DdcVector sf_fixed_point(const Eigen::Ref<const Matrix>& transition, double discount,
                         const Eigen::Ref<const DdcVector>& mu, const FixedPointSolver& solver,
                         std::vector<double>* residual_trace = nullptr);

/// TD error delta = feat_t + gamma U feat_next - U feat_t.
Vector td_error(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Vector>& feat_t,
                const Eigen::Ref<const Vector>& feat_next, double discount);

/// In-place U += lr delta feat_t^T; returns delta.
Vector td_step(Matrix& u, const Eigen::Ref<const Vector>& feat_t, const Eigen::Ref<const Vector>& feat_next,
               double discount, double lr);

/// Pure form of td_step.
Matrix sf_td_update(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const Vector>& feat_t,
                    const Eigen::Ref<const Vector>& feat_next, double discount, double lr);

/// U mu, the posterior expectation of the successor features.
DdcVector distributional_sf(const Eigen::Ref<const Matrix>& u, const Eigen::Ref<const DdcVector>& mu);
inline DdcVector distributional_sf(const SuccessorMatrix& sf, const Eigen::Ref<const DdcVector>& mu) {
  return distributional_sf(sf.U, mu);
}

/// (I - gamma P)^-1.
Matrix discrete_sr_oracle(const DiscreteMdp& mdp);

/// lr_k = lr0 / (1 + k / k0).
struct TdSchedule {
  double lr0 = 0.1;
  double k0 = 1e3;

  double at(long long k) const { return lr0 / (1.0 + static_cast<double>(k) / k0); }
};

struct TdLearnConfig {
  TdSchedule schedule;
  int epochs = 1;
  /// Divide the step size by the mean squared feature norm, which keeps
  /// TD stable for dense (non one-hot) features.
  bool normalize_by_feature_norm = true;
  /// Schedule index of the first update, for resuming a decayed schedule.
  long long start_step = 0;
};

/**
 * TD learning over feature sequences. Each matrix in `sequences` holds one
 * sequence, one time step per column; transitions never cross sequences.
 * Starts from `initial` and returns the learned U.
 */
Matrix learn_sf_td(std::span<const Matrix> sequences, double discount, const TdLearnConfig& config,
                   const Matrix& initial);

}  // namespace ddcsf
