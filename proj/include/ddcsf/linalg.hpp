#pragma once

#include "ddcsf/types.hpp"

namespace ddcsf {

/**
 * Streaming sufficient statistics for a multi-output ridge regression
 * y ~ B x. Samples arrive as columns; only X X^T and Y X^T are kept, so
 * memory is independent of the sample count.
 *
 * solve() returns argmin_B sum_n ||y_n - B x_n||^2 + ridge ||B||_F^2.
 */
class RidgeAccumulator {
 public:
  RidgeAccumulator(Eigen::Index input_dim, Eigen::Index output_dim);

  void add(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);
  /// Columns of xs and ys are paired samples.
  void add_batch(const Eigen::Ref<const Matrix>& xs, const Eigen::Ref<const Matrix>& ys);

  Eigen::Index input_dim() const { return gram_.rows(); }
  Eigen::Index output_dim() const { return cross_.rows(); }
  long long count() const { return count_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& cross() const { return cross_; }

  /// Throws ConfigError when empty, NumericError when ridge == 0 and the
  /// normal equations are rank deficient.
  Matrix solve(double ridge) const;
  /// argmin_B sum_n ||y_n - B x_n||^2 + ridge ||B - center||_F^2.
  Matrix solve(double ridge, const Matrix& center) const;

 private:
  Matrix gram_;
  Matrix cross_;
  long long count_ = 0;
};

/// Solves (G + ridge I) B^T = C^T for B, i.e. B = C (G + ridge I)^-1.
Matrix ridge_solve(const Matrix& gram, const Matrix& cross, double ridge);
/// Ridge shrinking towards `center` instead of zero: B = (C + ridge center)(G + ridge I)^-1.
Matrix ridge_solve(const Matrix& gram, const Matrix& cross, double ridge, const Matrix& center);

/// Dense solve of A X = B with a residual check; throws NumericError when
/// A is singular or the residual exceeds `residual_tol` in the inf-norm.
Matrix checked_solve(const Matrix& a, const Matrix& b, double residual_tol);

/// Max-row-sum norm.
inline double inf_norm(const Eigen::Ref<const Matrix>& m) {
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace ddcsf
