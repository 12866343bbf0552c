#include "ddcsf/linalg.hpp"

#include "ddcsf/kernels.hpp"

#include <cmath>
#include <sstream>

namespace ddcsf {

RidgeAccumulator::RidgeAccumulator(Eigen::Index input_dim, Eigen::Index output_dim)
    : gram_(Matrix::Zero(input_dim, input_dim)), cross_(Matrix::Zero(output_dim, input_dim)) {}

void RidgeAccumulator::add(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  require_size(x.size(), input_dim(), "RidgeAccumulator::add x");
  require_size(y.size(), output_dim(), "RidgeAccumulator::add y");
  gram_.noalias() += x * x.transpose();
  cross_.noalias() += y * x.transpose();
  ++count_;
}

void RidgeAccumulator::add_batch(const Eigen::Ref<const Matrix>& xs, const Eigen::Ref<const Matrix>& ys) {
  require_size(xs.rows(), input_dim(), "RidgeAccumulator::add_batch x");
  require_size(ys.rows(), output_dim(), "RidgeAccumulator::add_batch y");
  require_size(ys.cols(), xs.cols(), "RidgeAccumulator::add_batch samples");
  kernels::accumulate_gram(xs, gram_);
  kernels::accumulate_cross(ys, xs, cross_);
  count_ += xs.cols();
}

Matrix RidgeAccumulator::solve(double ridge) const {
  if (count_ == 0) throw ConfigError("ridge regression: no samples");
  return ridge_solve(gram_, cross_, ridge);
}

Matrix RidgeAccumulator::solve(double ridge, const Matrix& center) const {
  if (count_ == 0) throw ConfigError("ridge regression: no samples");
  return ridge_solve(gram_, cross_, ridge, center);
}

Matrix ridge_solve(const Matrix& gram, const Matrix& cross, double ridge, const Matrix& center) {
  require_size(center.rows(), cross.rows(), "ridge_solve center rows");
  require_size(center.cols(), cross.cols(), "ridge_solve center cols");
  return ridge_solve(gram, cross + ridge * center, ridge);
}

Matrix ridge_solve(const Matrix& gram, const Matrix& cross, double ridge) {
  if (ridge < 0.0 || !std::isfinite(ridge)) throw ConfigError("ridge must be finite and >= 0");
  require_size(gram.rows(), gram.cols(), "ridge_solve gram");
  require_size(cross.cols(), gram.rows(), "ridge_solve cross");
  Matrix a = 0.5 * (gram + gram.transpose());
  a.diagonal().array() += ridge;
  if (ridge == 0.0) {
    // Without regularisation, detect rank deficiency from the LDL^T pivots.
    Eigen::LDLT<Matrix> ldlt(a);
    const Vector d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double floor = dmax * 1e-13 * static_cast<double>(a.rows());
    if (ldlt.info() != Eigen::Success || dmax == 0.0 || d.minCoeff() <= floor) {
      std::ostringstream msg;
      msg << "ridge_solve: normal equations are rank deficient (min pivot " << d.minCoeff() << ", max " << dmax
          << "); insufficient data, use ridge > 0";
      throw NumericError(msg.str());
    }
  }
  Matrix bt;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    bt = llt.solve(cross.transpose());
  } else {
    // Rounding can leave G + ridge I numerically indefinite when ridge is
    // tiny next to ||G||; clamp the spectrum at zero before adding ridge.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gram + gram.transpose()));
    if (eig.info() != Eigen::Success) throw NumericError("ridge_solve: eigendecomposition failed");
    const Vector inv = (eig.eigenvalues().array().max(0.0) + ridge).inverse().matrix();
    bt = eig.eigenvectors() * inv.asDiagonal() * (eig.eigenvectors().transpose() * cross.transpose());
  }
  if (!bt.allFinite()) throw NumericError("ridge_solve: non-finite solution");
  return bt.transpose();
}

Matrix checked_solve(const Matrix& a, const Matrix& b, double residual_tol) {
  require_size(a.rows(), a.cols(), "checked_solve");
  require_size(b.rows(), a.rows(), "checked_solve rhs");
  Eigen::PartialPivLU<Matrix> lu(a);
  const double det_scale = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(det_scale > 0.0)) throw NumericError("checked_solve: singular system");
  Matrix x = lu.solve(b);
  const double resid = inf_norm(a * x - b);
  if (!x.allFinite() || !(resid < residual_tol)) {
    std::ostringstream msg;
    msg << "checked_solve: residual " << resid << " exceeds " << residual_tol;
    throw NumericError(msg.str());
  }
  return x;
}

}  // namespace ddcsf
