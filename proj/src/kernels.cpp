#include "ddcsf/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace ddcsf::kernels {

namespace serial {

void accumulate_gram(const Eigen::Ref<const Matrix>& x, Eigen::Ref<Matrix> gram) {
  const Eigen::Index d = x.rows();
  const Eigen::Index n = x.cols();
  require_size(gram.rows(), d, "accumulate_gram rows");
  require_size(gram.cols(), d, "accumulate_gram cols");
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      double acc = 0.0;
      for (Eigen::Index s = 0; s < n; ++s) acc += x(i, s) * x(j, s);
      gram(i, j) += acc;
    }
  }
}

void accumulate_cross(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& x,
                      Eigen::Ref<Matrix> cross) {
  require_size(y.cols(), x.cols(), "accumulate_cross samples");
  require_size(cross.rows(), y.rows(), "accumulate_cross rows");
  require_size(cross.cols(), x.rows(), "accumulate_cross cols");
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      double acc = 0.0;
      for (Eigen::Index s = 0; s < x.cols(); ++s) acc += y(i, s) * x(j, s);
      cross(i, j) += acc;
    }
  }
}

void encode_points(std::span<const Point2> points, const PointEncoder& encode, Eigen::Ref<Matrix> out) {
  require_size(out.cols(), static_cast<Eigen::Index>(points.size()), "encode_points");
  for (std::size_t n = 0; n < points.size(); ++n) {
    Vector col(out.rows());
    encode(points[n], col);
    out.col(static_cast<Eigen::Index>(n)) = col;
  }
}

void kron_columns(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b,
                  Eigen::Ref<Matrix> out) {
  require_size(a.cols(), b.cols(), "kron_columns samples");
  require_size(out.rows(), a.rows() * b.rows(), "kron_columns rows");
  require_size(out.cols(), a.cols(), "kron_columns cols");
  for (Eigen::Index s = 0; s < a.cols(); ++s) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.rows(); ++j) out(i * b.rows() + j, s) = a(i, s) * b(j, s);
    }
  }
}

}  // namespace serial

void accumulate_gram(const Eigen::Ref<const Matrix>& x, Eigen::Ref<Matrix> gram) {
  const Eigen::Index d = x.rows();
  require_size(gram.rows(), d, "accumulate_gram rows");
  require_size(gram.cols(), d, "accumulate_gram cols");
  const Eigen::Index blocks = (d + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index j0 = b * kBlock;
    const Eigen::Index w = std::min(kBlock, d - j0);
    gram.middleCols(j0, w).noalias() += x * x.middleRows(j0, w).transpose();
  }
}

void accumulate_cross(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& x,
                      Eigen::Ref<Matrix> cross) {
  require_size(y.cols(), x.cols(), "accumulate_cross samples");
  require_size(cross.rows(), y.rows(), "accumulate_cross rows");
  require_size(cross.cols(), x.rows(), "accumulate_cross cols");
  const Eigen::Index d = x.rows();
  const Eigen::Index blocks = (d + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index j0 = b * kBlock;
    const Eigen::Index w = std::min(kBlock, d - j0);
    cross.middleCols(j0, w).noalias() += y * x.middleRows(j0, w).transpose();
  }
}

void encode_points(std::span<const Point2> points, const PointEncoder& encode, Eigen::Ref<Matrix> out) {
  const auto n = static_cast<Eigen::Index>(points.size());
  require_size(out.cols(), n, "encode_points");
  const Eigen::Index k = out.rows();
#pragma omp parallel
  {
    Vector col(k);
#pragma omp for schedule(static)
    for (Eigen::Index s = 0; s < n; ++s) {
      encode(points[static_cast<std::size_t>(s)], col);
      out.col(s) = col;
    }
  }
}

void kron_columns(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b,
                  Eigen::Ref<Matrix> out) {
  require_size(a.cols(), b.cols(), "kron_columns samples");
  require_size(out.rows(), a.rows() * b.rows(), "kron_columns rows");
  require_size(out.cols(), a.cols(), "kron_columns cols");
  const Eigen::Index nb = b.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < a.cols(); ++s) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) out.col(s).segment(i * nb, nb) = a(i, s) * b.col(s);
  }
}

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) { omp_set_num_threads(std::max(1, n)); }

}  // namespace ddcsf::kernels
