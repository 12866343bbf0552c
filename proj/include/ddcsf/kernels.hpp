#pragma once

// Data-parallel kernels behind the regression and encoding code. Every
// kernel has a plain serial reference in namespace `serial` that the tests
// compare against; the OpenMP versions partition work into fixed-size blocks
// so results do not depend on the thread count.

#include "ddcsf/types.hpp"

#include <functional>
#include <span>

namespace ddcsf::kernels {

/// Column block width for the parallel outer-product kernels.
inline constexpr Eigen::Index kBlock = 32;

/// out(:, n) = encode(points[n]) for every point; out must be pre-sized K x N.
using PointEncoder = std::function<void(const Point2&, Eigen::Ref<Vector>)>;

namespace serial {

/// G += X X^T, X holds one sample per column.
void accumulate_gram(const Eigen::Ref<const Matrix>& x, Eigen::Ref<Matrix> gram);

/// C += Y X^T.
void accumulate_cross(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& x,
                      Eigen::Ref<Matrix> cross);

void encode_points(std::span<const Point2> points, const PointEncoder& encode, Eigen::Ref<Matrix> out);

/// Row-wise Kronecker product: out(:, n) = a(:, n) (x) b(:, n), a-major.
void kron_columns(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b,
                  Eigen::Ref<Matrix> out);

}  // namespace serial

void accumulate_gram(const Eigen::Ref<const Matrix>& x, Eigen::Ref<Matrix> gram);
void accumulate_cross(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& x,
                      Eigen::Ref<Matrix> cross);
void encode_points(std::span<const Point2> points, const PointEncoder& encode, Eigen::Ref<Matrix> out);
void kron_columns(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b,
                  Eigen::Ref<Matrix> out);

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();
void set_threads(int n);

}  // namespace ddcsf::kernels
