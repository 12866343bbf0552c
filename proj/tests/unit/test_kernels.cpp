#include "ddcsf/kernels.hpp"

#include <doctest.h>

using namespace ddcsf;

namespace {

Matrix sample(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::srand(seed);
  return Matrix::Random(rows, cols);
}

}  // namespace

TEST_CASE("parallel gram and cross match the serial reference for any thread count") {
  const Matrix x = sample(37, 501, 1);
  const Matrix y = sample(11, 501, 2);
  Matrix g_ref = Matrix::Zero(37, 37), c_ref = Matrix::Zero(11, 37);
  kernels::serial::accumulate_gram(x, g_ref);
  kernels::serial::accumulate_cross(y, x, c_ref);
  CHECK((g_ref - x * x.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  const int saved = kernels::max_threads();
  for (int threads : {1, 2, 3, 4}) {
    kernels::set_threads(threads);
    Matrix g = Matrix::Zero(37, 37), c = Matrix::Zero(11, 37);
    kernels::accumulate_gram(x, g);
    kernels::accumulate_cross(y, x, c);
    CHECK((g - g_ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((c - c_ref).cwiseAbs().maxCoeff() < 1e-10);
  }
  kernels::set_threads(saved);
}

TEST_CASE("parallel results do not depend on the thread count bitwise") {
  const Matrix x = sample(20, 777, 3);
  const int saved = kernels::max_threads();
  kernels::set_threads(1);
  Matrix g1 = Matrix::Zero(20, 20);
  kernels::accumulate_gram(x, g1);
  kernels::set_threads(4);
  Matrix g4 = Matrix::Zero(20, 20);
  kernels::accumulate_gram(x, g4);
  kernels::set_threads(saved);
  CHECK(g1 == g4);
}

TEST_CASE("kron_columns and encode_points match the serial reference") {
  const Matrix a = sample(5, 70, 4), b = sample(3, 70, 5);
  Matrix r(15, 70), p(15, 70);
  kernels::serial::kron_columns(a, b, r);
  kernels::kron_columns(a, b, p);
  CHECK(r == p);
  CHECK(r(1 * 3 + 2, 9) == doctest::Approx(a(1, 9) * b(2, 9)));

  std::vector<Point2> pts;
  for (int i = 0; i < 100; ++i) pts.emplace_back(0.01 * i, 1.0 - 0.01 * i);
  const kernels::PointEncoder enc = [](const Point2& q, Eigen::Ref<Vector> out) {
    out[0] = q.x() + q.y();
    out[1] = q.x() * q.y();
  };
  Matrix s(2, 100), q(2, 100);
  kernels::serial::encode_points(pts, enc, s);
  kernels::encode_points(pts, enc, q);
  CHECK(s == q);
}

TEST_CASE("accumulation adds to existing contents") {
  const Matrix x = sample(4, 10, 6);
  Matrix g = Matrix::Identity(4, 4);
  kernels::accumulate_gram(x, g);
  CHECK((g - (Matrix::Identity(4, 4) + x * x.transpose())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shape mismatches are reported") {
  Matrix g(3, 3);
  CHECK_THROWS_AS(kernels::accumulate_gram(Matrix(4, 2), g), DimensionError);
  Matrix c(2, 2);
  CHECK_THROWS_AS(kernels::accumulate_cross(Matrix(2, 3), Matrix(2, 4), c), DimensionError);
}
