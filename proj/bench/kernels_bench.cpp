// Wall-clock comparison of the OpenMP kernels against their serial references.
// Usage: ddcsf_bench [--threads N] [--repeats R]

#include "ddcsf/features.hpp"
#include "ddcsf/kernels.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

using namespace ddcsf;

namespace {

double best_ms(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, double max_abs_diff) {
  std::printf("%-14s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  max|diff| %.1e\n", name, serial, parallel,
              serial / parallel, max_abs_diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel vs serial kernel benchmark"};
  int threads = kernels::max_threads();
  int repeats = 5;
  long samples = 50'000;
  app.add_option("--threads", threads, "OpenMP threads for the parallel kernels");
  app.add_option("--repeats", repeats, "Timing repeats (best is reported)");
  app.add_option("--samples", samples, "Columns per batch");
  CLI11_PARSE(app, argc, argv);
  kernels::set_threads(threads);
  std::printf("threads %d, samples %ld, repeats %d\n", kernels::max_threads(), samples, repeats);

  const Eigen::Index k = 100, n = samples;
  std::srand(1);
  const Matrix x = Matrix::Random(k, n);
  const Matrix y = Matrix::Random(k, n);

  Matrix gs = Matrix::Zero(k, k), gp = Matrix::Zero(k, k);
  const double gram_s = best_ms(repeats, [&] { gs.setZero(); kernels::serial::accumulate_gram(x, gs); });
  const double gram_p = best_ms(repeats, [&] { gp.setZero(); kernels::accumulate_gram(x, gp); });
  report("gram", gram_s, gram_p, (gs - gp).cwiseAbs().maxCoeff());

  Matrix cs = Matrix::Zero(k, k), cp = Matrix::Zero(k, k);
  const double cross_s = best_ms(repeats, [&] { cs.setZero(); kernels::serial::accumulate_cross(y, x, cs); });
  const double cross_p = best_ms(repeats, [&] { cp.setZero(); kernels::accumulate_cross(y, x, cp); });
  report("cross", cross_s, cross_p, (cs - cp).cwiseAbs().maxCoeff());

  const auto basis = StateFeatureBasis::from_spec(BasisSpec{}, Segment{Point2(0.5, 0.0), Point2(0.5, 0.6)});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point2> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = Point2(u(rng), u(rng));
  const kernels::PointEncoder enc = [&](const Point2& p, Eigen::Ref<Vector> out) { basis.encode(p, out); };
  Matrix es(k, n), ep(k, n);
  const double enc_s = best_ms(repeats, [&] { kernels::serial::encode_points(pts, enc, es); });
  const double enc_p = best_ms(repeats, [&] { kernels::encode_points(pts, enc, ep); });
  report("encode", enc_s, enc_p, (es - ep).cwiseAbs().maxCoeff());

  const Matrix a = x.topRows(10);
  Matrix ks(k * 10, n), kp(k * 10, n);
  const double kron_s = best_ms(repeats, [&] { kernels::serial::kron_columns(x, a, ks); });
  const double kron_p = best_ms(repeats, [&] { kernels::kron_columns(x, a, kp); });
  report("kron", kron_s, kron_p, (ks - kp).cwiseAbs().maxCoeff());
  return 0;
}
