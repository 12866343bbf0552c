#include "ddcsf/features.hpp"

#include "ddcsf/kernels.hpp"
#include "ddcsf/linalg.hpp"

#include <cmath>
#include <numbers>

namespace ddcsf {

void BasisSpec::validate() const {
  if (lattice_nx < 1 || lattice_ny < 1) throw ConfigError("basis: lattice dimensions must be >= 1");
  if (!(width > 0.0) || !std::isfinite(width)) throw ConfigError("basis: width must be > 0");
  if (!(truncation_radius_factor >= 0.0)) throw ConfigError("basis: truncation_radius_factor must be >= 0");
  if (n_action_features < 1) throw ConfigError("basis: n_action_features must be >= 1");
  if (!(action_concentration >= 0.0) || !std::isfinite(action_concentration))
    throw ConfigError("basis: action_concentration must be finite and >= 0");
}

StateFeatureBasis::StateFeatureBasis(std::vector<Point2> centers, double width, std::optional<Segment> wall,
                                     double truncation_radius_factor)
    : centers_(std::move(centers)), width_(width), wall_(wall) {
  if (centers_.empty()) throw ConfigError("StateFeatureBasis: need at least one center");
  if (!(width_ > 0.0) || !std::isfinite(width_)) throw ConfigError("StateFeatureBasis: width must be > 0");
  for (const auto& c : centers_) {
    if (!in_unit_box(c)) throw ConfigError("StateFeatureBasis: centers must lie in the unit box");
  }
  inv_two_var_ = 1.0 / (2.0 * width_ * width_);
  truncated_.assign(centers_.size(), 0);
  if (wall_ && truncation_radius_factor > 0.0) {
    const double radius = truncation_radius_factor * width_;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      truncated_[i] = distance_to_segment(centers_[i], *wall_) <= radius ? 1 : 0;
    }
  }
}

StateFeatureBasis StateFeatureBasis::lattice(int nx, int ny, double width, std::optional<Segment> wall,
                                             double truncation_radius_factor) {
  if (nx < 1 || ny < 1) throw ConfigError("StateFeatureBasis::lattice: dimensions must be >= 1");
  std::vector<Point2> centers;
  centers.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) centers.emplace_back((ix + 0.5) / nx, (iy + 0.5) / ny);
  }
  return StateFeatureBasis(std::move(centers), width, wall, truncation_radius_factor);
}

StateFeatureBasis StateFeatureBasis::from_spec(const BasisSpec& spec, std::optional<Segment> wall) {
  spec.validate();
  return lattice(spec.lattice_nx, spec.lattice_ny, spec.width, wall, spec.truncation_radius_factor);
}

Eigen::Index StateFeatureBasis::truncated_count() const {
  Eigen::Index n = 0;
  for (char t : truncated_) n += t;
  return n;
}

void StateFeatureBasis::encode(const Point2& s, Eigen::Ref<Vector> out) const {
  require_size(out.size(), size(), "state_features");
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (truncated_[i] && segments_intersect(centers_[i], s, *wall_)) {
      out[static_cast<Eigen::Index>(i)] = 0.0;
      continue;
    }
    out[static_cast<Eigen::Index>(i)] = std::exp(-(s - centers_[i]).squaredNorm() * inv_two_var_);
  }
}

DdcVector StateFeatureBasis::operator()(const Point2& s) const {
  DdcVector v(size());
  encode(s, v);
  return v;
}

Matrix StateFeatureBasis::encode_batch(std::span<const Point2> points) const {
  Matrix out(size(), static_cast<Eigen::Index>(points.size()));
  kernels::encode_points(points, [this](const Point2& p, Eigen::Ref<Vector> col) { encode(p, col); }, out);
  return out;
}

ActionFeatureBasis::ActionFeatureBasis(int count, double concentration) : kappa_(concentration) {
  if (count < 1) throw ConfigError("ActionFeatureBasis: need at least one feature");
  if (!(concentration >= 0.0) || !std::isfinite(concentration))
    throw ConfigError("ActionFeatureBasis: concentration must be finite and >= 0");
  angles_.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) angles_.push_back(2.0 * std::numbers::pi * j / count);
}

void ActionFeatureBasis::encode(double angle, Eigen::Ref<Vector> out) const {
  require_size(out.size(), size(), "action_features");
  const double a = wrap_angle(angle);
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = std::exp(kappa_ * (std::cos(a - angles_[j]) - 1.0));
  }
}

Vector ActionFeatureBasis::operator()(double angle) const {
  Vector v(size());
  encode(angle, v);
  return v;
}

MeanDecoder fit_mean_decoder(std::span<const Point2> points, const Eigen::Ref<const Matrix>& features,
                             double ridge) {
  if (points.empty()) throw ConfigError("fit_mean_decoder: no samples");
  require_size(features.cols(), static_cast<Eigen::Index>(points.size()), "fit_mean_decoder samples");
  Matrix targets(2, features.cols());
  for (std::size_t n = 0; n < points.size(); ++n) targets.col(static_cast<Eigen::Index>(n)) = points[n];
  RidgeAccumulator acc(features.rows(), 2);
  acc.add_batch(features, targets);
  return MeanDecoder{acc.solve(ridge)};
}

MeanDecoder fit_mean_decoder_on_grid(const StateFeatureBasis& basis, int resolution, double ridge) {
  const auto pts = grid_points(resolution);
  return fit_mean_decoder(pts, basis.encode_batch(pts), ridge);
}

Point2 decode_mean(const Eigen::Ref<const DdcVector>& v, const MeanDecoder& dec) {
  require_size(v.size(), dec.size(), "decode_mean");
  return dec.alpha * v;
}

double mean_decode_error(const StateFeatureBasis& basis, const MeanDecoder& dec, std::span<const Point2> points) {
  if (points.empty()) return 0.0;
  const Matrix feats = basis.encode_batch(points);
  double total = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n) {
    total += (decode_mean(feats.col(static_cast<Eigen::Index>(n)), dec) - points[n]).norm();
  }
  return total / static_cast<double>(points.size());
}

std::vector<Point2> grid_points(int resolution) {
  if (resolution < 1) throw ConfigError("grid resolution must be >= 1");
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) pts.emplace_back((ix + 0.5) / resolution, (iy + 0.5) / resolution);
  }
  return pts;
}

DdcVector uniform_prior(const StateFeatureBasis& basis, int resolution) {
  const auto pts = grid_points(resolution);
  return basis.encode_batch(pts).rowwise().mean();
}

}  // namespace ddcsf
