#pragma once

#include "ddcsf/geometry.hpp"
#include "ddcsf/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ddcsf {

/// Serializable description of both feature bases.
struct BasisSpec {
  int lattice_nx = 10;
  int lattice_ny = 10;
  double width = 0.3;
  /// Features whose center lies within factor * width of the internal wall
  /// are truncated along it. Zero disables truncation.
  double truncation_radius_factor = 0.5;
  int n_action_features = 10;
  double action_concentration = 2.0;

  void validate() const;
  bool operator==(const BasisSpec&) const = default;
};

/**
 * Gaussian bumps psi_i(s) = exp(-|s - c_i|^2 / (2 width^2)) over the unit box.
 *
 * A truncated feature is additionally multiplied by a line-of-sight
 * indicator: it is zero wherever the straight segment from its center to s
 * touches the internal wall.
 */
class StateFeatureBasis {
 public:
  StateFeatureBasis(std::vector<Point2> centers, double width, std::optional<Segment> wall = std::nullopt,
                    double truncation_radius_factor = 0.0);

  /// Regular nx x ny lattice of cell-centred bumps.
  static StateFeatureBasis lattice(int nx, int ny, double width, std::optional<Segment> wall = std::nullopt,
                                   double truncation_radius_factor = 0.0);
  static StateFeatureBasis from_spec(const BasisSpec& spec, std::optional<Segment> wall);

  Eigen::Index size() const { return static_cast<Eigen::Index>(centers_.size()); }
  const std::vector<Point2>& centers() const { return centers_; }
  double width() const { return width_; }
  const std::optional<Segment>& wall() const { return wall_; }
  bool truncated(Eigen::Index i) const { return truncated_[static_cast<std::size_t>(i)] != 0; }
  Eigen::Index truncated_count() const;

  void encode(const Point2& s, Eigen::Ref<Vector> out) const;
  DdcVector operator()(const Point2& s) const;

  /// K x N matrix, one encoded point per column (OpenMP over points).
  Matrix encode_batch(std::span<const Point2> points) const;

 private:
  std::vector<Point2> centers_;
  double width_;
  std::optional<Segment> wall_;
  std::vector<char> truncated_;
  double inv_two_var_;
};

/// Von Mises tuning curves phi_j(a) = exp(kappa (cos(a - theta_j) - 1)),
/// theta_j evenly spaced on [0, 2 pi); peak value exactly 1.
class ActionFeatureBasis {
 public:
  ActionFeatureBasis(int count, double concentration);
  static ActionFeatureBasis from_spec(const BasisSpec& spec) {
    return ActionFeatureBasis(spec.n_action_features, spec.action_concentration);
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(angles_.size()); }
  const std::vector<double>& preferred_angles() const { return angles_; }
  double concentration() const { return kappa_; }

  void encode(double angle, Eigen::Ref<Vector> out) const;
  Vector operator()(double angle) const;

 private:
  std::vector<double> angles_;
  double kappa_;
};

/// Linear readout s ~ alpha psi(s).
struct MeanDecoder {
  Eigen::Matrix<double, 2, Eigen::Dynamic> alpha;

  Eigen::Index size() const { return alpha.cols(); }
};

/// Least-squares readout of points from their features. `features` holds one
/// column per point. Errors: empty input (ConfigError); ridge == 0 with
/// rank-deficient data (NumericError).
MeanDecoder fit_mean_decoder(std::span<const Point2> points, const Eigen::Ref<const Matrix>& features,
                             double ridge);

/// Fits on the centres of a resolution x resolution grid over the box.
MeanDecoder fit_mean_decoder_on_grid(const StateFeatureBasis& basis, int resolution, double ridge);

Point2 decode_mean(const Eigen::Ref<const DdcVector>& v, const MeanDecoder& dec);

/// Mean Euclidean decode error |alpha psi(s) - s| over the given points.
double mean_decode_error(const StateFeatureBasis& basis, const MeanDecoder& dec, std::span<const Point2> points);

/// Cell centres of a resolution x resolution grid, row-major in y then x.
std::vector<Point2> grid_points(int resolution);

/// DDC of the uniform distribution over the box, approximated on a grid.
DdcVector uniform_prior(const StateFeatureBasis& basis, int resolution = 50);

}  // namespace ddcsf
