#pragma once

#include "ddcsf/types.hpp"

namespace ddcsf {

struct Segment {
  Point2 a;
  Point2 b;
};

/// True when closed segments [p, q] and [s.a, s.b] share at least one point
/// (touching counts as crossing).
bool segments_intersect(const Point2& p, const Point2& q, const Segment& s);

double distance_to_segment(const Point2& p, const Segment& s);

/// Wraps an angle into [0, 2 pi).
double wrap_angle(double a);

inline bool in_unit_box(const Point2& p) {
  return p.x() >= 0.0 && p.x() <= 1.0 && p.y() >= 0.0 && p.y() <= 1.0;
}

inline Point2 clamp_to_unit_box(const Point2& p) {
  return p.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace ddcsf
