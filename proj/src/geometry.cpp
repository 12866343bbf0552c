#include "ddcsf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddcsf {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// r is collinear with [p, q]; is it inside the bounding box?
bool on_segment(const Point2& p, const Point2& q, const Point2& r) {
  return r.x() >= std::min(p.x(), q.x()) && r.x() <= std::max(p.x(), q.x()) &&
         r.y() >= std::min(p.y(), q.y()) && r.y() <= std::max(p.y(), q.y());
}

}  // namespace

bool segments_intersect(const Point2& p, const Point2& q, const Segment& s) {
  const int d1 = sign(cross(s.a, s.b, p));
  const int d2 = sign(cross(s.a, s.b, q));
  const int d3 = sign(cross(p, q, s.a));
  const int d4 = sign(cross(p, q, s.b));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(s.a, s.b, p)) return true;
  if (d2 == 0 && on_segment(s.a, s.b, q)) return true;
  if (d3 == 0 && on_segment(p, q, s.a)) return true;
  if (d4 == 0 && on_segment(p, q, s.b)) return true;
  return false;
}

double distance_to_segment(const Point2& p, const Segment& s) {
  const Point2 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (p - s.a).norm();
  const double t = std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0);
  return (p - (s.a + t * d)).norm();
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

}  // namespace ddcsf
