#include "trustmhe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trustmhe {

BoxShape make_box_shape(const OrientedBox& box) {
  BoxShape s;
  s.center = box.center;
  const double c = std::cos(box.yaw);
  const double sn = std::sin(box.yaw);
  s.axis_l = {c, sn};
  s.axis_w = {-sn, c};
  s.half_l = 0.5 * box.length;
  s.half_w = 0.5 * box.width;
  const Vec2 el = s.half_l * s.axis_l;
  const Vec2 ew = s.half_w * s.axis_w;
  s.corners[0] = s.center + el + ew;
  s.corners[1] = s.center - el + ew;
  s.corners[2] = s.center - el - ew;
  s.corners[3] = s.center + el + (-1.0 * ew);
  return s;
}

double segment_distance2(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
  // Closest point pair between two segments, clamped to the endpoints.
  const Vec2 d1 = q1 - p1;
  const Vec2 d2 = q2 - p2;
  const Vec2 r = p1 - p2;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);

  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) {
    // Both segments are points.
    return norm2(r);
  }
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      if (denom > 0.0) {
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      }
      t = b * s + f;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > e) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      } else {
        t /= e;
      }
    }
  }
  const Vec2 c1 = p1 + s * d1;
  const Vec2 c2 = p2 + t * d2;
  return norm2(c1 - c2);
}

namespace {

// Interval of `shape` projected onto a unit axis is center +- reach where
// reach = hl*|axis.axis_l| + hw*|axis.axis_w|.
bool axis_separates(Vec2 axis, const BoxShape& a, const BoxShape& b) {
  const double ca = dot(a.center, axis);
  const double cb = dot(b.center, axis);
  const double ra = a.half_l * std::abs(dot(a.axis_l, axis)) + a.half_w * std::abs(dot(a.axis_w, axis));
  const double rb = b.half_l * std::abs(dot(b.axis_l, axis)) + b.half_w * std::abs(dot(b.axis_w, axis));
  return std::abs(ca - cb) > ra + rb;
}

}  // namespace

double box_distance(const BoxShape& a, const BoxShape& b) {
  // Two rectangles overlap iff none of their four face normals separates.
  const bool separated = axis_separates(a.axis_l, a, b) || axis_separates(a.axis_w, a, b) ||
                         axis_separates(b.axis_l, a, b) || axis_separates(b.axis_w, a, b);
  if (!separated) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const Vec2 pa = a.corners[i];
    const Vec2 qa = a.corners[(i + 1) & 3];
    for (int j = 0; j < 4; ++j) {
      const Vec2 pb = b.corners[j];
      const Vec2 qb = b.corners[(j + 1) & 3];
      best = std::min(best, segment_distance2(pa, qa, pb, qb));
    }
  }
  return std::sqrt(best);
}

double box_distance(const OrientedBox& a, const OrientedBox& b) {
  return box_distance(make_box_shape(a), make_box_shape(b));
}

}  // namespace trustmhe
