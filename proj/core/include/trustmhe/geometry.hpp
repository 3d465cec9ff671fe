#pragma once

#include <array>

#include "trustmhe/types.hpp"

namespace trustmhe {

// Oriented rectangle: center pose plus full extents. `length` runs along
// the heading, `width` across it.
struct OrientedBox {
  Vec2 center;
  double yaw{0.0};     // [rad]
  double length{0.0};  // [m]
  double width{0.0};   // [m]
};

// Precomputed footprint used in hot loops: corners in CCW order plus the
// two local axes and half extents for separating-axis tests.
struct BoxShape {
  Vec2 center;
  Vec2 axis_l;  // unit vector along heading
  Vec2 axis_w;  // unit vector across heading (left)
  double half_l{0.0};
  double half_w{0.0};
  std::array<Vec2, 4> corners;
};

BoxShape make_box_shape(const OrientedBox& box);

// Squared distance between segments [p1,q1] and [p2,q2]. Exact for all
// degeneracies (points, parallel, collinear).
double segment_distance2(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2);

// Minimum Euclidean distance between two oriented boxes. Exactly 0.0 when
// the boxes touch or overlap (decided by separating-axis test), otherwise
// the smallest distance between their perimeters.
double box_distance(const BoxShape& a, const BoxShape& b);
double box_distance(const OrientedBox& a, const OrientedBox& b);

}  // namespace trustmhe
