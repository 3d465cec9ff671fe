#include "trustmhe/route.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trustmhe/angles.hpp"

namespace trustmhe {

Polyline::Polyline(std::vector<Vec2> points) : pts_(std::move(points)) {
  if (pts_.size() < 2) throw std::invalid_argument("polyline needs at least 2 points");
  cum_.resize(pts_.size());
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    const double len = norm(pts_[i] - pts_[i - 1]);
    if (len <= 0.0) throw std::invalid_argument("polyline has duplicate consecutive points");
    cum_[i] = cum_[i - 1] + len;
  }
}

Vec2 Polyline::position_at(double s) const {
  if (s <= 0.0) return pts_.front();
  if (s >= cum_.back()) return pts_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin());  // s < cum_[i]
  const double t = (s - cum_[i - 1]) / (cum_[i] - cum_[i - 1]);
  return pts_[i - 1] + t * (pts_[i] - pts_[i - 1]);
}

double Polyline::yaw_at(double s) const {
  std::size_t i = 1;
  if (s > 0.0) {
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
    i = std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cum_.begin())),
                 pts_.size() - 1);
  }
  const Vec2 d = pts_[i] - pts_[i - 1];
  return std::atan2(d.y, d.x);
}

Route::Route(std::vector<Vec2> waypoints, double lat_lo, double lat_hi,
             std::size_t window_segments, double target_spacing)
    : window_segments_(window_segments) {
  if (!(lat_lo <= 0.0 && lat_hi >= 0.0))
    throw std::invalid_argument("corridor must contain the centerline (lat_lo <= 0 <= lat_hi)");
  if (!(target_spacing > 0.0)) throw std::invalid_argument("spacing must be positive");

  const Polyline raw(std::move(waypoints));
  const double total = raw.length();
  const std::size_t n_seg =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(total / target_spacing)));
  spacing_ = total / static_cast<double>(n_seg);

  verts_.resize(n_seg + 1);
  for (std::size_t i = 0; i <= n_seg; ++i)
    verts_[i] = raw.position_at(static_cast<double>(i) * spacing_);

  seg_yaw_.resize(n_seg);
  for (std::size_t i = 0; i < n_seg; ++i) {
    const Vec2 d = verts_[i + 1] - verts_[i];
    seg_yaw_[i] = std::atan2(d.y, d.x);
  }

  // Heading rate over arclength, backward difference; first segment copies
  // the second so curvature is defined everywhere.
  curvature_.resize(n_seg, 0.0);
  for (std::size_t i = 1; i < n_seg; ++i)
    curvature_[i] = angle_diff(seg_yaw_[i], seg_yaw_[i - 1]) / spacing_;
  if (n_seg > 1) curvature_[0] = curvature_[1];

  lat_lo_.assign(n_seg, lat_lo);
  lat_hi_.assign(n_seg, lat_hi);
}

void Route::set_lat_bounds(double s_from, double s_to, double lat_lo, double lat_hi) {
  if (!(lat_lo <= 0.0 && lat_hi >= 0.0))
    throw std::invalid_argument("corridor must contain the centerline (lat_lo <= 0 <= lat_hi)");
  for (std::size_t i = 0; i < segment_count(); ++i) {
    const double s = static_cast<double>(i) * spacing_;
    if (s >= s_from && s < s_to) {
      lat_lo_[i] = lat_lo;
      lat_hi_[i] = lat_hi;
    }
  }
}

Vec2 Route::position_at(double s) const {
  const double clamped = std::clamp(s, 0.0, length());
  const std::size_t seg = std::min(static_cast<std::size_t>(clamped / spacing_), segment_count() - 1);
  const double t = clamped / spacing_ - static_cast<double>(seg);
  return verts_[seg] + t * (verts_[seg + 1] - verts_[seg]);
}

double Route::yaw_at(double s) const {
  const double clamped = std::clamp(s, 0.0, length());
  const std::size_t seg = std::min(static_cast<std::size_t>(clamped / spacing_), segment_count() - 1);
  return seg_yaw_[seg];
}

RouteProjection Route::project_range(Vec2 p, std::size_t first, std::size_t last) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_seg = first;
  double best_t = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const Vec2 a = verts_[i];
    const Vec2 u = verts_[i + 1] - a;
    const double t = std::clamp(dot(p - a, u) / dot(u, u), 0.0, 1.0);
    const Vec2 foot = a + t * u;
    const double d2 = norm2(p - foot);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_seg = i;
      best_t = t;
    }
  }
  const Vec2 a = verts_[best_seg];
  const Vec2 u = verts_[best_seg + 1] - a;
  RouteProjection proj;
  proj.seg_index = best_seg;
  proj.s = (static_cast<double>(best_seg) + best_t) * spacing_;
  proj.d_lat = cross(u, p - a) / norm(u);
  proj.psi_ref = seg_yaw_[best_seg];
  return proj;
}

std::optional<RouteProjection> Route::project(Vec2 p, double max_distance) const {
  const RouteProjection proj = project_range(p, 0, segment_count() - 1);
  const Vec2 foot = position_at(proj.s);
  if (norm(p - foot) > max_distance) return std::nullopt;
  return proj;
}

RouteProjection Route::project_near(Vec2 p, std::size_t hint, std::size_t window) const {
  const std::size_t first = hint > window ? hint - window : 0;
  const std::size_t last = std::min(hint + window, segment_count() - 1);
  return project_range(p, first, last);
}

}  // namespace trustmhe
