#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "trustmhe/types.hpp"

namespace trustmhe {

// Piecewise-linear path with cumulative arclength. Queries clamp to the
// endpoints, so callers may pass s slightly outside [0, length].
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
  Vec2 position_at(double s) const;
  double yaw_at(double s) const;
  const std::vector<Vec2>& points() const { return pts_; }

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

struct RouteProjection {
  std::size_t seg_index{0};  // nearest segment; ties resolve to the lower index
  double s{0.0};             // foot-point arclength [m]
  double d_lat{0.0};         // signed lateral offset, positive left of travel [m]
  double psi_ref{0.0};       // nearest-segment heading [rad]
};

// Reference route resampled to (near) uniform vertex spacing. Carries
// per-vertex curvature, a lateral corridor per segment, and the length of
// the progress lookahead window in segments.
class Route {
 public:
  // `lat_lo` <= 0 <= `lat_hi` define the corridor: lat_hi is the allowance
  // to the left of the centerline, lat_lo (negative) to the right.
  Route(std::vector<Vec2> waypoints, double lat_lo, double lat_hi,
        std::size_t window_segments, double target_spacing = 1.0);

  double length() const { return spacing_ * static_cast<double>(segment_count()); }
  double spacing() const { return spacing_; }
  std::size_t segment_count() const { return verts_.size() - 1; }
  std::size_t window_segments() const { return window_segments_; }

  Vec2 vertex(std::size_t i) const { return verts_[i]; }
  double segment_yaw(std::size_t seg) const { return seg_yaw_[seg]; }
  double curvature(std::size_t seg) const { return curvature_[seg]; }
  std::pair<double, double> lat_bounds(std::size_t seg) const {
    return {lat_lo_[seg], lat_hi_[seg]};
  }

  // Overrides the corridor on all segments whose start arclength lies in
  // [s_from, s_to).
  void set_lat_bounds(double s_from, double s_to, double lat_lo, double lat_hi);

  Vec2 position_at(double s) const;
  double yaw_at(double s) const;

  // Full scan over all segments. Returns nullopt when the nearest point is
  // farther than max_distance away.
  std::optional<RouteProjection> project(Vec2 p, double max_distance = 100.0) const;

  // Scan limited to segments within `window` of `hint`. Always yields the
  // best candidate in that window; callers own the hint's validity.
  RouteProjection project_near(Vec2 p, std::size_t hint, std::size_t window = 32) const;

 private:
  RouteProjection project_range(Vec2 p, std::size_t first, std::size_t last) const;

  std::vector<Vec2> verts_;
  std::vector<double> seg_yaw_;    // per segment
  std::vector<double> curvature_;  // per segment
  std::vector<double> lat_lo_;     // per segment
  std::vector<double> lat_hi_;     // per segment
  double spacing_{1.0};
  std::size_t window_segments_{80};
};

}  // namespace trustmhe
