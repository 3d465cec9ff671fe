#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace trustmhe {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }

// Piecewise-constant acceleration command pair for the kinematic model.
struct ControlInput {
  double steer_rate{0.0};  // [rad/s]
  double accel{0.0};       // [m/s^2]
};

// Ego vehicle state. Heading is wrapped to [-pi, pi).
struct EgoState {
  double x{0.0};      // [m]
  double y{0.0};      // [m]
  double steer{0.0};  // front wheel angle [rad]
  double v{0.0};      // longitudinal speed [m/s]
  double yaw{0.0};    // [rad]
};

// Snapshot of one surrounding traffic participant.
struct AgentState {
  int id{0};
  double x{0.0};       // [m]
  double y{0.0};       // [m]
  double yaw{0.0};     // [rad]
  double v{0.0};       // [m/s]
  double width{2.0};   // [m]
  double length{5.0};  // [m]
};

// One future pose hypothesis: position mean with axis-aligned-in-frame
// uncertainty (std devs + correlation) and an orientation estimate.
struct GaussianPoint {
  double mx{0.0};   // mean x [m]
  double my{0.0};   // mean y [m]
  double sx{0.0};   // std dev x [m], >= 0
  double sy{0.0};   // std dev y [m], >= 0
  double rho{0.0};  // correlation, in [-1, 1]
  double yaw{0.0};  // predicted heading [rad]
};

// One trajectory hypothesis for an agent: a fixed-length sequence of
// per-step Gaussians plus the hypothesis weight.
struct TrajectoryModality {
  std::vector<GaussianPoint> points;
  double confidence{0.0};  // > 0; set sums to 1 after normalization
};

// All hypotheses produced for one agent at one generation instant.
// points[j] refers to j+1 prediction intervals after generated_at.
struct PredictionSet {
  int agent_id{0};
  std::int64_t generated_at{0};  // simulation step index at generation
  AgentState origin;             // agent state at generation time
  std::vector<TrajectoryModality> modalities;
};

// Scales confidences to sum to 1. Relative order is preserved, so the
// highest-confidence modality stays first when sets are built sorted.
inline void normalize_confidences(PredictionSet& set) {
  double sum = 0.0;
  for (const auto& m : set.modalities) sum += m.confidence;
  if (sum <= 0.0) throw std::invalid_argument("confidence sum must be positive");
  for (auto& m : set.modalities) m.confidence /= sum;
}

// Structural checks shared by every producer of prediction sets.
inline void validate_prediction_set(const PredictionSet& set, std::size_t expect_len) {
  if (set.modalities.empty()) throw std::invalid_argument("prediction set has no modalities");
  for (const auto& m : set.modalities) {
    if (m.points.size() != expect_len)
      throw std::invalid_argument("modality length mismatch: expected " +
                                  std::to_string(expect_len) + ", got " +
                                  std::to_string(m.points.size()));
    if (!(m.confidence > 0.0)) throw std::invalid_argument("modality confidence must be > 0");
    for (const auto& p : m.points) {
      if (!(p.sx >= 0.0) || !(p.sy >= 0.0)) throw std::invalid_argument("negative std dev");
      if (!(p.rho >= -1.0 && p.rho <= 1.0)) throw std::invalid_argument("correlation outside [-1, 1]");
    }
  }
}

}  // namespace trustmhe
