#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "trustmhe/types.hpp"

namespace trustmhe {

struct ReliabilityParams {
  int horizon = 5;         // estimation lookback, in prediction ticks
  double momentum = 0.25;  // old-value weight of the trust update, in [0, 1]
  double alpha = 1.0;      // error-to-sigmoid scale [1/m]
  bool strict_ade = true; // divide by modality count as well as agent count
  int k_pre = 6;           // expected modality count per prediction set
};

// Agent position measured at one prediction tick. `in_attention` marks
// whether the agent was inside the ego attention radius at that instant.
struct AgentObservation {
  int agent_id{0};
  Vec2 pos;
  bool in_attention{true};
};

struct MeasurementSnapshot {
  std::int64_t tick{0};  // prediction tick index
  std::vector<AgentObservation> agents;
};

struct PredictionBatch {
  std::int64_t tick{0};  // prediction tick the batch was generated at
  std::vector<PredictionSet> sets;
};

// Confidence-weighted average displacement error of `batch` against the
// measurement window covering the `p.horizon` ticks after its generation.
//
// An agent counts only if it has a measurement at every window tick and is
// still inside the attention radius at the final one; otherwise it is
// dropped from the agent count. Returns nullopt when no agent qualifies
// ("no evidence": the caller must skip the trust update).
std::optional<double> weighted_ade(const PredictionBatch& batch,
                                   std::span<const MeasurementSnapshot> window,
                                   const ReliabilityParams& p);

// One momentum-filtered trust update from a fresh error value d >= 0:
// omega' = momentum * omega + (1 - momentum) * 2 * sig(-alpha * d).
// The result is clamped to [0, 1]; for d >= 0 the clamp never binds.
double update_reliability(double omega, double d, const ReliabilityParams& p);

// Moving-horizon trust estimator. Feed it one measurement snapshot and one
// prediction batch per prediction tick; once a batch is exactly `horizon`
// ticks old it is scored against the buffered measurements and omega is
// updated. Until then (warm-up) omega stays at its initial 1.
class TrustMheEstimator {
 public:
  explicit TrustMheEstimator(const ReliabilityParams& p);

  struct TickResult {
    std::optional<double> ade;  // empty while warming up or without evidence
    double omega{1.0};
  };

  TickResult tick(const MeasurementSnapshot& m, PredictionBatch batch);

  double omega() const { return omega_; }
  std::size_t buffered_batches() const { return batches_.size(); }
  std::size_t buffered_measurements() const { return measurements_.size(); }

 private:
  ReliabilityParams p_;
  std::deque<PredictionBatch> batches_;
  std::deque<MeasurementSnapshot> measurements_;
  double omega_{1.0};
};

}  // namespace trustmhe
