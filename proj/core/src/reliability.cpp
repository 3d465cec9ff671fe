#include "trustmhe/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trustmhe {

namespace {

const AgentObservation* find_agent(const MeasurementSnapshot& snap, int agent_id) {
  for (const AgentObservation& a : snap.agents)
    if (a.agent_id == agent_id) return &a;
  return nullptr;
}

double stable_logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::optional<double> weighted_ade(const PredictionBatch& batch,
                                   std::span<const MeasurementSnapshot> window,
                                   const ReliabilityParams& p) {
  if (p.horizon < 1) throw std::invalid_argument("estimation horizon must be >= 1");
  const int t_est = p.horizon;

  // Locate the measurement snapshot for each window tick once.
  std::vector<const MeasurementSnapshot*> steps(static_cast<std::size_t>(t_est), nullptr);
  for (const MeasurementSnapshot& m : window) {
    const std::int64_t j = m.tick - batch.tick;
    if (j >= 1 && j <= t_est) steps[static_cast<std::size_t>(j - 1)] = &m;
  }
  for (const auto* s : steps)
    if (s == nullptr) throw std::invalid_argument("measurement window has gaps");

  double acc = 0.0;
  std::size_t counted = 0;
  for (const PredictionSet& set : batch.sets) {
    if (p.strict_ade && set.modalities.size() != static_cast<std::size_t>(p.k_pre))
      throw std::invalid_argument("prediction set modality count does not match k_pre");

    // The agent needs a measured counterpart at every step and must still
    // be inside the attention radius at the window's end.
    const AgentObservation* at_end = find_agent(*steps.back(), set.agent_id);
    if (at_end == nullptr || !at_end->in_attention) continue;
    bool complete = true;
    for (int j = 0; j < t_est - 1 && complete; ++j)
      complete = find_agent(*steps[static_cast<std::size_t>(j)], set.agent_id) != nullptr;
    if (!complete) continue;

    for (const TrajectoryModality& m : set.modalities) {
      if (m.points.size() < static_cast<std::size_t>(t_est))
        throw std::invalid_argument("prediction horizon shorter than estimation horizon");
      double err = 0.0;
      for (int j = 1; j <= t_est; ++j) {
        const GaussianPoint& g = m.points[static_cast<std::size_t>(j - 1)];
        const AgentObservation* obs = find_agent(*steps[static_cast<std::size_t>(j - 1)],
                                                 set.agent_id);
        err += norm(Vec2{g.mx, g.my} - obs->pos);
      }
      acc += m.confidence / static_cast<double>(t_est) * err;
    }
    ++counted;
  }

  if (counted == 0) return std::nullopt;
  double denom = static_cast<double>(counted);
  if (p.strict_ade) denom *= static_cast<double>(p.k_pre);
  return acc / denom;
}

double update_reliability(double omega, double d, const ReliabilityParams& p) {
  if (!(p.momentum >= 0.0 && p.momentum <= 1.0))
    throw std::invalid_argument("momentum must be in [0, 1]");
  if (!(d >= 0.0)) throw std::invalid_argument("displacement error must be >= 0");
  const double gamma = 2.0 * stable_logistic(-p.alpha * d);
  const double next = p.momentum * omega + (1.0 - p.momentum) * gamma;
  return std::clamp(next, 0.0, 1.0);
}

TrustMheEstimator::TrustMheEstimator(const ReliabilityParams& p) : p_(p) {
  if (p_.horizon < 1) throw std::invalid_argument("estimation horizon must be >= 1");
  if (!(p_.momentum >= 0.0 && p_.momentum <= 1.0))
    throw std::invalid_argument("momentum must be in [0, 1]");
  if (p_.k_pre < 1) throw std::invalid_argument("modality count must be >= 1");
}

TrustMheEstimator::TickResult TrustMheEstimator::tick(const MeasurementSnapshot& m,
                                                      PredictionBatch batch) {
  measurements_.push_back(m);
  while (measurements_.size() > static_cast<std::size_t>(p_.horizon))
    measurements_.pop_front();

  TickResult result;
  if (!batches_.empty() && batches_.front().tick == m.tick - p_.horizon) {
    const std::vector<MeasurementSnapshot> window(measurements_.begin(), measurements_.end());
    result.ade = weighted_ade(batches_.front(), window, p_);
    if (result.ade.has_value()) omega_ = update_reliability(omega_, *result.ade, p_);
    batches_.pop_front();
  }
  // Drop anything that can no longer be scored (missed grid ticks).
  while (!batches_.empty() && batches_.front().tick <= m.tick - p_.horizon)
    batches_.pop_front();

  batches_.push_back(std::move(batch));
  while (batches_.size() > static_cast<std::size_t>(p_.horizon) + 1) batches_.pop_front();

  result.omega = omega_;
  return result;
}

}  // namespace trustmhe
