#include "trustmhe/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "trustmhe/rng.hpp"

namespace trustmhe {

std::vector<ControlInput> sample_perturbations(std::mt19937_64& rng, int rollouts, int horizon,
                                               double sigma_steer, double sigma_accel) {
  std::vector<ControlInput> pert(static_cast<std::size_t>(rollouts) * horizon);
  // k = 0 stays zero. Draw order is fixed (k-major, steer then accel) so a
  // given seed always yields the same perturbation tensor.
  for (int k = 1; k < rollouts; ++k) {
    for (int t = 0; t < horizon; ++t) {
      ControlInput& u = pert[static_cast<std::size_t>(k) * horizon + t];
      u.steer_rate = sigma_steer * gaussian(rng);
      u.accel = sigma_accel * gaussian(rng);
    }
  }
  return pert;
}

WeightResult mppi_weights(std::span<const double> costs, double lambda) {
  WeightResult r;
  r.weights.resize(costs.size());
  const double s_min = *std::min_element(costs.begin(), costs.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < costs.size(); ++k) {
    const double w = std::exp(-(costs[k] - s_min) / lambda);
    r.weights[k] = w;
    sum += w;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    r.degenerate = true;
    std::fill(r.weights.begin(), r.weights.end(), 1.0);
    sum = static_cast<double>(costs.size());
  }
  r.sum = sum;
  return r;
}

MppiSolver::MppiSolver(const MppiParams& params, const VehicleParams& vehicle)
    : params_(params), vehicle_(vehicle) {
  if (params_.rollouts < 2) throw std::invalid_argument("rollouts must be >= 2");
  if (params_.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(params_.lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(params_.momentum >= 0.0 && params_.momentum < 1.0))
    throw std::invalid_argument("momentum must be in [0, 1)");
  reset();
}

void MppiSolver::reset() {
  nominal_.assign(params_.horizon, ControlInput{});
  direction_.assign(params_.horizon, ControlInput{});
}

MppiSolver::PlanOutput MppiSolver::plan(const EgoState& s0, const CostFn& cost,
                                        std::mt19937_64& rng) {
  const int kN = params_.rollouts;
  const int horizon = params_.horizon;
  const std::vector<ControlInput> pert =
      sample_perturbations(rng, kN, horizon, params_.sigma_steer, params_.sigma_accel);

  std::vector<double> costs(kN);
  auto eval_range = [&](int k_begin, int k_end) {
    std::vector<ControlInput> candidate(horizon);
    for (int k = k_begin; k < k_end; ++k) {
      const ControlInput* v = &pert[static_cast<std::size_t>(k) * horizon];
      for (int t = 0; t < horizon; ++t)
        candidate[t] = {nominal_[t].steer_rate + v[t].steer_rate, nominal_[t].accel + v[t].accel};
      costs[k] = cost(candidate);
    }
  };

  const int workers = std::max(1, params_.threads);
  if (workers == 1 || kN < 2 * workers) {
    eval_range(0, kN);
  } else {
    // Each worker owns a disjoint slice of cost slots; the weight reduction
    // below runs in fixed k order, so thread count cannot change results.
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (kN + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int b = w * chunk;
      const int e = std::min(kN, b + chunk);
      if (b >= e) break;
      pool.emplace_back(eval_range, b, e);
    }
    for (auto& th : pool) th.join();
  }

  const WeightResult wr = mppi_weights(costs, params_.lambda);
  if (wr.degenerate)
    std::cerr << "[mppi] all rollout weights underflowed; using uniform weights\n";

  // Weighted-average perturbation, momentum-filtered, committed to U*.
  for (int t = 0; t < horizon; ++t) {
    double dsr = 0.0;
    double dac = 0.0;
    for (int k = 0; k < kN; ++k) {
      const ControlInput& v = pert[static_cast<std::size_t>(k) * horizon + t];
      dsr += wr.weights[k] * v.steer_rate;
      dac += wr.weights[k] * v.accel;
    }
    dsr /= wr.sum;
    dac /= wr.sum;
    ControlInput& dir = direction_[t];
    dir.steer_rate = params_.momentum * dir.steer_rate + (1.0 - params_.momentum) * dsr;
    dir.accel = params_.momentum * dir.accel + (1.0 - params_.momentum) * dac;
    nominal_[t].steer_rate += dir.steer_rate;
    nominal_[t].accel += dir.accel;
    // The nominal must stay inside the actuator box: an entry beyond it
    // makes every sampled candidate clamp to the same applied input, so the
    // landscape goes flat in that coordinate and the sequence drifts freely.
    nominal_[t] = clamp_input(nominal_[t], vehicle_);
  }

  PlanOutput out;
  out.inputs = nominal_;
  out.trajectory = rollout(s0, nominal_, vehicle_, params_.dt);
  out.min_rollout_cost = *std::min_element(costs.begin(), costs.end());
  out.committed_cost = cost(nominal_);
  out.degenerate_weights = wr.degenerate;

  // Receding horizon: both the nominal and the momentum buffer advance one
  // step so they stay aligned with the next tick's time grid.
  for (int t = 0; t + 1 < horizon; ++t) {
    nominal_[t] = nominal_[t + 1];
    direction_[t] = direction_[t + 1];
  }

  return out;
}

}  // namespace trustmhe
