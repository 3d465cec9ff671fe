#pragma once

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "trustmhe/dynamics.hpp"
#include "trustmhe/types.hpp"

namespace trustmhe {

struct MppiParams {
  int rollouts = 200;        // sampled input sequences per tick, >= 2
  int horizon = 50;          // plan steps
  double dt = 0.1;           // plan step [s]
  double lambda = 0.02;      // inverse temperature, > 0
  double momentum = 0.75;    // update-direction momentum, in [0, 1)
  double sigma_steer = 0.1;  // steering-rate noise std [rad/s]
  double sigma_accel = 1.0;  // acceleration noise std [m/s^2]
  int threads = 1;           // rollout evaluation workers
};

// Zero-mean Gaussian input perturbations, flattened [k * horizon + t].
// Rollout 0 is identically zero so the current nominal sequence is always
// re-evaluated (elite retention).
std::vector<ControlInput> sample_perturbations(std::mt19937_64& rng, int rollouts, int horizon,
                                               double sigma_steer, double sigma_accel);

// Exponential weights, baseline-shifted by the minimum cost. The shift
// cancels after normalization and keeps exp from underflowing across the
// board. `degenerate` marks the all-underflow fallback to uniform weights.
struct WeightResult {
  std::vector<double> weights;
  double sum{0.0};
  bool degenerate{false};
};
WeightResult mppi_weights(std::span<const double> costs, double lambda);

class MppiSolver {
 public:
  // Scores a full candidate input sequence (length = horizon).
  using CostFn = std::function<double(std::span<const ControlInput>)>;

  struct PlanOutput {
    std::vector<EgoState> trajectory;  // dynamics rollout of the committed plan
    std::vector<ControlInput> inputs;  // committed plan, before the horizon shift
    double min_rollout_cost{0.0};
    double committed_cost{0.0};        // cost of the committed plan sequence
    bool degenerate_weights{false};
  };

  MppiSolver(const MppiParams& params, const VehicleParams& vehicle);

  // One sample -> rollout -> weight -> update cycle. Mutates the nominal
  // sequence and the momentum direction, then shifts both one step for the
  // next tick (receding horizon, last entry repeated). The nominal is kept
  // inside the vehicle's input box after every update.
  PlanOutput plan(const EgoState& s0, const CostFn& cost, std::mt19937_64& rng);

  void reset();
  const std::vector<ControlInput>& nominal() const { return nominal_; }
  const MppiParams& params() const { return params_; }

 private:
  MppiParams params_;
  VehicleParams vehicle_;
  std::vector<ControlInput> nominal_;    // U*
  std::vector<ControlInput> direction_;  // momentum buffer, shifted with U*
};

}  // namespace trustmhe
