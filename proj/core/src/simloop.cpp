#include "trustmhe/simloop.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "trustmhe/geometry.hpp"
#include "trustmhe/mppi.hpp"
#include "trustmhe/reliability.hpp"
#include "trustmhe/rng.hpp"
#include "trustmhe/tracker.hpp"

namespace trustmhe {

CostSource cost_source_from_string(const std::string& name) {
  if (name == "blended") return CostSource::blended;
  if (name == "ai_only") return CostSource::ai_only;
  if (name == "cv_only") return CostSource::cv_only;
  throw std::invalid_argument("unknown cost source: " + name);
}

const char* to_string(CostSource s) {
  switch (s) {
    case CostSource::blended: return "blended";
    case CostSource::ai_only: return "ai_only";
    case CostSource::cv_only: return "cv_only";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (!(dt_state > 0.0)) throw std::invalid_argument("dt_state must be > 0");
  if (replan_every < 1) throw std::invalid_argument("replan_every must be >= 1");
  if (predict_every < 1) throw std::invalid_argument("predict_every must be >= 1");
  const double grid = static_cast<double>(predict_every) * dt_state;
  if (std::abs(grid - oracle.dt) > 1e-12)
    throw std::invalid_argument("predict_every * dt_state must equal oracle.dt");
  if (t_est < 1) throw std::invalid_argument("t_est must be >= 1");
  if (t_est > oracle.horizon) throw std::invalid_argument("t_est must be <= oracle.horizon");
  if (!(beta_est >= 0.0 && beta_est < 1.0))
    throw std::invalid_argument("beta_est must be in [0, 1)");
  if (!(alpha_est > 0.0)) throw std::invalid_argument("alpha_est must be > 0");
  if (k_pla < 2) throw std::invalid_argument("k_pla must be >= 2");
  if (t_pla < 1) throw std::invalid_argument("t_pla must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw std::invalid_argument("momentum must be in [0, 1)");
  if (!(sigma_steer > 0.0)) throw std::invalid_argument("sigma_steer must be > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (omega_override && !(*omega_override >= 0.0 && *omega_override <= 1.0))
    throw std::invalid_argument("omega_override must be in [0, 1]");
}

DueTasks schedule_tick(std::int64_t t, int replan_every, int predict_every) {
  DueTasks due;
  due.physics = true;
  due.replan = (t % replan_every) == 0;
  due.predict = (t % predict_every) == 0;
  due.trustmhe = due.predict;
  return due;
}

bool CrashCounter::observe(int agent_id, double distance) {
  bool& open = open_[agent_id];
  if (!open && distance == 0.0) {
    open = true;
    ++total_;
    return true;
  }
  if (open && distance > clearance_) open = false;
  return false;
}

namespace {

struct PendingPlan {
  TrackedPlan plan;
  std::int64_t activation_tick{0};
};

BoxShape agent_box(const AgentState& a) {
  return make_box_shape({{a.x, a.y}, a.yaw, a.length, a.width});
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, make_scenario(cfg.scenario, cfg.seed));
}

RunRecord run_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scen) {
  cfg.validate();
  const auto wall0 = std::chrono::steady_clock::now();

  TrafficWorld world(scen.agents, cfg.dt_state);
  const VehicleParams vp;
  const TrackerParams tp;

  MppiParams mp;
  mp.rollouts = cfg.k_pla;
  mp.horizon = cfg.t_pla;
  mp.dt = static_cast<double>(cfg.replan_every) * cfg.dt_state;
  mp.lambda = cfg.lambda;
  mp.momentum = cfg.momentum;
  mp.sigma_steer = cfg.sigma_steer;
  mp.threads = cfg.threads;
  MppiSolver solver(mp, vp);

  const OraclePredictor oracle(cfg.oracle, cfg.degradation, cfg.seed);
  CvPredictor fallback(cfg.constant_turn_fallback);

  ReliabilityParams rp;
  rp.horizon = cfg.t_est;
  rp.momentum = cfg.beta_est;
  rp.alpha = cfg.alpha_est;
  rp.strict_ade = cfg.strict_ade;
  rp.k_pre = cfg.oracle.k_pre;
  TrustMheEstimator estimator(rp);

  EgoState ego = scen.ego_spawn;
  const std::int64_t total_ticks = std::llround(scen.duration_s / cfg.dt_state);
  const double plan_dt = mp.dt;
  const std::size_t horizon = static_cast<std::size_t>(cfg.t_pla);

  std::vector<PredictionSet> latest_ai;   // forecasts from the newest round
  std::vector<PredictionSet> latest_cv;
  std::int64_t latest_pred_tick = 0;      // fine tick of that round

  TrackedPlan active;
  bool have_active = false;
  std::optional<PendingPlan> pending;
  ControlInput prev_first_input{};  // committed head of the previous solve

  RunRecord rec;
  CrashCounter crash_counter;
  double min_dist = std::numeric_limits<double>::infinity();

  std::size_t route_hint = 0;
  double max_s = 0.0;
  {
    const auto proj0 = scen.route.project({ego.x, ego.y});
    if (!proj0) throw std::runtime_error("ego spawn is off the route");
    route_hint = proj0->seg_index;
    max_s = proj0->s;
  }

  const auto solve_plan = [&](const EgoState& s0, std::int64_t activation_tick) {
    PlanContext ctx;
    ctx.route = &scen.route;
    ctx.weights = CostWeights::mode(cfg.mode);
    ctx.vehicle = vp;
    ctx.dt = plan_dt;
    ctx.v_des_cap = scen.v_des_cap;
    ctx.d_bar = scen.d_bar;
    ctx.margin = scen.margin;
    const RouteProjection proj = scen.route.project_near({s0.x, s0.y}, route_hint);
    ctx.window_anchor_s = proj.s;
    ctx.anchor_seg = proj.seg_index;
    ctx.init_d_lat = proj.d_lat;
    ctx.init_input = prev_first_input;

    const double plan_offset =
        static_cast<double>(activation_tick - latest_pred_tick) * cfg.dt_state;
    const auto to_predictions = [&](const std::vector<PredictionSet>& sets) {
      std::vector<AgentPrediction> out;
      out.reserve(sets.size());
      for (const PredictionSet& s : sets)
        out.push_back(make_agent_prediction(s, horizon, plan_dt, cfg.oracle.dt, plan_offset));
      return out;
    };

    switch (cfg.cost_source) {
      case CostSource::blended:
        ctx.primary = to_predictions(latest_ai);
        if (cfg.trustmhe_enabled) {
          ctx.blend = true;
          ctx.omega = cfg.omega_override ? *cfg.omega_override : estimator.omega();
          ctx.fallback = to_predictions(latest_cv);
        }
        break;
      case CostSource::ai_only:
        ctx.primary = to_predictions(latest_ai);
        break;
      case CostSource::cv_only:
        ctx.primary = to_predictions(latest_cv);
        break;
    }
    ctx.prepare(horizon);

    auto rng = substream(cfg.seed, Stream::planner, static_cast<std::uint64_t>(activation_tick));
    MppiSolver::PlanOutput out = solver.plan(
        s0, [&](std::span<const ControlInput> u) { return rollout_cost(s0, u, ctx); }, rng);
    prev_first_input = out.inputs.empty() ? ControlInput{} : out.inputs[0];

    TrackedPlan plan;
    plan.t0 = static_cast<double>(activation_tick) * cfg.dt_state;
    plan.dt = plan_dt;
    plan.start = s0;
    plan.states = std::move(out.trajectory);
    return plan;
  };

  double trace_omega = 1.0;
  std::optional<double> trace_ade;

  for (std::int64_t t = 0; t < total_ticks; ++t) {
    const DueTasks due = schedule_tick(t, cfg.replan_every, cfg.predict_every);
    const double now = static_cast<double>(t) * cfg.dt_state;

    if (due.predict) {
      const std::int64_t pred_index = t / cfg.predict_every;
      const std::vector<AgentState> agents = world.agent_states();

      MeasurementSnapshot meas;
      meas.tick = pred_index;
      meas.agents.reserve(agents.size());
      std::vector<int> attention;
      std::vector<const AgentState*> attended;
      for (const AgentState& a : agents) {
        const double dx = a.x - ego.x;
        const double dy = a.y - ego.y;
        const bool inside =
            dx * dx + dy * dy <= scen.attention_radius * scen.attention_radius;
        meas.agents.push_back({a.id, {a.x, a.y}, inside});
        if (inside) {
          attention.push_back(a.id);
          attended.push_back(&a);
        }
      }

      latest_ai = oracle.predict(world, attention, pred_index);
      latest_cv.clear();
      latest_cv.reserve(attended.size());
      for (const AgentState* a : attended)
        latest_cv.push_back(
            fallback.predict(*a, now, world.tick(), cfg.oracle.horizon, cfg.oracle.dt));
      latest_pred_tick = t;

      if (cfg.trustmhe_enabled) {
        PredictionBatch batch;
        batch.tick = pred_index;
        batch.sets = latest_ai;
        trace_ade = estimator.tick(meas, std::move(batch)).ade;
        trace_omega = cfg.omega_override ? *cfg.omega_override : estimator.omega();
      } else {
        trace_ade.reset();
        trace_omega = 1.0;
      }
    }

    if (due.replan) {
      if (pending && pending->activation_tick == t) {
        const EgoState& p = pending->plan.start;
        if (!(p.x == ego.x && p.y == ego.y && p.steer == ego.steer && p.v == ego.v &&
              p.yaw == ego.yaw))
          rec.latency_exact = false;
        active = std::move(pending->plan);
        have_active = true;
        pending.reset();
      }
      if (t == 0) {
        // Bootstrap: no plan exists yet, so the first solve plans from the
        // spawn state and activates immediately.
        active = solve_plan(ego, 0);
        have_active = true;
      } else {
        // Latency compensation: predict where the ego will be when this
        // solve lands, one replan interval from now, by running the same
        // tracker + model the loop itself will run against `active`.
        EgoState handoff = ego;
        for (int i = 0; i < cfg.replan_every; ++i) {
          const double sim_now = static_cast<double>(t + i) * cfg.dt_state;
          const ControlInput u = track_trajectory(handoff, active, sim_now, tp, vp);
          handoff = step(handoff, u, vp, cfg.dt_state);
        }
        const std::int64_t activation = t + cfg.replan_every;
        pending = PendingPlan{solve_plan(handoff, activation), activation};
      }
    }

    ControlInput u{};
    if (have_active) {
      u = track_trajectory(ego, active, now, tp, vp);
    } else {
      u.steer_rate = 0.0;
      u.accel = -vp.accel_max;
    }
    ego = step(ego, u, vp, cfg.dt_state);

    world.step();

    const BoxShape ego_box =
        make_box_shape({{ego.x, ego.y}, ego.yaw, vp.length, vp.width});
    for (const AgentState& a : world.agent_states()) {
      const double d = box_distance(ego_box, agent_box(a));
      if (d < min_dist) min_dist = d;
      crash_counter.observe(a.id, d);
    }
    const RouteProjection proj = scen.route.project_near({ego.x, ego.y}, route_hint);
    route_hint = proj.seg_index;
    if (proj.s > max_s) max_s = proj.s;

    if (due.predict) {
      TraceRow row;
      row.t = now;
      row.omega = trace_omega;
      row.ade = trace_ade;
      row.x = ego.x;
      row.y = ego.y;
      row.v = ego.v;
      row.min_dist = min_dist;
      row.crashes = crash_counter.total();
      rec.trace.push_back(row);
    }

    if (max_s >= scen.route.length() - scen.route.spacing()) break;
  }

  rec.crashes = crash_counter.total();
  rec.success = rec.crashes == 0;
  const double len = scen.route.length();
  rec.progress = len > 0.0 ? std::min(100.0, 100.0 * max_s / len) : 100.0;
  rec.min_dist = min_dist;
  rec.final_omega = cfg.trustmhe_enabled ? estimator.omega() : 1.0;
  rec.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return rec;
}

}  // namespace trustmhe
