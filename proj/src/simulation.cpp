#include "mplan/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace mplan {

using nlohmann::json;

const char* to_string(OpmClass c) {
  switch (c) {
    case OpmClass::Comfortable: return "Comfortable";
    case OpmClass::Normal: return "Normal";
    case OpmClass::Aggressive: return "Aggressive";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::GoalReached: return "GoalReached";
    case Outcome::Collision: return "Collision";
    case Outcome::Timeout: return "Timeout";
    case Outcome::NoPlanDeadlock: return "NoPlanDeadlock";
  }
  return "?";
}

namespace {

int nearest_lane(const LaneMap& map, const CartesianState& ego) {
  int best = -1;
  double best_lateral = std::numeric_limits<double>::infinity();
  for (const auto& lane : map.lanes) {
    ReferencePath center;
    try {
      center = build_reference_path(lane.centerline);
    } catch (const GeometryError&) {
      continue;
    }
    try {
      const auto proj = center.project({ego.x, ego.y});
      if (std::fabs(proj.lateral) < best_lateral) {
        best_lateral = std::fabs(proj.lateral);
        best = lane.id;
      }
    } catch (const OutOfPathExtent&) {
    }
  }
  return best;
}

struct EgoChannels {
  double a_lon = 0.0;
  double a_lat = 0.0;
  double jerk_lon = 0.0;
  double jerk_lat = 0.0;
};

EgoChannels channels_of(const TrajectorySample& sample) {
  return {sample.s_dd, sample.l_dd, sample.s_ddd, sample.l_ddd};
}

CartesianState state_of(const TrajectorySample& sample) {
  return {sample.x, sample.y, sample.theta, sample.v, sample.a};
}

}  // namespace

std::vector<ObstacleHistory> scripted_histories(const Scenario& scenario, double t,
                                                const PlannerConfig& config) {
  const double dt = config.params.opt.dt;
  std::vector<ObstacleHistory> histories(scenario.obstacles.size());
  for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
    histories[i].id = scenario.obstacles[i].id;
    histories[i].length = scenario.obstacles[i].footprint.length;
    histories[i].width = scenario.obstacles[i].footprint.width;
    const ObstacleMotion motion(scenario.map, scenario.obstacles[i]);
    const double start = std::max(0.0, t - config.history_window);
    for (double ts = start; ts <= t + 1e-9; ts += dt) {
      histories[i].states.emplace_back(ts, motion.state_at(ts));
    }
  }
  return histories;
}

PlanningSnapshot build_snapshot(const Scenario& scenario, const CartesianState& ego,
                                std::vector<ObstacleHistory> histories,
                                const PlannerConfig& config) {
  PlanningSnapshot snapshot;
  snapshot.ego = ego;
  snapshot.ego_footprint = scenario.ego.footprint;
  snapshot.map = &scenario.map;
  snapshot.current_lane = nearest_lane(scenario.map, ego);
  const bool on_route =
      snapshot.current_lane < 0 ||
      std::find(scenario.ego.route.begin(), scenario.ego.route.end(), snapshot.current_lane) !=
          scenario.ego.route.end();
  if (on_route) {
    snapshot.route_path = build_route_path(scenario.map, scenario.ego.route);
  } else {
    const double needed =
        std::max(ego.v, scenario.ego.target_speed) * config.params.opt.horizon + 120.0;
    snapshot.route_path = build_drive_path(scenario.map, snapshot.current_lane, needed);
  }
  snapshot.target_speed = scenario.ego.target_speed;
  snapshot.histories = std::move(histories);
  snapshot.goal_region = scenario.goal_region;
  return snapshot;
}

SimTrace run_closed_loop(const Scenario& scenario, const PlannerConfig& config,
                         Predictor& predictor) {
  using Clock = std::chrono::steady_clock;
  scenario.validate();

  const double dt = config.params.opt.dt;
  SimTrace trace;
  trace.dt = dt;

  std::vector<ObstacleMotion> motions;
  motions.reserve(scenario.obstacles.size());
  for (const auto& obstacle : scenario.obstacles) {
    motions.emplace_back(scenario.map, obstacle);
  }
  std::vector<ObstacleHistory> histories(scenario.obstacles.size());
  for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
    histories[i].id = scenario.obstacles[i].id;
    histories[i].length = scenario.obstacles[i].footprint.length;
    histories[i].width = scenario.obstacles[i].footprint.width;
  }

  CartesianState ego = scenario.ego.initial;
  EgoChannels channels{ego.a, 0.0, 0.0, 0.0};

  std::optional<Trajectory> carried;  // previous plan continued on NoPlan
  std::size_t carried_index = 0;
  int stopped_no_plan_streak = 0;

  for (int step = 0;; ++step) {
    const double t = step * dt;

    std::vector<CartesianState> obstacle_states;
    obstacle_states.reserve(motions.size());
    for (std::size_t i = 0; i < motions.size(); ++i) {
      const CartesianState state = motions[i].state_at(t);
      obstacle_states.push_back(state);
      auto& history = histories[i].states;
      history.emplace_back(t, state);
      while (!history.empty() && history.front().first < t - config.history_window - 1e-9) {
        history.erase(history.begin());
      }
    }

    // Ground truth first: collision, then goal, then timeout.
    bool collided = false;
    for (std::size_t i = 0; i < obstacle_states.size() && !collided; ++i) {
      const auto ego_box =
          OrientedBox::from_state(ego.x, ego.y, ego.theta, scenario.ego.footprint, 0.0);
      const auto& os = obstacle_states[i];
      const auto obs_box =
          OrientedBox::from_state(os.x, os.y, os.theta, scenario.obstacles[i].footprint, 0.0);
      if (obb_overlap(ego_box, obs_box)) {
        trace.outcome = Outcome::Collision;
        trace.collision = CollisionDetail{t, scenario.obstacles[i].id};
        collided = true;
      }
    }
    if (collided) break;
    if (scenario.goal_region.contains({ego.x, ego.y})) {
      trace.outcome = Outcome::GoalReached;
      break;
    }
    if (t >= scenario.duration - 1e-9) {
      trace.outcome = Outcome::Timeout;
      break;
    }

    StepRecord record;
    record.t = t;
    record.ego = ego;
    record.obstacles = obstacle_states;

    TrajectorySample next_sample;
    bool have_next = false;

    if (config.planner_enabled) {
      const auto cycle_start = Clock::now();
      const auto snapshot = build_snapshot(scenario, ego, histories, config);
      const auto base_problem = make_base_problem(snapshot, config.params);
      auto result = stream_plan(snapshot, base_problem, config.params, predictor);
      record.planner_ms = result.planner_ms;
      record.prediction_ms = result.prediction_ms;
      record.cycle_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - cycle_start).count();

      if (result.found) {
        record.plan_found = true;
        record.plan_level = result.level;
        record.decision = to_string(result.trajectories[0].maneuver);
        record.trajectory_id = result.plan.steps[0].signature();
        carried = result.trajectories[0];
        carried_index = 0;
        channels = channels_of(carried->samples[0]);
        next_sample = carried->samples[1];
        have_next = true;
        stopped_no_plan_streak = 0;
      } else {
        record.decision = "NoPlan";
        if (carried && carried_index + 2 < carried->samples.size()) {
          ++carried_index;
          channels = channels_of(carried->samples[carried_index]);
          next_sample = carried->samples[carried_index + 1];
          have_next = true;
          stopped_no_plan_streak = 0;
        } else {
          carried.reset();
          if (ego.v < 1e-6) {
            if (++stopped_no_plan_streak >= 3) {
              trace.steps.push_back(std::move(record));
              trace.outcome = Outcome::NoPlanDeadlock;
              break;
            }
          } else {
            stopped_no_plan_streak = 0;
          }
        }
      }
    } else {
      record.decision = "Disabled";
    }

    record.a_lon = channels.a_lon;
    record.a_lat = channels.a_lat;
    record.jerk_lon = channels.jerk_lon;
    record.jerk_lat = channels.jerk_lat;
    trace.steps.push_back(record);

    if (have_next) {
      ego = state_of(next_sample);
    } else if (config.planner_enabled) {
      // Maximal-deceleration stop profile along the current heading.
      const double a_max = config.params.opt.a_max;
      const double v_next = std::max(0.0, ego.v - a_max * dt);
      const double ds = 0.5 * (ego.v + v_next) * dt;
      ego.x += ds * std::cos(ego.theta);
      ego.y += ds * std::sin(ego.theta);
      ego.v = v_next;
      ego.a = v_next > 0.0 ? -a_max : 0.0;
      channels = {ego.a, 0.0, 0.0, 0.0};
    } else {
      ego.x += ego.v * dt * std::cos(ego.theta);
      ego.y += ego.v * dt * std::sin(ego.theta);
      ego.a = 0.0;
      channels = {0.0, 0.0, 0.0, 0.0};
    }
  }
  return trace;
}

OPMReport evaluate_opm(const SimTrace& trace, const OpmThresholds& thresholds) {
  if (trace.steps.size() < 2) throw TraceTooShort("OPM needs at least 2 steps");
  OPMReport report;
  for (const auto& step : trace.steps) {
    report.max_lat_accel = std::max(report.max_lat_accel, std::fabs(step.a_lat));
    report.max_lon_accel = std::max(report.max_lon_accel, std::fabs(step.a_lon));
    report.max_lat_jerk = std::max(report.max_lat_jerk, std::fabs(step.jerk_lat));
    report.max_lon_jerk = std::max(report.max_lon_jerk, std::fabs(step.jerk_lon));
  }
  const double accel = std::max(report.max_lat_accel, report.max_lon_accel);
  const double jerk = std::max(report.max_lat_jerk, report.max_lon_jerk);
  if (accel <= thresholds.comfortable_accel && jerk <= thresholds.comfortable_jerk) {
    report.classification = OpmClass::Comfortable;
  } else if (accel <= thresholds.normal_accel && jerk <= thresholds.normal_jerk) {
    report.classification = OpmClass::Normal;
  } else {
    report.classification = OpmClass::Aggressive;
  }
  return report;
}

std::uint64_t derive_run_seed(std::uint64_t seed, int index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {
double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  const auto idx = static_cast<std::size_t>(
      std::clamp(std::ceil(p / 100.0 * n) - 1.0, 0.0, n - 1.0));
  return values[idx];
}
}  // namespace

BatchResult run_batch(const ScenarioFamily& family, int n, std::uint64_t seed,
                      const PlannerConfig& config) {
  BatchResult result;
  result.summary.family = to_string(family.kind);
  result.summary.n = n;
  result.summary.seed = seed;

  std::vector<double> planner_ms;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t run_seed = derive_run_seed(seed, i);
    const Scenario scenario = generate_scenario(family, run_seed);
    BaselinePredictor predictor;
    SimTrace trace = run_closed_loop(scenario, config, predictor);

    RunResult run;
    run.seed = run_seed;
    run.outcome = trace.outcome;
    run.steps = static_cast<int>(trace.steps.size());
    switch (trace.outcome) {
      case Outcome::GoalReached: ++result.summary.goal_reached; break;
      case Outcome::Collision: ++result.summary.collision; break;
      case Outcome::Timeout: ++result.summary.timeout; break;
      case Outcome::NoPlanDeadlock: ++result.summary.no_plan_deadlock; break;
    }
    if (trace.steps.size() >= 2) {
      const auto opm = evaluate_opm(trace, config.opm);
      run.opm = opm.classification;
      switch (opm.classification) {
        case OpmClass::Comfortable: ++result.summary.opm_comfortable; break;
        case OpmClass::Normal: ++result.summary.opm_normal; break;
        case OpmClass::Aggressive: ++result.summary.opm_aggressive; break;
      }
    }
    for (const auto& step : trace.steps) {
      if (step.plan_found || step.decision == "NoPlan") planner_ms.push_back(step.planner_ms);
    }
    result.summary.runs.push_back(run);
    result.traces.push_back(std::move(trace));
  }

  result.summary.planner_p50_ms = percentile(planner_ms, 50.0);
  result.summary.planner_p95_ms = percentile(planner_ms, 95.0);
  result.summary.planner_max_ms = planner_ms.empty()
                                      ? 0.0
                                      : *std::max_element(planner_ms.begin(), planner_ms.end());
  return result;
}

// --- Serialization -----------------------------------------------------------

namespace {
json state_to_json(const CartesianState& s) {
  return {{"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}, {"a", s.a}};
}

CartesianState state_from_json(const json& j) {
  CartesianState s;
  s.x = j.at("x").get<double>();
  s.y = j.at("y").get<double>();
  s.theta = j.at("theta").get<double>();
  s.v = j.at("v").get<double>();
  s.a = j.value("a", 0.0);
  return s;
}
}  // namespace

std::string trace_to_json_text(const SimTrace& trace, int indent) {
  json steps = json::array();
  for (const auto& step : trace.steps) {
    json obstacles = json::array();
    for (const auto& os : step.obstacles) obstacles.push_back(state_to_json(os));
    json js = {{"t", step.t},
               {"ego", state_to_json(step.ego)},
               {"a_lon", step.a_lon},
               {"a_lat", step.a_lat},
               {"jerk_lon", step.jerk_lon},
               {"jerk_lat", step.jerk_lat},
               {"decision", step.decision},
               {"plan_found", step.plan_found},
               {"plan_level", step.plan_level},
               {"trajectory_id", step.trajectory_id},
               {"planner_ms", step.planner_ms},
               {"prediction_ms", step.prediction_ms},
               {"cycle_ms", step.cycle_ms},
               {"obstacles", obstacles}};
    steps.push_back(std::move(js));
  }
  json j = {{"dt", trace.dt}, {"outcome", to_string(trace.outcome)}, {"steps", steps}};
  if (trace.collision) {
    j["collision"] = {{"t", trace.collision->t}, {"obstacle_id", trace.collision->obstacle_id}};
  } else {
    j["collision"] = nullptr;
  }
  return j.dump(indent);
}

SimTrace trace_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SimulationError(std::string("invalid trace JSON: ") + e.what());
  }
  SimTrace trace;
  trace.dt = j.at("dt").get<double>();
  const std::string outcome = j.at("outcome").get<std::string>();
  if (outcome == "GoalReached") trace.outcome = Outcome::GoalReached;
  else if (outcome == "Collision") trace.outcome = Outcome::Collision;
  else if (outcome == "Timeout") trace.outcome = Outcome::Timeout;
  else if (outcome == "NoPlanDeadlock") trace.outcome = Outcome::NoPlanDeadlock;
  else throw SimulationError("unknown outcome " + outcome);
  if (j.contains("collision") && !j["collision"].is_null()) {
    trace.collision = CollisionDetail{j["collision"].at("t").get<double>(),
                                      j["collision"].at("obstacle_id").get<int>()};
  }
  for (const auto& js : j.at("steps")) {
    StepRecord step;
    step.t = js.at("t").get<double>();
    step.ego = state_from_json(js.at("ego"));
    step.a_lon = js.at("a_lon").get<double>();
    step.a_lat = js.at("a_lat").get<double>();
    step.jerk_lon = js.at("jerk_lon").get<double>();
    step.jerk_lat = js.at("jerk_lat").get<double>();
    step.decision = js.at("decision").get<std::string>();
    step.plan_found = js.value("plan_found", false);
    step.plan_level = js.value("plan_level", -1);
    step.trajectory_id = js.value("trajectory_id", std::string());
    step.planner_ms = js.value("planner_ms", 0.0);
    step.prediction_ms = js.value("prediction_ms", 0.0);
    step.cycle_ms = js.value("cycle_ms", 0.0);
    for (const auto& jo : js.value("obstacles", json::array())) {
      step.obstacles.push_back(state_from_json(jo));
    }
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

std::string trace_to_csv(const SimTrace& trace) {
  std::ostringstream os;
  os.precision(12);
  os << "t,x,y,theta,v,a_lon,a_lat,jerk_lon,jerk_lat,decision,planner_ms\n";
  for (const auto& step : trace.steps) {
    os << step.t << ',' << step.ego.x << ',' << step.ego.y << ',' << step.ego.theta << ','
       << step.ego.v << ',' << step.a_lon << ',' << step.a_lat << ',' << step.jerk_lon << ','
       << step.jerk_lat << ',' << step.decision << ',' << step.planner_ms << '\n';
  }
  return os.str();
}

std::string batch_summary_to_json_text(const BatchSummary& summary, bool include_timing,
                                       int indent) {
  json runs = json::array();
  for (const auto& run : summary.runs) {
    runs.push_back({{"seed", run.seed},
                    {"outcome", to_string(run.outcome)},
                    {"opm", run.opm ? json(to_string(*run.opm)) : json(nullptr)},
                    {"steps", run.steps}});
  }
  const int n = std::max(1, summary.n);
  json deterministic = {
      {"family", summary.family},
      {"n", summary.n},
      {"seed", summary.seed},
      {"outcomes",
       {{"goal_reached", summary.goal_reached},
        {"collision", summary.collision},
        {"timeout", summary.timeout},
        {"no_plan_deadlock", summary.no_plan_deadlock}}},
      {"rates",
       {{"success", static_cast<double>(summary.goal_reached) / n},
        {"collision", static_cast<double>(summary.collision) / n},
        {"no_plan", static_cast<double>(summary.no_plan_deadlock) / n}}},
      {"opm",
       {{"comfortable", summary.opm_comfortable},
        {"normal", summary.opm_normal},
        {"aggressive", summary.opm_aggressive}}},
      {"runs", runs}};
  json j = {{"deterministic", deterministic}};
  if (include_timing) {
    j["timing"] = {{"planner_ms",
                    {{"p50", summary.planner_p50_ms},
                     {"p95", summary.planner_p95_ms},
                     {"max", summary.planner_max_ms}}}};
  }
  return j.dump(indent);
}

}  // namespace mplan
