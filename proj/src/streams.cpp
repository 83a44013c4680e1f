#include "mplan/streams.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mplan/maneuver_domain_text.hpp"

namespace mplan {

const char* builtin_maneuver_domain_text() { return kManeuverDomainText; }

const pddl::Domain& builtin_maneuver_domain() {
  static const pddl::Domain domain = pddl::parse_domain(kManeuverDomainText);
  return domain;
}

const std::vector<StreamSchema>& maneuver_stream_schemas() {
  static const std::vector<StreamSchema> schemas = [] {
    const std::vector<std::string> pose_facts = {"(at_x ?q1)", "(at_y ?q1)", "(at_time ?q1)"};
    std::vector<StreamSchema> out;
    out.push_back({"keep_speed_stream", ManeuverKind::KeepSpeed, "keep_speed_traj", {"?q1"},
                   pose_facts});
    out.push_back({"yield_stream", ManeuverKind::Yield, "yield_traj", {"?q1"}, pose_facts});
    out.push_back({"left_change_stream", ManeuverKind::LeftChange, "left_traj", {"?q1"},
                   pose_facts});
    out.push_back({"right_change_stream", ManeuverKind::RightChange, "right_traj", {"?q1"},
                   pose_facts});
    auto overtake_facts = pose_facts;
    overtake_facts.push_back("(there_is_front_obs)");
    out.push_back({"overtake_stream", ManeuverKind::Overtake, "overtake_traj", {"?q1"},
                   overtake_facts});
    return out;
  }();
  return schemas;
}

SnapshotFacts analyze_snapshot(const PlanningSnapshot& snapshot,
                               const OptimizationParams& params) {
  SnapshotFacts facts;
  if (snapshot.current_lane >= 0 && snapshot.map) {
    const Lane& lane = snapshot.map->lane(snapshot.current_lane);
    facts.has_left = lane.left_neighbor.has_value();
    facts.has_right = lane.right_neighbor.has_value();
  }

  ReferencePath::Projection ego_proj;
  try {
    ego_proj = snapshot.route_path.project({snapshot.ego.x, snapshot.ego.y});
  } catch (const GeometryError&) {
    return facts;
  }
  facts.ego_s = ego_proj.s;

  const double lane_width =
      snapshot.current_lane >= 0 && snapshot.map
          ? snapshot.map->lane(snapshot.current_lane).width
          : 3.5;
  const double reach = std::max(snapshot.ego.v, snapshot.target_speed) * params.horizon;

  for (std::size_t i = 0; i < snapshot.histories.size(); ++i) {
    const auto& history = snapshot.histories[i];
    if (history.states.empty()) continue;
    const CartesianState& obs = history.states.back().second;
    ReferencePath::Projection proj;
    try {
      proj = snapshot.route_path.project({obs.x, obs.y});
    } catch (const GeometryError&) {
      continue;
    }
    if (std::fabs(proj.lateral) > lane_width / 2.0 + 0.1) continue;
    const double gap = proj.s - facts.ego_s;
    if (gap <= 0.5 || gap > reach) continue;
    if (!facts.front_obstacle || gap < facts.front_gap) {
      facts.front_obstacle = true;
      facts.front_obstacle_index = static_cast<int>(i);
      facts.front_gap = gap;
      facts.front_speed = obs.v;
    }
  }
  return facts;
}

std::vector<const StreamSchema*> applicable_streams(const PlanningSnapshot& snapshot,
                                                    const PlannerParams& params) {
  const SnapshotFacts facts = analyze_snapshot(snapshot, params.opt);
  std::vector<const StreamSchema*> out;
  for (const auto& schema : maneuver_stream_schemas()) {
    switch (schema.maneuver) {
      case ManeuverKind::KeepSpeed:
      case ManeuverKind::Yield:
        out.push_back(&schema);
        break;
      case ManeuverKind::LeftChange:
        if (facts.has_left) out.push_back(&schema);
        break;
      case ManeuverKind::RightChange:
        if (facts.has_right) out.push_back(&schema);
        break;
      case ManeuverKind::Overtake:
        if (facts.front_obstacle && (facts.has_left || facts.has_right)) {
          out.push_back(&schema);
        }
        break;
    }
  }
  return out;
}

namespace {

double snap_up_to_grid(double t, double dt) { return std::ceil(t / dt - 1e-9) * dt; }

std::optional<Trajectory> optimize_on_path(const ReferencePath& path,
                                           const CartesianState& ego, double v_desired,
                                           const OptimizationParams& params, int level) {
  FrenetState init;
  try {
    init = cartesian_to_frenet(path, ego);
  } catch (const GeometryError&) {
    return std::nullopt;
  }
  std::vector<Trajectory> candidates;
  try {
    candidates = generate_candidates(path, init, v_desired, 0.0, params, level);
  } catch (const GeometryError&) {
    return std::nullopt;  // candidates overrun the path extent
  }
  const auto feasible = filter_feasible(std::move(candidates), params);
  return select_optimal(feasible, v_desired, 0.0, params);
}

// Piecewise lateral profile for the overtake composite: change out, hold the
// offset while passing, change back, hold the centerline.
struct CompositeLateral {
  QuinticPoly out;
  QuinticPoly back;
  double w = 0.0;
  double t_out_end = 0.0;
  double t_back_begin = 0.0;
  double t_back_end = 0.0;

  void eval(double t, double& l, double& l_d, double& l_dd, double& l_ddd) const {
    if (t <= t_out_end) {
      l = out.value(t);
      l_d = out.d1(t);
      l_dd = out.d2(t);
      l_ddd = out.d3(t);
    } else if (t < t_back_begin) {
      l = w;
      l_d = l_dd = l_ddd = 0.0;
    } else if (t <= t_back_end) {
      const double u = t - t_back_begin;
      l = back.value(u);
      l_d = back.d1(u);
      l_dd = back.d2(u);
      l_ddd = back.d3(u);
    } else {
      l = l_d = l_dd = l_ddd = 0.0;
    }
  }
};

std::optional<Trajectory> overtake_trajectory(const PlanningSnapshot& snapshot,
                                              const PlannerParams& params,
                                              const SnapshotFacts& facts, int level) {
  if (!snapshot.map || snapshot.current_lane < 0 || !facts.front_obstacle) {
    return std::nullopt;
  }
  const Lane& current = snapshot.map->lane(snapshot.current_lane);
  const bool via_left = current.left_neighbor.has_value();
  const int neighbor_id =
      via_left ? *current.left_neighbor
               : (current.right_neighbor ? *current.right_neighbor : -1);
  if (neighbor_id < 0) return std::nullopt;
  const Lane& neighbor = snapshot.map->lane(neighbor_id);
  const double offset = (current.width + neighbor.width) / 2.0 * (via_left ? 1.0 : -1.0);

  const auto& opt = params.opt;
  const double T = opt.horizon;
  const double dt = opt.dt;
  const auto& front_history = snapshot.histories[facts.front_obstacle_index];
  const double clearance =
      snapshot.ego_footprint.length / 2.0 + front_history.length / 2.0 + 2.0;

  // Minimum lane-change time under the acceleration bound (peak lateral
  // acceleration of a rest-to-rest quintic is 10*|w|/(sqrt(3)*T^2)).
  double t_change = snap_up_to_grid(
      std::sqrt(10.0 * std::fabs(offset) / (std::sqrt(3.0) * 0.9 * opt.a_max)), dt);
  t_change = std::max(t_change, 3.0 * dt);

  FrenetState init;
  try {
    init = cartesian_to_frenet(snapshot.route_path, snapshot.ego);
  } catch (const GeometryError&) {
    return std::nullopt;
  }

  std::vector<Trajectory> candidates;
  for (const double v_t : terminal_speed_grid(snapshot.target_speed, level)) {
    const QuarticPoly lon = solve_quartic(init.s, init.s_d, init.s_dd, v_t, 0.0, T);
    const double obstacle_s0 = facts.ego_s + facts.front_gap;
    double t_pass = -1.0;
    for (double t = 0.0; t <= T + 1e-9; t += dt) {
      if (lon.value(t) >= obstacle_s0 + facts.front_speed * t + clearance) {
        t_pass = t;
        break;
      }
    }
    if (t_pass < 0.0 || t_pass < t_change) continue;
    const double t_back = snap_up_to_grid(std::max(t_pass, t_change), dt);
    if (t_back + t_change > T + 1e-9) continue;

    CompositeLateral lat;
    lat.w = offset;
    lat.t_out_end = t_change;
    lat.t_back_begin = t_back;
    lat.t_back_end = t_back + t_change;
    lat.out = solve_quintic(init.l, init.l_d, init.l_dd, offset, 0.0, 0.0, t_change);
    lat.back = solve_quintic(offset, 0.0, 0.0, 0.0, 0.0, 0.0, t_change);

    Trajectory traj;
    bool in_extent = true;
    const int n = opt.sample_count();
    traj.samples.reserve(n);
    for (int k = 0; k < n && in_extent; ++k) {
      const double t = (k == n - 1) ? T : k * dt;
      double l, l_d, l_dd, l_ddd;
      lat.eval(t, l, l_d, l_dd, l_ddd);
      try {
        traj.samples.push_back(make_sample(snapshot.route_path, t, lon.value(t), lon.d1(t),
                                           lon.d2(t), lon.d3(t), l, l_d, l_dd, l_ddd));
      } catch (const GeometryError&) {
        in_extent = false;
      }
    }
    if (in_extent) candidates.push_back(std::move(traj));
  }

  if (!candidates.empty()) {
    const auto feasible = filter_feasible(std::move(candidates), opt);
    if (auto best = select_optimal(feasible, snapshot.target_speed, 0.0, opt)) return best;
  }

  // Passing cannot complete within the horizon: plan the lane-change stage
  // only and let the next cycles continue the maneuver.
  const double needed = init.s + std::max(snapshot.ego.v, snapshot.target_speed) * T + 30.0;
  ReferencePath neighbor_path;
  try {
    neighbor_path = build_drive_path(*snapshot.map, neighbor_id, needed);
  } catch (const GeometryError&) {
    return std::nullopt;
  }
  return optimize_on_path(neighbor_path, snapshot.ego, snapshot.target_speed, opt, level);
}

pddl::Atom atom(std::string pred, std::vector<std::string> args) {
  return pddl::Atom{std::move(pred), std::move(args)};
}

std::string obstacle_object(int id) { return "obs" + std::to_string(id); }

}  // namespace

std::optional<StreamInstance> apply_stream(const StreamSchema& schema,
                                           const PlanningSnapshot& snapshot,
                                           const PlannerParams& params,
                                           const std::vector<PredictionSet>& predictions,
                                           ConfigNamer& namer) {
  const auto& opt = params.opt;
  const SnapshotFacts facts = analyze_snapshot(snapshot, opt);

  std::optional<Trajectory> best;
  switch (schema.maneuver) {
    case ManeuverKind::KeepSpeed:
      best = optimize_on_path(snapshot.route_path, snapshot.ego, snapshot.target_speed, opt,
                              snapshot.level);
      break;
    case ManeuverKind::Yield: {
      const double v_des = std::max(
          0.0, snapshot.ego.v - (params.yield_base_decrement +
                                 params.yield_level_decrement * snapshot.level));
      best = optimize_on_path(snapshot.route_path, snapshot.ego, v_des, opt, snapshot.level);
      break;
    }
    case ManeuverKind::LeftChange:
    case ManeuverKind::RightChange: {
      if (!snapshot.map || snapshot.current_lane < 0) return std::nullopt;
      const Lane& current = snapshot.map->lane(snapshot.current_lane);
      const auto neighbor = schema.maneuver == ManeuverKind::LeftChange
                                ? current.left_neighbor
                                : current.right_neighbor;
      if (!neighbor) return std::nullopt;
      const double needed =
          std::max(snapshot.ego.v, snapshot.target_speed) * opt.horizon + 80.0;
      ReferencePath path;
      try {
        path = build_drive_path(*snapshot.map, *neighbor, needed);
      } catch (const GeometryError&) {
        return std::nullopt;
      }
      best = optimize_on_path(path, snapshot.ego, snapshot.target_speed, opt, snapshot.level);
      break;
    }
    case ManeuverKind::Overtake:
      best = overtake_trajectory(snapshot, params, facts, snapshot.level);
      break;
  }
  if (!best) return std::nullopt;
  best->maneuver = schema.maneuver;

  StreamInstance instance;
  instance.schema = &schema;
  instance.input_config = "q0";
  const int endpoint = namer.next_endpoint_index();
  instance.end_config = "q" + std::to_string(endpoint);
  instance.trajectory = std::move(*best);

  const auto& samples = instance.trajectory.samples;
  const int n = static_cast<int>(samples.size());
  for (int k = 1; k <= n - 2; ++k) {
    instance.intermediate_configs.push_back("q0_" + std::to_string(endpoint) + "_" +
                                            std::to_string(k));
  }

  auto& facts_out = instance.facts;
  facts_out.push_back({atom(schema.maneuver_predicate,
                            {instance.input_config, instance.end_config}),
                       std::nullopt});
  facts_out.push_back({atom("traj", {instance.input_config, instance.end_config}),
                       std::nullopt});
  facts_out.push_back({atom("time_of_traj", {instance.input_config, instance.end_config}),
                       samples.back().t - samples.front().t});
  for (int k = 1; k < n; ++k) {
    const std::string& name = (k == n - 1) ? instance.end_config
                                           : instance.intermediate_configs[k - 1];
    facts_out.push_back({atom("at_x", {name}), samples[k].x});
    facts_out.push_back({atom("at_y", {name}), samples[k].y});
    facts_out.push_back({atom("at_time", {name}), samples[k].t});
  }
  // next-chain over the start and the intermediates, the endpoint as marker.
  std::vector<std::string> chain;
  chain.push_back(instance.input_config);
  chain.insert(chain.end(), instance.intermediate_configs.begin(),
               instance.intermediate_configs.end());
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    facts_out.push_back(
        {atom("next", {chain[i], chain[i + 1], instance.end_config}), std::nullopt});
  }

  for (std::size_t i = 0; i < snapshot.histories.size(); ++i) {
    const auto& history = snapshot.histories[i];
    const PredictionSet* set = nullptr;
    for (const auto& candidate : predictions) {
      if (candidate.obstacle_id == history.id) {
        set = &candidate;
        break;
      }
    }
    if (!set || set->trajectories.empty()) continue;
    const auto top2 = select_top2(*set);
    ObstaclePrediction pred;
    pred.obstacle_id = history.id;
    pred.footprint = Footprint{history.length, history.width};
    pred.hypotheses = {top2[0], top2[1]};
    const auto report = check_trajectory(instance.trajectory, snapshot.ego_footprint, {pred},
                                         params.collision_margin);
    if (report.collision_free) {
      facts_out.push_back({atom("checked_traj", {instance.input_config, instance.end_config,
                                                 obstacle_object(history.id)}),
                           std::nullopt});
      instance.checked_obstacles.push_back(history.id);
    }
  }
  return instance;
}

pddl::Problem make_base_problem(const PlanningSnapshot& snapshot, const PlannerParams& params) {
  const SnapshotFacts facts = analyze_snapshot(snapshot, params.opt);
  pddl::Problem problem;
  problem.name = "maneuver-cycle";
  problem.domain_name = builtin_maneuver_domain().name;
  problem.objects.push_back({"q0", "conf"});
  for (const auto& history : snapshot.histories) {
    problem.objects.push_back({obstacle_object(history.id), "obstacles"});
  }
  problem.init_atoms.push_back(atom("ego_at", {"q0"}));
  problem.init_atoms.push_back(atom("idle", {}));
  problem.init_atoms.push_back(atom("on_init_lane", {}));
  if (facts.front_obstacle) problem.init_atoms.push_back(atom("there_is_front_obs", {}));
  problem.init_fluents.emplace_back(pddl::FluentRef{"cost", {}}, 0.0);
  problem.init_fluents.emplace_back(pddl::FluentRef{"curr_time", {}}, 0.0);
  problem.init_fluents.emplace_back(pddl::FluentRef{"at_x", {"q0"}}, snapshot.ego.x);
  problem.init_fluents.emplace_back(pddl::FluentRef{"at_y", {"q0"}}, snapshot.ego.y);
  problem.init_fluents.emplace_back(pddl::FluentRef{"at_time", {"q0"}}, 0.0);
  problem.goal.push_back({atom("moved_forward", {}), false});
  problem.metric = pddl::FluentRef{"cost", {}};
  return problem;
}

namespace {
void validate_base_problem(const pddl::Problem& base) {
  const bool has_ego = std::any_of(
      base.init_atoms.begin(), base.init_atoms.end(),
      [](const pddl::Atom& a) { return a.pred == "ego_at" && a.args.size() == 1; });
  if (!has_ego) throw MalformedBaseProblem("base problem lacks ego_at");
  const bool has_idle = std::any_of(base.init_atoms.begin(), base.init_atoms.end(),
                                    [](const pddl::Atom& a) { return a.pred == "idle"; });
  if (!has_idle) throw MalformedBaseProblem("base problem lacks idle");
  if (base.goal.empty()) throw MalformedBaseProblem("base problem lacks a goal");
}
}  // namespace

StreamPlanResult stream_plan(const PlanningSnapshot& snapshot,
                               const pddl::Problem& base_problem, const PlannerParams& params,
                               Predictor& predictor) {
  using Clock = std::chrono::steady_clock;
  validate_base_problem(base_problem);

  StreamPlanResult result;
  const auto t_pred0 = Clock::now();
  if (snapshot.map) {
    result.predictions = predictor.predict_all(snapshot.histories, *snapshot.map,
                                               params.opt.horizon, params.opt.dt);
  }
  result.prediction_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t_pred0).count();

  const auto t0 = Clock::now();
  pddl::Problem problem = base_problem;
  ConfigNamer namer;
  PlanningSnapshot level_snapshot = snapshot;

  for (int level = 0; level <= params.max_level; ++level) {
    level_snapshot.level = level;
    for (const StreamSchema* schema : applicable_streams(level_snapshot, params)) {
      auto instance =
          apply_stream(*schema, level_snapshot, params, result.predictions, namer);
      if (!instance) continue;
      problem.objects.push_back({instance->end_config, "conf"});
      for (const auto& name : instance->intermediate_configs) {
        problem.objects.push_back({name, "conf"});
      }
      for (const auto& fact : instance->facts) {
        if (fact.value) {
          problem.init_fluents.emplace_back(
              pddl::FluentRef{fact.atom.pred, fact.atom.args}, *fact.value);
        } else {
          problem.init_atoms.push_back(fact.atom);
        }
      }
      result.instances.push_back(std::move(*instance));
    }

    // With a goal region, commit to a trajectory endpoint inside it when one
    // exists; fall back to plain forward progress if that goal is unreachable.
    std::vector<std::vector<pddl::Literal>> goal_attempts;
    if (snapshot.goal_region) {
      for (const auto& instance : result.instances) {
        const auto& last = instance.trajectory.samples.back();
        if (snapshot.goal_region->contains({last.x, last.y})) {
          auto goal = base_problem.goal;
          goal.push_back({atom("ego_at", {instance.end_config}), false});
          goal_attempts.push_back(std::move(goal));
          break;
        }
      }
    }
    goal_attempts.push_back(base_problem.goal);

    for (auto& goal : goal_attempts) {
      problem.goal = goal;
      const auto task = pddl::ground(builtin_maneuver_domain(), problem);
      pddl::SearchOptions options;
      options.weight = params.search_weight;
      options.node_budget = params.node_budget;
      const auto search_result = pddl::search(task, options);
      if (search_result.status == pddl::SearchResult::Status::Solved) {
        result.found = true;
        result.plan = search_result.plan;
        result.level = level;
        for (const auto& step : result.plan.steps) {
          const auto it = std::find_if(
              result.instances.begin(), result.instances.end(),
              [&](const StreamInstance& inst) {
                return step.args.size() == 2 && inst.input_config == step.args[0] &&
                       inst.end_config == step.args[1];
              });
          if (it == result.instances.end()) {
            throw StreamsError("plan step without a stream trajectory: " + step.signature());
          }
          result.trajectories.push_back(it->trajectory);
        }
        result.augmented_problem = problem;
        result.planner_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        return result;
      }
    }
    problem.goal = base_problem.goal;
  }

  result.augmented_problem = problem;
  result.planner_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return result;
}

}  // namespace mplan
