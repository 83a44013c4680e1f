#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mplan/collision.hpp"
#include "mplan/ff_planner.hpp"
#include "mplan/pddl.hpp"
#include "mplan/prediction.hpp"
#include "mplan/trajectory.hpp"
#include "mplan/world.hpp"

namespace mplan {

struct StreamsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedBaseProblem : StreamsError {
  using StreamsError::StreamsError;
};

struct PlannerParams {
  OptimizationParams opt;
  double search_weight = 1.5;
  int max_level = 3;
  double collision_margin = 0.2;  // m, each side
  double yield_base_decrement = 3.0;   // m/s below current speed at level 0
  double yield_level_decrement = 1.5;  // additional m/s per level
  std::int64_t node_budget = 1000000;
};

/// Conditional trajectory generator: producing an instance adds new conf
/// objects and the certified facts below to the planning problem.
struct StreamSchema {
  std::string name;
  ManeuverKind maneuver = ManeuverKind::KeepSpeed;
  std::string maneuver_predicate;          // e.g. "yield_traj"
  std::vector<std::string> inputs;         // ("?q1")
  std::vector<std::string> domain_facts;   // facts required over the inputs
};

/// The five maneuver streams in canonical application order.
const std::vector<StreamSchema>& maneuver_stream_schemas();

/// A certified fact: a ground atom, or a fluent assignment when value is set.
struct CertifiedFact {
  pddl::Atom atom;
  std::optional<double> value;
  friend bool operator==(const CertifiedFact&, const CertifiedFact&) = default;
};

struct StreamInstance {
  const StreamSchema* schema = nullptr;
  std::string input_config;                     // q1
  std::string end_config;                       // new endpoint
  std::vector<std::string> intermediate_configs;  // 24 for T=5, dt=0.2
  std::vector<CertifiedFact> facts;
  Trajectory trajectory;
  std::vector<int> checked_obstacles;  // obstacle ids that got checked_traj
};

struct PlanningSnapshot {
  CartesianState ego;
  Footprint ego_footprint;
  const LaneMap* map = nullptr;
  ReferencePath route_path;  // ego's intended path, rooted at the current lane
  int current_lane = -1;
  double target_speed = 0.0;
  std::vector<ObstacleHistory> histories;  // current obstacle states last
  std::optional<Polygon> goal_region;
  int level = 0;
};

/// Derived per-cycle facts shared by stream applicability and the base
/// problem (front-obstacle detection on the route path).
struct SnapshotFacts {
  double ego_s = 0.0;
  bool has_left = false;
  bool has_right = false;
  bool front_obstacle = false;
  int front_obstacle_index = -1;  // into snapshot.histories
  double front_gap = 0.0;         // m along the route path
  double front_speed = 0.0;       // m/s
};

SnapshotFacts analyze_snapshot(const PlanningSnapshot& snapshot,
                               const OptimizationParams& params);

/// Yield and keep-speed always apply; lane changes need the neighbor lane;
/// overtake needs a front obstacle within the planning horizon's reach.
std::vector<const StreamSchema*> applicable_streams(const PlanningSnapshot& snapshot,
                                                    const PlannerParams& params);

/// Allocates deterministic configuration names: endpoints q1, q2, ...,
/// intermediates q<from>_<to>_<k>.
class ConfigNamer {
 public:
  int next_endpoint_index() { return next_++; }

 private:
  int next_ = 1;
};

/// Runs the maneuver's trajectory optimization from the snapshot's ego state,
/// collision-checks the optimum against the top-2 hypotheses of every
/// obstacle, and emits the certified facts (checked_traj only for obstacles
/// the trajectory clears). Returns nullopt when no feasible candidate exists.
std::optional<StreamInstance> apply_stream(const StreamSchema& schema,
                                           const PlanningSnapshot& snapshot,
                                           const PlannerParams& params,
                                           const std::vector<PredictionSet>& predictions,
                                           ConfigNamer& namer);

/// ego_at(q0), idle, on_init_lane (+there_is_front_obs), obstacle objects,
/// zeroed cost/time fluents, the ego pose fluents, goal moved_forward and a
/// minimize-cost metric.
pddl::Problem make_base_problem(const PlanningSnapshot& snapshot, const PlannerParams& params);

struct StreamPlanResult {
  bool found = false;
  pddl::Plan plan;
  std::vector<Trajectory> trajectories;  // one per plan step
  pddl::Problem augmented_problem;       // as searched at the final level
  int level = -1;
  double planner_ms = 0.0;     // streams + grounding + search
  double prediction_ms = 0.0;  // predictor time, excluded from planner_ms
  std::vector<PredictionSet> predictions;
  std::vector<StreamInstance> instances;
};

/// The outer loop: predict once, then per level apply all applicable streams,
/// augment the problem's initial state (monotonically), ground and search;
/// stop at the first plan or after max_level.
StreamPlanResult stream_plan(const PlanningSnapshot& snapshot,
                               const pddl::Problem& base_problem, const PlannerParams& params,
                               Predictor& predictor);

/// The maneuver domain shipped as a PDDL text asset, parsed once.
const pddl::Domain& builtin_maneuver_domain();
const char* builtin_maneuver_domain_text();

}  // namespace mplan
