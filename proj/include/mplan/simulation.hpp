#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mplan/streams.hpp"
#include "mplan/world.hpp"

namespace mplan {

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TraceTooShort : SimulationError {
  using SimulationError::SimulationError;
};

struct OpmThresholds {
  double comfortable_accel = 0.9;  // m/s^2
  double comfortable_jerk = 0.6;   // m/s^3
  double normal_accel = 2.0;       // m/s^2
  double normal_jerk = 0.9;        // m/s^3
};

enum class OpmClass { Comfortable, Normal, Aggressive };
const char* to_string(OpmClass c);

struct PlannerConfig {
  PlannerParams params;
  OpmThresholds opm;
  bool planner_enabled = true;
  double history_window = 2.0;  // s of obstacle history fed to the predictor
};

enum class Outcome { GoalReached, Collision, Timeout, NoPlanDeadlock };
const char* to_string(Outcome o);

struct StepRecord {
  double t = 0.0;
  CartesianState ego;
  // Executed trajectory channels (path-relative): longitudinal = s'', s''',
  // lateral = l'', l'''.
  double a_lon = 0.0;
  double a_lat = 0.0;
  double jerk_lon = 0.0;
  double jerk_lat = 0.0;
  std::string decision;  // maneuver kind, "NoPlan", or "Disabled"
  bool plan_found = false;
  int plan_level = -1;
  std::string trajectory_id;  // first plan action signature
  double planner_ms = 0.0;
  double prediction_ms = 0.0;
  double cycle_ms = 0.0;
  std::vector<CartesianState> obstacles;  // aligned with scenario.obstacles
};

struct CollisionDetail {
  double t = 0.0;
  int obstacle_id = -1;
};

struct SimTrace {
  double dt = 0.2;
  Outcome outcome = Outcome::Timeout;
  std::optional<CollisionDetail> collision;
  std::vector<StepRecord> steps;
};

/// Obstacle histories sampled from the scripts over [t - window, t] at the
/// trajectory dt.
std::vector<ObstacleHistory> scripted_histories(const Scenario& scenario, double t,
                                                const PlannerConfig& config);

/// Planning snapshot for the ego's current state: nearest lane, the scenario
/// route while the ego is on it (a drive path from the nearest lane after a
/// lane change), target speed and goal region.
PlanningSnapshot build_snapshot(const Scenario& scenario, const CartesianState& ego,
                                std::vector<ObstacleHistory> histories,
                                const PlannerConfig& config);

/// Closed loop at the trajectory dt: advance obstacle scripts, replan from
/// the current state, execute the first 0.2 s of the chosen trajectory with
/// exact tracking. Ground-truth collisions use zero-margin footprints against
/// the scripted obstacle states.
SimTrace run_closed_loop(const Scenario& scenario, const PlannerConfig& config,
                         Predictor& predictor);

struct OPMReport {
  double max_lat_accel = 0.0;
  double max_lon_accel = 0.0;
  double max_lat_jerk = 0.0;
  double max_lon_jerk = 0.0;
  OpmClass classification = OpmClass::Comfortable;
};

/// Maxima over the executed trajectory channels; classification thresholds
/// apply to lateral and longitudinal alike. Throws TraceTooShort below 2
/// steps.
OPMReport evaluate_opm(const SimTrace& trace, const OpmThresholds& thresholds = {});

struct RunResult {
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Timeout;
  std::optional<OpmClass> opm;
  int steps = 0;
};

struct BatchSummary {
  std::string family;
  int n = 0;
  std::uint64_t seed = 0;
  int goal_reached = 0;
  int collision = 0;
  int timeout = 0;
  int no_plan_deadlock = 0;
  int opm_comfortable = 0;
  int opm_normal = 0;
  int opm_aggressive = 0;
  std::vector<RunResult> runs;
  // Timing, pooled over planning cycles (excluded from the deterministic
  // summary section).
  double planner_p50_ms = 0.0;
  double planner_p95_ms = 0.0;
  double planner_max_ms = 0.0;
};

struct BatchResult {
  BatchSummary summary;
  std::vector<SimTrace> traces;
};

/// n scenarios drawn with per-run seeds derived from (seed, index), executed
/// with the baseline predictor. The summary is a pure fold of the traces.
BatchResult run_batch(const ScenarioFamily& family, int n, std::uint64_t seed,
                      const PlannerConfig& config);

std::uint64_t derive_run_seed(std::uint64_t seed, int index);

std::string trace_to_json_text(const SimTrace& trace, int indent = 2);
SimTrace trace_from_json_text(const std::string& text);
std::string trace_to_csv(const SimTrace& trace);

/// include_timing=false yields the deterministic section only (identical
/// across repeated runs with the same seed and config).
std::string batch_summary_to_json_text(const BatchSummary& summary, bool include_timing = true,
                                       int indent = 2);

}  // namespace mplan
