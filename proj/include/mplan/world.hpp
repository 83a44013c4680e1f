#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mplan/collision.hpp"
#include "mplan/geometry.hpp"

namespace mplan {

struct WorldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : WorldError {
  using WorldError::WorldError;
};
struct ValidationError : WorldError {
  using WorldError::WorldError;
};

struct Lane {
  int id = 0;
  std::vector<Vec2> centerline;
  double width = 3.5;
  std::vector<int> successors;
  std::optional<int> left_neighbor;
  std::optional<int> right_neighbor;
};

struct JunctionRoute {
  int from_lane = 0;
  int to_lane = 0;
  std::vector<Vec2> centerline;
};

struct LaneMap {
  std::vector<Lane> lanes;
  std::vector<JunctionRoute> junction_routes;

  const Lane* find_lane(int id) const;
  const Lane& lane(int id) const;  // throws ValidationError when missing
  const JunctionRoute* route_between(int from, int to) const;
  const JunctionRoute* route_from(int from) const;  // first declared, if any
  void validate() const;
};

/// Convex polygon, vertices in order; containment includes the boundary.
struct Polygon {
  std::vector<Vec2> vertices;
  bool contains(const Vec2& p) const;
};

struct TimedCartesianState {
  double t = 0.0;
  CartesianState state;
};

struct KinematicScript {
  std::vector<int> route;  // lane id sequence, connected like the ego route
  double start_s = 0.0;    // initial arclength along the route path
  std::vector<std::pair<double, double>> speed_profile;  // (t, v) knots, piecewise linear
};

struct ObstacleScript {
  // Exactly one of the two is populated.
  std::vector<TimedCartesianState> states;
  std::optional<KinematicScript> kinematic;
};

struct ScenarioObstacle {
  int id = 0;
  Footprint footprint;
  ObstacleScript script;
};

struct EgoSetup {
  CartesianState initial;
  Footprint footprint;
  std::vector<int> route;  // connected lane id sequence
  double target_speed = 8.0;
};

struct Scenario {
  LaneMap map;
  EgoSetup ego;
  std::vector<ScenarioObstacle> obstacles;
  Polygon goal_region;
  double duration = 30.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class FamilyKind { LeftTurn, GoStraight, HighwayOvertake };

const char* to_string(FamilyKind kind);
std::optional<FamilyKind> family_from_string(const std::string& name);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct ScenarioFamily {
  FamilyKind kind = FamilyKind::LeftTurn;
  Range ego_speed;       // m/s
  Range obstacle_speed;  // m/s
  Range gap;             // m

  static ScenarioFamily make(FamilyKind kind);
};

/// Concatenate route lane centerlines, inserting junction connectors between
/// lanes that are not direct successors. Throws ValidationError("route") on a
/// disconnected sequence.
ReferencePath build_route_path(const LaneMap& map, const std::vector<int>& route);

/// Forward drive path from a lane: the lane's centerline extended through the
/// first declared junction route (else the first successor) until min_length
/// is covered or the road ends.
ReferencePath build_drive_path(const LaneMap& map, int lane_id, double min_length);

/// Same continuation rule, but starting from an explicit prefix polyline
/// (e.g. a junction connector) that leads into next_lane.
ReferencePath extend_drive_path(const LaneMap& map, std::vector<Vec2> prefix, int next_lane,
                                double min_length);

/// Evaluates an obstacle script over time. Scripted states are interpolated;
/// kinematic scripts integrate the speed profile along their route path.
class ObstacleMotion {
 public:
  ObstacleMotion(const LaneMap& map, const ScenarioObstacle& obstacle);
  CartesianState state_at(double t) const;

 private:
  std::vector<TimedCartesianState> states_;
  std::optional<ReferencePath> path_;
  double start_s_ = 0.0;
  std::vector<std::pair<double, double>> profile_;
};

Scenario load_scenario(const std::string& file);
Scenario parse_scenario(const std::string& json_text);
std::string scenario_to_json_text(const Scenario& scenario, int indent = 2);

Scenario generate_scenario(const ScenarioFamily& family, std::uint64_t seed);

// Maps used by the scenario generator.
LaneMap intersection_map();
LaneMap highway_map();

}  // namespace mplan
