#include "mplan/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mplan {

using nlohmann::json;

const Lane* LaneMap::find_lane(int id) const {
  for (const auto& lane : lanes) {
    if (lane.id == id) return &lane;
  }
  return nullptr;
}

const Lane& LaneMap::lane(int id) const {
  const Lane* l = find_lane(id);
  if (!l) throw ValidationError("unknown lane id " + std::to_string(id));
  return *l;
}

const JunctionRoute* LaneMap::route_between(int from, int to) const {
  for (const auto& route : junction_routes) {
    if (route.from_lane == from && route.to_lane == to) return &route;
  }
  return nullptr;
}

const JunctionRoute* LaneMap::route_from(int from) const {
  for (const auto& route : junction_routes) {
    if (route.from_lane == from) return &route;
  }
  return nullptr;
}

void LaneMap::validate() const {
  std::set<int> ids;
  for (const auto& lane : lanes) {
    if (!ids.insert(lane.id).second) {
      throw ValidationError("duplicate lane id " + std::to_string(lane.id));
    }
    if (lane.width <= 0.0) throw ValidationError("width");
    build_reference_path(lane.centerline);  // throws on degenerate centerlines
  }
  for (const auto& lane : lanes) {
    for (int succ : lane.successors) this->lane(succ);
    if (lane.left_neighbor) {
      const Lane& other = this->lane(*lane.left_neighbor);
      if (!other.right_neighbor || *other.right_neighbor != lane.id) {
        throw ValidationError("neighbor_symmetry");
      }
    }
    if (lane.right_neighbor) {
      const Lane& other = this->lane(*lane.right_neighbor);
      if (!other.left_neighbor || *other.left_neighbor != lane.id) {
        throw ValidationError("neighbor_symmetry");
      }
    }
  }
  for (const auto& route : junction_routes) {
    lane(route.from_lane);
    lane(route.to_lane);
    if (route.centerline.size() < 2) throw ValidationError("junction route centerline");
  }
}

bool Polygon::contains(const Vec2& p) const {
  if (vertices.size() < 3) return false;
  int sign = 0;
  const int n = static_cast<int>(vertices.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const double cross = (b - a).cross(p - a);
    if (std::fabs(cross) < 1e-12) continue;  // on an edge line
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return true;
}

namespace {
void append_polyline(std::vector<Vec2>& out, const std::vector<Vec2>& pts) {
  for (const auto& p : pts) {
    if (!out.empty() && (p - out.back()).norm() <= 1e-9) continue;
    out.push_back(p);
  }
}
}  // namespace

ReferencePath build_route_path(const LaneMap& map, const std::vector<int>& route) {
  if (route.empty()) throw ValidationError("route");
  std::vector<Vec2> pts;
  append_polyline(pts, map.lane(route[0]).centerline);
  for (size_t i = 0; i + 1 < route.size(); ++i) {
    const Lane& from = map.lane(route[i]);
    const int to = route[i + 1];
    const bool direct =
        std::find(from.successors.begin(), from.successors.end(), to) != from.successors.end();
    if (const JunctionRoute* conn = map.route_between(from.id, to)) {
      append_polyline(pts, conn->centerline);
    } else if (!direct) {
      throw ValidationError("route");
    }
    append_polyline(pts, map.lane(to).centerline);
  }
  return build_reference_path(pts);
}

ReferencePath extend_drive_path(const LaneMap& map, std::vector<Vec2> prefix, int next_lane,
                                double min_length) {
  std::vector<Vec2> pts = std::move(prefix);
  std::set<int> visited;
  int current = next_lane;
  while (current >= 0 && visited.insert(current).second) {
    const Lane& lane = map.lane(current);
    append_polyline(pts, lane.centerline);
    if (build_reference_path(pts).length() >= min_length) break;
    if (const JunctionRoute* conn = map.route_from(current)) {
      append_polyline(pts, conn->centerline);
      current = conn->to_lane;
    } else if (!lane.successors.empty()) {
      current = lane.successors.front();
    } else {
      break;
    }
  }
  return build_reference_path(pts);
}

ReferencePath build_drive_path(const LaneMap& map, int lane_id, double min_length) {
  return extend_drive_path(map, {}, lane_id, min_length);
}

ObstacleMotion::ObstacleMotion(const LaneMap& map, const ScenarioObstacle& obstacle) {
  if (obstacle.script.kinematic) {
    const auto& kin = *obstacle.script.kinematic;
    path_ = build_route_path(map, kin.route);
    start_s_ = kin.start_s;
    profile_ = kin.speed_profile;
    if (profile_.empty()) throw ValidationError("speed_profile");
  } else {
    states_ = obstacle.script.states;
    if (states_.empty()) throw ValidationError("obstacle script");
  }
}

CartesianState ObstacleMotion::state_at(double t) const {
  if (!path_) {
    if (t <= states_.front().t) return states_.front().state;
    if (t >= states_.back().t) return states_.back().state;
    for (size_t i = 0; i + 1 < states_.size(); ++i) {
      const auto& a = states_[i];
      const auto& b = states_[i + 1];
      if (t >= a.t && t <= b.t) {
        const double u = (t - a.t) / (b.t - a.t);
        CartesianState s;
        s.x = a.state.x + u * (b.state.x - a.state.x);
        s.y = a.state.y + u * (b.state.y - a.state.y);
        s.theta = normalize_angle(
            a.state.theta + u * normalize_angle(b.state.theta - a.state.theta));
        s.v = a.state.v + u * (b.state.v - a.state.v);
        s.a = a.state.a + u * (b.state.a - a.state.a);
        return s;
      }
    }
    return states_.back().state;
  }

  // Piecewise-linear speed profile, floored at 0. The raw (unfloored) value
  // is linear between knots, so the floor crossing within a span is exact.
  auto raw_speed_at = [&](double tt) {
    if (tt <= profile_.front().first) return profile_.front().second;
    if (tt >= profile_.back().first) return profile_.back().second;
    for (size_t i = 0; i + 1 < profile_.size(); ++i) {
      const auto& [ta, va] = profile_[i];
      const auto& [tb, vb] = profile_[i + 1];
      if (tt >= ta && tt <= tb) return va + (vb - va) * (tt - ta) / (tb - ta);
    }
    return profile_.back().second;
  };
  auto speed_at = [&](double tt) { return std::max(0.0, raw_speed_at(tt)); };

  // Exact trapezoid integration over knot-aligned spans, splitting a span at
  // the zero crossing of the raw profile.
  std::vector<double> knots{0.0, t};
  for (const auto& [kt, kv] : profile_) {
    (void)kv;
    if (kt > 0.0 && kt < t) knots.push_back(kt);
  }
  std::sort(knots.begin(), knots.end());
  double s = start_s_;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    double a = knots[i];
    double b = knots[i + 1];
    const double va = raw_speed_at(a);
    const double vb = raw_speed_at(b);
    if ((va < 0.0) != (vb < 0.0) && std::fabs(vb - va) > 1e-12) {
      const double tz = a + (b - a) * (0.0 - va) / (vb - va);
      s += 0.5 * (speed_at(a) + 0.0) * (tz - a) * (va > 0.0 ? 1.0 : 0.0);
      a = tz;
    }
    s += 0.5 * (speed_at(a) + speed_at(b)) * (b - a);
  }

  const double v = speed_at(t);
  const double sc = std::clamp(s, 0.0, path_->length());
  const Vec2 pos = path_->position_at(sc);
  CartesianState out;
  out.x = pos.x;
  out.y = pos.y;
  out.theta = path_->heading_at(sc);
  out.v = v;
  // Acceleration from the profile slope, zero once stopped.
  double accel = 0.0;
  for (size_t i = 0; i + 1 < profile_.size(); ++i) {
    const auto& [ta, va] = profile_[i];
    const auto& [tb, vb] = profile_[i + 1];
    if (t >= ta && t < tb && tb - ta > 1e-9) {
      accel = (vb - va) / (tb - ta);
      break;
    }
  }
  out.a = v > 0.0 ? accel : 0.0;
  return out;
}

void Scenario::validate() const {
  map.validate();
  if (ego.route.empty()) throw ValidationError("route");
  build_route_path(map, ego.route);
  if (ego.footprint.length <= 0 || ego.footprint.width <= 0) throw ValidationError("footprint");
  if (ego.target_speed < 0) throw ValidationError("target_speed");
  if (duration < 0) throw ValidationError("duration");
  std::set<int> ids;
  for (const auto& obstacle : obstacles) {
    if (!ids.insert(obstacle.id).second) throw ValidationError("duplicate obstacle id");
    if (obstacle.footprint.length <= 0 || obstacle.footprint.width <= 0) {
      throw ValidationError("footprint");
    }
    const bool has_states = !obstacle.script.states.empty();
    const bool has_kinematic = obstacle.script.kinematic.has_value();
    if (has_states == has_kinematic) throw ValidationError("obstacle script");
    if (has_states) {
      for (size_t i = 0; i + 1 < obstacle.script.states.size(); ++i) {
        if (obstacle.script.states[i + 1].t <= obstacle.script.states[i].t) {
          throw ValidationError("obstacle script times");
        }
      }
    } else {
      build_route_path(map, obstacle.script.kinematic->route);
      if (obstacle.script.kinematic->speed_profile.empty()) {
        throw ValidationError("speed_profile");
      }
    }
    ObstacleMotion(map, obstacle);  // must be constructible
  }
}

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::LeftTurn: return "left_turn";
    case FamilyKind::GoStraight: return "go_straight";
    case FamilyKind::HighwayOvertake: return "overtake";
  }
  return "?";
}

std::optional<FamilyKind> family_from_string(const std::string& name) {
  if (name == "left_turn") return FamilyKind::LeftTurn;
  if (name == "go_straight") return FamilyKind::GoStraight;
  if (name == "overtake") return FamilyKind::HighwayOvertake;
  return std::nullopt;
}

ScenarioFamily ScenarioFamily::make(FamilyKind kind) {
  ScenarioFamily family;
  family.kind = kind;
  switch (kind) {
    case FamilyKind::LeftTurn:
    case FamilyKind::GoStraight:
      family.ego_speed = {3.5, 11.5};
      family.obstacle_speed = {5.0, 9.0};
      family.gap = {25.0, 45.0};
      break;
    case FamilyKind::HighwayOvertake:
      family.ego_speed = {12.0, 14.0};
      family.obstacle_speed = {10.0, 14.0};
      family.gap = {25.0, 50.0};
      break;
  }
  return family;
}

// --- JSON (de)serialization ------------------------------------------------

namespace {
json require(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw SchemaError("missing field " + path + key);
  return j.at(key);
}

std::vector<Vec2> points_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path + " must be an array of [x,y]");
  std::vector<Vec2> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw SchemaError(path + " must be [x,y] pairs");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

json points_to_json(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

CartesianState state_from_json(const json& j, const std::string& path) {
  CartesianState s;
  s.x = require(j, "x", path).get<double>();
  s.y = require(j, "y", path).get<double>();
  s.theta = require(j, "theta", path).get<double>();
  s.v = require(j, "v", path).get<double>();
  s.a = j.value("a", 0.0);
  return s;
}

json state_to_json(const CartesianState& s) {
  return {{"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}, {"a", s.a}};
}

Footprint footprint_from_json(const json& j, const std::string& path) {
  Footprint fp;
  fp.length = require(j, "length", path).get<double>();
  fp.width = require(j, "width", path).get<double>();
  return fp;
}
}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }

  Scenario scenario;
  const json jmap = require(j, "map", "");
  for (const auto& jl : require(jmap, "lanes", "map.")) {
    Lane lane;
    lane.id = require(jl, "id", "map.lanes.").get<int>();
    lane.centerline = points_from_json(require(jl, "centerline", "map.lanes."), "centerline");
    lane.width = require(jl, "width", "map.lanes.").get<double>();
    if (jl.contains("successors")) {
      for (const auto& s : jl["successors"]) lane.successors.push_back(s.get<int>());
    }
    if (jl.contains("left_neighbor") && !jl["left_neighbor"].is_null()) {
      lane.left_neighbor = jl["left_neighbor"].get<int>();
    }
    if (jl.contains("right_neighbor") && !jl["right_neighbor"].is_null()) {
      lane.right_neighbor = jl["right_neighbor"].get<int>();
    }
    scenario.map.lanes.push_back(std::move(lane));
  }
  if (jmap.contains("junction_routes")) {
    for (const auto& jr : jmap["junction_routes"]) {
      JunctionRoute route;
      route.from_lane = require(jr, "from", "map.junction_routes.").get<int>();
      route.to_lane = require(jr, "to", "map.junction_routes.").get<int>();
      route.centerline =
          points_from_json(require(jr, "centerline", "map.junction_routes."), "centerline");
      scenario.map.junction_routes.push_back(std::move(route));
    }
  }

  const json jego = require(j, "ego", "");
  scenario.ego.initial = state_from_json(require(jego, "initial", "ego."), "ego.initial.");
  scenario.ego.footprint =
      footprint_from_json(require(jego, "footprint", "ego."), "ego.footprint.");
  for (const auto& r : require(jego, "route", "ego.")) {
    scenario.ego.route.push_back(r.get<int>());
  }
  scenario.ego.target_speed = require(jego, "target_speed", "ego.").get<double>();

  if (j.contains("obstacles")) {
    for (const auto& jo : j["obstacles"]) {
      ScenarioObstacle obstacle;
      obstacle.id = require(jo, "id", "obstacles.").get<int>();
      obstacle.footprint =
          footprint_from_json(require(jo, "footprint", "obstacles."), "footprint.");
      const json js = require(jo, "script", "obstacles.");
      const std::string type = require(js, "type", "obstacles.script.").get<std::string>();
      if (type == "states") {
        for (const auto& jst : require(js, "states", "obstacles.script.")) {
          TimedCartesianState ts;
          ts.t = require(jst, "t", "obstacles.script.states.").get<double>();
          ts.state = state_from_json(jst, "obstacles.script.states.");
          obstacle.script.states.push_back(ts);
        }
      } else if (type == "kinematic") {
        KinematicScript kin;
        for (const auto& r : require(js, "route", "obstacles.script.")) {
          kin.route.push_back(r.get<int>());
        }
        kin.start_s = require(js, "start_s", "obstacles.script.").get<double>();
        for (const auto& knot : require(js, "speed_profile", "obstacles.script.")) {
          if (!knot.is_array() || knot.size() != 2) {
            throw SchemaError("speed_profile entries must be [t, v]");
          }
          kin.speed_profile.emplace_back(knot[0].get<double>(), knot[1].get<double>());
        }
        obstacle.script.kinematic = std::move(kin);
      } else {
        throw SchemaError("obstacles.script.type must be 'states' or 'kinematic'");
      }
      scenario.obstacles.push_back(std::move(obstacle));
    }
  }

  scenario.goal_region.vertices = points_from_json(require(j, "goal_region", ""), "goal_region");
  scenario.duration = require(j, "duration", "").get<double>();
  scenario.seed = j.value("seed", 0);

  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError("cannot open scenario file " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json_text(const Scenario& scenario, int indent) {
  json jlanes = json::array();
  for (const auto& lane : scenario.map.lanes) {
    json jl = {{"id", lane.id},
               {"centerline", points_to_json(lane.centerline)},
               {"width", lane.width},
               {"successors", lane.successors}};
    jl["left_neighbor"] = lane.left_neighbor ? json(*lane.left_neighbor) : json(nullptr);
    jl["right_neighbor"] = lane.right_neighbor ? json(*lane.right_neighbor) : json(nullptr);
    jlanes.push_back(std::move(jl));
  }
  json jroutes = json::array();
  for (const auto& route : scenario.map.junction_routes) {
    jroutes.push_back({{"from", route.from_lane},
                       {"to", route.to_lane},
                       {"centerline", points_to_json(route.centerline)}});
  }
  json jobstacles = json::array();
  for (const auto& obstacle : scenario.obstacles) {
    json js;
    if (obstacle.script.kinematic) {
      const auto& kin = *obstacle.script.kinematic;
      json jprofile = json::array();
      for (const auto& [t, v] : kin.speed_profile) jprofile.push_back({t, v});
      js = {{"type", "kinematic"},
            {"route", kin.route},
            {"start_s", kin.start_s},
            {"speed_profile", jprofile}};
    } else {
      json jstates = json::array();
      for (const auto& ts : obstacle.script.states) {
        json jst = state_to_json(ts.state);
        jst["t"] = ts.t;
        jstates.push_back(std::move(jst));
      }
      js = {{"type", "states"}, {"states", jstates}};
    }
    jobstacles.push_back({{"id", obstacle.id},
                          {"footprint",
                           {{"length", obstacle.footprint.length},
                            {"width", obstacle.footprint.width}}},
                          {"script", js}});
  }

  const json j = {
      {"map", {{"lanes", jlanes}, {"junction_routes", jroutes}}},
      {"ego",
       {{"initial", state_to_json(scenario.ego.initial)},
        {"footprint",
         {{"length", scenario.ego.footprint.length}, {"width", scenario.ego.footprint.width}}},
        {"route", scenario.ego.route},
        {"target_speed", scenario.ego.target_speed}}},
      {"obstacles", jobstacles},
      {"goal_region", points_to_json(scenario.goal_region.vertices)},
      {"duration", scenario.duration},
      {"seed", scenario.seed},
  };
  return j.dump(indent);
}

// --- Maps and the scenario generator ---------------------------------------

namespace {
std::vector<Vec2> line(Vec2 a, Vec2 b, double step = 5.0) {
  const double len = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / n));
  return pts;
}

// Circular arc from angle a0 to a1 around center (radians, CCW positive).
std::vector<Vec2> arc(Vec2 center, double radius, double a0, double a1, int n = 16) {
  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double a = a0 + (a1 - a0) * (static_cast<double>(i) / n);
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return pts;
}

// Deterministic draws independent of the standard library implementation.
double uniform(std::uint64_t& rng_state, double lo, double hi) {
  // splitmix64 step
  rng_state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = rng_state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z = z ^ (z >> 31);
  const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}
}  // namespace

LaneMap intersection_map() {
  // Cross intersection around the origin; junction square half-size 6 m,
  // lane width 3.5 m, right-hand traffic.
  const double j = 6.0;
  const double half = 1.75;
  LaneMap map;

  Lane south_in;  // northbound approach from the south
  south_in.id = 0;
  south_in.centerline = line({half, -76.0}, {half, -j});
  Lane north_out;  // northbound exit
  north_out.id = 1;
  north_out.centerline = line({half, j}, {half, 156.0});
  Lane west_out;  // westbound exit
  west_out.id = 2;
  west_out.centerline = line({-j, half}, {-156.0, half});
  Lane east_in;  // westbound approach from the east
  east_in.id = 3;
  east_in.centerline = line({76.0, half}, {j, half});
  Lane south_out;  // southbound exit
  south_out.id = 4;
  south_out.centerline = line({-half, -j}, {-half, -156.0});
  map.lanes = {south_in, north_out, west_out, east_in, south_out};

  JunctionRoute left_turn;  // south -> west
  left_turn.from_lane = 0;
  left_turn.to_lane = 2;
  left_turn.centerline = arc({-j, -j}, j + half, 0.0, M_PI / 2.0);
  JunctionRoute straight;  // south -> north
  straight.from_lane = 0;
  straight.to_lane = 1;
  straight.centerline = line({half, -j}, {half, j}, 4.0);
  JunctionRoute east_south;  // east -> south (the oncoming vehicle's turn)
  east_south.from_lane = 3;
  east_south.to_lane = 4;
  east_south.centerline = arc({j, -j}, j + half, M_PI / 2.0, M_PI);
  map.junction_routes = {left_turn, straight, east_south};

  map.validate();
  return map;
}

LaneMap highway_map() {
  LaneMap map;
  Lane right;
  right.id = 0;
  right.centerline = line({0.0, 0.0}, {400.0, 0.0});
  right.left_neighbor = 1;
  Lane left;
  left.id = 1;
  left.centerline = line({0.0, 3.5}, {400.0, 3.5});
  left.right_neighbor = 0;
  map.lanes = {right, left};
  map.validate();
  return map;
}

namespace {
Scenario intersection_scenario(FamilyKind kind, std::uint64_t seed) {
  std::uint64_t rng = seed ^ 0xA5A5A5A5DEADBEEFULL;
  Scenario scenario;
  scenario.map = intersection_map();
  scenario.seed = seed;
  scenario.duration = 45.0;

  const auto family = ScenarioFamily::make(kind);
  const double ego_v = uniform(rng, family.ego_speed.lo, family.ego_speed.hi);
  scenario.ego.initial = {1.75, -40.0, M_PI / 2.0, ego_v, 0.0};
  scenario.ego.footprint = {4.5, 1.8};
  scenario.ego.route = kind == FamilyKind::LeftTurn ? std::vector<int>{0, 2}
                                                    : std::vector<int>{0, 1};
  scenario.ego.target_speed = std::max(5.0, ego_v);

  // Oncoming vehicle on the east approach, turning east -> south. In the
  // left-turn family it brakes at a constant rate to a stop short of the
  // junction (the constant-acceleration hypothesis replays it exactly); in
  // the go-straight family it crosses at constant speed (constant-velocity
  // hypothesis replay).
  const double gap = uniform(rng, family.gap.lo, family.gap.hi);
  const double obs_v = uniform(rng, family.obstacle_speed.lo, family.obstacle_speed.hi);
  ScenarioObstacle oncoming;
  oncoming.id = 0;
  oncoming.footprint = {4.5, 1.8};
  KinematicScript kin;
  kin.route = {3, 4};
  kin.start_s = 70.0 - (6.0 + gap);  // east_in starts at x=76
  if (kind == FamilyKind::LeftTurn) {
    const double decel_time = std::ceil(obs_v / 1.5 / 0.2) * 0.2;
    kin.speed_profile = {{0.0, obs_v}, {decel_time, obs_v - 1.5 * decel_time}};
  } else {
    kin.speed_profile = {{0.0, obs_v}};
  }
  oncoming.script.kinematic = kin;
  scenario.obstacles.push_back(oncoming);

  if (kind == FamilyKind::LeftTurn) {
    scenario.goal_region.vertices = {{-40.0, -0.5}, {-25.0, -0.5}, {-25.0, 4.0}, {-40.0, 4.0}};
  } else {
    scenario.goal_region.vertices = {{-0.5, 25.0}, {4.0, 25.0}, {4.0, 40.0}, {-0.5, 40.0}};
  }
  scenario.validate();
  return scenario;
}

Scenario highway_scenario(std::uint64_t seed) {
  std::uint64_t rng = seed ^ 0x0123456789ABCDEFULL;
  Scenario scenario;
  scenario.map = highway_map();
  scenario.seed = seed;
  scenario.duration = 30.0;

  const auto family = ScenarioFamily::make(FamilyKind::HighwayOvertake);
  const double ego_v = uniform(rng, family.ego_speed.lo, family.ego_speed.hi);
  const double ego_x = 60.0;  // leaves room for the rear-left neighbor gap
  scenario.ego.initial = {ego_x, 0.0, 0.0, ego_v, 0.0};
  scenario.ego.footprint = {4.5, 1.8};
  scenario.ego.route = {0};
  scenario.ego.target_speed = ego_v;

  auto constant_speed = [](int id, int lane_y_route, double start_s, double v) {
    ScenarioObstacle obstacle;
    obstacle.id = id;
    obstacle.footprint = {4.5, 1.8};
    KinematicScript kin;
    kin.route = {lane_y_route};
    kin.start_s = start_s;
    kin.speed_profile = {{0.0, v}};
    obstacle.script.kinematic = kin;
    return obstacle;
  };

  // Wide enough that at least one of braking or changing lane stays viable
  // at the ego speed range (relative stopping distance at a_max plus the
  // footprint reach is ~30 m at 14 m/s).
  const double front_gap = uniform(rng, 35.0, 55.0);
  scenario.obstacles.push_back(constant_speed(0, 0, ego_x + front_gap, 3.96));
  const double rear_gap = uniform(rng, family.gap.lo, family.gap.hi);
  const double rear_v = uniform(rng, family.obstacle_speed.lo, family.obstacle_speed.hi);
  scenario.obstacles.push_back(constant_speed(1, 1, ego_x - rear_gap, rear_v));
  scenario.obstacles.push_back(constant_speed(2, 1, ego_x + 180.0, 10.0));
  scenario.obstacles.push_back(constant_speed(3, 1, ego_x + 230.0, 10.0));

  scenario.goal_region.vertices = {{210.0, -1.75}, {230.0, -1.75}, {230.0, 5.25}, {210.0, 5.25}};
  scenario.validate();
  return scenario;
}
}  // namespace

Scenario generate_scenario(const ScenarioFamily& family, std::uint64_t seed) {
  switch (family.kind) {
    case FamilyKind::LeftTurn:
    case FamilyKind::GoStraight:
      return intersection_scenario(family.kind, seed);
    case FamilyKind::HighwayOvertake:
      return highway_scenario(seed);
  }
  throw ValidationError("unknown scenario family");
}

}  // namespace mplan
