#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mplan/world.hpp"
#include "oracles.hpp"

using namespace mplan;

namespace {
std::string data_path(const std::string& rel) { return std::string(MPLAN_DATA_DIR) + "/" + rel; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("load_scenario: minimal empty-road file") {
  const auto scenario = load_scenario(data_path("scenarios/empty_road.json"));
  CHECK(scenario.obstacles.empty());
  CHECK(scenario.map.lanes.size() == 1);
  CHECK(scenario.ego.target_speed == doctest::Approx(8.0));
  CHECK(scenario.goal_region.contains({85.0, 0.0}));
  CHECK(!scenario.goal_region.contains({70.0, 0.0}));
}

TEST_CASE("load_scenario: schema and validation errors") {
  CHECK_THROWS_AS(load_scenario(data_path("nope.json")), SchemaError);
  CHECK_THROWS_AS(parse_scenario("{ not json"), SchemaError);
  CHECK_THROWS_AS(parse_scenario("{}"), SchemaError);

  // Disconnected ego route (lane exists but is not reachable from lane 0).
  auto text = slurp(data_path("scenarios/empty_road.json"));
  auto broken = text;
  broken.replace(broken.find("\"route\": [0]"), 12, "\"route\": [0, 5]");
  CHECK_THROWS_WITH_AS(parse_scenario(broken), "route", ValidationError);

  // Asymmetric neighbors.
  auto bad_neighbor = text;
  bad_neighbor.replace(bad_neighbor.find("\"left_neighbor\": null"), 21,
                       "\"left_neighbor\": 0");
  CHECK_THROWS_AS(parse_scenario(bad_neighbor), ValidationError);
}

TEST_CASE("route validation names the route invariant") {
  LaneMap map = intersection_map();
  // south_in (0) to south_out (4): no junction route and not a successor.
  CHECK_THROWS_WITH_AS(build_route_path(map, {0, 4}), "route", ValidationError);
}

TEST_CASE("build_route_path concatenates lanes and junction connectors") {
  const auto map = intersection_map();
  const auto left_turn = build_route_path(map, {0, 2});
  // south_in (70 m) + quarter arc (~12.2 m) + west_out (150 m).
  CHECK(left_turn.length() > 225.0);
  CHECK(left_turn.length() < 240.0);
  for (std::size_t i = 0; i + 1 < left_turn.cum_arclength().size(); ++i) {
    CHECK(left_turn.cum_arclength()[i] < left_turn.cum_arclength()[i + 1]);
  }
  // The path heads north at the start and west at the end.
  CHECK(left_turn.headings().front() == doctest::Approx(M_PI / 2.0));
  CHECK(std::fabs(normalize_angle(left_turn.headings().back() - M_PI)) < 1e-6);

  const auto straight = build_route_path(map, {0, 1});
  CHECK(straight.length() > 225.0);
  CHECK(straight.headings().back() == doctest::Approx(M_PI / 2.0));
}

TEST_CASE("build_drive_path follows the first junction route then successors") {
  const auto map = intersection_map();
  const auto drive = build_drive_path(map, 3, 200.0);  // east_in -> south_out
  CHECK(drive.length() > 200.0);
  CHECK(std::fabs(normalize_angle(drive.headings().back() + M_PI / 2.0)) < 1e-6);
}

TEST_CASE("ObstacleMotion: kinematic script with a deceleration to stop") {
  const auto map = intersection_map();
  ScenarioObstacle obstacle;
  obstacle.id = 0;
  obstacle.footprint = {4.5, 1.8};
  KinematicScript kin;
  kin.route = {3, 4};
  kin.start_s = 30.0;
  kin.speed_profile = {{0.0, 9.0}, {6.0, 0.0}};  // constant -1.5 m/s^2
  obstacle.script.kinematic = kin;

  const ObstacleMotion motion(map, obstacle);
  const auto at0 = motion.state_at(0.0);
  CHECK(at0.v == doctest::Approx(9.0));
  CHECK(at0.x == doctest::Approx(76.0 - 30.0));
  const auto at2 = motion.state_at(2.0);
  CHECK(at2.v == doctest::Approx(6.0));
  // s(2) = 9*2 - 0.75*4 = 15
  CHECK(at2.x == doctest::Approx(76.0 - 45.0));
  const auto at6 = motion.state_at(6.0);
  CHECK(at6.v == doctest::Approx(0.0));
  const auto at10 = motion.state_at(10.0);
  CHECK(at10.x == doctest::Approx(at6.x));
  CHECK(at10.v == doctest::Approx(0.0));
  CHECK(at10.a == doctest::Approx(0.0));
}

TEST_CASE("ObstacleMotion: timed-state interpolation") {
  const auto scenario = load_scenario(data_path("scenarios/head_on.json"));
  const ObstacleMotion motion(scenario.map, scenario.obstacles[0]);
  const auto mid = motion.state_at(5.0);
  CHECK(mid.x == doctest::Approx(60.0));
  CHECK(mid.v == doctest::Approx(10.0));
  const auto late = motion.state_at(99.0);
  CHECK(late.x == doctest::Approx(10.0));
}

TEST_CASE("generate_scenario: determinism and family ranges") {
  for (const auto kind :
       {FamilyKind::LeftTurn, FamilyKind::GoStraight, FamilyKind::HighwayOvertake}) {
    const auto family = ScenarioFamily::make(kind);
    for (std::uint64_t seed : {1ull, 7ull, 12345ull}) {
      const auto a = generate_scenario(family, seed);
      const auto b = generate_scenario(family, seed);
      CHECK(scenario_to_json_text(a) == scenario_to_json_text(b));  // byte-identical
      CHECK_NOTHROW(a.validate());
      CHECK(a.ego.initial.v >= family.ego_speed.lo - 1e-9);
      CHECK(a.ego.initial.v <= family.ego_speed.hi + 1e-9);
    }
  }
}

TEST_CASE("generate_scenario: highway layout per the overtaking protocol") {
  const auto family = ScenarioFamily::make(FamilyKind::HighwayOvertake);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto scenario = generate_scenario(family, seed);
    REQUIRE(scenario.obstacles.size() == 4);
    // Front obstacle on the ego lane at the scripted slow speed.
    const auto& front = scenario.obstacles[0];
    REQUIRE(front.script.kinematic.has_value());
    CHECK(front.script.kinematic->route == std::vector<int>{0});
    CHECK(front.script.kinematic->speed_profile[0].second == doctest::Approx(3.96));
    // Rear-left neighbor gap within [25, 50] m and speed within [10, 14].
    const auto& rear = scenario.obstacles[1];
    const double gap = scenario.ego.initial.x - rear.script.kinematic->start_s;
    CHECK(gap >= 25.0 - 1e-9);
    CHECK(gap <= 50.0 + 1e-9);
    const double rear_v = rear.script.kinematic->speed_profile[0].second;
    CHECK(rear_v >= 10.0 - 1e-9);
    CHECK(rear_v <= 14.0 + 1e-9);
    // Two far-ahead left-lane obstacles.
    CHECK(scenario.obstacles[2].script.kinematic->start_s > 150.0);
    CHECK(scenario.obstacles[3].script.kinematic->start_s > 150.0);
  }
}

TEST_CASE("generate_scenario: intersection obstacle scripts are replayable") {
  const auto family = ScenarioFamily::make(FamilyKind::LeftTurn);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto scenario = generate_scenario(family, seed);
    REQUIRE(scenario.obstacles.size() == 1);
    const auto& kin = *scenario.obstacles[0].script.kinematic;
    REQUIRE(kin.speed_profile.size() == 2);
    // Constant deceleration to a stop before the junction entry: the stop
    // distance stays short of the gap to the junction.
    const double v0 = kin.speed_profile[0].second;
    const double stop_distance = v0 * v0 / (2.0 * 1.5);
    const double to_junction = 70.0 - kin.start_s;
    CHECK(stop_distance < to_junction);
  }
}

TEST_CASE("load_scenario: the shipped overtaking fixture layout") {
  const auto scenario = load_scenario(data_path("scenarios/highway_overtake_regression.json"));
  REQUIRE(scenario.obstacles.size() == 4);
  // Slow front car on the ego lane at 3.96 m/s.
  const auto& front = *scenario.obstacles[0].script.kinematic;
  CHECK(front.route == std::vector<int>{0});
  CHECK(front.speed_profile[0].second == doctest::Approx(3.96));
  CHECK(front.start_s > scenario.ego.initial.x);
  // Rear-left neighbor behind the ego on the left lane.
  const auto& rear = *scenario.obstacles[1].script.kinematic;
  CHECK(rear.route == std::vector<int>{1});
  CHECK(rear.start_s < scenario.ego.initial.x);
  // Two far-ahead left-lane obstacles.
  CHECK(scenario.obstacles[2].script.kinematic->start_s > scenario.ego.initial.x + 100.0);
  CHECK(scenario.obstacles[3].script.kinematic->start_s > scenario.ego.initial.x + 100.0);
}

TEST_CASE("scenario JSON roundtrip preserves the scenario") {
  const auto family = ScenarioFamily::make(FamilyKind::HighwayOvertake);
  const auto scenario = generate_scenario(family, 99);
  const auto text = scenario_to_json_text(scenario);
  const auto reloaded = parse_scenario(text);
  CHECK(scenario_to_json_text(reloaded) == text);
}

TEST_CASE("polygon containment includes the boundary") {
  Polygon region;
  region.vertices = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  CHECK(region.contains({2, 2}));
  CHECK(region.contains({0, 2}));
  CHECK(region.contains({4, 4}));
  CHECK(!region.contains({5, 2}));
  CHECK(!region.contains({-0.01, 2}));
}
