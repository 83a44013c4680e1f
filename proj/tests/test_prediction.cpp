#include <cmath>

#include "doctest.h"
#include "mplan/prediction.hpp"
#include "mplan/world.hpp"
#include "oracles.hpp"

using namespace mplan;

namespace {
LaneMap empty_map() { return {}; }

ObstacleHistory single_state(double x, double y, double theta, double v) {
  ObstacleHistory history;
  history.id = 7;
  history.states.emplace_back(0.0, CartesianState{x, y, theta, v, 0.0});
  return history;
}
}  // namespace

TEST_CASE("predict: degenerate single-state history gives CV twice") {
  const auto map = empty_map();
  const auto set = predict(single_state(1.0, 2.0, 0.0, 10.0), map, 5.0, 0.2);
  CHECK(set.obstacle_id == 7);
  REQUIRE(set.trajectories.size() == 2);
  CHECK(set.trajectories[0].probability == doctest::Approx(0.6));
  CHECK(set.trajectories[1].probability == doctest::Approx(0.4));
  REQUIRE(set.trajectories[0].samples.size() == 26);

  for (const auto& traj : set.trajectories) {
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      const double t = traj.samples[k].t;
      CHECK(std::fabs(traj.samples[k].x - (1.0 + 10.0 * t)) < 1e-9);
      CHECK(std::fabs(traj.samples[k].y - 2.0) < 1e-9);
      CHECK(traj.samples[k].v == doctest::Approx(10.0));
    }
  }
}

TEST_CASE("predict: constant-acceleration hypothesis with clamping and floor") {
  const auto map = empty_map();
  ObstacleHistory history;
  history.id = 1;
  // v: 10 -> 9 over 0.2 s estimates -5 m/s^2, clamped to -4.
  history.states.emplace_back(0.0, CartesianState{0.0, 0.0, 0.0, 10.0, 0.0});
  history.states.emplace_back(0.2, CartesianState{2.0, 0.0, 0.0, 9.0, 0.0});
  const auto set = predict(history, map, 5.0, 0.2);
  const auto& ca = set.trajectories[1];

  // Closed-form kinematics oracle with the clamp and the speed floor.
  const double a = -4.0;
  const double t_stop = 9.0 / 4.0;
  for (const auto& sample : ca.samples) {
    const double t = sample.t;
    const double v = std::max(0.0, 9.0 + a * t);
    const double tc = std::min(t, t_stop);
    const double dist = 9.0 * tc + 0.5 * a * tc * tc;
    CHECK(std::fabs(sample.v - v) < 1e-9);
    CHECK(std::fabs(sample.x - (2.0 + dist)) < 1e-9);
    CHECK(sample.v >= 0.0);
  }
}

TEST_CASE("predict: stationary obstacle stays put in both hypotheses") {
  const auto map = empty_map();
  const auto set = predict(single_state(4.0, -1.0, 1.0, 0.0), map, 5.0, 0.2);
  for (const auto& traj : set.trajectories) {
    for (const auto& sample : traj.samples) {
      CHECK(sample.x == doctest::Approx(4.0));
      CHECK(sample.y == doctest::Approx(-1.0));
      CHECK(sample.v == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("predict: lane snap follows the junction continuation") {
  const auto map = intersection_map();
  // Obstacle on the east approach (westbound, y=1.75) heading west.
  const auto set = predict(single_state(40.0, 1.75, M_PI, 8.0), map, 5.0, 0.2);
  const auto& cv = set.trajectories[0];
  // 8 m/s * 5 s = 40 m of travel: past the junction entry (34 m away) and
  // into the east->south connector, so the final heading turns south.
  const auto& last = cv.samples.back();
  CHECK(last.x < 7.0);
  CHECK(last.y < 1.0);           // dropped below the westbound centerline
  CHECK(last.theta < -M_PI / 4.0);  // heading rotating toward -pi/2
  for (const auto& sample : cv.samples) CHECK(sample.v == doctest::Approx(8.0));
}

TEST_CASE("predict: off-lane obstacle falls back to straight-line motion") {
  const auto map = intersection_map();
  // 3 m from any centerline: outside the 1.5 m snap distance.
  const auto set = predict(single_state(40.0, 4.75, M_PI, 6.0), map, 5.0, 0.2);
  const auto& cv = set.trajectories[0];
  for (const auto& sample : cv.samples) {
    CHECK(sample.y == doctest::Approx(4.75));
    CHECK(std::fabs(sample.x - (40.0 - 6.0 * sample.t)) < 1e-9);
  }
}

TEST_CASE("predict: heading mismatch prevents the lane snap") {
  const auto map = intersection_map();
  // On the westbound centerline but heading east (180 degrees off).
  const auto set = predict(single_state(40.0, 1.75, 0.0, 6.0), map, 5.0, 0.2);
  const auto& cv = set.trajectories[0];
  CHECK(cv.samples.back().x == doctest::Approx(40.0 + 30.0));
}

TEST_CASE("predict: horizon exactness and validation errors") {
  const auto map = empty_map();
  const auto set = predict(single_state(0, 0, 0, 3.0), map, 4.0, 0.2);
  CHECK(set.trajectories[0].samples.size() == 21);

  ObstacleHistory empty;
  CHECK_THROWS_AS(predict(empty, map, 5.0, 0.2), EmptyHistory);
  CHECK_THROWS_AS(predict(single_state(0, 0, 0, 1.0), map, -1.0, 0.2), PredictionError);
}

TEST_CASE("select_top2: ordering, ties, and the K=1 degenerate case") {
  PredictionSet set;
  set.obstacle_id = 3;
  auto with_prob = [](double p) {
    PredictedTrajectory traj;
    traj.probability = p;
    traj.samples.resize(1);
    return traj;
  };

  set.trajectories = {with_prob(0.5), with_prob(0.3), with_prob(0.2)};
  auto top = select_top2(set);
  CHECK(top[0].probability == doctest::Approx(0.5));
  CHECK(top[1].probability == doctest::Approx(0.3));

  // Stable under ties: stored order is preserved.
  set.trajectories = {with_prob(0.4), with_prob(0.4), with_prob(0.2)};
  set.trajectories[0].samples[0].x = 111.0;
  set.trajectories[1].samples[0].x = 222.0;
  top = select_top2(set);
  CHECK(top[0].samples[0].x == doctest::Approx(111.0));
  CHECK(top[1].samples[0].x == doctest::Approx(222.0));

  set.trajectories = {with_prob(1.0)};
  top = select_top2(set);
  CHECK(top[0].probability == doctest::Approx(1.0));
  CHECK(top[1].probability == doctest::Approx(1.0));

  set.trajectories.clear();
  CHECK_THROWS_AS(select_top2(set), EmptySet);
}

TEST_CASE("prediction sets are sorted by descending probability") {
  oracles::Rng rng(5);
  const auto map = intersection_map();
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = predict(
        single_state(rng.uniform(10, 60), rng.uniform(-3, 5), rng.uniform(-M_PI, M_PI),
                     rng.uniform(0, 15)),
        map, 5.0, 0.2);
    for (std::size_t i = 0; i + 1 < set.trajectories.size(); ++i) {
      CHECK(set.trajectories[i].probability >= set.trajectories[i + 1].probability);
    }
    double sum = 0.0;
    for (const auto& traj : set.trajectories) {
      sum += traj.probability;
      for (const auto& sample : traj.samples) CHECK(sample.v >= 0.0);
    }
    CHECK(sum <= 1.0 + 1e-6);
  }
}
