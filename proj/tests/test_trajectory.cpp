#include <cmath>

#include "doctest.h"
#include "mplan/trajectory.hpp"
#include "oracles.hpp"

using namespace mplan;

namespace {
ReferencePath long_straight() {
  return build_reference_path({{0.0, 0.0}, {200.0, 0.0}, {400.0, 0.0}});
}

// Fine-grid Riemann quadrature of the squared-jerk integral, the independent
// route for trajectory_cost.
double fine_cost(const QuarticPoly& lon, const QuinticPoly& lat, double v_desired,
                 double l_desired, const OptimizationParams& p) {
  const double fine_dt = 0.001;
  double jerk = 0.0;
  for (double t = 0.0; t < p.horizon - 1e-12; t += fine_dt) {
    jerk += (lon.d3(t) * lon.d3(t) + lat.d3(t) * lat.d3(t)) * fine_dt;
  }
  const double e_l = lat.value(p.horizon) - l_desired;
  const double e_v = lon.d1(p.horizon) - v_desired;
  return p.w_jerk * jerk + p.w_time * p.horizon + p.w_error * (e_l * e_l + e_v * e_v);
}
}  // namespace

TEST_CASE("terminal_speed_grid widens with the level") {
  const auto level0 = terminal_speed_grid(10.0, 0);
  CHECK(level0 == std::vector<double>{10.0, 11.0, 9.0, 12.0, 8.0});
  const auto level1 = terminal_speed_grid(10.0, 1);
  CHECK(level1 == std::vector<double>{10.0, 11.0, 9.0, 12.0, 8.0, 13.0, 7.0});
  // Negative entries are dropped.
  const auto low = terminal_speed_grid(1.0, 0);
  CHECK(low == std::vector<double>{1.0, 2.0, 0.0, 3.0});
}

TEST_CASE("generate_candidates: stationary and steady-cruise members") {
  const auto path = long_straight();
  OptimizationParams params;

  FrenetState rest;
  const auto at_rest = generate_candidates(path, rest, 0.0, 0.0, params);
  bool has_stationary = false;
  for (const auto& traj : at_rest) {
    bool stationary = true;
    for (const auto& s : traj.samples) {
      if (std::fabs(s.s) > 1e-9 || std::fabs(s.v) > 1e-9) stationary = false;
    }
    has_stationary = has_stationary || stationary;
  }
  CHECK(has_stationary);

  FrenetState cruising;
  cruising.s = 10.0;
  cruising.s_d = 10.0;
  const auto cruise_set = generate_candidates(path, cruising, 10.0, 0.0, params);
  CHECK(cruise_set.size() == 5);
  bool has_cruise = false;
  for (const auto& traj : cruise_set) {
    bool zero_jerk = true;
    for (const auto& s : traj.samples) {
      if (std::fabs(s.s_ddd) > 1e-9 || std::fabs(s.l_ddd) > 1e-9) zero_jerk = false;
    }
    if (zero_jerk && std::fabs(traj.back().s_d - 10.0) < 1e-9) has_cruise = true;
  }
  CHECK(has_cruise);

  // Level-0 grid: 5 members, each boundary-exact.
  for (std::size_t i = 0; i < cruise_set.size(); ++i) {
    const auto& traj = cruise_set[i];
    CHECK(traj.samples.size() == 26);
    CHECK(traj.front().s == doctest::Approx(10.0));
    CHECK(traj.front().s_d == doctest::Approx(10.0));
    CHECK(traj.back().s_dd == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(traj.back().l == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("filter_feasible removes each bound violator") {
  const auto path = long_straight();
  OptimizationParams params;  // a_max 2.0, v_max 57.6, kappa_max 1.0

  FrenetState init;
  init.s_d = 10.0;

  SUBCASE("acceleration violator") {
    // 10 -> 20 m/s over 5 s peaks at 0.3 * 10 = 3.0 m/s^2 > 2.0.
    auto candidates = generate_candidates(path, init, 20.0, 0.0, params, 8);
    auto kept = filter_feasible(candidates, params);
    for (const auto& traj : kept) {
      double peak = 0.0;
      for (const auto& s : traj.samples) peak = std::max(peak, std::hypot(s.s_dd, s.l_dd));
      CHECK(peak <= params.a_max + 1e-12);
    }
    CHECK(kept.size() < candidates.size());
  }

  SUBCASE("speed violator and survivor") {
    FrenetState fast;
    fast.s_d = 57.0;
    const auto candidates = generate_candidates(path, fast, 58.5, 0.0, params, 0);
    const auto kept = filter_feasible(candidates, params);
    for (const auto& traj : kept) {
      for (const auto& s : traj.samples) CHECK(s.v <= params.v_max + 1e-12);
    }
    CHECK(kept.size() < candidates.size());
    CHECK(!kept.empty());

    FrenetState slow;
    slow.s_d = 10.0;
    const auto cruise = filter_feasible(generate_candidates(path, slow, 10.0, 0.0, params), params);
    CHECK(!cruise.empty());
    for (const auto& traj : cruise) CHECK(traj.feasible);
  }

  SUBCASE("reverse-motion violator") {
    FrenetState slow;
    slow.s_d = 1.0;
    // Quartic 1 -> 0 overshoots below zero mid-profile at these boundary
    // conditions; the candidate targeting 0 must be dropped.
    auto candidates = generate_candidates(path, slow, 0.0, 0.0, params);
    const auto kept = filter_feasible(std::move(candidates), params);
    for (const auto& traj : kept) {
      for (const auto& s : traj.samples) CHECK(s.s_d >= 0.0);
    }
  }

  SUBCASE("curvature violator") {
    // Strong lateral swing at low speed produces |kappa| > 1.
    const QuarticPoly lon = solve_quartic(0.0, 0.6, 0.0, 0.6, 0.0, params.horizon);
    const QuinticPoly lat = solve_quintic(0.0, 0.0, 0.0, 2.5, 0.0, 0.0, params.horizon);
    auto traj = sample_polynomial_pair(path, lon, lat, params);
    double max_kappa = 0.0;
    for (const auto& s : traj.samples) max_kappa = std::max(max_kappa, std::fabs(s.kappa));
    REQUIRE(max_kappa > params.kappa_max);
    const auto kept = filter_feasible({traj}, params);
    CHECK(kept.empty());
  }
}

TEST_CASE("filter soundness: per-sample re-verification agrees") {
  oracles::Rng rng(31);
  const auto path = long_straight();
  OptimizationParams params;
  for (int trial = 0; trial < 30; ++trial) {
    FrenetState init;
    init.s = rng.uniform(0, 50);
    init.s_d = rng.uniform(0, 20);
    init.s_dd = rng.uniform(-1.5, 1.5);
    init.l = rng.uniform(-2, 2);
    const auto candidates =
        generate_candidates(path, init, rng.uniform(0, 25), 0.0, params, rng.uniform_int(0, 3));
    const auto kept = filter_feasible(candidates, params);

    auto violates = [&](const Trajectory& traj) {
      for (const auto& s : traj.samples) {
        if (std::hypot(s.s_dd, s.l_dd) > params.a_max || s.v > params.v_max ||
            std::fabs(s.kappa) > params.kappa_max || s.s_d < 0.0) {
          return true;
        }
      }
      return false;
    };
    std::size_t expected_kept = 0;
    for (const auto& traj : candidates) {
      if (!violates(traj)) ++expected_kept;
    }
    CHECK(kept.size() == expected_kept);
    for (const auto& traj : kept) CHECK(!violates(traj));
  }
}

TEST_CASE("trajectory_cost: frozen values from Table-1 weights") {
  const auto path = long_straight();
  OptimizationParams params;

  FrenetState cruising;
  cruising.s_d = 10.0;
  const QuarticPoly lon = solve_quartic(0.0, 10.0, 0.0, 10.0, 0.0, params.horizon);
  const QuinticPoly lat = solve_quintic(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, params.horizon);
  const auto cruise = sample_polynomial_pair(path, lon, lat, params);
  CHECK(std::fabs(trajectory_cost(cruise, 10.0, 0.0, params) - 0.5) < 1e-9);

  const QuarticPoly still = solve_quartic(0.0, 0.0, 0.0, 0.0, 0.0, params.horizon);
  const auto stationary = sample_polynomial_pair(path, still, lat, params);
  CHECK(std::fabs(trajectory_cost(stationary, 10.0, 0.0, params) - 100.5) < 1e-9);
}

TEST_CASE("trajectory_cost: rejects non-uniform sampling") {
  const auto path = long_straight();
  OptimizationParams params;
  const QuarticPoly lon = solve_quartic(0.0, 5.0, 0.0, 5.0, 0.0, params.horizon);
  const QuinticPoly lat = solve_quintic(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, params.horizon);
  auto traj = sample_polynomial_pair(path, lon, lat, params);
  traj.samples[3].t += 0.05;
  CHECK_THROWS_AS(trajectory_cost(traj, 5.0, 0.0, params), NonuniformSampling);
}

TEST_CASE("trajectory_cost matches fine-grid quadrature within 2%") {
  oracles::Rng rng(17);
  const auto path = long_straight();
  OptimizationParams params;
  for (int trial = 0; trial < 40; ++trial) {
    const double v0 = rng.uniform(2, 15);
    const double v_des = v0 + rng.uniform(-3, 3);
    const double l0 = rng.uniform(-1.0, 1.0);
    const double lT = rng.uniform(-3.5, 3.5);
    const QuarticPoly lon = solve_quartic(10.0, v0, rng.uniform(-1, 1), std::max(0.0, v_des),
                                          0.0, params.horizon);
    const QuinticPoly lat =
        solve_quintic(l0, rng.uniform(-0.3, 0.3), 0.0, lT, 0.0, 0.0, params.horizon);
    const auto traj = sample_polynomial_pair(path, lon, lat, params);
    const double expected = fine_cost(lon, lat, std::max(0.0, v_des), lT, params);
    const double actual = trajectory_cost(traj, std::max(0.0, v_des), lT, params);
    CHECK(std::fabs(actual - expected) <= 0.02 * std::max(expected, 1e-9));
  }
}

TEST_CASE("lane-change candidate cost vs fine quadrature") {
  const auto path = long_straight();
  OptimizationParams params;
  const QuarticPoly lon = solve_quartic(0.0, 12.0, 0.0, 12.0, 0.0, params.horizon);
  const QuinticPoly lat = solve_quintic(0.0, 0.0, 0.0, 3.5, 0.0, 0.0, params.horizon);
  const auto traj = sample_polynomial_pair(path, lon, lat, params);
  const double expected = fine_cost(lon, lat, 12.0, 3.5, params);
  const double actual = trajectory_cost(traj, 12.0, 3.5, params);
  CHECK(std::fabs(actual - expected) <= 0.02 * expected);
}

TEST_CASE("select_optimal equals exhaustive brute-force minimization") {
  oracles::Rng rng(55);
  const auto path = long_straight();
  OptimizationParams params;
  for (int trial = 0; trial < 100; ++trial) {
    FrenetState init;
    init.s = rng.uniform(0, 30);
    init.s_d = rng.uniform(0, 18);
    init.s_dd = rng.uniform(-1, 1);
    init.l = rng.uniform(-1.5, 1.5);
    init.l_d = rng.uniform(-0.3, 0.3);
    const double v_des = rng.uniform(0, 20);
    const auto feasible = filter_feasible(
        generate_candidates(path, init, v_des, 0.0, params, rng.uniform_int(0, 3)), params);
    const auto best = select_optimal(feasible, v_des, 0.0, params);
    if (feasible.empty()) {
      CHECK(!best.has_value());
      continue;
    }
    REQUIRE(best.has_value());
    double expected = std::numeric_limits<double>::infinity();
    for (const auto& traj : feasible) {
      expected = std::min(expected, trajectory_cost(traj, v_des, 0.0, params));
    }
    CHECK(best->cost == expected);  // exact, not approximate
  }
}

TEST_CASE("select_optimal: steady cruise wins, empty set yields nothing") {
  const auto path = long_straight();
  OptimizationParams params;
  FrenetState cruising;
  cruising.s_d = 10.0;
  const auto feasible =
      filter_feasible(generate_candidates(path, cruising, 10.0, 0.0, params), params);
  const auto best = select_optimal(feasible, 10.0, 0.0, params);
  REQUIRE(best.has_value());
  CHECK(best->back().s_d == doctest::Approx(10.0));
  CHECK(best->cost == doctest::Approx(0.5));

  CHECK(!select_optimal({}, 10.0, 0.0, params).has_value());
}

TEST_CASE("cost monotonicity in the terminal speed error") {
  const auto path = long_straight();
  OptimizationParams params;
  const QuarticPoly lon = solve_quartic(0.0, 10.0, 0.0, 10.0, 0.0, params.horizon);
  const QuinticPoly lat = solve_quintic(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, params.horizon);
  const auto traj = sample_polynomial_pair(path, lon, lat, params);
  double previous = trajectory_cost(traj, 10.0, 0.0, params);
  for (double v_des = 11.0; v_des < 16.0; v_des += 1.0) {
    const double cost = trajectory_cost(traj, v_des, 0.0, params);
    CHECK(cost > previous);
    previous = cost;
  }
}

TEST_CASE("quadrature convergence: halving dt moves the jerk term < 5%") {
  const auto path = long_straight();
  OptimizationParams coarse;
  OptimizationParams fine;
  fine.dt = 0.1;
  const QuarticPoly lon = solve_quartic(0.0, 8.0, 0.0, 11.0, 0.0, coarse.horizon);
  const QuinticPoly lat = solve_quintic(0.0, 0.0, 0.0, 2.0, 0.0, 0.0, coarse.horizon);

  auto jerk_term = [&](const OptimizationParams& p) {
    const auto traj = sample_polynomial_pair(path, lon, lat, p);
    // Subtract the non-jerk terms to isolate the integral.
    const double total = trajectory_cost(traj, 11.0, 2.0, p);
    const double e_l = traj.back().l - 2.0;
    const double e_v = traj.back().s_d - 11.0;
    return total - p.w_time * p.horizon - p.w_error * (e_l * e_l + e_v * e_v);
  };
  const double coarse_jerk = jerk_term(coarse);
  const double fine_jerk = jerk_term(fine);
  CHECK(std::fabs(coarse_jerk - fine_jerk) < 0.05 * std::max(fine_jerk, 1e-12));
}

TEST_CASE("nonnegativity: J >= w_t * T for feasible candidates") {
  oracles::Rng rng(77);
  const auto path = long_straight();
  OptimizationParams params;
  for (int trial = 0; trial < 20; ++trial) {
    FrenetState init;
    init.s_d = rng.uniform(0, 15);
    const double v_des = rng.uniform(0, 15);
    for (const auto& traj :
         filter_feasible(generate_candidates(path, init, v_des, 0.0, params), params)) {
      CHECK(trajectory_cost(traj, v_des, 0.0, params) >= params.w_time * params.horizon - 1e-12);
    }
  }
}

TEST_CASE("invalid parameters are rejected") {
  OptimizationParams params;
  params.dt = 0.3;  // 5.0 / 0.3 is not integral
  CHECK_THROWS_AS(params.validate(), InvalidParams);
  params = {};
  params.horizon = -1.0;
  CHECK_THROWS_AS(params.validate(), InvalidParams);
  params = {};
  const auto path = long_straight();
  CHECK_THROWS_AS(generate_candidates(path, FrenetState{}, -1.0, 0.0, params), InvalidParams);
}
