#include "mplan/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace mplan {

int OptimizationParams::sample_count() const {
  const double ratio = horizon / dt;
  const long long n = std::llround(ratio);
  if (std::fabs(ratio - static_cast<double>(n)) > 1e-9) {
    throw InvalidParams("horizon must be an integer multiple of dt");
  }
  return static_cast<int>(n) + 1;
}

void OptimizationParams::validate() const {
  if (w_jerk < 0 || w_time < 0 || w_error < 0) throw InvalidParams("weights must be >= 0");
  if (horizon <= 0) throw InvalidParams("horizon must be > 0");
  if (dt <= 0) throw InvalidParams("dt must be > 0");
  sample_count();
}

const char* to_string(ManeuverKind kind) {
  switch (kind) {
    case ManeuverKind::KeepSpeed: return "KeepSpeed";
    case ManeuverKind::Yield: return "Yield";
    case ManeuverKind::LeftChange: return "LeftChange";
    case ManeuverKind::RightChange: return "RightChange";
    case ManeuverKind::Overtake: return "Overtake";
  }
  return "?";
}

std::vector<double> terminal_speed_grid(double v_desired, int level) {
  std::vector<double> grid;
  const int max_offset = level + 2;
  for (int k = 0; k <= max_offset; ++k) {
    for (const double sign : {1.0, -1.0}) {
      if (k == 0 && sign < 0) continue;
      const double v = v_desired + sign * k;
      if (v < 0.0) continue;
      grid.push_back(v);
    }
  }
  return grid;
}

Trajectory sample_polynomial_pair(const ReferencePath& path, const QuarticPoly& lon,
                                  const QuinticPoly& lat, const OptimizationParams& params) {
  const int n = params.sample_count();
  Trajectory traj;
  traj.samples.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t = (k == n - 1) ? params.horizon : k * params.dt;
    traj.samples.push_back(make_sample(path, t, lon.value(t), lon.d1(t), lon.d2(t), lon.d3(t),
                                       lat.value(t), lat.d1(t), lat.d2(t), lat.d3(t)));
  }
  return traj;
}

std::vector<Trajectory> generate_candidates(const ReferencePath& path, const FrenetState& init,
                                            double v_desired, double l_desired,
                                            const OptimizationParams& params, int level) {
  params.validate();
  if (v_desired < 0.0) throw InvalidParams("v_desired must be >= 0");
  for (const double v :
       {init.s, init.s_d, init.s_dd, init.l, init.l_d, init.l_dd}) {
    if (!std::isfinite(v)) throw InvalidParams("initial Frenet state must be finite");
  }

  const auto grid = terminal_speed_grid(v_desired, level);
  if (grid.empty()) throw EmptyCandidateSet("no terminal speed candidates");

  const QuinticPoly lat = solve_quintic(init.l, init.l_d, init.l_dd, l_desired, 0.0, 0.0,
                                        params.horizon);
  std::vector<Trajectory> candidates;
  candidates.reserve(grid.size());
  for (const double v_t : grid) {
    const QuarticPoly lon =
        solve_quartic(init.s, init.s_d, init.s_dd, v_t, 0.0, params.horizon);
    candidates.push_back(sample_polynomial_pair(path, lon, lat, params));
  }
  if (candidates.empty()) throw EmptyCandidateSet("all boundary combinations invalid");
  return candidates;
}

std::vector<Trajectory> filter_feasible(std::vector<Trajectory> candidates,
                                        const OptimizationParams& params) {
  std::vector<Trajectory> kept;
  kept.reserve(candidates.size());
  for (auto& traj : candidates) {
    bool ok = true;
    for (const auto& s : traj.samples) {
      const double accel = std::hypot(s.s_dd, s.l_dd);
      if (accel > params.a_max || s.v > params.v_max || std::fabs(s.kappa) > params.kappa_max ||
          s.s_d < 0.0) {
        ok = false;
        break;
      }
    }
    if (ok) {
      traj.feasible = true;
      kept.push_back(std::move(traj));
    }
  }
  return kept;
}

double trajectory_cost(const Trajectory& traj, double v_desired, double l_desired,
                       const OptimizationParams& params) {
  const auto& samples = traj.samples;
  if (samples.size() < 2) throw NonuniformSampling("trajectory needs >= 2 samples");
  for (size_t k = 0; k + 1 < samples.size(); ++k) {
    if (std::fabs(samples[k + 1].t - samples[k].t - params.dt) > 1e-9) {
      throw NonuniformSampling("samples not on the dt grid");
    }
  }

  double jerk = 0.0;
  for (size_t k = 0; k + 1 < samples.size(); ++k) {
    jerk += (samples[k].s_ddd * samples[k].s_ddd + samples[k].l_ddd * samples[k].l_ddd) *
            params.dt;
  }
  const double travel_time = samples.back().t - samples.front().t;
  const double e_l = samples.back().l - l_desired;
  const double e_v = samples.back().s_d - v_desired;
  return params.w_jerk * jerk + params.w_time * travel_time +
         params.w_error * (e_l * e_l + e_v * e_v);
}

std::optional<Trajectory> select_optimal(const std::vector<Trajectory>& candidates,
                                         double v_desired, double l_desired,
                                         const OptimizationParams& params) {
  std::optional<Trajectory> best;
  double best_cost = 0.0;
  for (const auto& traj : candidates) {
    const double cost = trajectory_cost(traj, v_desired, l_desired, params);
    if (!best || cost < best_cost) {
      best = traj;
      best->cost = cost;
      best_cost = cost;
    }
  }
  return best;
}

}  // namespace mplan
