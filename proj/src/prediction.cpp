#include "mplan/prediction.hpp"

#include <algorithm>
#include <cmath>

#include "mplan/world.hpp"

namespace mplan {

namespace {
constexpr double kLaneSnapDistance = 1.5;            // m
constexpr double kLaneSnapHeading = 30.0 * M_PI / 180.0;
constexpr double kAccelClamp = 4.0;                  // m/s^2

// Distance covered by v(t) = max(0, v0 + a*t) after time t.
double floored_displacement(double v0, double a, double t) {
  if (a >= -1e-12) return v0 * t + 0.5 * a * t * t;
  const double t_stop = v0 / -a;
  const double tc = std::min(t, t_stop);
  return v0 * tc + 0.5 * a * tc * tc;
}

double floored_speed(double v0, double a, double t) { return std::max(0.0, v0 + a * t); }

struct LaneMatch {
  ReferencePath path;  // drive path extended beyond the matched lane
  double s0 = 0.0;
  double l0 = 0.0;
};

std::optional<LaneMatch> match_lane(const LaneMap& map, const CartesianState& state,
                                    double needed_length) {
  // Candidates: lanes, then junction connectors (so a vehicle mid-junction
  // keeps a lane-following prediction). Best absolute lateral offset wins,
  // earlier candidate on ties.
  struct Candidate {
    const std::vector<Vec2>* centerline = nullptr;
    int lane_id = -1;                      // >= 0 for lane candidates
    const JunctionRoute* route = nullptr;  // set for connector candidates
  };
  std::vector<Candidate> candidates;
  for (const auto& lane : map.lanes) {
    candidates.push_back({&lane.centerline, lane.id, nullptr});
  }
  for (const auto& route : map.junction_routes) {
    candidates.push_back({&route.centerline, -1, &route});
  }

  const Candidate* best = nullptr;
  double best_lateral = kLaneSnapDistance;
  double best_s = 0.0;
  double best_l = 0.0;
  for (const auto& cand : candidates) {
    ReferencePath center;
    try {
      center = build_reference_path(*cand.centerline);
    } catch (const GeometryError&) {
      continue;
    }
    ReferencePath::Projection proj;
    try {
      proj = center.project({state.x, state.y});
    } catch (const OutOfPathExtent&) {
      continue;
    }
    const double dtheta = normalize_angle(state.theta - center.heading_at(proj.s));
    if (std::fabs(proj.lateral) < best_lateral && std::fabs(dtheta) <= kLaneSnapHeading) {
      best = &cand;
      best_lateral = std::fabs(proj.lateral);
      best_s = proj.s;
      best_l = proj.lateral;
    }
  }
  if (!best) return std::nullopt;

  LaneMatch match;
  if (best->lane_id >= 0) {
    match.path = build_drive_path(map, best->lane_id, best_s + needed_length);
  } else {
    match.path = extend_drive_path(map, best->route->centerline, best->route->to_lane,
                                   best_s + needed_length);
  }
  match.s0 = best_s;
  match.l0 = best_l;
  return match;
}

TrajectorySample straight_sample(const CartesianState& origin, double t, double dist,
                                 double speed, double accel) {
  TrajectorySample sample;
  sample.t = t;
  sample.x = origin.x + dist * std::cos(origin.theta);
  sample.y = origin.y + dist * std::sin(origin.theta);
  sample.theta = origin.theta;
  sample.v = speed;
  sample.a = accel;
  sample.s = dist;
  sample.s_d = speed;
  sample.s_dd = accel;
  return sample;
}

TrajectorySample lane_sample(const ReferencePath& path, double t, double s, double l,
                             double speed, double accel) {
  const double sc = std::clamp(s, 0.0, path.length());
  FrenetState fs;
  fs.s = sc;
  fs.l = l;
  fs.s_d = speed;
  fs.s_dd = accel;
  const auto ch = frenet_to_cartesian(path, fs);
  TrajectorySample sample;
  sample.t = t;
  sample.x = ch.x;
  sample.y = ch.y;
  sample.theta = ch.theta;
  sample.v = speed;
  sample.a = accel;
  sample.kappa = ch.kappa;
  sample.s = sc;
  sample.s_d = speed;
  sample.s_dd = accel;
  sample.l = l;
  return sample;
}

PredictedTrajectory roll_out(const std::optional<LaneMatch>& match, const CartesianState& cur,
                             double v0, double accel, double probability, double horizon,
                             double dt) {
  PredictedTrajectory traj;
  traj.probability = probability;
  const int n = static_cast<int>(std::llround(horizon / dt));
  traj.samples.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = (k == n) ? horizon : k * dt;
    const double dist = floored_displacement(v0, accel, t);
    const double speed = floored_speed(v0, accel, t);
    const double a_now = speed > 0.0 ? accel : 0.0;
    if (match) {
      traj.samples.push_back(
          lane_sample(match->path, t, match->s0 + dist, match->l0, speed, a_now));
    } else {
      traj.samples.push_back(straight_sample(cur, t, dist, speed, a_now));
    }
  }
  return traj;
}
}  // namespace

PredictionSet predict(const ObstacleHistory& history, const LaneMap& map, double horizon,
                      double dt) {
  if (history.states.empty()) throw EmptyHistory("obstacle history is empty");
  if (horizon <= 0.0 || dt <= 0.0) throw PredictionError("horizon and dt must be > 0");

  const auto& [t_cur, cur] = history.states.back();
  double accel = 0.0;
  if (history.states.size() >= 2) {
    const auto& [t_prev, prev] = history.states[history.states.size() - 2];
    if (t_cur - t_prev > 1e-9) {
      accel = std::clamp((cur.v - prev.v) / (t_cur - t_prev), -kAccelClamp, kAccelClamp);
    }
  }

  const double needed = cur.v * horizon + 0.5 * kAccelClamp * horizon * horizon + 10.0;
  const auto match = match_lane(map, cur, needed);

  PredictionSet set;
  set.obstacle_id = history.id;
  set.trajectories.push_back(roll_out(match, cur, cur.v, 0.0, 0.6, horizon, dt));
  set.trajectories.push_back(roll_out(match, cur, cur.v, accel, 0.4, horizon, dt));
  std::stable_sort(set.trajectories.begin(), set.trajectories.end(),
                   [](const auto& a, const auto& b) { return a.probability > b.probability; });
  return set;
}

std::array<PredictedTrajectory, 2> select_top2(const PredictionSet& set) {
  if (set.trajectories.empty()) throw EmptySet("prediction set is empty");
  if (set.trajectories.size() == 1) {
    return {set.trajectories[0], set.trajectories[0]};
  }
  return {set.trajectories[0], set.trajectories[1]};
}

std::vector<PredictionSet> BaselinePredictor::predict_all(
    const std::vector<ObstacleHistory>& histories, const LaneMap& map, double horizon,
    double dt) {
  std::vector<PredictionSet> sets;
  sets.reserve(histories.size());
  for (const auto& history : histories) sets.push_back(predict(history, map, horizon, dt));
  return sets;
}

}  // namespace mplan
