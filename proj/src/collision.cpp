#include "mplan/collision.hpp"

#include <cmath>

namespace mplan {

OrientedBox OrientedBox::from_state(double x, double y, double heading, const Footprint& fp,
                                    double margin) {
  OrientedBox box;
  box.cx = x;
  box.cy = y;
  box.heading = heading;
  box.half_length = fp.length / 2.0 + margin;
  box.half_width = fp.width / 2.0 + margin;
  return box;
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 u{std::cos(heading), std::sin(heading)};
  const Vec2 w = u.perp();
  const Vec2 c{cx, cy};
  return {c + u * half_length + w * half_width, c + u * half_length - w * half_width,
          c - u * half_length - w * half_width, c - u * half_length + w * half_width};
}

namespace {
// Projected center gap along one axis; positive means separated.
bool separated_on_axis(const OrientedBox& a, const OrientedBox& b, const Vec2& axis) {
  const Vec2 ua{std::cos(a.heading), std::sin(a.heading)};
  const Vec2 ub{std::cos(b.heading), std::sin(b.heading)};
  const double ra = a.half_length * std::fabs(ua.dot(axis)) +
                    a.half_width * std::fabs(ua.perp().dot(axis));
  const double rb = b.half_length * std::fabs(ub.dot(axis)) +
                    b.half_width * std::fabs(ub.perp().dot(axis));
  const double dist = std::fabs(Vec2{b.cx - a.cx, b.cy - a.cy}.dot(axis));
  return dist > ra + rb;
}
}  // namespace

bool obb_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 ua{std::cos(a.heading), std::sin(a.heading)};
  const Vec2 ub{std::cos(b.heading), std::sin(b.heading)};
  for (const Vec2& axis : {ua, ua.perp(), ub, ub.perp()}) {
    if (separated_on_axis(a, b, axis)) return false;
  }
  return true;
}

CollisionReport check_trajectory(const Trajectory& ego, const Footprint& ego_fp,
                                 const std::vector<ObstaclePrediction>& predictions,
                                 double margin) {
  size_t horizon = ego.samples.size();
  const double ego_dt =
      ego.samples.size() >= 2 ? ego.samples[1].t - ego.samples[0].t : 0.0;
  for (const auto& pred : predictions) {
    for (const auto& hyp : pred.hypotheses) {
      if (hyp.samples.size() >= 2) {
        const double dt = hyp.samples[1].t - hyp.samples[0].t;
        if (ego.samples.size() >= 2 && std::fabs(dt - ego_dt) > 1e-9) {
          throw TimebaseMismatch("prediction dt differs from trajectory dt");
        }
      }
      horizon = std::min(horizon, hyp.samples.size());
    }
  }

  for (size_t k = 0; k < horizon; ++k) {
    const auto& es = ego.samples[k];
    const auto ego_box = OrientedBox::from_state(es.x, es.y, es.theta, ego_fp, margin);
    for (size_t oi = 0; oi < predictions.size(); ++oi) {
      const auto& pred = predictions[oi];
      for (size_t hi = 0; hi < pred.hypotheses.size(); ++hi) {
        const auto& os = pred.hypotheses[hi].samples[k];
        const auto obs_box =
            OrientedBox::from_state(os.x, os.y, os.theta, pred.footprint, margin);
        if (obb_overlap(ego_box, obs_box)) {
          CollisionReport report;
          report.collision_free = false;
          report.timestep = static_cast<int>(k);
          report.obstacle_id = pred.obstacle_id;
          report.hypothesis = static_cast<int>(hi);
          return report;
        }
      }
    }
  }
  return {};
}

}  // namespace mplan
