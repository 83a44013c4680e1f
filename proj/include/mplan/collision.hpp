#pragma once

#include <array>
#include <vector>

#include "mplan/geometry.hpp"
#include "mplan/prediction.hpp"
#include "mplan/trajectory.hpp"

namespace mplan {

struct CollisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TimebaseMismatch : CollisionError {
  using CollisionError::CollisionError;
};

struct Footprint {
  double length = 4.5;  // m
  double width = 1.8;   // m
};

struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;

  static OrientedBox from_state(double x, double y, double heading, const Footprint& fp,
                                double margin = 0.0);
  std::array<Vec2, 4> corners() const;
};

/// Separating-axis test over the four box axes; touching edges overlap.
bool obb_overlap(const OrientedBox& a, const OrientedBox& b);

struct ObstaclePrediction {
  int obstacle_id = 0;
  Footprint footprint;
  std::vector<PredictedTrajectory> hypotheses;
};

struct CollisionReport {
  bool collision_free = true;
  // First collision, valid when !collision_free: lowest timestep, then lowest
  // obstacle position in the input list, then lowest hypothesis index.
  int timestep = -1;
  int obstacle_id = -1;
  int hypothesis = -1;
};

/// Per-timestep OBB checks of the ego trajectory against every hypothesis of
/// every obstacle, both footprints inflated by margin on each side. Shorter
/// horizons are compared over the common prefix.
CollisionReport check_trajectory(const Trajectory& ego, const Footprint& ego_fp,
                                 const std::vector<ObstaclePrediction>& predictions,
                                 double margin);

}  // namespace mplan
