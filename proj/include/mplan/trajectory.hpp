#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mplan/geometry.hpp"

namespace mplan {

struct TrajectoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidParams : TrajectoryError {
  using TrajectoryError::TrajectoryError;
};
struct NonuniformSampling : TrajectoryError {
  using TrajectoryError::TrajectoryError;
};
struct EmptyCandidateSet : TrajectoryError {
  using TrajectoryError::TrajectoryError;
};

struct OptimizationParams {
  double w_jerk = 0.1;
  double w_time = 0.1;
  double w_error = 1.0;
  double horizon = 5.0;  // s
  double dt = 0.2;       // s
  double a_max = 2.0;    // m/s^2
  double v_max = 57.6;   // m/s
  double kappa_max = 1.0;  // 1/m

  /// horizon/dt + 1; throws InvalidParams unless horizon/dt is integral.
  int sample_count() const;
  void validate() const;
};

enum class ManeuverKind { KeepSpeed, Yield, LeftChange, RightChange, Overtake };

const char* to_string(ManeuverKind kind);

struct Trajectory {
  std::vector<TrajectorySample> samples;  // t = 0, dt, ..., T
  ManeuverKind maneuver = ManeuverKind::KeepSpeed;
  double cost = 0.0;
  bool feasible = false;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
};

/// Terminal-speed offsets tried at a given stream level: level 0 uses
/// {v, v+1, v-1, v+2, v-2}; each further level appends +/-(level+2).
/// Negative terminal speeds are dropped.
std::vector<double> terminal_speed_grid(double v_desired, int level);

/// Sample one quartic-longitudinal / quintic-lateral pair on the dt grid.
Trajectory sample_polynomial_pair(const ReferencePath& path, const QuarticPoly& lon,
                                  const QuinticPoly& lat, const OptimizationParams& params);

/// One candidate per surviving terminal-speed grid entry; every candidate
/// targets (l_desired, 0, 0) laterally and zero terminal acceleration.
std::vector<Trajectory> generate_candidates(const ReferencePath& path, const FrenetState& init,
                                            double v_desired, double l_desired,
                                            const OptimizationParams& params, int level = 0);

/// Keeps candidates obeying all sample-wise bounds (total acceleration,
/// speed, curvature, non-negative longitudinal speed); survivors are marked
/// feasible.
std::vector<Trajectory> filter_feasible(std::vector<Trajectory> candidates,
                                        const OptimizationParams& params);

/// Jerk integral (left Riemann sum on the dt grid) + travel time + terminal
/// error terms.
double trajectory_cost(const Trajectory& traj, double v_desired, double l_desired,
                       const OptimizationParams& params);

/// Minimum-cost candidate; ties broken by earlier candidate order. Returns
/// nullopt on an empty set. The returned trajectory has its cost filled in.
std::optional<Trajectory> select_optimal(const std::vector<Trajectory>& candidates,
                                         double v_desired, double l_desired,
                                         const OptimizationParams& params);

}  // namespace mplan
