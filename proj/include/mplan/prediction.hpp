#pragma once

#include <array>
#include <vector>

#include "mplan/geometry.hpp"

namespace mplan {

struct LaneMap;  // world.hpp

struct PredictionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyHistory : PredictionError {
  using PredictionError::PredictionError;
};
struct EmptySet : PredictionError {
  using PredictionError::PredictionError;
};

struct ObstacleHistory {
  int id = 0;
  double length = 4.5;  // footprint, m
  double width = 1.8;   // footprint, m
  std::vector<std::pair<double, CartesianState>> states;  // (t, state), t increasing
};

struct PredictedTrajectory {
  std::vector<TrajectorySample> samples;  // uniform at dt over the horizon
  double probability = 0.0;
};

struct PredictionSet {
  int obstacle_id = 0;
  std::vector<PredictedTrajectory> trajectories;  // sorted by descending probability
};

/// Baseline two-hypothesis predictor: constant velocity (p=0.6) and constant
/// acceleration estimated from the last two history states, clamped to
/// +/-4 m/s^2 with the speed floored at 0 (p=0.4). An obstacle within 1.5 m
/// and 30 degrees of a lane centerline follows the lane (and its junction
/// continuation) instead of a straight line.
PredictionSet predict(const ObstacleHistory& history, const LaneMap& map, double horizon,
                      double dt);

/// The two highest-probability hypotheses in stored order; a single
/// hypothesis is duplicated.
std::array<PredictedTrajectory, 2> select_top2(const PredictionSet& set);

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<PredictionSet> predict_all(const std::vector<ObstacleHistory>& histories,
                                                 const LaneMap& map, double horizon,
                                                 double dt) = 0;
};

class BaselinePredictor : public Predictor {
 public:
  std::vector<PredictionSet> predict_all(const std::vector<ObstacleHistory>& histories,
                                         const LaneMap& map, double horizon, double dt) override;
};

}  // namespace mplan
