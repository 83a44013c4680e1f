#pragma once

#include <string>
#include <vector>

#include "mplan/prediction.hpp"
#include "mplan/world.hpp"

namespace mplan {

// One JSON object per planning cycle: the request carries obstacle histories,
// the response carries K trajectories with probabilities per obstacle. This
// is the seam where an external predictor process can replace the baseline.

struct PredictionRequest {
  int cycle = 0;
  double time = 0.0;
  double horizon = 5.0;
  double dt = 0.2;
  std::vector<ObstacleHistory> obstacles;
};

std::string prediction_request_to_json(const PredictionRequest& request, int indent = 2);
PredictionRequest prediction_request_from_json(const std::string& text);

std::string predictions_to_json(const std::vector<PredictionSet>& sets, int indent = 2);
/// Validates probabilities, sample spacing and sorts each set by descending
/// probability. Throws PredictionError on malformed content.
std::vector<PredictionSet> predictions_from_json(const std::string& text, double dt);

/// Serves predictions from <dir>/response_<cycle>.json, writing
/// <dir>/request_<cycle>.json beforehand so an external process (or a
/// pre-staged directory) can act as the predictor.
class JsonFilePredictor : public Predictor {
 public:
  explicit JsonFilePredictor(std::string dir, bool write_requests = true);
  std::vector<PredictionSet> predict_all(const std::vector<ObstacleHistory>& histories,
                                         const LaneMap& map, double horizon, double dt) override;

 private:
  std::string dir_;
  bool write_requests_;
  int cycle_ = 0;
};

/// Wraps another predictor and dumps each cycle's request/response pair, in
/// exactly the format JsonFilePredictor consumes.
class RecordingPredictor : public Predictor {
 public:
  RecordingPredictor(Predictor& inner, std::string dir);
  std::vector<PredictionSet> predict_all(const std::vector<ObstacleHistory>& histories,
                                         const LaneMap& map, double horizon, double dt) override;

 private:
  Predictor& inner_;
  std::string dir_;
  int cycle_ = 0;
};

}  // namespace mplan
