#include "mplan/prediction_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mplan {

using nlohmann::json;

namespace {
json state_to_json(double t, const CartesianState& s) {
  return {{"t", t}, {"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}, {"a", s.a}};
}

std::string cycle_file(const std::string& dir, const char* kind, int cycle) {
  return dir + "/" + kind + "_" + std::to_string(cycle) + ".json";
}
}  // namespace

std::string prediction_request_to_json(const PredictionRequest& request, int indent) {
  json obstacles = json::array();
  for (const auto& history : request.obstacles) {
    json states = json::array();
    for (const auto& [t, state] : history.states) states.push_back(state_to_json(t, state));
    obstacles.push_back({{"id", history.id},
                         {"length", history.length},
                         {"width", history.width},
                         {"history", states}});
  }
  const json j = {{"cycle", request.cycle},
                  {"time", request.time},
                  {"horizon", request.horizon},
                  {"dt", request.dt},
                  {"obstacles", obstacles}};
  return j.dump(indent);
}

PredictionRequest prediction_request_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PredictionError(std::string("invalid request JSON: ") + e.what());
  }
  PredictionRequest request;
  request.cycle = j.value("cycle", 0);
  request.time = j.value("time", 0.0);
  request.horizon = j.at("horizon").get<double>();
  request.dt = j.at("dt").get<double>();
  for (const auto& jo : j.value("obstacles", json::array())) {
    ObstacleHistory history;
    history.id = jo.at("id").get<int>();
    history.length = jo.at("length").get<double>();
    history.width = jo.at("width").get<double>();
    for (const auto& js : jo.at("history")) {
      CartesianState state;
      state.x = js.at("x").get<double>();
      state.y = js.at("y").get<double>();
      state.theta = js.at("theta").get<double>();
      state.v = js.at("v").get<double>();
      state.a = js.value("a", 0.0);
      history.states.emplace_back(js.at("t").get<double>(), state);
    }
    request.obstacles.push_back(std::move(history));
  }
  return request;
}

std::string predictions_to_json(const std::vector<PredictionSet>& sets, int indent) {
  json predictions = json::array();
  for (const auto& set : sets) {
    json trajectories = json::array();
    for (const auto& traj : set.trajectories) {
      json samples = json::array();
      for (const auto& s : traj.samples) {
        samples.push_back(
            {{"t", s.t}, {"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}, {"a", s.a}});
      }
      trajectories.push_back({{"probability", traj.probability}, {"samples", samples}});
    }
    predictions.push_back({{"id", set.obstacle_id}, {"trajectories", trajectories}});
  }
  return json{{"predictions", predictions}}.dump(indent);
}

std::vector<PredictionSet> predictions_from_json(const std::string& text, double dt) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PredictionError(std::string("invalid prediction JSON: ") + e.what());
  }
  std::vector<PredictionSet> sets;
  for (const auto& jp : j.at("predictions")) {
    PredictionSet set;
    set.obstacle_id = jp.at("id").get<int>();
    double prob_sum = 0.0;
    for (const auto& jt : jp.at("trajectories")) {
      PredictedTrajectory traj;
      traj.probability = jt.at("probability").get<double>();
      if (traj.probability < 0.0 || traj.probability > 1.0) {
        throw PredictionError("probability outside [0, 1]");
      }
      prob_sum += traj.probability;
      for (const auto& js : jt.at("samples")) {
        TrajectorySample sample;
        sample.t = js.at("t").get<double>();
        sample.x = js.at("x").get<double>();
        sample.y = js.at("y").get<double>();
        sample.theta = js.at("theta").get<double>();
        sample.v = js.value("v", 0.0);
        sample.a = js.value("a", 0.0);
        sample.s_d = sample.v;
        sample.s_dd = sample.a;
        traj.samples.push_back(sample);
      }
      if (traj.samples.empty()) throw PredictionError("empty prediction trajectory");
      for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        if (std::fabs(traj.samples[k + 1].t - traj.samples[k].t - dt) > 1e-9) {
          throw PredictionError("prediction samples not uniform at dt");
        }
      }
      set.trajectories.push_back(std::move(traj));
    }
    if (set.trajectories.empty()) throw PredictionError("prediction set without trajectories");
    if (prob_sum > 1.0 + 1e-6) throw PredictionError("probabilities sum to more than 1");
    std::stable_sort(set.trajectories.begin(), set.trajectories.end(),
                     [](const auto& a, const auto& b) { return a.probability > b.probability; });
    sets.push_back(std::move(set));
  }
  return sets;
}

JsonFilePredictor::JsonFilePredictor(std::string dir, bool write_requests)
    : dir_(std::move(dir)), write_requests_(write_requests) {}

std::vector<PredictionSet> JsonFilePredictor::predict_all(
    const std::vector<ObstacleHistory>& histories, const LaneMap& map, double horizon,
    double dt) {
  (void)map;
  const int cycle = cycle_++;
  if (write_requests_) {
    PredictionRequest request;
    request.cycle = cycle;
    request.time = histories.empty() || histories[0].states.empty()
                       ? 0.0
                       : histories[0].states.back().first;
    request.horizon = horizon;
    request.dt = dt;
    request.obstacles = histories;
    std::ofstream out(cycle_file(dir_, "request", cycle));
    out << prediction_request_to_json(request);
  }
  std::ifstream in(cycle_file(dir_, "response", cycle));
  if (!in) {
    throw PredictionError("missing prediction response for cycle " + std::to_string(cycle));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  auto sets = predictions_from_json(ss.str(), dt);
  for (const auto& history : histories) {
    const bool covered = std::any_of(sets.begin(), sets.end(), [&](const PredictionSet& s) {
      return s.obstacle_id == history.id;
    });
    if (!covered) {
      throw PredictionError("prediction response misses obstacle " +
                            std::to_string(history.id));
    }
  }
  return sets;
}

RecordingPredictor::RecordingPredictor(Predictor& inner, std::string dir)
    : inner_(inner), dir_(std::move(dir)) {}

std::vector<PredictionSet> RecordingPredictor::predict_all(
    const std::vector<ObstacleHistory>& histories, const LaneMap& map, double horizon,
    double dt) {
  const int cycle = cycle_++;
  PredictionRequest request;
  request.cycle = cycle;
  request.time =
      histories.empty() || histories[0].states.empty() ? 0.0 : histories[0].states.back().first;
  request.horizon = horizon;
  request.dt = dt;
  request.obstacles = histories;
  {
    std::ofstream out(cycle_file(dir_, "request", cycle));
    out << prediction_request_to_json(request);
  }
  auto sets = inner_.predict_all(histories, map, horizon, dt);
  {
    std::ofstream out(cycle_file(dir_, "response", cycle));
    out << predictions_to_json(sets);
  }
  return sets;
}

}  // namespace mplan
