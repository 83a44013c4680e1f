// Command-line entry points: single-snapshot planning, closed-loop
// simulation, batch experiments and plot-data export.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mplan/prediction_io.hpp"
#include "mplan/simulation.hpp"
#include "mplan/streams.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int log_level() {  // 0 error, 1 warn, 2 info, 3 debug
  const char* env = std::getenv("MANEUVER_PLANNER_LOG");
  if (!env) return 2;
  const std::string value = env;
  if (value == "error") return 0;
  if (value == "warn") return 1;
  if (value == "debug") return 3;
  return 2;
}

void info(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[maneuver_planner] " << msg << "\n";
}

struct RunConfig {
  double weight = 1.5;
  int max_level = 3;
  double margin = 0.2;
  mplan::OpmThresholds opm;
  std::string format = "both";  // json | csv | both
  bool disable_planner = false;

  mplan::PlannerConfig planner() const {
    mplan::PlannerConfig config;
    config.params.search_weight = weight;
    config.params.max_level = max_level;
    config.params.collision_margin = margin;
    config.opm = opm;
    config.planner_enabled = !disable_planner;
    return config;
  }

  json to_json() const {
    return {{"weight", weight},
            {"max_level", max_level},
            {"margin", margin},
            {"format", format},
            {"disable_planner", disable_planner},
            {"opm_thresholds",
             {{"comfortable_accel", opm.comfortable_accel},
              {"comfortable_jerk", opm.comfortable_jerk},
              {"normal_accel", opm.normal_accel},
              {"normal_jerk", opm.normal_jerk}}}};
  }
};

void load_opm_thresholds(const std::string& path, mplan::OpmThresholds& opm) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--opm-thresholds", "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw CLI::ValidationError("--opm-thresholds", "invalid JSON");
  opm.comfortable_accel = j.value("comfortable_accel", opm.comfortable_accel);
  opm.comfortable_jerk = j.value("comfortable_jerk", opm.comfortable_jerk);
  opm.normal_accel = j.value("normal_accel", opm.normal_accel);
  opm.normal_jerk = j.value("normal_jerk", opm.normal_jerk);
}

// Precedence: command-line flag > config file > built-in default. The file is
// applied first, then CLI11 overwrites whatever was passed explicitly.
void apply_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw CLI::ValidationError("--config", "invalid JSON");
  config.weight = j.value("weight", config.weight);
  config.max_level = j.value("max_level", config.max_level);
  config.margin = j.value("margin", config.margin);
  config.format = j.value("format", config.format);
  config.disable_planner = j.value("disable_planner", config.disable_planner);
  if (j.contains("opm_thresholds")) {
    const auto& jo = j["opm_thresholds"];
    config.opm.comfortable_accel = jo.value("comfortable_accel", config.opm.comfortable_accel);
    config.opm.comfortable_jerk = jo.value("comfortable_jerk", config.opm.comfortable_jerk);
    config.opm.normal_accel = jo.value("normal_accel", config.opm.normal_accel);
    config.opm.normal_jerk = jo.value("normal_jerk", config.opm.normal_jerk);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void echo_config(const fs::path& out_dir, const RunConfig& config) {
  write_file(out_dir / "config.json", config.to_json().dump(2) + "\n");
}

std::string trajectories_json(const mplan::StreamPlanResult& result) {
  json out = json::array();
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    const auto& traj = result.trajectories[i];
    json samples = json::array();
    for (const auto& s : traj.samples) {
      samples.push_back({{"t", s.t},
                         {"x", s.x},
                         {"y", s.y},
                         {"theta", s.theta},
                         {"v", s.v},
                         {"a", s.a},
                         {"kappa", s.kappa},
                         {"s", s.s},
                         {"s_d", s.s_d},
                         {"s_dd", s.s_dd},
                         {"s_ddd", s.s_ddd},
                         {"l", s.l},
                         {"l_d", s.l_d},
                         {"l_dd", s.l_dd},
                         {"l_ddd", s.l_ddd}});
    }
    out.push_back({{"action", result.plan.steps[i].signature()},
                   {"maneuver", mplan::to_string(traj.maneuver)},
                   {"cost", traj.cost},
                   {"samples", samples}});
  }
  return out.dump(2);
}

int cmd_plan(const std::string& scenario_path, double t, const fs::path& out_dir,
             const RunConfig& config, const std::string& predictions_dir) {
  const auto scenario = mplan::load_scenario(scenario_path);
  const auto planner_config = config.planner();
  const auto histories = mplan::scripted_histories(scenario, t, planner_config);
  const auto snapshot =
      mplan::build_snapshot(scenario, scenario.ego.initial, histories, planner_config);
  const auto base = mplan::make_base_problem(snapshot, planner_config.params);

  std::unique_ptr<mplan::Predictor> predictor;
  if (predictions_dir.empty()) {
    predictor = std::make_unique<mplan::BaselinePredictor>();
  } else {
    predictor = std::make_unique<mplan::JsonFilePredictor>(predictions_dir);
  }
  const auto result =
      mplan::stream_plan(snapshot, base, planner_config.params, *predictor);

  echo_config(out_dir, config);
  write_file(out_dir / "problem.pddl", mplan::pddl::print_problem(result.augmented_problem));
  if (result.found) {
    write_file(out_dir / "plan.txt", mplan::pddl::plan_to_text(result.plan));
    write_file(out_dir / "trajectories.json", trajectories_json(result) + "\n");
    info("plan found at level " + std::to_string(result.level) + ": " +
         result.plan.steps[0].signature());
    return 0;
  }
  write_file(out_dir / "plan.txt", "; no plan\n");
  info("no plan after level " + std::to_string(config.max_level));
  return 2;
}

int outcome_exit_code(mplan::Outcome outcome) {
  switch (outcome) {
    case mplan::Outcome::GoalReached: return 0;
    case mplan::Outcome::Collision: return 3;
    case mplan::Outcome::Timeout:
    case mplan::Outcome::NoPlanDeadlock: return 4;
  }
  return 1;
}

void write_trace_outputs(const fs::path& out_dir, const std::string& stem,
                         const mplan::SimTrace& trace, const std::string& format) {
  if (format == "json" || format == "both") {
    write_file(out_dir / (stem + ".json"), mplan::trace_to_json_text(trace) + "\n");
  }
  if (format == "csv" || format == "both") {
    write_file(out_dir / (stem + ".csv"), mplan::trace_to_csv(trace));
  }
}

int cmd_simulate(const std::string& scenario_path, const fs::path& out_dir,
                 const RunConfig& config, const std::string& predictions_dir) {
  const auto scenario = mplan::load_scenario(scenario_path);
  const auto planner_config = config.planner();

  std::unique_ptr<mplan::Predictor> predictor;
  if (predictions_dir.empty()) {
    predictor = std::make_unique<mplan::BaselinePredictor>();
  } else {
    predictor = std::make_unique<mplan::JsonFilePredictor>(predictions_dir);
  }
  const auto trace = mplan::run_closed_loop(scenario, planner_config, *predictor);

  echo_config(out_dir, config);
  write_trace_outputs(out_dir, "trace", trace, config.format);
  if (trace.steps.size() >= 2) {
    const auto opm = mplan::evaluate_opm(trace, config.opm);
    const json report = {{"max_lat_accel", opm.max_lat_accel},
                         {"max_lon_accel", opm.max_lon_accel},
                         {"max_lat_jerk", opm.max_lat_jerk},
                         {"max_lon_jerk", opm.max_lon_jerk},
                         {"classification", mplan::to_string(opm.classification)}};
    write_file(out_dir / "opm.json", report.dump(2) + "\n");
  }
  info(std::string("outcome: ") + mplan::to_string(trace.outcome) + " after " +
       std::to_string(trace.steps.size()) + " steps");
  return outcome_exit_code(trace.outcome);
}

int cmd_batch(const std::string& family_name, int n, std::uint64_t seed,
              const fs::path& out_dir, const RunConfig& config) {
  const auto kind = mplan::family_from_string(family_name);
  if (!kind) throw CLI::ValidationError("--family", "unknown family " + family_name);
  const auto family = mplan::ScenarioFamily::make(*kind);
  const auto result = mplan::run_batch(family, n, seed, config.planner());

  echo_config(out_dir, config);
  write_file(out_dir / "summary.json",
             mplan::batch_summary_to_json_text(result.summary) + "\n");
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "run_%03zu", i);
    write_trace_outputs(out_dir / "traces", stem, result.traces[i], config.format);
  }
  info("batch done: " + std::to_string(result.summary.goal_reached) + "/" +
       std::to_string(n) + " reached the goal");
  return 0;
}

int cmd_export_plots(const std::string& trace_path, const fs::path& out_dir) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open " + trace_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto trace = mplan::trace_from_json_text(ss.str());

  std::ostringstream velocity, accel, jerk, decisions;
  velocity << "t,v,decision\n";
  accel << "t,a_lon,a_lat,decision\n";
  jerk << "t,jerk_lon,jerk_lat,decision\n";
  decisions << "t,decision,plan_found,planner_ms\n";
  velocity.precision(12);
  accel.precision(12);
  jerk.precision(12);
  decisions.precision(12);
  for (const auto& step : trace.steps) {
    velocity << step.t << ',' << step.ego.v << ',' << step.decision << '\n';
    accel << step.t << ',' << step.a_lon << ',' << step.a_lat << ',' << step.decision << '\n';
    jerk << step.t << ',' << step.jerk_lon << ',' << step.jerk_lat << ',' << step.decision
         << '\n';
    decisions << step.t << ',' << step.decision << ',' << (step.plan_found ? 1 : 0) << ','
              << step.planner_ms << '\n';
  }
  write_file(out_dir / "velocity.csv", velocity.str());
  write_file(out_dir / "acceleration.csv", accel.str());
  write_file(out_dir / "jerk.csv", jerk.str());
  write_file(out_dir / "decisions.csv", decisions.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maneuver decision-making and motion planning"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_file;
  std::string opm_file;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON config file (flags win over it)");
    cmd->add_option("--weight", config.weight, "search weight (f = g + w*h)");
    cmd->add_option("--max-level", config.max_level, "maximum stream level");
    cmd->add_option("--margin", config.margin, "collision margin per side [m]");
    cmd->add_option("--opm-thresholds", opm_file, "OPM thresholds JSON file");
    cmd->add_option("--format", config.format, "output format: json|csv|both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
  };

  std::string scenario_path, out_dir = "out", trace_path, family_name, predictions_dir;
  double plan_time = 0.0;
  int batch_n = 20;
  std::uint64_t batch_seed = 1;

  auto* plan = app.add_subcommand("plan", "plan one snapshot of a scenario");
  plan->add_option("--scenario", scenario_path, "scenario JSON")->required();
  plan->add_option("--t", plan_time, "obstacle-script time of the snapshot [s]");
  plan->add_option("--out", out_dir, "output directory");
  plan->add_option("--predictions", predictions_dir, "prediction response directory");
  add_common(plan);

  auto* simulate = app.add_subcommand("simulate", "run the closed loop on a scenario");
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--predictions", predictions_dir, "prediction response directory");
  simulate->add_flag("--disable-planner", config.disable_planner,
                     "execute constant-velocity motion instead of planning");
  add_common(simulate);

  auto* batch = app.add_subcommand("batch", "run a family of generated scenarios");
  batch->add_option("--family", family_name, "left_turn|go_straight|overtake")->required();
  batch->add_option("--n", batch_n, "number of runs");
  batch->add_option("--seed", batch_seed, "base seed");
  batch->add_option("--out", out_dir, "output directory");
  add_common(batch);

  auto* plots = app.add_subcommand("export-plots", "per-channel CSV series from a trace");
  plots->add_option("--trace", trace_path, "trace JSON file")->required();
  plots->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    // Config file first, then re-parse so explicit flags take precedence.
    if (!config_file.empty()) {
      RunConfig file_config;
      apply_config_file(config_file, file_config);
      const bool keep_disable = config.disable_planner;
      // Start from file values, then let the second parse overwrite.
      std::swap(config, file_config);
      config.disable_planner = config.disable_planner || keep_disable;
      app.clear();
      CLI11_PARSE(app, argc, argv);
    }
    if (!opm_file.empty()) load_opm_thresholds(opm_file, config.opm);

    if (app.got_subcommand(plan)) {
      return cmd_plan(scenario_path, plan_time, out_dir, config, predictions_dir);
    }
    if (app.got_subcommand(simulate)) {
      return cmd_simulate(scenario_path, out_dir, config, predictions_dir);
    }
    if (app.got_subcommand(batch)) {
      return cmd_batch(family_name, batch_n, batch_seed, out_dir, config);
    }
    if (app.got_subcommand(plots)) {
      return cmd_export_plots(trace_path, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
