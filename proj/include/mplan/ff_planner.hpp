#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mplan/pddl.hpp"

namespace mplan::pddl {

struct GoalNotInGraph : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Layered delete-free reachability: first-appearance layers per atom and per
/// action. Negative preconditions and goals are ignored under the relaxation.
struct RelaxedPlanningGraph {
  std::vector<int> atom_layer;    // -1 when unreached
  std::vector<int> action_layer;  // -1 when never applicable
  int layers = 0;
  bool goal_reached = false;
};

RelaxedPlanningGraph build_rpg(const GroundTask& task, const State& state);

/// One (layer, action) selection per achieved subgoal.
struct RelaxedPlanStep {
  int layer = 0;
  int action = 0;  // index into task.actions
};

/// Backward extraction from the goal layer: for each open subgoal pick the
/// achiever with minimum cost, then earliest layer, then grounding order.
/// Throws GoalNotInGraph when a goal atom never appears.
std::vector<RelaxedPlanStep> extract_relaxed_plan(const GroundTask& task,
                                                  const RelaxedPlanningGraph& rpg);

constexpr double kInfiniteHeuristic = std::numeric_limits<double>::infinity();

/// Sum of the extracted relaxed plan's action costs; 0 iff the (positive)
/// goal already holds; infinity when no relaxed plan exists.
double hff(const GroundTask& task, const State& state);

struct SearchResult {
  enum class Status { Solved, Unsolvable, BudgetExhausted } status = Status::Unsolvable;
  Plan plan;
  std::int64_t expanded = 0;
};

struct SearchOptions {
  double weight = 1.5;                  // f = g + weight * h
  std::int64_t node_budget = 1000000;   // expansions
};

/// Weighted A* over the propositional state space. Duplicate atom sets keep
/// their lowest g; numeric fluents ride along for cost/time bookkeeping but
/// do not enter state identity. Returned plans always validate.
SearchResult search(const GroundTask& task, const SearchOptions& options = {});

}  // namespace mplan::pddl
