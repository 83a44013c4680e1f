#include "mplan/ff_planner.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace mplan::pddl {

RelaxedPlanningGraph build_rpg(const GroundTask& task, const State& state) {
  const int num_atoms = static_cast<int>(task.atom_names.size());
  const int num_actions = static_cast<int>(task.actions.size());

  RelaxedPlanningGraph rpg;
  rpg.atom_layer.assign(num_atoms, -1);
  rpg.action_layer.assign(num_actions, -1);
  for (int i = 0; i < num_atoms; ++i) {
    if (state.atoms.test(i)) rpg.atom_layer[i] = 0;
  }

  auto goal_present = [&] {
    for (const int id : task.goal_pos) {
      if (rpg.atom_layer[id] < 0) return false;
    }
    return true;
  };

  int layer = 0;
  rpg.goal_reached = goal_present();
  while (!rpg.goal_reached) {
    bool grew = false;
    for (int ai = 0; ai < num_actions; ++ai) {
      if (rpg.action_layer[ai] >= 0) continue;
      const auto& action = task.actions[ai];
      bool ready = true;
      for (const int id : action.pre_pos) {
        if (rpg.atom_layer[id] < 0 || rpg.atom_layer[id] > layer) {
          ready = false;
          break;
        }
      }
      if (!ready) continue;
      rpg.action_layer[ai] = layer;
      for (const int id : action.add) {
        if (rpg.atom_layer[id] < 0) {
          rpg.atom_layer[id] = layer + 1;
          grew = true;
        }
      }
    }
    if (!grew) break;  // fixpoint
    ++layer;
    rpg.goal_reached = goal_present();
  }
  rpg.layers = layer + 1;
  return rpg;
}

std::vector<RelaxedPlanStep> extract_relaxed_plan(const GroundTask& task,
                                                  const RelaxedPlanningGraph& rpg) {
  for (const int id : task.goal_pos) {
    if (rpg.atom_layer[id] < 0) {
      throw GoalNotInGraph("goal atom " + task.atom_names[id] + " unreachable");
    }
  }

  int max_layer = 0;
  for (const int id : task.goal_pos) max_layer = std::max(max_layer, rpg.atom_layer[id]);

  // goals[l] = atoms that must hold at layer l; achieved[l] marks atoms made
  // true at l by an already selected action.
  std::vector<std::vector<int>> goals(max_layer + 1);
  std::vector<std::vector<char>> achieved(max_layer + 1,
                                          std::vector<char>(task.atom_names.size(), 0));
  for (const int id : task.goal_pos) {
    if (rpg.atom_layer[id] > 0) goals[rpg.atom_layer[id]].push_back(id);
  }

  std::vector<RelaxedPlanStep> steps;
  for (int layer = max_layer; layer >= 1; --layer) {
    // The goal list may grow while processing this layer (same-layer
    // preconditions cannot occur: achiever preconditions live strictly
    // below), so index-based iteration is safe.
    for (std::size_t gi = 0; gi < goals[layer].size(); ++gi) {
      const int goal_atom = goals[layer][gi];
      if (achieved[layer][goal_atom]) continue;

      int best = -1;
      for (int ai = 0; ai < static_cast<int>(task.actions.size()); ++ai) {
        if (rpg.action_layer[ai] < 0 || rpg.action_layer[ai] > layer - 1) continue;
        const auto& action = task.actions[ai];
        if (std::find(action.add.begin(), action.add.end(), goal_atom) == action.add.end()) {
          continue;
        }
        if (best < 0 || action.cost < task.actions[best].cost ||
            (action.cost == task.actions[best].cost &&
             rpg.action_layer[ai] < rpg.action_layer[best])) {
          best = ai;  // cost, then earliest layer, then grounding order
        }
      }
      if (best < 0) {
        throw GoalNotInGraph("no achiever for " + task.atom_names[goal_atom]);
      }
      steps.push_back({layer, best});
      for (const int id : task.actions[best].add) achieved[layer][id] = 1;
      for (const int id : task.actions[best].pre_pos) {
        const int at = rpg.atom_layer[id];
        if (at > 0 && !achieved[at][id] &&
            std::find(goals[at].begin(), goals[at].end(), id) == goals[at].end()) {
          goals[at].push_back(id);
        }
      }
    }
  }
  return steps;
}

double hff(const GroundTask& task, const State& state) {
  const auto rpg = build_rpg(task, state);
  if (!rpg.goal_reached) return kInfiniteHeuristic;
  const auto steps = extract_relaxed_plan(task, rpg);
  double total = 0.0;
  for (const auto& step : steps) total += task.actions[step.action].cost;
  return total;
}

namespace {
struct Node {
  State state;
  double g = 0.0;
  int parent = -1;
  int action = -1;
};

struct OpenEntry {
  double f = 0.0;
  std::uint64_t seq = 0;  // FIFO tie-break
  int node = -1;

  bool operator>(const OpenEntry& other) const {
    if (f != other.f) return f > other.f;
    return seq > other.seq;
  }
};

struct AtomSetHash {
  std::size_t operator()(const AtomSet& s) const { return s.hash(); }
};
}  // namespace

SearchResult search(const GroundTask& task, const SearchOptions& options) {
  SearchResult result;
  std::vector<Node> nodes;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  std::unordered_map<AtomSet, double, AtomSetHash> best_g;
  std::uint64_t seq = 0;

  const double h0 = hff(task, task.init);
  if (h0 == kInfiniteHeuristic && !task.goal_satisfied(task.init)) {
    result.status = SearchResult::Status::Unsolvable;
    return result;
  }
  nodes.push_back({task.init, 0.0, -1, -1});
  best_g.emplace(task.init.atoms, 0.0);
  open.push({options.weight * h0, seq++, 0});

  while (!open.empty()) {
    const OpenEntry entry = open.top();
    open.pop();
    const Node node = nodes[entry.node];  // copy: nodes may reallocate below
    const auto known = best_g.find(node.state.atoms);
    if (known != best_g.end() && node.g > known->second) continue;  // stale

    if (task.goal_satisfied(node.state)) {
      Plan plan;
      for (int idx = entry.node; nodes[idx].action >= 0; idx = nodes[idx].parent) {
        plan.steps.push_back(task.actions[nodes[idx].action]);
      }
      std::reverse(plan.steps.begin(), plan.steps.end());
      if (task.metric_fluent >= 0) {
        plan.cost = node.state.fluents[task.metric_fluent] -
                    task.init.fluents[task.metric_fluent];
      } else {
        plan.cost = node.g;
      }
      const auto validation = validate_plan(task, plan);
      if (!validation.ok) {
        throw std::logic_error("search produced an invalid plan: " + validation.reason);
      }
      result.status = SearchResult::Status::Solved;
      result.plan = std::move(plan);
      return result;
    }

    if (++result.expanded > options.node_budget) {
      result.status = SearchResult::Status::BudgetExhausted;
      return result;
    }

    for (int ai = 0; ai < static_cast<int>(task.actions.size()); ++ai) {
      const auto& action = task.actions[ai];
      if (!applicable(node.state, action)) continue;
      State child = apply(node.state, action);
      const double g = node.g + action.cost;
      const auto it = best_g.find(child.atoms);
      if (it != best_g.end() && it->second <= g) continue;
      const double h = hff(task, child);
      if (h == kInfiniteHeuristic) continue;  // dead end under the relaxation
      if (it != best_g.end()) {
        it->second = g;
      } else {
        best_g.emplace(child.atoms, g);
      }
      nodes.push_back({std::move(child), g, entry.node, ai});
      open.push({g + options.weight * h, seq++, static_cast<int>(nodes.size()) - 1});
    }
  }

  result.status = SearchResult::Status::Unsolvable;
  return result;
}

}  // namespace mplan::pddl
