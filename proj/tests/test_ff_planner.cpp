#include "doctest.h"
#include "mplan/ff_planner.hpp"
#include "pddl_fixtures.hpp"

using namespace mplan::pddl;

namespace {
// Tiny hand-built tasks: atoms named p0..pN, unit costs unless stated.
GroundTask chain_task() {  // a -> b -> c
  GroundTask task;
  task.atom_names = {"(a)", "(b)", "(c)"};
  GroundAction ab;
  ab.name = "make_b";
  ab.pre_pos = {0};
  ab.add = {1};
  ab.cost = 1.0;
  GroundAction bc;
  bc.name = "make_c";
  bc.pre_pos = {1};
  bc.add = {2};
  bc.cost = 1.0;
  task.actions = {ab, bc};
  task.init.atoms = AtomSet(3);
  task.init.atoms.set(0);
  task.goal_pos = {2};
  return task;
}
}  // namespace

TEST_CASE("build_rpg: goal in the initial state needs a single layer") {
  auto task = chain_task();
  task.goal_pos = {0};
  const auto rpg = build_rpg(task, task.init);
  CHECK(rpg.goal_reached);
  CHECK(rpg.atom_layer[0] == 0);
}

TEST_CASE("build_rpg: chain atoms appear layer by layer") {
  const auto task = chain_task();
  const auto rpg = build_rpg(task, task.init);
  CHECK(rpg.goal_reached);
  CHECK(rpg.atom_layer[0] == 0);
  CHECK(rpg.atom_layer[1] == 1);
  CHECK(rpg.atom_layer[2] == 2);
  CHECK(rpg.action_layer[0] == 0);
  CHECK(rpg.action_layer[1] == 1);
}

TEST_CASE("build_rpg: fixpoint without the goal") {
  auto task = chain_task();
  task.atom_names.push_back("(d)");  // never added by any action
  task.init.atoms = AtomSet(4);
  task.init.atoms.set(0);
  task.goal_pos = {3};
  const auto rpg = build_rpg(task, task.init);
  CHECK(!rpg.goal_reached);
  CHECK(rpg.atom_layer[3] == -1);
}

TEST_CASE("hff: zero iff the goal is satisfied") {
  auto task = chain_task();
  CHECK(hff(task, task.init) > 0.0);
  State at_goal = task.init;
  at_goal.atoms.set(2);
  CHECK(hff(task, at_goal) == 0.0);
}

TEST_CASE("hff: single cost-5 achiever and the unreachable case") {
  GroundTask task;
  task.atom_names = {"(start)", "(goal)"};
  GroundAction move;
  move.name = "keep_speed";
  move.pre_pos = {0};
  move.add = {1};
  move.cost = 5.0;
  task.actions = {move};
  task.init.atoms = AtomSet(2);
  task.init.atoms.set(0);
  task.goal_pos = {1};
  CHECK(hff(task, task.init) == 5.0);

  State empty;
  empty.atoms = AtomSet(2);
  CHECK(hff(task, empty) == kInfiniteHeuristic);
}

TEST_CASE("extract_relaxed_plan: goal already present yields an empty plan") {
  auto task = chain_task();
  task.goal_pos = {0};
  const auto rpg = build_rpg(task, task.init);
  CHECK(extract_relaxed_plan(task, rpg).empty());
}

TEST_CASE("extract_relaxed_plan: shared achiever extracted once") {
  GroundTask task;
  task.atom_names = {"(p)", "(g1)", "(g2)"};
  GroundAction both;
  both.name = "make_both";
  both.pre_pos = {0};
  both.add = {1, 2};
  both.cost = 1.0;
  task.actions = {both};
  task.init.atoms = AtomSet(3);
  task.init.atoms.set(0);
  task.goal_pos = {1, 2};
  const auto rpg = build_rpg(task, task.init);
  const auto steps = extract_relaxed_plan(task, rpg);
  CHECK(steps.size() == 1);
  CHECK(hff(task, task.init) == 1.0);
}

TEST_CASE("extract_relaxed_plan: linear chain extracts all three actions") {
  GroundTask task;
  task.atom_names = {"(p0)", "(p1)", "(p2)", "(p3)"};
  for (int i = 0; i < 3; ++i) {
    GroundAction step;
    step.name = "s" + std::to_string(i);
    step.pre_pos = {i};
    step.add = {i + 1};
    step.cost = 1.0;
    task.actions.push_back(step);
  }
  task.init.atoms = AtomSet(4);
  task.init.atoms.set(0);
  task.goal_pos = {3};
  const auto rpg = build_rpg(task, task.init);
  CHECK(extract_relaxed_plan(task, rpg).size() == 3);

  // Asking for an unreachable goal is an error.
  task.goal_pos = {3};
  auto broken = task;
  broken.init.atoms = AtomSet(4);
  const auto broken_rpg = build_rpg(broken, broken.init);
  CHECK_THROWS_AS(extract_relaxed_plan(broken, broken_rpg), GoalNotInGraph);
}

TEST_CASE("extraction prefers the cheaper achiever") {
  GroundTask task;
  task.atom_names = {"(start)", "(goal)"};
  GroundAction cheap;
  cheap.name = "left_change";
  cheap.pre_pos = {0};
  cheap.add = {1};
  cheap.cost = 1.0;
  GroundAction expensive;
  expensive.name = "keep_speed";
  expensive.pre_pos = {0};
  expensive.add = {1};
  expensive.cost = 5.0;
  task.actions = {expensive, cheap};  // grounding order: expensive first
  task.init.atoms = AtomSet(2);
  task.init.atoms.set(0);
  task.goal_pos = {1};
  CHECK(hff(task, task.init) == 1.0);
}

TEST_CASE("search: goal holding initially returns the empty plan") {
  auto task = chain_task();
  task.goal_pos = {0};
  const auto result = search(task);
  REQUIRE(result.status == SearchResult::Status::Solved);
  CHECK(result.plan.steps.empty());
  CHECK(result.plan.cost == 0.0);
}

TEST_CASE("search: picks the cost-1 maneuver over the cost-5 one") {
  GroundTask task;
  task.atom_names = {"(start)", "(goal)"};
  GroundAction cheap;
  cheap.name = "left_change";
  cheap.pre_pos = {0};
  cheap.add = {1};
  cheap.cost = 1.0;
  GroundAction expensive;
  expensive.name = "keep_speed";
  expensive.pre_pos = {0};
  expensive.add = {1};
  expensive.cost = 5.0;
  task.actions = {expensive, cheap};
  task.init.atoms = AtomSet(2);
  task.init.atoms.set(0);
  task.goal_pos = {1};

  SearchOptions options;
  options.weight = 1.0;
  const auto result = search(task, options);
  REQUIRE(result.status == SearchResult::Status::Solved);
  REQUIRE(result.plan.steps.size() == 1);
  CHECK(result.plan.steps[0].name == "left_change");
}

TEST_CASE("search: unsolvable root reports Unsolvable") {
  auto task = chain_task();
  task.init.atoms = AtomSet(3);  // nothing true, nothing applicable
  const auto result = search(task);
  CHECK(result.status == SearchResult::Status::Unsolvable);
}

TEST_CASE("search: budget exhaustion is reported") {
  // Solvable chain but a zero budget stops the search immediately.
  const auto task = chain_task();
  SearchOptions options;
  options.node_budget = 0;
  const auto result = search(task, options);
  CHECK(result.status == SearchResult::Status::BudgetExhausted);
}

TEST_CASE("property: hff infinity agrees with the delete-free fixpoint oracle") {
  oracles::Rng rng(314);
  int unreachable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto task = fixtures::random_task(rng);
    const bool reachable = fixtures::delete_free_reachable(task);
    const double h = hff(task, task.init);
    CHECK((h == kInfiniteHeuristic) == !reachable);
    if (!reachable) ++unreachable;
    // hff == 0 iff the goal holds (positive goals by construction).
    CHECK((h == 0.0) == task.goal_satisfied(task.init));
  }
  CHECK(unreachable > 0);  // the draw covers both sides
}

TEST_CASE("property: w=1 unit-cost plans are length-minimal vs BFS") {
  oracles::Rng rng(1337);
  SearchOptions options;
  options.weight = 1.0;
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto task = fixtures::random_task(rng, 10, 7);
    const int optimal = fixtures::bfs_optimal_length(task);
    const auto result = search(task, options);
    if (optimal < 0) {
      CHECK(result.status == SearchResult::Status::Unsolvable);
      continue;
    }
    REQUIRE(result.status == SearchResult::Status::Solved);
    CHECK(static_cast<int>(result.plan.steps.size()) == optimal);
    CHECK(validate_plan(task, result.plan).ok);
    ++solved;
  }
  CHECK(solved > 10);
}

TEST_CASE("property: returned plans validate and search is deterministic") {
  oracles::Rng rng(777);
  for (int trial = 0; trial < 60; ++trial) {
    const auto task = fixtures::random_task(rng);
    const auto first = search(task);
    if (first.status != SearchResult::Status::Solved) continue;
    CHECK(validate_plan(task, first.plan).ok);
    const auto second = search(task);
    REQUIRE(second.status == SearchResult::Status::Solved);
    CHECK(plan_to_text(first.plan) == plan_to_text(second.plan));
  }
}

TEST_CASE("property: RPG layer count bounded by the atom count") {
  oracles::Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto task = fixtures::random_task(rng);
    const auto rpg = build_rpg(task, task.init);
    CHECK(rpg.layers <= static_cast<int>(task.atom_names.size()) + 1);
  }
}
