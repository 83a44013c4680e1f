#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mplan::pddl {

// Supported PDDL2.1 subset: typing, negative preconditions, forall
// preconditions, numeric fluents with increase effects, minimize metric.
// Everything else fails with UnsupportedFeature.

struct SourcePos {
  int line = 1;
  int col = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& msg)
      : std::runtime_error("line " + std::to_string(pos.line) + ":" + std::to_string(pos.col) +
                           ": " + msg),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

class UnsupportedFeature : public std::runtime_error {
 public:
  explicit UnsupportedFeature(const std::string& construct)
      : std::runtime_error("unsupported PDDL construct: " + construct), construct_(construct) {}
  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

struct SemanticError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TypeMismatch : SemanticError {
  using SemanticError::SemanticError;
};
struct NotApplicable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TypedVar {
  std::string name;  // includes the leading '?'
  std::string type = "object";
  friend bool operator==(const TypedVar&, const TypedVar&) = default;
};

struct Atom {
  std::string pred;
  std::vector<std::string> args;  // variables or object names
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Literal {
  Atom atom;
  bool negated = false;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Quantified {  // (forall (?v - type) body)
  TypedVar var;
  std::vector<Literal> body;
  friend bool operator==(const Quantified&, const Quantified&) = default;
};

struct FluentRef {
  std::string name;
  std::vector<std::string> args;
  friend bool operator==(const FluentRef&, const FluentRef&) = default;
};

struct NumericEffect {  // (increase target rhs), rhs constant or fluent
  FluentRef target;
  double constant = 0.0;
  std::optional<FluentRef> rhs_fluent;
  friend bool operator==(const NumericEffect&, const NumericEffect&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  std::vector<Literal> preconditions;
  std::vector<Quantified> forall_preconditions;
  std::vector<Atom> add_effects;
  std::vector<Atom> del_effects;
  std::vector<NumericEffect> numeric_effects;
  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedVar> params;
  friend bool operator==(const PredicateSchema&, const PredicateSchema&) = default;
};

struct FunctionSchema {
  std::string name;
  std::vector<TypedVar> params;
  friend bool operator==(const FunctionSchema&, const FunctionSchema&) = default;
};

struct TypeDef {
  std::string name;
  std::string parent = "object";
  friend bool operator==(const TypeDef&, const TypeDef&) = default;
};

struct Domain {
  std::string name;
  std::vector<TypeDef> types;
  std::vector<PredicateSchema> predicates;
  std::vector<FunctionSchema> functions;
  std::vector<ActionSchema> actions;

  const PredicateSchema* find_predicate(const std::string& name) const;
  const FunctionSchema* find_function(const std::string& name) const;
  bool is_subtype(const std::string& type, const std::string& ancestor) const;
  friend bool operator==(const Domain&, const Domain&) = default;
};

struct TypedObject {
  std::string name;
  std::string type = "object";
  friend bool operator==(const TypedObject&, const TypedObject&) = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedObject> objects;
  std::vector<Atom> init_atoms;
  std::vector<std::pair<FluentRef, double>> init_fluents;
  std::vector<Literal> goal;
  std::optional<FluentRef> metric;  // minimize
  friend bool operator==(const Problem&, const Problem&) = default;
};

Domain parse_domain(std::string_view text);
Problem parse_problem(std::string_view text, const Domain& domain);

std::string print_domain(const Domain& domain);
std::string print_problem(const Problem& problem);

// --- Grounded task ----------------------------------------------------------

/// Fixed-width bitset keyed by atom index; value-semantic state component.
class AtomSet {
 public:
  AtomSet() = default;
  explicit AtomSet(int num_atoms) : bits_((num_atoms + 63) / 64, 0) {}

  void set(int i) { bits_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(int i) { bits_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (bits_[i >> 6] >> (i & 63)) & 1; }
  int count() const;
  bool contains_all(const std::vector<int>& ids) const;
  bool contains_none(const std::vector<int>& ids) const;
  std::size_t hash() const;
  friend bool operator==(const AtomSet&, const AtomSet&) = default;

 private:
  std::vector<std::uint64_t> bits_;
};

struct State {
  AtomSet atoms;
  std::vector<double> fluents;  // by fluent id; NaN when undefined
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<int> pre_pos;
  std::vector<int> pre_neg;
  std::vector<int> add;
  std::vector<int> del;
  double cost = 0.0;  // constant increase of the metric fluent
  struct FluentIncrease {
    int target = -1;
    double constant = 0.0;
    int rhs_fluent = -1;  // -1 means constant
  };
  std::vector<FluentIncrease> increases;

  std::string signature() const;  // "(name arg1 arg2)"
};

struct GroundTask {
  std::vector<std::string> atom_names;
  std::vector<std::string> fluent_names;
  std::vector<GroundAction> actions;  // sorted by (name, args)
  State init;
  std::vector<int> goal_pos;
  std::vector<int> goal_neg;
  int metric_fluent = -1;

  int find_atom(const std::string& name) const;  // -1 when absent
  bool goal_satisfied(const State& state) const;
};

/// Instantiates actions over type-consistent object tuples, expands forall
/// preconditions over the problem's objects and prunes actions whose static
/// preconditions cannot hold in the initial state.
GroundTask ground(const Domain& domain, const Problem& problem);

bool applicable(const State& state, const GroundAction& action);

/// Eq-style transition: atoms get (I \ del) + add; numeric effects evaluate
/// against the pre-transition valuation. Throws NotApplicable.
State apply(const State& state, const GroundAction& action);

struct Plan {
  std::vector<GroundAction> steps;
  double cost = 0.0;
};

struct ValidationResult {
  bool ok = true;
  int failed_step = -1;  // 0-based; -1 when the goal check failed or ok
  std::string reason;
};

ValidationResult validate_plan(const GroundTask& task, const Plan& plan);

/// One "(action arg ...)" line per step plus a "; cost = N" trailer.
std::string plan_to_text(const Plan& plan);

}  // namespace mplan::pddl
