#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "mplan/pddl.hpp"

namespace mplan::pddl {

int AtomSet::count() const {
  int n = 0;
  for (const auto w : bits_) n += std::popcount(w);
  return n;
}

bool AtomSet::contains_all(const std::vector<int>& ids) const {
  for (int id : ids) {
    if (!test(id)) return false;
  }
  return true;
}

bool AtomSet::contains_none(const std::vector<int>& ids) const {
  for (int id : ids) {
    if (test(id)) return false;
  }
  return true;
}

std::size_t AtomSet::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (const auto w : bits_) {
    h ^= w;
    h *= 1099511628211ull;
  }
  return h;
}

std::string GroundAction::signature() const {
  std::string s = "(" + name;
  for (const auto& arg : args) s += " " + arg;
  return s + ")";
}

int GroundTask::find_atom(const std::string& name) const {
  for (std::size_t i = 0; i < atom_names.size(); ++i) {
    if (atom_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

bool GroundTask::goal_satisfied(const State& state) const {
  return state.atoms.contains_all(goal_pos) && state.atoms.contains_none(goal_neg);
}

namespace {

std::string instance_key(const std::string& name, const std::vector<std::string>& args) {
  std::string key = "(" + name;
  for (const auto& arg : args) key += " " + arg;
  return key + ")";
}

struct DraftAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<std::string> pre_pos;  // atom keys
  std::vector<std::string> pre_neg;
  std::vector<std::string> add;
  std::vector<std::string> del;
  struct Increase {
    std::string target;
    double constant = 0.0;
    std::string rhs;  // empty means constant
  };
  std::vector<Increase> increases;
  double cost = 0.0;
};

class Grounder {
 public:
  Grounder(const Domain& domain, const Problem& problem) : domain_(domain), problem_(problem) {
    for (const auto& action : domain.actions) {
      for (const auto& atom : action.add_effects) dynamic_preds_.insert(atom.pred);
      for (const auto& atom : action.del_effects) dynamic_preds_.insert(atom.pred);
    }
    for (const auto& atom : problem.init_atoms) {
      init_by_pred_[atom.pred].push_back(&atom);
      init_keys_.insert(instance_key(atom.pred, atom.args));
    }
    for (const auto& obj : problem.objects) {
      if (!object_types_.emplace(obj.name, obj.type).second) {
        throw SemanticError("duplicate object " + obj.name);
      }
    }
  }

  GroundTask run() {
    std::vector<DraftAction> drafts;
    for (const auto& schema : domain_.actions) instantiate(schema, drafts);
    std::sort(drafts.begin(), drafts.end(), [](const DraftAction& a, const DraftAction& b) {
      if (a.name != b.name) return a.name < b.name;
      return a.args < b.args;
    });

    GroundTask task;
    auto atom_id = [&](const std::string& key) {
      const auto [it, inserted] = atom_ids_.emplace(key, static_cast<int>(task.atom_names.size()));
      if (inserted) task.atom_names.push_back(key);
      return it->second;
    };
    auto fluent_id = [&](const std::string& key) {
      const auto [it, inserted] =
          fluent_ids_.emplace(key, static_cast<int>(task.fluent_names.size()));
      if (inserted) task.fluent_names.push_back(key);
      return it->second;
    };

    for (const auto& atom : problem_.init_atoms) atom_id(instance_key(atom.pred, atom.args));
    for (const auto& [ref, value] : problem_.init_fluents) {
      (void)value;
      fluent_id(instance_key(ref.name, ref.args));
    }
    if (problem_.metric) {
      task.metric_fluent = fluent_id(instance_key(problem_.metric->name, problem_.metric->args));
    }

    for (const auto& draft : drafts) {
      GroundAction ga;
      ga.name = draft.name;
      ga.args = draft.args;
      for (const auto& key : draft.pre_pos) ga.pre_pos.push_back(atom_id(key));
      for (const auto& key : draft.pre_neg) ga.pre_neg.push_back(atom_id(key));
      for (const auto& key : draft.add) ga.add.push_back(atom_id(key));
      for (const auto& key : draft.del) ga.del.push_back(atom_id(key));
      for (const auto& inc : draft.increases) {
        GroundAction::FluentIncrease fi;
        fi.target = fluent_id(inc.target);
        fi.constant = inc.constant;
        fi.rhs_fluent = inc.rhs.empty() ? -1 : fluent_id(inc.rhs);
        ga.increases.push_back(fi);
        if (fi.target == task.metric_fluent && fi.rhs_fluent < 0) ga.cost += fi.constant;
      }
      task.actions.push_back(std::move(ga));
    }

    for (const auto& lit : problem_.goal) {
      const int id = atom_id(instance_key(lit.atom.pred, lit.atom.args));
      (lit.negated ? task.goal_neg : task.goal_pos).push_back(id);
    }

    task.init.atoms = AtomSet(static_cast<int>(task.atom_names.size()));
    for (const auto& atom : problem_.init_atoms) {
      task.init.atoms.set(atom_ids_.at(instance_key(atom.pred, atom.args)));
    }
    task.init.fluents.assign(task.fluent_names.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& [ref, value] : problem_.init_fluents) {
      task.init.fluents[fluent_ids_.at(instance_key(ref.name, ref.args))] = value;
    }

    // Every fluent a surviving ground action reads needs an initial value.
    for (const auto& action : task.actions) {
      for (const auto& inc : action.increases) {
        if (std::isnan(task.init.fluents[inc.target])) {
          throw SemanticError("fluent " + task.fluent_names[inc.target] +
                              " read by " + action.signature() + " has no initial value");
        }
        if (inc.rhs_fluent >= 0 && std::isnan(task.init.fluents[inc.rhs_fluent])) {
          throw SemanticError("fluent " + task.fluent_names[inc.rhs_fluent] + " read by " +
                              action.signature() + " has no initial value");
        }
      }
    }

    return task;
  }

 private:
  const std::vector<std::string>& objects_of(const std::string& type) {
    auto it = objects_cache_.find(type);
    if (it != objects_cache_.end()) return it->second;
    std::vector<std::string> objs;
    for (const auto& obj : problem_.objects) {
      if (domain_.is_subtype(obj.type, type)) objs.push_back(obj.name);
    }
    return objects_cache_.emplace(type, std::move(objs)).first->second;
  }

  bool is_static(const std::string& pred) const { return !dynamic_preds_.count(pred); }

  using Binding = std::map<std::string, std::string>;

  std::vector<std::string> substitute(const std::vector<std::string>& args,
                                      const Binding& binding) const {
    std::vector<std::string> out;
    out.reserve(args.size());
    for (const auto& arg : args) {
      if (arg.starts_with('?')) {
        out.push_back(binding.at(arg));
      } else {
        out.push_back(arg);
      }
    }
    return out;
  }

  void instantiate(const ActionSchema& schema, std::vector<DraftAction>& out) {
    // Static positive preconditions drive the search for bindings; whatever
    // they leave unbound is enumerated over the parameter's type.
    std::vector<const Literal*> constraints;
    for (const auto& lit : schema.preconditions) {
      if (!lit.negated && is_static(lit.atom.pred)) constraints.push_back(&lit);
    }
    Binding binding;
    match(schema, constraints, 0, binding, out);
  }

  void match(const ActionSchema& schema, const std::vector<const Literal*>& constraints,
             std::size_t index, Binding& binding, std::vector<DraftAction>& out) {
    if (index == constraints.size()) {
      enumerate_rest(schema, 0, binding, out);
      return;
    }
    const Atom& pattern = constraints[index]->atom;
    const auto it = init_by_pred_.find(pattern.pred);
    if (it == init_by_pred_.end()) return;  // statically unsatisfiable
    for (const Atom* candidate : it->second) {
      std::vector<std::pair<std::string, std::string>> newly_bound;
      bool ok = true;
      for (std::size_t k = 0; k < pattern.args.size() && ok; ++k) {
        const std::string& arg = pattern.args[k];
        const std::string& value = candidate->args[k];
        if (!arg.starts_with('?')) {
          ok = arg == value;
          continue;
        }
        const auto bound = binding.find(arg);
        if (bound != binding.end()) {
          ok = bound->second == value;
          continue;
        }
        // Respect the declared parameter (or quantifier) type.
        const auto param = std::find_if(schema.params.begin(), schema.params.end(),
                                        [&](const TypedVar& p) { return p.name == arg; });
        if (param != schema.params.end() &&
            !domain_.is_subtype(object_types_.at(value), param->type)) {
          ok = false;
          continue;
        }
        binding.emplace(arg, value);
        newly_bound.emplace_back(arg, value);
      }
      if (ok) match(schema, constraints, index + 1, binding, out);
      for (const auto& [var, value] : newly_bound) {
        (void)value;
        binding.erase(var);
      }
    }
  }

  void enumerate_rest(const ActionSchema& schema, std::size_t param_index, Binding& binding,
                      std::vector<DraftAction>& out) {
    if (param_index == schema.params.size()) {
      emit(schema, binding, out);
      return;
    }
    const auto& param = schema.params[param_index];
    if (binding.count(param.name)) {
      enumerate_rest(schema, param_index + 1, binding, out);
      return;
    }
    for (const auto& obj : objects_of(param.type)) {
      binding.emplace(param.name, obj);
      enumerate_rest(schema, param_index + 1, binding, out);
      binding.erase(param.name);
    }
  }

  // Instantiate one candidate binding; returns without emitting when a static
  // precondition fails against the initial state.
  void emit(const ActionSchema& schema, const Binding& binding, std::vector<DraftAction>& out) {
    DraftAction draft;
    draft.name = schema.name;
    for (const auto& param : schema.params) draft.args.push_back(binding.at(param.name));

    auto add_literal = [&](const Atom& atom, bool negated, const Binding& b) {
      const auto args = substitute(atom.args, b);
      const std::string key = instance_key(atom.pred, args);
      if (is_static(atom.pred)) {
        const bool holds = init_keys_.count(key) > 0;
        return negated ? !holds : holds;  // static literal decided now
      }
      (negated ? draft.pre_neg : draft.pre_pos).push_back(key);
      return true;
    };

    for (const auto& lit : schema.preconditions) {
      if (!add_literal(lit.atom, lit.negated, binding)) return;
    }
    for (const auto& q : schema.forall_preconditions) {
      for (const auto& obj : objects_of(q.var.type)) {
        Binding extended = binding;
        extended[q.var.name] = obj;
        for (const auto& lit : q.body) {
          if (!add_literal(lit.atom, lit.negated, extended)) return;
        }
      }
    }
    for (const auto& atom : schema.add_effects) {
      draft.add.push_back(instance_key(atom.pred, substitute(atom.args, binding)));
    }
    for (const auto& atom : schema.del_effects) {
      draft.del.push_back(instance_key(atom.pred, substitute(atom.args, binding)));
    }
    for (const auto& eff : schema.numeric_effects) {
      DraftAction::Increase inc;
      inc.target = instance_key(eff.target.name, substitute(eff.target.args, binding));
      if (eff.rhs_fluent) {
        inc.rhs = instance_key(eff.rhs_fluent->name, substitute(eff.rhs_fluent->args, binding));
      } else {
        inc.constant = eff.constant;
      }
      draft.increases.push_back(std::move(inc));
    }
    out.push_back(std::move(draft));
  }

  const Domain& domain_;
  const Problem& problem_;
  std::set<std::string> dynamic_preds_;
  std::map<std::string, std::vector<const Atom*>> init_by_pred_;
  std::set<std::string> init_keys_;
  std::map<std::string, std::string> object_types_;
  std::map<std::string, std::vector<std::string>> objects_cache_;
  std::map<std::string, int> atom_ids_;
  std::map<std::string, int> fluent_ids_;
};

}  // namespace

GroundTask ground(const Domain& domain, const Problem& problem) {
  if (!problem.domain_name.empty() && problem.domain_name != domain.name) {
    throw SemanticError("problem requires domain " + problem.domain_name);
  }
  // Objects must have declared types.
  for (const auto& obj : problem.objects) {
    if (obj.type != "object" &&
        std::none_of(domain.types.begin(), domain.types.end(),
                     [&](const TypeDef& t) { return t.name == obj.type; })) {
      throw TypeMismatch("object " + obj.name + " has undeclared type " + obj.type);
    }
  }
  return Grounder(domain, problem).run();
}

bool applicable(const State& state, const GroundAction& action) {
  return state.atoms.contains_all(action.pre_pos) && state.atoms.contains_none(action.pre_neg);
}

State apply(const State& state, const GroundAction& action) {
  if (!applicable(state, action)) {
    throw NotApplicable(action.signature() + " is not applicable");
  }
  State next = state;
  for (const int id : action.del) next.atoms.reset(id);
  for (const int id : action.add) next.atoms.set(id);
  for (const auto& inc : action.increases) {
    const double delta = inc.rhs_fluent >= 0 ? state.fluents[inc.rhs_fluent] : inc.constant;
    next.fluents[inc.target] += delta;
  }
  return next;
}

ValidationResult validate_plan(const GroundTask& task, const Plan& plan) {
  State state = task.init;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (!applicable(state, plan.steps[i])) {
      ValidationResult result;
      result.ok = false;
      result.failed_step = static_cast<int>(i);
      result.reason = plan.steps[i].signature() + " not applicable";
      return result;
    }
    state = apply(state, plan.steps[i]);
  }
  if (!task.goal_satisfied(state)) {
    ValidationResult result;
    result.ok = false;
    result.reason = "goal not satisfied in the final state";
    return result;
  }
  return {};
}

std::string plan_to_text(const Plan& plan) {
  std::ostringstream os;
  for (const auto& step : plan.steps) os << step.signature() << "\n";
  os << "; cost = " << plan.cost << "\n";
  return os.str();
}

}  // namespace mplan::pddl
