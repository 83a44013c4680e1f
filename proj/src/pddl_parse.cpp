#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <variant>

#include "mplan/pddl.hpp"

namespace mplan::pddl {

namespace {

// --- S-expression reader -----------------------------------------------------

struct SExpr {
  SourcePos pos;
  std::string symbol;        // empty for lists
  std::vector<SExpr> items;  // empty for symbols
  bool is_list = false;

  bool is_symbol() const { return !is_list; }
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  struct Token {
    enum class Kind { LParen, RParen, Symbol, End } kind;
    std::string value;
    SourcePos pos;
  };

  Token next() {
    skip_ws();
    Token tok;
    tok.pos = pos_;
    if (i_ >= text_.size()) {
      tok.kind = Token::Kind::End;
      return tok;
    }
    const char c = text_[i_];
    if (c == '(') {
      advance();
      tok.kind = Token::Kind::LParen;
      return tok;
    }
    if (c == ')') {
      advance();
      tok.kind = Token::Kind::RParen;
      return tok;
    }
    tok.kind = Token::Kind::Symbol;
    while (i_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[i_])) &&
           text_[i_] != '(' && text_[i_] != ')' && text_[i_] != ';') {
      tok.value.push_back(text_[i_]);
      advance();
    }
    return tok;
  }

 private:
  void skip_ws() {
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == ';') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[i_] == '\n') {
      ++pos_.line;
      pos_.col = 1;
    } else {
      ++pos_.col;
    }
    ++i_;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

SExpr read_sexpr(Lexer& lexer, const Lexer::Token& tok) {
  if (tok.kind == Lexer::Token::Kind::End) {
    throw ParseError(tok.pos, "unexpected end of input");
  }
  if (tok.kind == Lexer::Token::Kind::RParen) {
    throw ParseError(tok.pos, "unexpected ')'");
  }
  if (tok.kind == Lexer::Token::Kind::Symbol) {
    SExpr e;
    e.pos = tok.pos;
    e.symbol = tok.value;
    return e;
  }
  SExpr list;
  list.pos = tok.pos;
  list.is_list = true;
  for (;;) {
    const auto inner = lexer.next();
    if (inner.kind == Lexer::Token::Kind::RParen) break;
    if (inner.kind == Lexer::Token::Kind::End) {
      throw ParseError(inner.pos, "missing ')'");
    }
    list.items.push_back(read_sexpr(lexer, inner));
  }
  return list;
}

SExpr read_toplevel(std::string_view text) {
  Lexer lexer(text);
  const auto tok = lexer.next();
  const SExpr root = read_sexpr(lexer, tok);
  const auto trailing = lexer.next();
  if (trailing.kind != Lexer::Token::Kind::End) {
    throw ParseError(trailing.pos, "trailing content after top-level form");
  }
  return root;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

const SExpr& expect_list(const SExpr& e, const char* what) {
  if (!e.is_list) throw ParseError(e.pos, std::string("expected ") + what);
  return e;
}

const std::string& expect_symbol(const SExpr& e, const char* what) {
  if (!e.is_symbol()) throw ParseError(e.pos, std::string("expected ") + what);
  return e.symbol;
}

std::optional<double> parse_number(const std::string& s) {
  double value = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec == std::errc{} && res.ptr == end) return value;
  return std::nullopt;
}

// Typed lists: "a b - t c d - u e" (untrailed names default to object).
// TypedVar lists require the '?' variable marker on every name.
template <typename Out>
std::vector<Out> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin,
                                  std::size_t end) {
  std::vector<Out> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < end; ++i) {
    const std::string& sym = expect_symbol(items[i], "name in typed list");
    if (sym == "-") {
      if (i + 1 >= end) throw ParseError(items[i].pos, "missing type after '-'");
      const std::string type = lowercase(expect_symbol(items[i + 1], "type name"));
      for (auto& name : pending) out.push_back(Out{std::move(name), type});
      pending.clear();
      ++i;
    } else {
      if (std::is_same_v<Out, TypedVar> && !sym.starts_with('?')) {
        throw ParseError(items[i].pos, "expected a '?'-variable, got " + sym);
      }
      pending.push_back(lowercase(sym));
    }
  }
  for (auto& name : pending) out.push_back(Out{std::move(name), "object"});
  return out;
}

Atom parse_atom(const SExpr& e) {
  expect_list(e, "atom");
  if (e.items.empty()) throw ParseError(e.pos, "empty atom");
  Atom atom;
  atom.pred = lowercase(expect_symbol(e.items[0], "predicate name"));
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    atom.args.push_back(lowercase(expect_symbol(e.items[i], "atom argument")));
  }
  return atom;
}

FluentRef parse_fluent_ref(const SExpr& e) {
  const Atom atom = parse_atom(e);
  return FluentRef{atom.pred, atom.args};
}

std::vector<Literal> parse_literal_conjunction(const SExpr& e);

Literal parse_literal(const SExpr& e) {
  expect_list(e, "literal");
  if (e.items.empty()) throw ParseError(e.pos, "empty literal");
  const std::string head = lowercase(expect_symbol(e.items[0], "literal head"));
  if (head == "not") {
    if (e.items.size() != 2) throw ParseError(e.pos, "'not' takes one literal");
    Literal lit;
    lit.atom = parse_atom(e.items[1]);
    lit.negated = true;
    return lit;
  }
  Literal lit;
  lit.atom = parse_atom(e);
  return lit;
}

std::vector<Literal> parse_literal_conjunction(const SExpr& e) {
  expect_list(e, "condition");
  if (!e.items.empty() && e.items[0].is_symbol() &&
      lowercase(e.items[0].symbol) == "and") {
    std::vector<Literal> lits;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const auto nested = parse_literal_conjunction(e.items[i]);
      lits.insert(lits.end(), nested.begin(), nested.end());
    }
    return lits;
  }
  return {parse_literal(e)};
}

void parse_precondition(const SExpr& e, ActionSchema& action) {
  expect_list(e, "precondition");
  if (e.items.empty()) return;  // (and) / ()
  const std::string head =
      e.items[0].is_symbol() ? lowercase(e.items[0].symbol) : std::string();
  if (head == "and") {
    for (std::size_t i = 1; i < e.items.size(); ++i) parse_precondition(e.items[i], action);
    return;
  }
  if (head == "forall") {
    if (e.items.size() != 3) throw ParseError(e.pos, "'forall' takes variables and a body");
    const auto& vars = expect_list(e.items[1], "forall variable list");
    const auto typed = parse_typed_list<TypedVar>(vars.items, 0, vars.items.size());
    if (typed.size() != 1) {
      throw UnsupportedFeature("forall over more than one variable");
    }
    Quantified q;
    q.var = typed[0];
    q.body = parse_literal_conjunction(e.items[2]);
    action.forall_preconditions.push_back(std::move(q));
    return;
  }
  for (const char* bad : {"or", "exists", "imply", "when", ">=", "<=", ">", "<", "="}) {
    if (head == bad) throw UnsupportedFeature(std::string(bad) + " in precondition");
  }
  action.preconditions.push_back(parse_literal(e));
}

void parse_effect(const SExpr& e, ActionSchema& action) {
  expect_list(e, "effect");
  if (e.items.empty()) return;
  const std::string head =
      e.items[0].is_symbol() ? lowercase(e.items[0].symbol) : std::string();
  if (head == "and") {
    for (std::size_t i = 1; i < e.items.size(); ++i) parse_effect(e.items[i], action);
    return;
  }
  if (head == "not") {
    if (e.items.size() != 2) throw ParseError(e.pos, "'not' takes one atom");
    action.del_effects.push_back(parse_atom(e.items[1]));
    return;
  }
  if (head == "increase") {
    if (e.items.size() != 3) throw ParseError(e.pos, "'increase' takes a fluent and a value");
    NumericEffect eff;
    eff.target = parse_fluent_ref(e.items[1]);
    if (e.items[2].is_symbol()) {
      const auto num = parse_number(e.items[2].symbol);
      if (!num) throw ParseError(e.items[2].pos, "expected a number");
      eff.constant = *num;
    } else {
      eff.rhs_fluent = parse_fluent_ref(e.items[2]);
    }
    action.numeric_effects.push_back(std::move(eff));
    return;
  }
  for (const char* bad : {"decrease", "assign", "scale-up", "scale-down", "when", "forall"}) {
    if (head == bad) throw UnsupportedFeature(std::string(bad) + " in effect");
  }
  action.add_effects.push_back(parse_atom(e));
}

void check_bound_variables(const ActionSchema& action) {
  auto bound = [&](const std::string& name, const Quantified* scope) {
    if (!name.starts_with('?')) return true;  // object constant
    for (const auto& p : action.params) {
      if (p.name == name) return true;
    }
    if (scope && scope->var.name == name) return true;
    return false;
  };
  auto check_atom = [&](const Atom& atom, const Quantified* scope) {
    for (const auto& arg : atom.args) {
      if (!bound(arg, scope)) {
        throw SemanticError("unbound variable " + arg + " in action " + action.name);
      }
    }
  };
  for (const auto& lit : action.preconditions) check_atom(lit.atom, nullptr);
  for (const auto& q : action.forall_preconditions) {
    for (const auto& lit : q.body) check_atom(lit.atom, &q);
  }
  for (const auto& atom : action.add_effects) check_atom(atom, nullptr);
  for (const auto& atom : action.del_effects) check_atom(atom, nullptr);
  for (const auto& eff : action.numeric_effects) {
    check_atom(Atom{eff.target.name, eff.target.args}, nullptr);
    if (eff.rhs_fluent) check_atom(Atom{eff.rhs_fluent->name, eff.rhs_fluent->args}, nullptr);
  }
}

ActionSchema parse_action(const SExpr& e) {
  ActionSchema action;
  action.name = lowercase(expect_symbol(e.items[1], "action name"));
  std::size_t i = 2;
  while (i < e.items.size()) {
    const std::string key = lowercase(expect_symbol(e.items[i], "action section keyword"));
    if (i + 1 >= e.items.size()) throw ParseError(e.items[i].pos, "missing section body");
    const SExpr& body = e.items[i + 1];
    if (key == ":parameters") {
      const auto& vars = expect_list(body, "parameter list");
      action.params = parse_typed_list<TypedVar>(vars.items, 0, vars.items.size());
    } else if (key == ":precondition") {
      parse_precondition(body, action);
    } else if (key == ":effect") {
      parse_effect(body, action);
    } else {
      throw UnsupportedFeature(key + " in action");
    }
    i += 2;
  }
  for (const auto& p : action.params) {
    if (!p.name.starts_with('?')) {
      throw SemanticError("action parameter " + p.name + " must start with '?'");
    }
  }
  check_bound_variables(action);
  return action;
}

void validate_schema_references(const Domain& domain) {
  auto known_type = [&](const std::string& t) {
    if (t == "object") return true;
    return std::any_of(domain.types.begin(), domain.types.end(),
                       [&](const TypeDef& d) { return d.name == t; });
  };
  for (const auto& pred : domain.predicates) {
    for (const auto& p : pred.params) {
      if (!known_type(p.type)) throw SemanticError("undeclared type " + p.type);
    }
  }
  for (const auto& fn : domain.functions) {
    for (const auto& p : fn.params) {
      if (!known_type(p.type)) throw SemanticError("undeclared type " + p.type);
    }
  }
  for (const auto& action : domain.actions) {
    for (const auto& p : action.params) {
      if (!known_type(p.type)) throw SemanticError("undeclared type " + p.type);
    }
    for (const auto& q : action.forall_preconditions) {
      if (!known_type(q.var.type)) throw SemanticError("undeclared type " + q.var.type);
    }
    auto check_atom = [&](const Atom& atom) {
      const auto* schema = domain.find_predicate(atom.pred);
      if (!schema) throw SemanticError("undeclared predicate " + atom.pred);
      if (schema->params.size() != atom.args.size()) {
        throw SemanticError("arity mismatch for predicate " + atom.pred);
      }
    };
    auto check_fluent = [&](const FluentRef& ref) {
      const auto* schema = domain.find_function(ref.name);
      if (!schema) throw SemanticError("undeclared function " + ref.name);
      if (schema->params.size() != ref.args.size()) {
        throw SemanticError("arity mismatch for function " + ref.name);
      }
    };
    for (const auto& lit : action.preconditions) check_atom(lit.atom);
    for (const auto& q : action.forall_preconditions) {
      for (const auto& lit : q.body) check_atom(lit.atom);
    }
    for (const auto& atom : action.add_effects) check_atom(atom);
    for (const auto& atom : action.del_effects) check_atom(atom);
    for (const auto& eff : action.numeric_effects) {
      check_fluent(eff.target);
      if (eff.rhs_fluent) check_fluent(*eff.rhs_fluent);
    }
  }
}

}  // namespace

const PredicateSchema* Domain::find_predicate(const std::string& name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const FunctionSchema* Domain::find_function(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool Domain::is_subtype(const std::string& type, const std::string& ancestor) const {
  if (ancestor == "object" || type == ancestor) return true;
  std::string current = type;
  for (std::size_t guard = 0; guard <= types.size(); ++guard) {
    const auto it = std::find_if(types.begin(), types.end(),
                                 [&](const TypeDef& d) { return d.name == current; });
    if (it == types.end()) return false;
    if (it->parent == ancestor) return true;
    current = it->parent;
    if (current == "object") return false;
  }
  return false;
}

Domain parse_domain(std::string_view text) {
  const SExpr root = read_toplevel(text);
  expect_list(root, "domain definition");
  if (root.items.size() < 2 || !root.items[0].is_symbol() ||
      lowercase(root.items[0].symbol) != "define") {
    throw ParseError(root.pos, "expected (define (domain ...) ...)");
  }
  const SExpr& head = expect_list(root.items[1], "(domain name)");
  if (head.items.size() != 2 || lowercase(expect_symbol(head.items[0], "domain")) != "domain") {
    throw ParseError(head.pos, "expected (domain name)");
  }

  Domain domain;
  domain.name = lowercase(expect_symbol(head.items[1], "domain name"));

  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "domain section");
    if (section.items.empty()) throw ParseError(section.pos, "empty domain section");
    const std::string key = lowercase(expect_symbol(section.items[0], "section keyword"));
    if (key == ":requirements") {
      continue;  // informative only
    } else if (key == ":types") {
      auto typed = parse_typed_list<TypedObject>(section.items, 1, section.items.size());
      for (auto& t : typed) domain.types.push_back(TypeDef{t.name, t.type});
    } else if (key == ":predicates") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const SExpr& p = expect_list(section.items[k], "predicate declaration");
        if (p.items.empty()) throw ParseError(p.pos, "empty predicate declaration");
        PredicateSchema schema;
        schema.name = lowercase(expect_symbol(p.items[0], "predicate name"));
        schema.params = parse_typed_list<TypedVar>(p.items, 1, p.items.size());
        domain.predicates.push_back(std::move(schema));
      }
    } else if (key == ":functions") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        // Allow an optional "- number" between declarations.
        if (section.items[k].is_symbol()) {
          if (section.items[k].symbol == "-" && k + 1 < section.items.size() &&
              section.items[k + 1].is_symbol()) {
            ++k;
            continue;
          }
          throw ParseError(section.items[k].pos, "expected function declaration");
        }
        const SExpr& f = section.items[k];
        if (f.items.empty()) throw ParseError(f.pos, "empty function declaration");
        FunctionSchema schema;
        schema.name = lowercase(expect_symbol(f.items[0], "function name"));
        schema.params = parse_typed_list<TypedVar>(f.items, 1, f.items.size());
        domain.functions.push_back(std::move(schema));
      }
    } else if (key == ":action") {
      if (section.items.size() < 2) throw ParseError(section.pos, "missing action name");
      domain.actions.push_back(parse_action(section));
    } else if (key == ":durative-action" || key == ":derived" || key == ":constants" ||
               key == ":constraints") {
      throw UnsupportedFeature(key.substr(1));
    } else {
      throw ParseError(section.pos, "unknown domain section " + key);
    }
  }

  validate_schema_references(domain);
  return domain;
}

Problem parse_problem(std::string_view text, const Domain& domain) {
  const SExpr root = read_toplevel(text);
  expect_list(root, "problem definition");
  if (root.items.size() < 2 || !root.items[0].is_symbol() ||
      lowercase(root.items[0].symbol) != "define") {
    throw ParseError(root.pos, "expected (define (problem ...) ...)");
  }
  const SExpr& head = expect_list(root.items[1], "(problem name)");
  if (head.items.size() != 2 ||
      lowercase(expect_symbol(head.items[0], "problem")) != "problem") {
    throw ParseError(head.pos, "expected (problem name)");
  }

  Problem problem;
  problem.name = lowercase(expect_symbol(head.items[1], "problem name"));

  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "problem section");
    if (section.items.empty()) throw ParseError(section.pos, "empty problem section");
    const std::string key = lowercase(expect_symbol(section.items[0], "section keyword"));
    if (key == ":domain") {
      if (section.items.size() != 2) throw ParseError(section.pos, "expected domain name");
      problem.domain_name = lowercase(expect_symbol(section.items[1], "domain name"));
    } else if (key == ":objects") {
      problem.objects = parse_typed_list<TypedObject>(section.items, 1, section.items.size());
    } else if (key == ":init") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const SExpr& item = expect_list(section.items[k], "init element");
        if (item.items.empty()) throw ParseError(item.pos, "empty init element");
        const std::string h = lowercase(expect_symbol(item.items[0], "init element"));
        if (h == "=") {
          if (item.items.size() != 3) {
            throw ParseError(item.pos, "expected (= (fluent args) value)");
          }
          const FluentRef ref = parse_fluent_ref(item.items[1]);
          const auto num =
              parse_number(expect_symbol(item.items[2], "numeric initial value"));
          if (!num) throw ParseError(item.items[2].pos, "expected a number");
          problem.init_fluents.emplace_back(ref, *num);
        } else if (h == "not") {
          throw UnsupportedFeature("negative init literal");
        } else {
          problem.init_atoms.push_back(parse_atom(item));
        }
      }
    } else if (key == ":goal") {
      if (section.items.size() != 2) throw ParseError(section.pos, "expected goal condition");
      problem.goal = parse_literal_conjunction(section.items[1]);
    } else if (key == ":metric") {
      if (section.items.size() != 3 ||
          lowercase(expect_symbol(section.items[1], "metric direction")) != "minimize") {
        throw UnsupportedFeature("metric other than minimize");
      }
      problem.metric = parse_fluent_ref(section.items[2]);
    } else {
      throw ParseError(section.pos, "unknown problem section " + key);
    }
  }

  // Semantic validation against the domain.
  auto object_type = [&](const std::string& name) -> const std::string& {
    for (const auto& obj : problem.objects) {
      if (obj.name == name) return obj.type;
    }
    throw SemanticError("undeclared object " + name);
  };
  auto check_ground_atom = [&](const Atom& atom) {
    const auto* schema = domain.find_predicate(atom.pred);
    if (!schema) throw SemanticError("undeclared predicate " + atom.pred);
    if (schema->params.size() != atom.args.size()) {
      throw SemanticError("arity mismatch for predicate " + atom.pred);
    }
    for (std::size_t k = 0; k < atom.args.size(); ++k) {
      if (!domain.is_subtype(object_type(atom.args[k]), schema->params[k].type)) {
        throw TypeMismatch("argument " + atom.args[k] + " of " + atom.pred +
                           " has the wrong type");
      }
    }
  };
  auto check_ground_fluent = [&](const FluentRef& ref) {
    const auto* schema = domain.find_function(ref.name);
    if (!schema) throw SemanticError("undeclared function " + ref.name);
    if (schema->params.size() != ref.args.size()) {
      throw SemanticError("arity mismatch for function " + ref.name);
    }
    for (std::size_t k = 0; k < ref.args.size(); ++k) {
      if (!domain.is_subtype(object_type(ref.args[k]), schema->params[k].type)) {
        throw TypeMismatch("argument " + ref.args[k] + " of " + ref.name +
                           " has the wrong type");
      }
    }
  };
  for (const auto& atom : problem.init_atoms) check_ground_atom(atom);
  for (const auto& [ref, value] : problem.init_fluents) {
    (void)value;
    check_ground_fluent(ref);
  }
  for (const auto& lit : problem.goal) check_ground_atom(lit.atom);
  if (problem.metric) check_ground_fluent(*problem.metric);
  return problem;
}

// --- Printing ----------------------------------------------------------------

namespace {
void print_typed_vars(std::ostream& os, const std::vector<TypedVar>& vars) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) os << ' ';
    os << vars[i].name << " - " << vars[i].type;
  }
}

void print_atom(std::ostream& os, const Atom& atom) {
  os << '(' << atom.pred;
  for (const auto& arg : atom.args) os << ' ' << arg;
  os << ')';
}

void print_literal(std::ostream& os, const Literal& lit) {
  if (lit.negated) {
    os << "(not ";
    print_atom(os, lit.atom);
    os << ')';
  } else {
    print_atom(os, lit.atom);
  }
}

void print_fluent(std::ostream& os, const FluentRef& ref) {
  print_atom(os, Atom{ref.name, ref.args});
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

std::string print_domain(const Domain& domain) {
  std::ostringstream os;
  os << "(define (domain " << domain.name << ")\n";
  if (!domain.types.empty()) {
    os << "  (:types";
    for (const auto& t : domain.types) os << ' ' << t.name << " - " << t.parent;
    os << ")\n";
  }
  if (!domain.predicates.empty()) {
    os << "  (:predicates\n";
    for (const auto& p : domain.predicates) {
      os << "    (" << p.name;
      if (!p.params.empty()) {
        os << ' ';
        print_typed_vars(os, p.params);
      }
      os << ")\n";
    }
    os << "  )\n";
  }
  if (!domain.functions.empty()) {
    os << "  (:functions\n";
    for (const auto& f : domain.functions) {
      os << "    (" << f.name;
      if (!f.params.empty()) {
        os << ' ';
        print_typed_vars(os, f.params);
      }
      os << ")\n";
    }
    os << "  )\n";
  }
  for (const auto& action : domain.actions) {
    os << "  (:action " << action.name << "\n    :parameters (";
    print_typed_vars(os, action.params);
    os << ")\n    :precondition (and";
    for (const auto& lit : action.preconditions) {
      os << ' ';
      print_literal(os, lit);
    }
    for (const auto& q : action.forall_preconditions) {
      os << " (forall (" << q.var.name << " - " << q.var.type << ") (and";
      for (const auto& lit : q.body) {
        os << ' ';
        print_literal(os, lit);
      }
      os << "))";
    }
    os << ")\n    :effect (and";
    for (const auto& atom : action.add_effects) {
      os << ' ';
      print_atom(os, atom);
    }
    for (const auto& atom : action.del_effects) {
      os << " (not ";
      print_atom(os, atom);
      os << ')';
    }
    for (const auto& eff : action.numeric_effects) {
      os << " (increase ";
      print_fluent(os, eff.target);
      os << ' ';
      if (eff.rhs_fluent) {
        print_fluent(os, *eff.rhs_fluent);
      } else {
        os << format_number(eff.constant);
      }
      os << ')';
    }
    os << ")\n  )\n";
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const Problem& problem) {
  std::ostringstream os;
  os << "(define (problem " << problem.name << ")\n";
  os << "  (:domain " << problem.domain_name << ")\n";
  os << "  (:objects";
  for (const auto& obj : problem.objects) os << ' ' << obj.name << " - " << obj.type;
  os << ")\n  (:init\n";
  for (const auto& atom : problem.init_atoms) {
    os << "    ";
    print_atom(os, atom);
    os << '\n';
  }
  for (const auto& [ref, value] : problem.init_fluents) {
    os << "    (= ";
    print_fluent(os, ref);
    os << ' ' << format_number(value) << ")\n";
  }
  os << "  )\n  (:goal (and";
  for (const auto& lit : problem.goal) {
    os << ' ';
    print_literal(os, lit);
  }
  os << "))\n";
  if (problem.metric) {
    os << "  (:metric minimize ";
    print_fluent(os, *problem.metric);
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

}  // namespace mplan::pddl
