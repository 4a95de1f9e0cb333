#include "symsynth/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace symsynth {

VarDomain VarDomain::boolean() { return VarDomain{Kind::boolean, 0, 1, {}}; }

VarDomain VarDomain::integer(int lo, int hi) { return VarDomain{Kind::integer, lo, hi, {}}; }

VarDomain VarDomain::enumeration(std::vector<std::string> literals) {
  const int n = static_cast<int>(literals.size());
  return VarDomain{Kind::enumeration, 0, n - 1, std::move(literals)};
}

int VarDomain::size() const {
  switch (kind) {
    case Kind::boolean: return 2;
    case Kind::integer: return hi - lo + 1;
    case Kind::enumeration: return static_cast<int>(literals.size());
  }
  return 0;
}

int VarDomain::min_value() const { return kind == Kind::integer ? lo : 0; }

int VarDomain::max_value() const {
  switch (kind) {
    case Kind::boolean: return 1;
    case Kind::integer: return hi;
    case Kind::enumeration: return static_cast<int>(literals.size()) - 1;
  }
  return 0;
}

Expr Expr::integer(int v) { return Expr{ExprKind::int_lit, v, {}, {}, {}}; }
Expr Expr::boolean(bool b) { return Expr{ExprKind::bool_lit, b ? 1 : 0, {}, {}, {}}; }
Expr Expr::var(std::string name) { return Expr{ExprKind::var_ref, 0, std::move(name), {}, {}}; }

Expr Expr::enum_lit(std::string name, int value) {
  return Expr{ExprKind::enum_lit, value, std::move(name), {}, {}};
}

Expr Expr::loc(std::string automaton, std::string location) {
  return Expr{ExprKind::loc_ref, 0, std::move(automaton), std::move(location), {}};
}

Expr Expr::unary(ExprKind kind, Expr operand) {
  Expr e{kind, 0, {}, {}, {}};
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  Expr e{kind, 0, {}, {}, {}};
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

bool is_unary(ExprKind kind) { return kind == ExprKind::not_ || kind == ExprKind::neg; }

bool is_binary(ExprKind kind) {
  switch (kind) {
    case ExprKind::and_:
    case ExprKind::or_:
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mod:
    case ExprKind::eq:
    case ExprKind::ne:
    case ExprKind::lt:
    case ExprKind::le:
    case ExprKind::gt:
    case ExprKind::ge: return true;
    default: return false;
  }
}

std::string_view operator_symbol(ExprKind kind) {
  switch (kind) {
    case ExprKind::not_: return "not";
    case ExprKind::neg: return "-";
    case ExprKind::and_: return "and";
    case ExprKind::or_: return "or";
    case ExprKind::add: return "+";
    case ExprKind::sub: return "-";
    case ExprKind::mod: return "mod";
    case ExprKind::eq: return "=";
    case ExprKind::ne: return "!=";
    case ExprKind::lt: return "<";
    case ExprKind::le: return "<=";
    case ExprKind::gt: return ">";
    case ExprKind::ge: return ">=";
    default: return "";
  }
}

Expr make_and(Expr lhs, Expr rhs) {
  if (lhs.is_true()) return rhs;
  if (rhs.is_true()) return lhs;
  if (lhs.is_false() || rhs.is_false()) return Expr::boolean(false);
  return Expr::binary(ExprKind::and_, std::move(lhs), std::move(rhs));
}

Expr make_or(Expr lhs, Expr rhs) {
  if (lhs.is_false()) return rhs;
  if (rhs.is_false()) return lhs;
  if (lhs.is_true() || rhs.is_true()) return Expr::boolean(true);
  return Expr::binary(ExprKind::or_, std::move(lhs), std::move(rhs));
}

Expr make_not(Expr operand) {
  if (operand.kind == ExprKind::bool_lit) return Expr::boolean(operand.value == 0);
  return Expr::unary(ExprKind::not_, std::move(operand));
}

Expr conjunction(const std::vector<Expr>& terms) {
  Expr result = Expr::boolean(true);
  for (const auto& t : terms) result = make_and(std::move(result), t);
  return result;
}

Expr disjunction(const std::vector<Expr>& terms) {
  Expr result = Expr::boolean(false);
  for (const auto& t : terms) result = make_or(std::move(result), t);
  return result;
}

const Event* Specification::find_event(std::string_view name) const {
  for (const auto& e : events)
    if (e.name == name) return &e;
  return nullptr;
}

const Automaton* Specification::find_automaton(std::string_view name) const {
  for (const auto& a : automata)
    if (a.name == name) return &a;
  return nullptr;
}

const Variable* Specification::find_variable(std::string_view name, const Automaton** owner) const {
  for (const auto& v : inputs) {
    if (v.name == name) {
      if (owner) *owner = nullptr;
      return &v;
    }
  }
  for (const auto& a : automata) {
    for (const auto& v : a.variables) {
      if (v.name == name) {
        if (owner) *owner = &a;
        return &v;
      }
    }
  }
  return nullptr;
}

std::vector<std::string> alphabet_of(const Specification& spec, const Automaton& aut) {
  std::set<std::string, std::less<>> used;
  if (aut.alphabet) {
    used.insert(aut.alphabet->begin(), aut.alphabet->end());
  } else {
    for (const auto& loc : aut.locations)
      for (const auto& edge : loc.edges) used.insert(edge.events.begin(), edge.events.end());
  }
  std::vector<std::string> result;
  for (const auto& e : spec.events)
    if (used.contains(e.name)) result.push_back(e.name);
  return result;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

struct Type {
  enum class Kind { error, boolean, integer, enumeration };
  Kind kind = Kind::error;
  const VarDomain* enumeration = nullptr;

  static Type of(const VarDomain& d) {
    switch (d.kind) {
      case VarDomain::Kind::boolean: return {Kind::boolean, nullptr};
      case VarDomain::Kind::integer: return {Kind::integer, nullptr};
      case VarDomain::Kind::enumeration: return {Kind::enumeration, &d};
    }
    return {};
  }
};

bool same_type(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Type::Kind::enumeration) return a.enumeration->literals == b.enumeration->literals;
  return true;
}

std::string type_name(const Type& t) {
  switch (t.kind) {
    case Type::Kind::boolean: return "bool";
    case Type::Kind::integer: return "int";
    case Type::Kind::enumeration: return "enum";
    default: return "error";
  }
}

class Checker {
 public:
  Checker(const Specification& spec, std::vector<Diagnostic>& out) : spec_(spec), out_(out) {
    for (const auto& v : spec.inputs)
      if (v.domain.kind == VarDomain::Kind::enumeration) enums_.push_back(&v.domain);
    for (const auto& a : spec.automata)
      for (const auto& v : a.variables)
        if (v.domain.kind == VarDomain::Kind::enumeration) enums_.push_back(&v.domain);
  }

  void error(const std::string& element, const std::string& message) {
    out_.push_back(Diagnostic{element, message, std::nullopt});
  }

  void expect_bool(const Expr& e, const std::string& element) {
    element_ = element;
    Type t = check(e, nullptr);
    if (t.kind != Type::Kind::error && t.kind != Type::Kind::boolean)
      error(element, "type error: expected bool predicate, found " + type_name(t));
  }

  // Checks `e` as a value assignable to a variable of `domain`.
  void expect_value(const Expr& e, const VarDomain& domain, const std::string& element) {
    element_ = element;
    Type want = Type::of(domain);
    Type t = check(e, want.enumeration);
    if (t.kind != Type::Kind::error && !same_type(t, want))
      error(element, "type error: cannot assign " + type_name(t) + " to " + type_name(want));
  }

 private:
  Type enum_literal_type(const Expr& e, const VarDomain* hint) {
    auto index_in = [&](const VarDomain& d) {
      auto it = std::find(d.literals.begin(), d.literals.end(), e.name);
      return it == d.literals.end() ? -1 : static_cast<int>(it - d.literals.begin());
    };
    if (hint && index_in(*hint) >= 0) {
      if (index_in(*hint) != e.value)
        error(element_, "enumeration literal '" + e.name + "' has inconsistent value");
      return {Type::Kind::enumeration, hint};
    }
    const VarDomain* found = nullptr;
    for (const VarDomain* d : enums_) {
      if (index_in(*d) < 0) continue;
      if (found && found->literals != d->literals) {
        error(element_, "ambiguous enumeration literal '" + e.name + "'");
        return {};
      }
      found = d;
    }
    if (!found || e.value < 0) {
      error(element_, "unresolved reference '" + e.name + "'");
      return {};
    }
    if (index_in(*found) != e.value)
      error(element_, "enumeration literal '" + e.name + "' has inconsistent value");
    return {Type::Kind::enumeration, found};
  }

  Type check(const Expr& e, const VarDomain* hint) {
    using K = ExprKind;
    switch (e.kind) {
      case K::int_lit: return {Type::Kind::integer, nullptr};
      case K::bool_lit: return {Type::Kind::boolean, nullptr};
      case K::var_ref: {
        const Variable* v = spec_.find_variable(e.name);
        if (!v) {
          error(element_, "unresolved reference '" + e.name + "'");
          return {};
        }
        return Type::of(v->domain);
      }
      case K::enum_lit: return enum_literal_type(e, hint);
      case K::loc_ref: {
        const Automaton* a = spec_.find_automaton(e.name);
        if (!a) {
          error(element_, "unresolved automaton '" + e.name + "'");
          return {};
        }
        bool found = std::any_of(a->locations.begin(), a->locations.end(),
                                 [&](const Location& l) { return l.name == e.location; });
        if (!found) {
          error(element_, "unresolved location '" + e.name + "." + e.location + "'");
          return {};
        }
        return {Type::Kind::boolean, nullptr};
      }
      case K::not_: return unary(e, Type::Kind::boolean);
      case K::neg: return unary(e, Type::Kind::integer);
      case K::and_:
      case K::or_: return binary(e, Type::Kind::boolean, Type::Kind::boolean);
      case K::add:
      case K::sub: return binary(e, Type::Kind::integer, Type::Kind::integer);
      case K::mod: {
        Type t = binary(e, Type::Kind::integer, Type::Kind::integer);
        if (e.args[1].kind != K::int_lit || e.args[1].value <= 0)
          error(element_, "type error: mod requires a positive integer literal divisor");
        return t;
      }
      case K::lt:
      case K::le:
      case K::gt:
      case K::ge: return binary(e, Type::Kind::integer, Type::Kind::boolean);
      case K::eq:
      case K::ne: {
        const VarDomain* lhint = nullptr;
        const VarDomain* rhint = nullptr;
        auto enum_of_ref = [&](const Expr& side) -> const VarDomain* {
          if (side.kind != K::var_ref) return nullptr;
          const Variable* v = spec_.find_variable(side.name);
          return v && v->domain.kind == VarDomain::Kind::enumeration ? &v->domain : nullptr;
        };
        rhint = enum_of_ref(e.args[0]);
        lhint = enum_of_ref(e.args[1]);
        Type l = check(e.args[0], lhint);
        Type r = check(e.args[1], rhint ? rhint : l.enumeration);
        if (l.kind == Type::Kind::error || r.kind == Type::Kind::error) return {Type::Kind::boolean, nullptr};
        if (!same_type(l, r))
          error(element_, "type error: cannot compare " + type_name(l) + " with " + type_name(r));
        return {Type::Kind::boolean, nullptr};
      }
    }
    return {};
  }

  Type unary(const Expr& e, Type::Kind want) {
    Type t = check(e.args[0], nullptr);
    if (t.kind != Type::Kind::error && t.kind != want) {
      error(element_, std::string("type error: operand of '") + std::string(operator_symbol(e.kind)) +
                          "' must be " + type_name({want, nullptr}));
      return {};
    }
    return {want, nullptr};
  }

  Type binary(const Expr& e, Type::Kind operand, Type::Kind result) {
    Type l = check(e.args[0], nullptr);
    Type r = check(e.args[1], nullptr);
    bool bad = (l.kind != Type::Kind::error && l.kind != operand) ||
               (r.kind != Type::Kind::error && r.kind != operand);
    if (bad) {
      error(element_, std::string("type error: operands of '") + std::string(operator_symbol(e.kind)) +
                          "' must be " + type_name({operand, nullptr}));
      return {};
    }
    return {result, nullptr};
  }

  const Specification& spec_;
  std::vector<Diagnostic>& out_;
  std::vector<const VarDomain*> enums_;
  std::string element_;
};

void check_domain(const Variable& v, Checker& checker) {
  const auto& d = v.domain;
  if (d.kind == VarDomain::Kind::integer && (d.lo < 0 || d.lo > d.hi))
    checker.error(v.name, "invalid integer range [" + std::to_string(d.lo) + ".." + std::to_string(d.hi) + "]");
  if (d.kind == VarDomain::Kind::enumeration) {
    if (d.literals.empty()) checker.error(v.name, "enumeration needs at least one literal");
    std::set<std::string> seen;
    for (const auto& l : d.literals)
      if (!seen.insert(l).second) checker.error(v.name, "duplicate enumeration literal '" + l + "'");
  }
  for (int value : v.initial_values)
    if (!d.contains(value)) checker.error(v.name, "initial value " + std::to_string(value) + " outside domain");
}

}  // namespace

std::vector<Diagnostic> validate(const Specification& spec, ValidateOptions options) {
  std::vector<Diagnostic> out;
  Checker checker(spec, out);

  std::set<std::string, std::less<>> event_names;
  for (const auto& e : spec.events) {
    if (e.name.empty()) checker.error("event", "empty event name");
    if (!event_names.insert(e.name).second) checker.error(e.name, "duplicate event '" + e.name + "'");
  }

  std::set<std::string, std::less<>> var_names;
  std::set<std::string, std::less<>> aut_names;
  for (const auto& a : spec.automata)
    if (!aut_names.insert(a.name).second) checker.error(a.name, "duplicate automaton '" + a.name + "'");

  auto declare_var = [&](const Variable& v) {
    if (!var_names.insert(v.name).second) checker.error(v.name, "duplicate variable '" + v.name + "'");
    if (aut_names.contains(v.name)) checker.error(v.name, "variable name clashes with automaton '" + v.name + "'");
    check_domain(v, checker);
  };
  for (const auto& v : spec.inputs) {
    declare_var(v);
    if (v.kind != VarKind::input) checker.error(v.name, "input variable has wrong kind");
  }
  for (const auto& a : spec.automata) {
    for (const auto& v : a.variables) {
      declare_var(v);
      if (v.kind != VarKind::discrete) checker.error(v.name, "automaton variable must be discrete");
    }
  }

  for (const auto& a : spec.automata) {
    if (a.kind == AutomatonKind::supervisor && !options.allow_supervisors)
      checker.error(a.name, "supervisor automata are not accepted as input");
    if (a.locations.empty()) checker.error(a.name, "automaton needs at least one location");

    std::set<std::string, std::less<>> alpha;
    if (a.alphabet) {
      for (const auto& ev : *a.alphabet) {
        if (!event_names.contains(ev)) checker.error(a.name, "unresolved event '" + ev + "' in alphabet");
        if (!alpha.insert(ev).second) checker.error(a.name, "duplicate alphabet event '" + ev + "'");
      }
    }

    std::set<std::string, std::less<>> loc_names;
    for (const auto& loc : a.locations) {
      const std::string where = a.name + "." + loc.name;
      if (!loc_names.insert(loc.name).second) checker.error(where, "duplicate location '" + loc.name + "'");
      if (loc.initial) checker.expect_bool(*loc.initial, where);
      if (loc.marked) checker.expect_bool(*loc.marked, where);
      for (const auto& edge : loc.edges) {
        if (edge.events.empty()) checker.error(where, "edge without events");
        for (const auto& ev : edge.events) {
          if (!event_names.contains(ev)) checker.error(where, "unresolved event '" + ev + "'");
          else if (a.alphabet && !alpha.contains(ev))
            checker.error(where, "event '" + ev + "' not in explicit alphabet");
        }
        if (edge.target >= a.locations.size()) checker.error(where, "edge target out of range");
        checker.expect_bool(edge.guard, where);
        std::set<std::string, std::less<>> assigned;
        for (const auto& upd : edge.updates) {
          const Automaton* owner = nullptr;
          const Variable* v = spec.find_variable(upd.variable, &owner);
          if (!v) {
            checker.error(where, "unresolved reference '" + upd.variable + "'");
            continue;
          }
          if (owner != &a || v->kind != VarKind::discrete)
            checker.error(where, "write outside owner: '" + upd.variable + "'");
          if (!assigned.insert(upd.variable).second)
            checker.error(where, "multiple assignments to '" + upd.variable + "'");
          checker.expect_value(upd.value, v->domain, where);
        }
      }
    }
  }

  for (const auto& inv : spec.invariants) {
    const std::string where = "invariant";
    if (inv.side == InvariantSide::supervisor && !options.allow_supervisors)
      checker.error(where, "supervisor invariants are not accepted as input");
    if (inv.kind == InvariantKind::state) {
      if (!inv.event.empty()) checker.error(where, "state invariant with event");
    } else if (!event_names.contains(inv.event)) {
      checker.error(where, "unresolved event '" + inv.event + "'");
    }
    checker.expect_bool(inv.predicate, where);
  }
  for (const auto& p : spec.initial_predicates) checker.expect_bool(p, "initialization predicate");
  for (const auto& p : spec.marker_predicates) checker.expect_bool(p, "marker predicate");
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

int MapValuation::value_of(std::string_view variable) const {
  auto it = values.find(variable);
  if (it == values.end()) throw std::out_of_range("no value for variable '" + std::string(variable) + "'");
  return it->second;
}

bool MapValuation::in_location(std::string_view automaton, std::string_view location) const {
  auto it = locations.find(automaton);
  if (it == locations.end()) throw std::out_of_range("no location for automaton '" + std::string(automaton) + "'");
  return it->second == location;
}

int math_mod(int a, int b) {
  int r = a % b;
  return r < 0 ? r + (b < 0 ? -b : b) : r;
}

int eval(const Expr& e, const Valuation& state) {
  using K = ExprKind;
  switch (e.kind) {
    case K::int_lit:
    case K::bool_lit:
    case K::enum_lit: return e.value;
    case K::var_ref: return state.value_of(e.name);
    case K::loc_ref: return state.in_location(e.name, e.location) ? 1 : 0;
    case K::not_: return eval(e.args[0], state) ? 0 : 1;
    case K::neg: return -eval(e.args[0], state);
    case K::and_: return eval(e.args[0], state) && eval(e.args[1], state) ? 1 : 0;
    case K::or_: return eval(e.args[0], state) || eval(e.args[1], state) ? 1 : 0;
    default: break;
  }
  const int a = eval(e.args[0], state);
  const int b = eval(e.args[1], state);
  switch (e.kind) {
    case K::add: return a + b;
    case K::sub: return a - b;
    case K::mod: return math_mod(a, b);
    case K::eq: return a == b;
    case K::ne: return a != b;
    case K::lt: return a < b;
    case K::le: return a <= b;
    case K::gt: return a > b;
    case K::ge: return a >= b;
    default: throw std::logic_error("eval: unexpected expression kind");
  }
}

// ---------------------------------------------------------------------------
// Statistics

ModelStats& ModelStats::operator+=(const ModelStats& o) {
  controllable_events += o.controllable_events;
  uncontrollable_events += o.uncontrollable_events;
  plant_automata += o.plant_automata;
  requirement_automata += o.requirement_automata;
  plant_locations += o.plant_locations;
  requirement_locations += o.requirement_locations;
  plant_edges += o.plant_edges;
  requirement_edges += o.requirement_edges;
  plant_guards += o.plant_guards;
  requirement_guards += o.requirement_guards;
  plant_assignments += o.plant_assignments;
  requirement_assignments += o.requirement_assignments;
  plant_initial_locations += o.plant_initial_locations;
  requirement_initial_locations += o.requirement_initial_locations;
  component_initializations += o.component_initializations;
  plant_marked_locations += o.plant_marked_locations;
  requirement_marked_locations += o.requirement_marked_locations;
  component_markers += o.component_markers;
  variables += o.variables;
  variable_values += o.variable_values;
  plant_state_invariants += o.plant_state_invariants;
  requirement_state_invariants += o.requirement_state_invariants;
  plant_event_invariants += o.plant_event_invariants;
  requirement_event_invariants += o.requirement_event_invariants;
  return *this;
}

ModelStats model_stats(const Specification& spec) {
  ModelStats s;
  for (const auto& e : spec.events) {
    if (e.controllable()) ++s.controllable_events;
    else ++s.uncontrollable_events;
  }
  auto count_var = [&](const Variable& v) {
    ++s.variables;
    s.variable_values += static_cast<std::size_t>(v.domain.size());
  };
  for (const auto& v : spec.inputs) count_var(v);
  for (const auto& a : spec.automata) {
    const bool req = a.kind == AutomatonKind::requirement;
    for (const auto& v : a.variables) count_var(v);
    ++(req ? s.requirement_automata : s.plant_automata);
    for (const auto& loc : a.locations) {
      ++(req ? s.requirement_locations : s.plant_locations);
      if (loc.initial) ++(req ? s.requirement_initial_locations : s.plant_initial_locations);
      if (loc.marked) ++(req ? s.requirement_marked_locations : s.plant_marked_locations);
      for (const auto& edge : loc.edges) {
        const std::size_t k = edge.events.size();
        (req ? s.requirement_edges : s.plant_edges) += k;
        if (!edge.guard.is_true()) (req ? s.requirement_guards : s.plant_guards) += k;
        (req ? s.requirement_assignments : s.plant_assignments) += k * edge.updates.size();
      }
    }
  }
  s.component_initializations = spec.initial_predicates.size();
  s.component_markers = spec.marker_predicates.size();
  for (const auto& inv : spec.invariants) {
    const bool req = inv.side != InvariantSide::plant;
    if (inv.kind == InvariantKind::state) ++(req ? s.requirement_state_invariants : s.plant_state_invariants);
    else ++(req ? s.requirement_event_invariants : s.plant_event_invariants);
  }
  return s;
}

std::vector<std::pair<std::string, std::size_t>> stats_columns(const ModelStats& s) {
  return {
      {"Sc", s.controllable_events},
      {"Su", s.uncontrollable_events},
      {"Ap", s.plant_automata},
      {"Ar", s.requirement_automata},
      {"lp", s.plant_locations},
      {"lr", s.requirement_locations},
      {"ep", s.plant_edges},
      {"er", s.requirement_edges},
      {"gp", s.plant_guards},
      {"gr", s.requirement_guards},
      {"ap", s.plant_assignments},
      {"ar", s.requirement_assignments},
      {"ip", s.plant_initial_locations},
      {"ir", s.requirement_initial_locations},
      {"ic", s.component_initializations},
      {"mp", s.plant_marked_locations},
      {"mr", s.requirement_marked_locations},
      {"mc", s.component_markers},
      {"vn", s.variables},
      {"vv", s.variable_values},
      {"tps", s.plant_state_invariants},
      {"trs", s.requirement_state_invariants},
      {"tpe", s.plant_event_invariants},
      {"tre", s.requirement_event_invariants},
  };
}

}  // namespace symsynth
