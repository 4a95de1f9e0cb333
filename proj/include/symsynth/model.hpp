#pragma once

// In-memory form of the supported extended-finite-automata language:
// events, variables, automata with guarded/updating edges, invariants and
// the boolean/integer expression language shared by all of them.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symsynth {

enum class Controllability { controllable, uncontrollable };

struct Event {
  std::string name;
  Controllability controllability = Controllability::controllable;

  bool controllable() const { return controllability == Controllability::controllable; }
  bool operator==(const Event&) const = default;
};

/// Finite data type of a variable. Values are always handled in their
/// integer encoding: booleans 0/1, integers as themselves, enumeration
/// literals by declaration index.
struct VarDomain {
  enum class Kind { boolean, integer, enumeration };

  Kind kind = Kind::boolean;
  int lo = 0;
  int hi = 1;
  std::vector<std::string> literals;

  static VarDomain boolean();
  static VarDomain integer(int lo, int hi);
  static VarDomain enumeration(std::vector<std::string> literals);

  /// Number of values in the domain.
  int size() const;
  int min_value() const;
  int max_value() const;
  bool contains(int value) const { return value >= min_value() && value <= max_value(); }

  bool operator==(const VarDomain&) const = default;
};

enum class VarKind { discrete, input, location_pointer };

struct Variable {
  std::string name;
  VarDomain domain;
  VarKind kind = VarKind::discrete;
  // Encoded potential initial values; empty means any value of the domain.
  std::vector<int> initial_values;

  bool operator==(const Variable&) const = default;
};

enum class ExprKind {
  int_lit,
  bool_lit,
  var_ref,
  enum_lit,
  loc_ref,
  not_,
  neg,
  and_,
  or_,
  add,
  sub,
  mod,
  eq,
  ne,
  lt,
  le,
  gt,
  ge,
};

/// Expression tree. `name` holds the variable, enumeration literal or
/// automaton name; `location` the location of a location reference;
/// `value` the literal value (enumeration literals carry their resolved
/// index, -1 while unresolved).
struct Expr {
  ExprKind kind = ExprKind::bool_lit;
  int value = 1;
  std::string name;
  std::string location;
  std::vector<Expr> args;

  static Expr integer(int v);
  static Expr boolean(bool b);
  static Expr var(std::string name);
  static Expr enum_lit(std::string name, int value = -1);
  static Expr loc(std::string automaton, std::string location);
  static Expr unary(ExprKind kind, Expr operand);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);

  bool is_true() const { return kind == ExprKind::bool_lit && value != 0; }
  bool is_false() const { return kind == ExprKind::bool_lit && value == 0; }

  bool operator==(const Expr&) const = default;
};

bool is_binary(ExprKind kind);
bool is_unary(ExprKind kind);
std::string_view operator_symbol(ExprKind kind);

/// Conjunction/disjunction builders that drop neutral elements.
Expr make_and(Expr lhs, Expr rhs);
Expr make_or(Expr lhs, Expr rhs);
Expr make_not(Expr operand);
Expr conjunction(const std::vector<Expr>& terms);
Expr disjunction(const std::vector<Expr>& terms);

struct Assignment {
  std::string variable;
  Expr value;

  bool operator==(const Assignment&) const = default;
};

/// An edge leaving the location that holds it.
struct Edge {
  std::vector<std::string> events;
  Expr guard = Expr::boolean(true);
  std::vector<Assignment> updates;
  std::size_t target = 0;  // index of the target location

  bool operator==(const Edge&) const = default;
};

struct Location {
  std::string name;
  // Present iff the location is (conditionally) initial / marked; the
  // expression is the condition (literal true when unconditional).
  std::optional<Expr> initial;
  std::optional<Expr> marked;
  std::vector<Edge> edges;

  bool operator==(const Location&) const = default;
};

enum class AutomatonKind { plant, requirement, supervisor };

struct Automaton {
  std::string name;
  AutomatonKind kind = AutomatonKind::plant;
  std::vector<Variable> variables;
  std::vector<Location> locations;
  std::optional<std::vector<std::string>> alphabet;
  // Set on requirement automata converted to plants by plantification.
  bool plantified = false;

  bool operator==(const Automaton&) const = default;
};

enum class InvariantKind { state, needs, disables };
enum class InvariantSide { plant, requirement, supervisor };

/// `state`: predicate must always hold. `needs`: event only when predicate
/// holds. `disables`: event never when predicate holds.
struct Invariant {
  InvariantKind kind = InvariantKind::state;
  InvariantSide side = InvariantSide::plant;
  std::string event;  // empty for state invariants
  Expr predicate = Expr::boolean(true);

  bool operator==(const Invariant&) const = default;
};

struct Specification {
  std::vector<Event> events;
  std::vector<Variable> inputs;
  std::vector<Automaton> automata;
  std::vector<Expr> initial_predicates;
  std::vector<Expr> marker_predicates;
  std::vector<Invariant> invariants;

  const Event* find_event(std::string_view name) const;
  const Automaton* find_automaton(std::string_view name) const;
  /// Discrete or input variable by name, with its owning automaton (null
  /// for inputs).
  const Variable* find_variable(std::string_view name, const Automaton** owner = nullptr) const;

  bool operator==(const Specification&) const = default;
};

/// Events an automaton synchronizes on, in event declaration order.
std::vector<std::string> alphabet_of(const Specification& spec, const Automaton& aut);

struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 0;
};

struct Diagnostic {
  std::string element;
  std::string message;
  std::optional<SourceSpan> span;
};

struct ValidateOptions {
  // Output models contain supervisor automata and supervisor invariants.
  bool allow_supervisors = false;
};

std::vector<Diagnostic> validate(const Specification& spec, ValidateOptions options = {});

/// Variable and location lookup used by `eval`.
class Valuation {
 public:
  virtual ~Valuation() = default;
  virtual int value_of(std::string_view variable) const = 0;
  virtual bool in_location(std::string_view automaton, std::string_view location) const = 0;
};

/// Map-backed valuation, convenient for tests and tools.
class MapValuation : public Valuation {
 public:
  std::map<std::string, int, std::less<>> values;
  std::map<std::string, std::string, std::less<>> locations;

  int value_of(std::string_view variable) const override;
  bool in_location(std::string_view automaton, std::string_view location) const override;
};

/// Evaluates a well-typed expression; booleans come back as 0/1. `mod`
/// yields the nonnegative mathematical remainder.
int eval(const Expr& expr, const Valuation& state);

int math_mod(int a, int b);

/// Counters of the model statistics table.
struct ModelStats {
  std::size_t controllable_events = 0;
  std::size_t uncontrollable_events = 0;
  std::size_t plant_automata = 0;
  std::size_t requirement_automata = 0;
  std::size_t plant_locations = 0;
  std::size_t requirement_locations = 0;
  std::size_t plant_edges = 0;
  std::size_t requirement_edges = 0;
  std::size_t plant_guards = 0;
  std::size_t requirement_guards = 0;
  std::size_t plant_assignments = 0;
  std::size_t requirement_assignments = 0;
  std::size_t plant_initial_locations = 0;
  std::size_t requirement_initial_locations = 0;
  std::size_t component_initializations = 0;
  std::size_t plant_marked_locations = 0;
  std::size_t requirement_marked_locations = 0;
  std::size_t component_markers = 0;
  std::size_t variables = 0;
  std::size_t variable_values = 0;
  std::size_t plant_state_invariants = 0;
  std::size_t requirement_state_invariants = 0;
  std::size_t plant_event_invariants = 0;
  std::size_t requirement_event_invariants = 0;

  bool operator==(const ModelStats&) const = default;
  ModelStats& operator+=(const ModelStats& other);
};

ModelStats model_stats(const Specification& spec);

/// Column names and values in table order (used by the CLI and reports).
std::vector<std::pair<std::string, std::size_t>> stats_columns(const ModelStats& stats);

}  // namespace symsynth
