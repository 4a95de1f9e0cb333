#pragma once

// Plantification of requirement automata and linearization of the automaton
// composition into a single location with self-loop edges.

#include <string>
#include <vector>

#include "symsynth/model.hpp"

namespace symsynth {

struct LinearizedEdge {
  std::string event;
  Expr guard = Expr::boolean(true);
  std::vector<Assignment> updates;

  bool operator==(const LinearizedEdge&) const = default;
};

struct LinearizedModel {
  std::vector<Event> events;
  // Inputs first, then per automaton its location pointer (if any) and its
  // discrete variables.
  std::vector<Variable> variables;
  std::vector<LinearizedEdge> edges;
  std::vector<Expr> initial_predicates;
  std::vector<Expr> marker_predicates;
  std::vector<Invariant> invariants;

  const Variable* find_variable(std::string_view name) const;
  const Event* find_event(std::string_view name) const;
  std::size_t variable_index(std::string_view name) const;
};

Specification plantify(const Specification& spec);

/// Requires a plantified specification. Events that no automaton
/// synchronizes on get no edges and a warning in `diagnostics`.
LinearizedModel linearize(const Specification& spec, std::vector<Diagnostic>* diagnostics = nullptr);

/// The specification with requirement automata and requirement invariants
/// removed.
Specification plant_only(const Specification& spec);

/// The linearized model as a single-automaton specification, for dumping.
Specification to_specification(const LinearizedModel& model, const std::string& automaton_name = "linearized");

/// Variables read by an expression, in first-occurrence order.
void collect_variables(const Expr& expr, std::vector<std::string>& out);

}  // namespace symsynth
