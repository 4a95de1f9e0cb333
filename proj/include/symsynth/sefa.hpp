#pragma once

// Symbolic EFA: BDD encoding of a linearized model, including runtime-error
// predicates, input-variable edges and all invariant kinds.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "symsynth/bdd.hpp"
#include "symsynth/transform.hpp"
#include "symsynth/var_order.hpp"

namespace symsynth {

using bdd::Bdd;

struct SymbolicDomain {
  std::string name;
  VarDomain domain;
  VarKind kind = VarKind::discrete;
  unsigned width = 1;
  std::vector<bdd::VarId> cur;   // least significant bit first
  std::vector<bdd::VarId> next;

  int representable_max() const { return (1 << width) - 1; }
};

struct SymbolicEdge {
  std::string event;
  bool controllable = true;
  Bdd guard;
  Bdd error;
  Bdd update;
  Bdd relation;  // guard and not error and update
  // Encoded model guard conjoined with plant needs-invariants; the
  // uncontrolled enabling condition used as simplification assumption.
  Bdd plant_guard;
  // States where the plant enables the edge but an update fails.
  Bdd plant_error;
  std::vector<std::size_t> assigned;  // domain indices, ascending
  bdd::VarPairs pairs;
  std::vector<std::size_t> sources;  // linearized edge indices (input edges: none)
};

enum class PlantInvariantMode { implication_check, always_conjoin, simplify };

struct EncodeOptions {
  PlantInvariantMode plant_invariants = PlantInvariantMode::implication_check;
  bdd::ManagerOptions manager;
};

class Sefa {
 public:
  std::unique_ptr<bdd::Manager> manager;
  std::vector<SymbolicDomain> domains;  // model variable order
  std::vector<std::size_t> order;       // domain indices from root to leaves
  std::vector<Event> events;            // model events then input events
  std::vector<SymbolicEdge> edges;
  bool per_event = false;

  Bdd p0;
  Bdd pm;
  Bdd pf;
  Bdd pp;        // plant state invariants
  Bdd pr;        // requirement state invariants (ranges not included)
  Bdd in_range;  // every variable within its domain
  // Requirement needs-predicates per event (disables already negated).
  std::map<std::string, Bdd> requirement_needs;

  bdd::VarSet current_vars;
  bdd::VarSet next_vars;
  bdd::VarMap next_to_current;
  bdd::VarMap current_to_next;
  std::vector<Bdd> frames;  // per domain: x+ = x

  std::size_t domain_index(std::string_view name) const;
  const Event* find_event(std::string_view name) const;

  Bdd value_eq(std::size_t domain, int value, bool next = false) const;
  Bdd domain_in_range(std::size_t domain, bool next = false) const;
  /// Predicate over current-state bits for a boolean expression.
  Bdd encode_predicate(const Expr& expr) const;

  struct EncodedAssignment {
    Bdd update;
    Bdd error;
  };
  EncodedAssignment encode_assignment(const std::string& variable, const Expr& value) const;

  /// Number of states (current-bit valuations) in `p`.
  bdd::BigInt count(const Bdd& p) const;
  /// Decodes a full current-bit assignment for `p`'s evaluation.
  std::vector<bool> bits_of(const std::vector<int>& values) const;
};

Sefa build_sefa(const LinearizedModel& model, const VarOrder& order, const EncodeOptions& options = {});

/// Folds all edges of each event into one edge.
Sefa merge_per_event(Sefa&& sefa);

/// Recomputes a relation from guard/error/update and the support pairs.
void finalize_edge(const Sefa& sefa, SymbolicEdge& edge);

}  // namespace symsynth
