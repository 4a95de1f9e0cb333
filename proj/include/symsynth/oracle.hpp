#pragma once

// Explicit-state reference synthesis for small models. States range over
// every bit-representable valuation, so the results can be compared with
// the symbolic ones state by state; states outside the declared ranges are
// forbidden exactly as in the symbolic encoding.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symsynth/sefa.hpp"
#include "symsynth/transform.hpp"

namespace symsynth::oracle {

struct Layout {
  std::vector<std::string> names;
  std::vector<VarDomain> domains;
  std::vector<VarKind> kinds;
  std::vector<int> raw_size;  // 2^width per variable
  std::uint64_t state_count = 1;

  std::vector<int> decode(std::uint64_t index) const;
  std::uint64_t encode(const std::vector<int>& values) const;
  bool in_range(const std::vector<int>& values) const;
  std::size_t index_of(std::string_view name) const;
};

struct ExplicitEdge {
  std::string event;
  bool controllable = true;
  std::vector<char> guard;                        // final SEFA guard per state
  std::vector<std::vector<std::uint32_t>> targets;  // per state, if no runtime error
};

struct ExplicitTs {
  Layout layout;
  std::vector<Event> events;  // model events (no input events)
  std::vector<ExplicitEdge> edges;
  std::vector<char> initial;
  std::vector<char> marked;
  std::vector<char> forbidden;
  std::vector<char> in_range;
};

struct Options {
  std::uint64_t state_cap = 1'000'000;
  bool parallel = true;
  PlantInvariantMode plant_invariants = PlantInvariantMode::implication_check;
};

/// From the linearized model.
ExplicitTs enumerate(const LinearizedModel& model, const Options& options = {});
/// Directly from a specification: plantify, then the synchronous product of
/// its automata without going through linearization.
ExplicitTs enumerate_product(const Specification& spec, const Options& options = {});

struct ExplicitResult {
  std::vector<char> controlled;
  std::map<std::string, std::vector<char>> event_guards;  // controllable events
  bool empty_supervisor = false;
};

ExplicitResult explicit_synthesis(const ExplicitTs& ts, bool forward, bool stop_on_empty_init = true);

/// Forward reachable states from `start` inside `within` using the given
/// per-edge guards (the edges' own guards when empty).
std::vector<char> reachable(const ExplicitTs& ts, const std::vector<char>& start, const std::vector<char>& within,
                            const std::vector<std::vector<char>>& guards = {});

std::uint64_t count(const std::vector<char>& set);

/// Explicit set of the layout states satisfying `p`; variables missing from
/// the SEFA are treated as 0.
std::vector<char> states_of(const Sefa& sefa, const Bdd& p, const Layout& layout);

/// Differences between a symbolic result and an explicit one, over all
/// states of the layout; empty when they agree.
struct Mismatch {
  std::string what;
  std::vector<int> state;
};
std::vector<Mismatch> compare(const Sefa& sefa, const Bdd& controlled, const std::map<std::string, Bdd>& event_guards,
                              const ExplicitTs& ts, const ExplicitResult& result, std::size_t limit = 10);

}  // namespace symsynth::oracle
