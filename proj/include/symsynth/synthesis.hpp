#pragma once

// Symbolic supervisory controller synthesis: reachability over SEFA edges,
// the synthesis fixed point and guard strengthening.

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "symsynth/sefa.hpp"
#include "symsynth/var_order.hpp"

namespace symsynth {

enum class Granularity { per_edge, per_event };

// compound: precomputed partial relation, relnext/relprev with the
// restriction folded in. naive: full relation (frames for unassigned
// variables), guard/update/restriction conjoined per reachability run, error
// applied separately, quantification and renaming as separate operations.
enum class EdgeApplication { compound, naive };

struct ReachOptions {
  bool early_stop = true;
  EdgeApplication application = EdgeApplication::compound;
};

struct ReachStats {
  std::uint64_t edge_applications = 0;
  std::uint64_t successful_applications = 0;
  std::uint64_t searches = 0;

  ReachStats& operator+=(const ReachStats& o);
};

/// Least fixed point of P := P or (pre_e(P) and restriction) over `edges`.
Bdd brs(const Sefa& sefa, const Bdd& start, const std::vector<const SymbolicEdge*>& edges, const Bdd& restriction,
        const ReachOptions& options, ReachStats* stats = nullptr);
/// Forward dual of brs.
Bdd frs(const Sefa& sefa, const Bdd& start, const std::vector<const SymbolicEdge*>& edges, const Bdd& restriction,
        const ReachOptions& options, ReachStats* stats = nullptr);

std::vector<const SymbolicEdge*> all_edges(const Sefa& sefa);
std::vector<const SymbolicEdge*> uncontrollable_edges(const Sefa& sefa);

struct SynthesisConfig {
  bool forward_reachability = false;
  bool early_stop = true;
  Granularity granularity = Granularity::per_event;
  bool stop_on_empty_init = true;
  bool skip_redundant = true;
  EdgeApplication application = EdgeApplication::compound;
  PlantInvariantMode plant_invariants = PlantInvariantMode::implication_check;
  OrderConfig order;
  bdd::ManagerOptions manager;

  static SynthesisConfig v40();
  static SynthesisConfig v08();
};

/// Preset name ("v40", "v08") to config.
SynthesisConfig preset(const std::string& name);

struct StageCounts {
  std::uint64_t nonblocking = 0;
  std::uint64_t controllable = 0;
  std::uint64_t forward = 0;
  std::uint64_t skipped = 0;
  std::uint64_t rounds = 0;
};

// BDD operations spent per stage kind.
struct StageOperations {
  std::uint64_t nonblocking = 0;
  std::uint64_t controllable = 0;
  std::uint64_t forward = 0;
  std::uint64_t guards = 0;
};

struct SynthesisResult {
  Bdd controlled;  // C
  Bdd controlled_initial;
  Bdd controlled_marked;
  // Per SEFA edge: guard after strengthening (uncontrollable edges unchanged).
  std::vector<Bdd> edge_guards;
  // Per controllable event: disjunction of its strengthened edge guards.
  std::map<std::string, Bdd> event_guards;
  bool empty_supervisor = false;
  ReachStats reach;
  StageCounts stages;
  StageOperations operations;
};

SynthesisResult sscs(const Sefa& sefa, const SynthesisConfig& config);

/// Edges of `sefa` with the strengthened guards of `result` (relations
/// rebuilt).
std::vector<SymbolicEdge> strengthened_edges(const Sefa& sefa, const SynthesisResult& result);

struct PhaseTimes {
  double linearize_ms = 0;
  double order_ms = 0;
  double encode_ms = 0;
  double synthesis_ms = 0;
};

struct SynthesisRun {
  Specification input;
  LinearizedModel model;
  VarOrder order;
  Sefa sefa;
  SynthesisResult result;
  std::vector<Diagnostic> diagnostics;
  bdd::Metrics metrics;
  std::uint64_t encode_operations = 0;
  PhaseTimes times;
};

/// plantify, linearize, order, encode, optionally merge, sscs.
SynthesisRun synthesize(const Specification& spec, const SynthesisConfig& config);

/// Uncontrolled (plant only) and controlled reachable state counts.
struct StateCounts {
  bdd::BigInt uncontrolled;
  bdd::BigInt controlled;
};

bdd::BigInt count_uncontrolled(const Specification& spec, const SynthesisConfig& config);
bdd::BigInt count_controlled(const SynthesisRun& run);
StateCounts count_states(const Specification& spec, const SynthesisConfig& config);

}  // namespace symsynth
