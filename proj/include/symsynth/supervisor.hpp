#pragma once

// Controlled-system output model: the plantified input with a supervisor
// automaton holding one guarded self-loop per controllable event.

#include <map>
#include <string>

#include "symsynth/model.hpp"
#include "symsynth/sefa.hpp"
#include "symsynth/synthesis.hpp"

namespace symsynth {

/// Expression equal to `f` on every in-range state. `f` must only depend on
/// current-state bits.
Expr lower_bdd_to_expr(const Sefa& sefa, const Bdd& f);

struct EmitOptions {
  bool simplify = true;
  // Parts of the simplification assumption (for debugging).
  bool assume_plant_guards = true;
  bool assume_plant_invariants = true;
  bool assume_requirements = true;
  bool assume_controlled = true;
  std::string automaton = "sup";
};

struct SupervisorModel {
  Specification spec;
  std::string automaton;             // name of the added supervisor automaton
  std::map<std::string, Bdd> guards;  // emitted guard per controllable event
  std::map<std::string, Bdd> assumptions;
  Bdd initialization;
};

/// `plantified` is the model `sefa` was encoded from (before linearization).
/// Throws std::invalid_argument for an empty supervisor.
SupervisorModel emit(const Specification& plantified, const Sefa& sefa, const SynthesisResult& result,
                     const EmitOptions& options = {});

SupervisorModel emit(const SynthesisRun& run, const EmitOptions& options = {});

/// The emitted model with supervisor automata and invariants turned into
/// plant ones, so it can be analysed as an uncontrolled system.
Specification as_plant_model(const Specification& emitted);

}  // namespace symsynth
