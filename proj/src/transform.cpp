#include "symsynth/transform.hpp"

#include <algorithm>
#include <stdexcept>

namespace symsynth {

const Variable* LinearizedModel::find_variable(std::string_view name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

const Event* LinearizedModel::find_event(std::string_view name) const {
  for (const auto& e : events)
    if (e.name == name) return &e;
  return nullptr;
}

std::size_t LinearizedModel::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return i;
  throw std::out_of_range("unknown variable '" + std::string(name) + "'");
}

void collect_variables(const Expr& expr, std::vector<std::string>& out) {
  if (expr.kind == ExprKind::var_ref) {
    if (std::find(out.begin(), out.end(), expr.name) == out.end()) out.push_back(expr.name);
    return;
  }
  for (const auto& a : expr.args) collect_variables(a, out);
}

Specification plantify(const Specification& spec) {
  Specification out = spec;
  for (auto& aut : out.automata) {
    if (aut.kind != AutomatonKind::requirement) continue;
    const auto alphabet = alphabet_of(spec, aut);
    for (std::size_t li = 0; li < aut.locations.size(); ++li) {
      auto& loc = aut.locations[li];
      std::vector<Edge> added;
      for (const auto& sigma : alphabet) {
        std::vector<Expr> guards;
        for (const auto& e : loc.edges)
          if (std::find(e.events.begin(), e.events.end(), sigma) != e.events.end()) guards.push_back(e.guard);
        Expr blocked = make_not(disjunction(guards));
        // Some edge is unconditionally enabled: nothing to complete.
        if (blocked.is_false()) continue;
        Edge loop;
        loop.events = {sigma};
        loop.guard = blocked;
        loop.target = li;
        added.push_back(std::move(loop));
        out.invariants.push_back(Invariant{InvariantKind::disables, InvariantSide::requirement, sigma,
                                           make_and(Expr::loc(aut.name, loc.name), blocked)});
      }
      for (auto& e : added) loc.edges.push_back(std::move(e));
    }
    aut.kind = AutomatonKind::plant;
    aut.plantified = true;
  }
  return out;
}

Specification plant_only(const Specification& spec) {
  Specification out = spec;
  std::erase_if(out.automata, [](const Automaton& a) { return a.kind == AutomatonKind::requirement; });
  std::erase_if(out.invariants, [](const Invariant& i) { return i.side != InvariantSide::plant; });
  return out;
}

namespace {

bool has_pointer(const Automaton& aut) { return aut.locations.size() > 1; }

Expr pointer_is(const Automaton& aut, std::size_t loc) {
  return Expr::binary(ExprKind::eq, Expr::var(aut.name), Expr::enum_lit(aut.locations[loc].name, static_cast<int>(loc)));
}

// Replaces location references by pointer tests.
Expr lower_locations(const Expr& e, const Specification& spec) {
  if (e.kind == ExprKind::loc_ref) {
    const Automaton* aut = spec.find_automaton(e.name);
    if (!aut) throw std::invalid_argument("unknown automaton '" + e.name + "'");
    if (!has_pointer(*aut)) return Expr::boolean(true);
    for (std::size_t i = 0; i < aut->locations.size(); ++i)
      if (aut->locations[i].name == e.location) return pointer_is(*aut, i);
    throw std::invalid_argument("unknown location '" + e.name + "." + e.location + "'");
  }
  Expr out = e;
  for (auto& a : out.args) a = lower_locations(a, spec);
  return out;
}

struct LocalEdge {
  std::size_t source;
  const Edge* edge;
};

}  // namespace

LinearizedModel linearize(const Specification& spec, std::vector<Diagnostic>* diagnostics) {
  for (const auto& a : spec.automata)
    if (a.kind == AutomatonKind::requirement)
      throw std::invalid_argument("linearize: requirement automaton '" + a.name + "' must be plantified first");

  LinearizedModel m;
  m.events = spec.events;
  m.variables = spec.inputs;
  for (const auto& aut : spec.automata) {
    if (has_pointer(aut)) {
      std::vector<std::string> names;
      for (const auto& l : aut.locations) names.push_back(l.name);
      m.variables.push_back(Variable{aut.name, VarDomain::enumeration(names), VarKind::location_pointer, {}});
    }
    for (const auto& v : aut.variables) m.variables.push_back(v);
  }

  for (const auto& ev : spec.events) {
    // Per synchronizing automaton, its edges for this event.
    std::vector<const Automaton*> sync;
    std::vector<std::vector<LocalEdge>> choices;
    for (const auto& aut : spec.automata) {
      const auto alpha = alphabet_of(spec, aut);
      if (std::find(alpha.begin(), alpha.end(), ev.name) == alpha.end()) continue;
      std::vector<LocalEdge> edges;
      for (std::size_t li = 0; li < aut.locations.size(); ++li)
        for (const auto& e : aut.locations[li].edges)
          if (std::find(e.events.begin(), e.events.end(), ev.name) != e.events.end()) edges.push_back({li, &e});
      sync.push_back(&aut);
      choices.push_back(std::move(edges));
    }
    if (sync.empty()) {
      if (diagnostics) diagnostics->push_back({ev.name, "event is not in the alphabet of any automaton", std::nullopt});
      continue;
    }
    if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) continue;

    // Odometer over the per-automaton choices; the last automaton varies
    // fastest, giving lexicographic order over edge indices.
    std::vector<std::size_t> pick(sync.size(), 0);
    for (;;) {
      LinearizedEdge le;
      le.event = ev.name;
      for (std::size_t k = 0; k < sync.size(); ++k) {
        const Automaton& aut = *sync[k];
        const LocalEdge& ch = choices[k][pick[k]];
        if (has_pointer(aut)) le.guard = make_and(std::move(le.guard), pointer_is(aut, ch.source));
        le.guard = make_and(std::move(le.guard), lower_locations(ch.edge->guard, spec));
        if (has_pointer(aut) && ch.edge->target != ch.source) {
          const auto& tgt = aut.locations[ch.edge->target];
          le.updates.push_back({aut.name, Expr::enum_lit(tgt.name, static_cast<int>(ch.edge->target))});
        }
        for (const auto& u : ch.edge->updates) le.updates.push_back({u.variable, lower_locations(u.value, spec)});
      }
      m.edges.push_back(std::move(le));
      bool done = true;
      for (std::size_t k = sync.size(); k-- > 0;) {
        if (++pick[k] < choices[k].size()) {
          done = false;
          break;
        }
        pick[k] = 0;
      }
      if (done) break;
    }
  }

  auto location_predicate = [&](const Automaton& aut, bool initial) {
    std::vector<Expr> terms;
    for (std::size_t li = 0; li < aut.locations.size(); ++li) {
      const auto& loc = aut.locations[li];
      const auto& flag = initial ? loc.initial : loc.marked;
      if (!flag) continue;
      Expr p = lower_locations(*flag, spec);
      terms.push_back(has_pointer(aut) ? make_and(pointer_is(aut, li), std::move(p)) : std::move(p));
    }
    return disjunction(terms);
  };
  for (const auto& aut : spec.automata) {
    Expr init = location_predicate(aut, true);
    if (!init.is_true()) m.initial_predicates.push_back(std::move(init));
  }
  for (const auto& p : spec.initial_predicates) m.initial_predicates.push_back(lower_locations(p, spec));
  for (const auto& aut : spec.automata) {
    Expr marked = location_predicate(aut, false);
    if (!marked.is_true()) m.marker_predicates.push_back(std::move(marked));
  }
  for (const auto& p : spec.marker_predicates) m.marker_predicates.push_back(lower_locations(p, spec));
  for (const auto& inv : spec.invariants) {
    Invariant out = inv;
    out.predicate = lower_locations(inv.predicate, spec);
    m.invariants.push_back(std::move(out));
  }
  return m;
}

Specification to_specification(const LinearizedModel& model, const std::string& automaton_name) {
  Specification s;
  s.events = model.events;
  Automaton aut;
  aut.name = automaton_name;
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::input) {
      s.inputs.push_back(v);
    } else {
      Variable d = v;
      d.kind = VarKind::discrete;
      aut.variables.push_back(std::move(d));
    }
  }
  Location loc;
  loc.name = "L";
  loc.initial = Expr::boolean(true);
  loc.marked = Expr::boolean(true);
  for (const auto& e : model.edges) loc.edges.push_back(Edge{{e.event}, e.guard, e.updates, 0});
  aut.locations.push_back(std::move(loc));
  std::vector<std::string> alpha;
  for (const auto& e : model.events) alpha.push_back(e.name);
  aut.alphabet = alpha;
  s.automata.push_back(std::move(aut));
  s.initial_predicates = model.initial_predicates;
  s.marker_predicates = model.marker_predicates;
  s.invariants = model.invariants;
  return s;
}

}  // namespace symsynth
