#include "symsynth/supervisor.hpp"

#include <algorithm>
#include <stdexcept>

namespace symsynth {

using bdd::Manager;

namespace {

class Lowering {
 public:
  explicit Lowering(const Sefa& s) : s_(s), m_(*s.manager) {
    for (std::size_t d = 0; d < s_.domains.size(); ++d) {
      std::vector<Bdd> eqs;
      const auto& dom = s_.domains[d].domain;
      for (int v = dom.min_value(); v <= dom.max_value(); ++v) eqs.push_back(s_.value_eq(d, v));
      values_.push_back(std::move(eqs));
    }
  }

  // Splits on the domains from root to leaves; values with equal cofactors
  // share one membership test.
  Expr lower(const Bdd& f, std::size_t k) {
    if (f.is_false()) return Expr::boolean(false);
    if (f.is_true() || k == s_.order.size()) return Expr::boolean(!f.is_false());
    const std::size_t d = s_.order[k];
    const int lo = s_.domains[d].domain.min_value();
    std::vector<Bdd> cof;
    for (const auto& eq : values_[d]) cof.push_back(m_.restrict(f, eq));
    if (std::all_of(cof.begin(), cof.end(), [&](const Bdd& c) { return c == cof.front(); }))
      return lower(cof.front(), k + 1);
    std::vector<std::pair<Bdd, std::vector<int>>> groups;
    for (std::size_t i = 0; i < cof.size(); ++i) {
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == cof[i]; });
      if (it == groups.end()) groups.push_back({cof[i], {lo + static_cast<int>(i)}});
      else it->second.push_back(lo + static_cast<int>(i));
    }
    std::vector<Expr> terms;
    for (const auto& [c, vals] : groups) {
      if (c.is_false()) continue;
      terms.push_back(make_and(membership(d, vals), lower(c, k + 1)));
    }
    return disjunction(terms);
  }

 private:
  Expr literal(std::size_t d, int v) const {
    const auto& sd = s_.domains[d];
    if (sd.kind == VarKind::location_pointer) return Expr::loc(sd.name, sd.domain.literals[v]);
    Expr lhs = Expr::var(sd.name);
    Expr rhs = sd.domain.kind == VarDomain::Kind::enumeration ? Expr::enum_lit(sd.domain.literals[v], v)
                                                              : Expr::integer(v);
    return Expr::binary(ExprKind::eq, std::move(lhs), std::move(rhs));
  }

  Expr membership(std::size_t d, const std::vector<int>& vals) const {
    const auto& sd = s_.domains[d];
    const auto& dom = sd.domain;
    if (dom.kind == VarDomain::Kind::boolean) {
      Expr v = Expr::var(sd.name);
      return vals.front() == 1 ? v : make_not(std::move(v));
    }
    std::vector<int> rest;
    for (int v = dom.min_value(); v <= dom.max_value(); ++v)
      if (!std::binary_search(vals.begin(), vals.end(), v)) rest.push_back(v);
    if (dom.kind == VarDomain::Kind::integer) return intervals(sd.name, dom, vals, rest);
    // Enumerations and locations: the shorter of the set and its complement.
    const bool negate = rest.size() < vals.size();
    std::vector<Expr> terms;
    for (int v : negate ? rest : vals) {
      Expr t = literal(d, v);
      if (negate) {
        if (t.kind == ExprKind::eq) t.kind = ExprKind::ne;
        else t = make_not(std::move(t));
      }
      terms.push_back(std::move(t));
    }
    return negate ? conjunction(terms) : disjunction(terms);
  }

  static Expr intervals(const std::string& name, const VarDomain& dom, const std::vector<int>& vals,
                        const std::vector<int>& rest) {
    auto cmp = [&](ExprKind k, int v) { return Expr::binary(k, Expr::var(name), Expr::integer(v)); };
    if (rest.size() == 1) return cmp(ExprKind::ne, rest.front());
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < vals.size();) {
      std::size_t j = i;
      while (j + 1 < vals.size() && vals[j + 1] == vals[j] + 1) ++j;
      const int a = vals[i], b = vals[j];
      if (a == b) terms.push_back(cmp(ExprKind::eq, a));
      else if (a == dom.min_value()) terms.push_back(cmp(ExprKind::le, b));
      else if (b == dom.max_value()) terms.push_back(cmp(ExprKind::ge, a));
      else terms.push_back(make_and(cmp(ExprKind::ge, a), cmp(ExprKind::le, b)));
      i = j + 1;
    }
    return disjunction(terms);
  }

  const Sefa& s_;
  Manager& m_;
  std::vector<std::vector<Bdd>> values_;
};

std::string fresh_name(const Specification& spec, const std::string& base) {
  auto taken = [&](const std::string& n) {
    return spec.find_automaton(n) || spec.find_variable(n) || spec.find_event(n);
  };
  std::string name = base;
  for (int i = 1; taken(name); ++i) name = base + "_" + std::to_string(i);
  return name;
}

}  // namespace

Expr lower_bdd_to_expr(const Sefa& sefa, const Bdd& f) { return Lowering(sefa).lower(f, 0); }

SupervisorModel emit(const Specification& plantified, const Sefa& sefa, const SynthesisResult& result,
                     const EmitOptions& options) {
  if (result.empty_supervisor) throw std::invalid_argument("empty supervisor: no controlled system to emit");
  Manager& m = *sefa.manager;
  SupervisorModel out;
  out.spec = plantified;
  Specification& spec = out.spec;

  for (auto& a : spec.automata)
    if (a.plantified) a.kind = AutomatonKind::supervisor;
  // Simplified guards rely on the requirements, so those stay as
  // supervisor invariants; raw guards enforce them on their own.
  if (options.simplify) {
    for (auto& inv : spec.invariants)
      if (inv.side == InvariantSide::requirement) inv.side = InvariantSide::supervisor;
  } else {
    std::erase_if(spec.invariants, [](const Invariant& i) { return i.side == InvariantSide::requirement; });
  }

  const Bdd& c = result.controlled;
  Bdd state_ok = m.const_true();
  if (options.assume_plant_invariants) state_ok &= sefa.pp;
  if (options.assume_requirements) state_ok &= sefa.pr;

  Lowering lower(sefa);
  for (const auto& [event, guard] : result.event_guards) {
    Bdd assume = options.assume_controlled ? c : m.const_true();
    if (options.assume_plant_invariants) assume &= sefa.pp;
    if (options.assume_plant_guards) {
      // States where some edge of the event is possible in the plant: it
      // would fail at runtime or it reaches a state the invariants allow.
      Bdd enabled = m.const_false();
      for (const auto& e : sefa.edges) {
        if (e.event != event) continue;
        enabled |= e.plant_error | (e.plant_guard & m.relprev(state_ok, e.relation, e.pairs));
      }
      assume &= enabled;
    }
    if (options.assume_requirements) {
      auto it = sefa.requirement_needs.find(event);
      if (it != sefa.requirement_needs.end()) assume &= it->second;
    }
    Bdd g = guard;
    if (options.simplify && !assume.is_false()) g = m.restrict(guard, assume);
    out.guards.emplace(event, g);
    out.assumptions.emplace(event, assume);
  }

  Bdd init = sefa.p0 & c;
  if (options.simplify) init = m.restrict(init, sefa.p0);
  out.initialization = init;
  spec.initial_predicates.push_back(lower.lower(init, 0));

  Automaton sup;
  sup.name = fresh_name(spec, options.automaton);
  sup.kind = AutomatonKind::supervisor;
  std::vector<std::string> alphabet;
  Location loc;
  loc.name = "s0";
  loc.initial = Expr::boolean(true);
  loc.marked = Expr::boolean(true);
  for (const auto& ev : spec.events) {
    if (!ev.controllable()) continue;
    alphabet.push_back(ev.name);
    Edge e;
    e.events = {ev.name};
    e.guard = lower.lower(out.guards.at(ev.name), 0);
    loc.edges.push_back(std::move(e));
  }
  sup.alphabet = alphabet;
  sup.locations.push_back(std::move(loc));
  out.automaton = sup.name;
  spec.automata.push_back(std::move(sup));
  return out;
}

SupervisorModel emit(const SynthesisRun& run, const EmitOptions& options) {
  return emit(plantify(run.input), run.sefa, run.result, options);
}

Specification as_plant_model(const Specification& emitted) {
  Specification out = emitted;
  for (auto& a : out.automata) {
    if (a.kind == AutomatonKind::supervisor) a.kind = AutomatonKind::plant;
    a.plantified = false;
  }
  for (auto& inv : out.invariants)
    if (inv.side == InvariantSide::supervisor) inv.side = InvariantSide::plant;
  return out;
}

}  // namespace symsynth
