#include "symsynth/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace symsynth::oracle {

std::vector<int> Layout::decode(std::uint64_t index) const {
  std::vector<int> v(raw_size.size());
  for (std::size_t i = raw_size.size(); i-- > 0;) {
    v[i] = static_cast<int>(index % raw_size[i]);
    index /= raw_size[i];
  }
  return v;
}

std::uint64_t Layout::encode(const std::vector<int>& values) const {
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < raw_size.size(); ++i) index = index * raw_size[i] + values[i];
  return index;
}

bool Layout::in_range(const std::vector<int>& values) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!domains[i].contains(values[i])) return false;
  return true;
}

std::size_t Layout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw std::out_of_range("unknown variable '" + std::string(name) + "'");
}

std::uint64_t count(const std::vector<char>& set) {
  return static_cast<std::uint64_t>(std::count(set.begin(), set.end(), 1));
}

namespace {

// One combination of synchronizing automaton edges.
struct Concrete {
  std::string event;
  bool controllable = true;
  std::vector<std::pair<std::size_t, int>> at;  // pointer index, source location
  std::vector<const Expr*> guards;
  std::vector<std::pair<std::size_t, const Expr*>> updates;
  std::vector<std::pair<std::size_t, int>> moves;  // pointer index, target location
};

struct AutomatonInfo {
  long pointer = -1;
  std::vector<std::string> locations;
};

struct Frontend {
  Layout layout;
  std::vector<Variable> variables;
  std::vector<Event> events;
  std::vector<Concrete> edges;
  std::vector<Expr> initial;
  std::vector<Expr> marked;
  std::vector<Invariant> invariants;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::string, AutomatonInfo> automata;

  void set_variables(std::vector<Variable> vars) {
    variables = std::move(vars);
    for (const auto& v : variables) {
      layout.names.push_back(v.name);
      layout.domains.push_back(v.domain);
      layout.kinds.push_back(v.kind);
      int w = 1;
      while ((1 << w) - 1 < v.domain.max_value()) ++w;
      layout.raw_size.push_back(1 << w);
      index[v.name] = layout.names.size() - 1;
    }
    layout.state_count = 1;
    for (int r : layout.raw_size) layout.state_count *= static_cast<std::uint64_t>(r);
  }
};

class StateValuation : public Valuation {
 public:
  StateValuation(const Frontend& f, const std::vector<int>& v) : f_(f), v_(v) {}

  int value_of(std::string_view name) const override { return v_[f_.index.at(std::string(name))]; }

  bool in_location(std::string_view automaton, std::string_view location) const override {
    const auto& a = f_.automata.at(std::string(automaton));
    auto it = std::find(a.locations.begin(), a.locations.end(), location);
    if (it == a.locations.end()) throw std::out_of_range("unknown location");
    if (a.pointer < 0) return true;
    return v_[a.pointer] == static_cast<int>(it - a.locations.begin());
  }

 private:
  const Frontend& f_;
  const std::vector<int>& v_;
};

bool holds(const Expr& e, const Valuation& val) { return eval(e, val) != 0; }

struct EdgeData {
  std::vector<char> glin;
  std::vector<char> error;
  std::vector<std::vector<std::uint32_t>> targets;
};

ExplicitTs build(const Frontend& f, const Options& options) {
  const Layout& L = f.layout;
  if (L.state_count > options.state_cap)
    throw std::length_error("explicit state space of " + std::to_string(L.state_count) + " states exceeds the cap");
  const std::size_t n = L.state_count;
  const std::size_t nv = L.names.size();

  ExplicitTs ts;
  ts.layout = L;
  ts.events = f.events;
  ts.in_range.assign(n, 0);
  ts.initial.assign(n, 0);
  ts.marked.assign(n, 0);
  std::vector<char> pp(n, 1), pr(n, 1), bad(n, 0);

  std::map<std::string, std::vector<char>> plant_needs, req_needs;
  for (const auto& inv : f.invariants) {
    if (inv.kind == InvariantKind::state) continue;
    auto& table = inv.side == InvariantSide::plant ? plant_needs : req_needs;
    table.try_emplace(inv.event, std::vector<char>(n, 1));
  }

  std::vector<EdgeData> data(f.edges.size());
  for (auto& d : data) {
    d.glin.assign(n, 0);
    d.error.assign(n, 0);
    d.targets.assign(n, {});
  }

  const long long total = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (options.parallel)
  for (long long si = 0; si < total; ++si) {
    const std::size_t s = static_cast<std::size_t>(si);
    const std::vector<int> v = L.decode(s);
    StateValuation val(f, v);
    const bool inr = L.in_range(v);
    ts.in_range[s] = inr;
    pr[s] = inr;
    for (const auto& inv : f.invariants) {
      const bool p = holds(inv.predicate, val);
      if (inv.kind == InvariantKind::state) {
        if (inv.side == InvariantSide::plant) pp[s] &= p;
        else pr[s] &= p;
        continue;
      }
      const bool need = inv.kind == InvariantKind::needs ? p : !p;
      auto& table = inv.side == InvariantSide::plant ? plant_needs : req_needs;
      table.at(inv.event)[s] &= need;
    }
    bool init = true;
    for (const auto& p : f.initial) init = init && holds(p, val);
    for (std::size_t i = 0; i < nv && init; ++i) {
      const auto& var = f.variables[i];
      if (var.kind == VarKind::discrete && !var.initial_values.empty())
        init = std::find(var.initial_values.begin(), var.initial_values.end(), v[i]) != var.initial_values.end();
      else
        init = var.domain.contains(v[i]);
    }
    ts.initial[s] = init;
    bool mark = true;
    for (const auto& p : f.marked) mark = mark && holds(p, val);
    ts.marked[s] = mark;

    for (std::size_t k = 0; k < f.edges.size(); ++k) {
      const Concrete& c = f.edges[k];
      bool g = true;
      for (auto [ptr, loc] : c.at) g = g && v[ptr] == loc;
      for (const Expr* e : c.guards) g = g && holds(*e, val);
      data[k].glin[s] = g;
      std::vector<int> t = v;
      bool err = false;
      for (auto [ptr, loc] : c.moves) t[ptr] = loc;
      for (const auto& [var, e] : c.updates) {
        const int x = eval(*e, val);
        if (x < 0 || x >= L.raw_size[var]) err = true;
        else t[var] = x;
      }
      data[k].error[s] = err;
      if (!err) data[k].targets[s].push_back(static_cast<std::uint32_t>(L.encode(t)));
    }
  }

  // Edges: the concrete ones, then one per input variable.
  for (std::size_t k = 0; k < f.edges.size(); ++k) {
    ExplicitEdge e;
    e.event = f.edges[k].event;
    e.controllable = f.edges[k].controllable;
    e.guard.assign(n, 0);
    for (std::size_t s = 0; s < n; ++s) e.guard[s] = data[k].glin[s] && !data[k].error[s];
    e.targets = std::move(data[k].targets);
    ts.edges.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < nv; ++i) {
    if (L.kinds[i] != VarKind::input) continue;
    ExplicitEdge e;
    e.event = "$" + L.names[i];
    e.controllable = false;
    e.guard.assign(n, 1);
    e.targets.assign(n, {});
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<int> v = L.decode(s);
      const int old = v[i];
      for (int x = L.domains[i].min_value(); x <= L.domains[i].max_value(); ++x) {
        if (x == old) continue;
        v[i] = x;
        e.targets[s].push_back(static_cast<std::uint32_t>(L.encode(v)));
      }
    }
    ts.edges.push_back(std::move(e));
  }

  auto needs_of = [&](std::map<std::string, std::vector<char>>& table, const std::string& ev) -> const std::vector<char>* {
    auto it = table.find(ev);
    return it == table.end() ? nullptr : &it->second;
  };

  for (std::size_t k = 0; k < f.edges.size(); ++k) {
    if (f.edges[k].controllable) continue;
    const auto* pn = needs_of(plant_needs, f.edges[k].event);
    for (std::size_t s = 0; s < n; ++s)
      if (data[k].glin[s] && data[k].error[s] && (!pn || (*pn)[s])) bad[s] = 1;
  }

  if (std::find(pp.begin(), pp.end(), 0) != pp.end()) {
    for (auto& e : ts.edges) {
      std::vector<char> keep(n, 0);
      bool implied = true;
      for (std::size_t s = 0; s < n; ++s) {
        if (!e.guard[s]) continue;
        for (auto t : e.targets[s])
          if (pp[t]) {
            keep[s] = 1;
            break;
          }
        if (pp[s] && !keep[s]) implied = false;
      }
      if (options.plant_invariants == PlantInvariantMode::simplify)
        throw std::invalid_argument("the oracle does not model restrict-based plant invariant enforcement");
      if (implied && options.plant_invariants == PlantInvariantMode::implication_check) continue;
      e.guard = std::move(keep);
    }
  }

  ts.forbidden.assign(n, 0);
  for (std::size_t s = 0; s < n; ++s) ts.forbidden[s] = !pr[s] || bad[s];
  for (auto& e : ts.edges)
    if (const auto* pn = needs_of(plant_needs, e.event))
      for (std::size_t s = 0; s < n; ++s) e.guard[s] = e.guard[s] && (*pn)[s];
  for (auto& e : ts.edges) {
    const auto* rn = needs_of(req_needs, e.event);
    if (!rn) continue;
    for (std::size_t s = 0; s < n; ++s) {
      if (e.controllable) e.guard[s] = e.guard[s] && (*rn)[s];
      else if (e.guard[s] && !(*rn)[s]) ts.forbidden[s] = 1;
    }
  }
  for (std::size_t s = 0; s < n; ++s) ts.initial[s] = ts.initial[s] && pp[s];
  return ts;
}

}  // namespace

ExplicitTs enumerate(const LinearizedModel& model, const Options& options) {
  Frontend f;
  f.set_variables(model.variables);
  f.events = model.events;
  for (const auto& le : model.edges) {
    Concrete c;
    c.event = le.event;
    const Event* ev = model.find_event(le.event);
    c.controllable = ev ? ev->controllable() : true;
    c.guards.push_back(&le.guard);
    for (const auto& u : le.updates) c.updates.push_back({f.index.at(u.variable), &u.value});
    f.edges.push_back(std::move(c));
  }
  f.initial = model.initial_predicates;
  f.marked = model.marker_predicates;
  f.invariants = model.invariants;
  return build(f, options);
}

ExplicitTs enumerate_product(const Specification& spec, const Options& options) {
  const Specification p = plantify(spec);
  Frontend f;
  std::vector<Variable> vars = p.inputs;
  for (const auto& a : p.automata) {
    AutomatonInfo info;
    for (const auto& l : a.locations) info.locations.push_back(l.name);
    if (a.locations.size() > 1) {
      info.pointer = static_cast<long>(vars.size());
      vars.push_back(Variable{a.name, VarDomain::enumeration(info.locations), VarKind::location_pointer, {}});
    }
    f.automata[a.name] = info;
    for (const auto& v : a.variables) vars.push_back(v);
  }
  f.set_variables(vars);
  f.events = p.events;

  struct Choice {
    const Automaton* aut;
    int source;
    const Edge* edge;
  };
  for (const auto& ev : p.events) {
    std::vector<std::vector<Choice>> per;
    for (const auto& a : p.automata) {
      const auto alpha = alphabet_of(p, a);
      if (std::find(alpha.begin(), alpha.end(), ev.name) == alpha.end()) continue;
      std::vector<Choice> cs;
      for (std::size_t l = 0; l < a.locations.size(); ++l)
        for (const auto& e : a.locations[l].edges)
          if (std::find(e.events.begin(), e.events.end(), ev.name) != e.events.end())
            cs.push_back({&a, static_cast<int>(l), &e});
      per.push_back(std::move(cs));
    }
    if (per.empty()) continue;
    std::vector<Concrete> combos{Concrete{ev.name, ev.controllable(), {}, {}, {}, {}}};
    for (const auto& cs : per) {
      std::vector<Concrete> next;
      for (const auto& partial : combos)
        for (const auto& ch : cs) {
          Concrete c = partial;
          const auto& info = f.automata.at(ch.aut->name);
          if (info.pointer >= 0) {
            c.at.push_back({static_cast<std::size_t>(info.pointer), ch.source});
            c.moves.push_back({static_cast<std::size_t>(info.pointer), static_cast<int>(ch.edge->target)});
          }
          c.guards.push_back(&ch.edge->guard);
          for (const auto& u : ch.edge->updates) c.updates.push_back({f.index.at(u.variable), &u.value});
          next.push_back(std::move(c));
        }
      combos = std::move(next);
    }
    for (auto& c : combos) f.edges.push_back(std::move(c));
  }

  auto located = [&](bool initial) {
    std::vector<Expr> out;
    for (const auto& a : p.automata) {
      std::vector<Expr> terms;
      for (const auto& l : a.locations) {
        const auto& flag = initial ? l.initial : l.marked;
        if (flag) terms.push_back(Expr::binary(ExprKind::and_, Expr::loc(a.name, l.name), *flag));
      }
      out.push_back(terms.empty() ? Expr::boolean(false) : disjunction(terms));
    }
    for (const auto& e : initial ? p.initial_predicates : p.marker_predicates) out.push_back(e);
    return out;
  };
  f.initial = located(true);
  f.marked = located(false);
  f.invariants = p.invariants;
  return build(f, options);
}

namespace {

struct Graph {
  // forward[s]: (edge, target); backward[t]: (edge, source)
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> forward, backward;
};

Graph graph_of(const ExplicitTs& ts, const std::vector<std::vector<char>>& guards) {
  const std::size_t n = ts.layout.state_count;
  Graph g;
  g.forward.assign(n, {});
  g.backward.assign(n, {});
  for (std::size_t k = 0; k < ts.edges.size(); ++k) {
    const auto& guard = guards.empty() ? ts.edges[k].guard : guards[k];
    for (std::size_t s = 0; s < n; ++s) {
      if (!guard[s]) continue;
      for (auto t : ts.edges[k].targets[s]) {
        g.forward[s].push_back({static_cast<std::uint32_t>(k), t});
        g.backward[t].push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(s)});
      }
    }
  }
  return g;
}

template <typename Adj, typename Use>
std::vector<char> closure(const std::vector<char>& start, const Adj& adj, const std::vector<char>* within, Use use) {
  std::vector<char> in = start;
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < in.size(); ++s)
    if (in[s]) queue.push_back(s);
  while (!queue.empty()) {
    const std::size_t s = queue.back();
    queue.pop_back();
    for (auto [k, o] : adj[s]) {
      if (in[o] || !use(k) || (within && !(*within)[o])) continue;
      in[o] = 1;
      queue.push_back(o);
    }
  }
  return in;
}

}  // namespace

std::vector<char> reachable(const ExplicitTs& ts, const std::vector<char>& start, const std::vector<char>& within,
                            const std::vector<std::vector<char>>& guards) {
  Graph g = graph_of(ts, guards);
  std::vector<char> s0(start.size());
  for (std::size_t s = 0; s < s0.size(); ++s) s0[s] = start[s] && within[s];
  return closure(s0, g.forward, &within, [](std::uint32_t) { return true; });
}

ExplicitResult explicit_synthesis(const ExplicitTs& ts, bool forward, bool stop_on_empty_init) {
  const std::size_t n = ts.layout.state_count;
  Graph g = graph_of(ts, {});
  ExplicitResult r;
  std::vector<char> c(n);
  for (std::size_t s = 0; s < n; ++s) c[s] = !ts.forbidden[s];
  auto empty_init = [&] {
    if (!stop_on_empty_init) return false;
    for (std::size_t s = 0; s < n; ++s)
      if (ts.initial[s] && c[s]) return false;
    return true;
  };
  auto all = [](std::uint32_t) { return true; };
  auto unctrl = [&](std::uint32_t k) { return !ts.edges[k].controllable; };
  bool stop = empty_init();
  while (!stop) {
    const std::vector<char> before = c;
    std::vector<char> start(n);
    for (std::size_t s = 0; s < n; ++s) start[s] = ts.marked[s] && c[s];
    c = closure(start, g.backward, &c, all);
    if ((stop = empty_init())) break;
    std::vector<char> outside(n);
    for (std::size_t s = 0; s < n; ++s) outside[s] = !c[s];
    auto b = closure(outside, g.backward, nullptr, unctrl);
    for (std::size_t s = 0; s < n; ++s) c[s] = !b[s];
    if ((stop = empty_init())) break;
    if (forward) {
      for (std::size_t s = 0; s < n; ++s) start[s] = ts.initial[s] && c[s];
      c = closure(start, g.forward, &c, all);
      if ((stop = empty_init())) break;
    }
    if (c == before) break;
  }
  r.controlled = c;
  r.empty_supervisor = true;
  for (std::size_t s = 0; s < n; ++s)
    if (ts.initial[s] && c[s]) r.empty_supervisor = false;
  for (const auto& ev : ts.events)
    if (ev.controllable()) r.event_guards[ev.name].assign(n, 0);
  for (const auto& e : ts.edges) {
    if (!e.controllable) continue;
    auto& guard = r.event_guards[e.event];
    for (std::size_t s = 0; s < n; ++s) {
      if (!e.guard[s]) continue;
      for (auto t : e.targets[s])
        if (c[t]) {
          guard[s] = 1;
          break;
        }
    }
  }
  return r;
}

namespace {

std::vector<std::vector<bool>> bits_per_state(const Sefa& sefa, const Layout& L) {
  std::vector<long> to_sefa(L.names.size(), -1);
  for (std::size_t i = 0; i < L.names.size(); ++i)
    for (std::size_t d = 0; d < sefa.domains.size(); ++d)
      if (sefa.domains[d].name == L.names[i]) to_sefa[i] = static_cast<long>(d);
  std::vector<std::vector<bool>> out(L.state_count);
  for (std::uint64_t s = 0; s < L.state_count; ++s) {
    const auto v = L.decode(s);
    std::vector<int> sv(sefa.domains.size(), 0);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (to_sefa[i] >= 0) sv[to_sefa[i]] = v[i];
    out[s] = sefa.bits_of(sv);
  }
  return out;
}

}  // namespace

std::vector<char> states_of(const Sefa& sefa, const Bdd& p, const Layout& layout) {
  const auto bits = bits_per_state(sefa, layout);
  std::vector<char> out(layout.state_count);
  for (std::uint64_t s = 0; s < layout.state_count; ++s) out[s] = sefa.manager->eval(p, bits[s]);
  return out;
}

std::vector<Mismatch> compare(const Sefa& sefa, const Bdd& controlled, const std::map<std::string, Bdd>& event_guards,
                              const ExplicitTs& ts, const ExplicitResult& result, std::size_t limit) {
  std::vector<Mismatch> out;
  const auto& L = ts.layout;
  for (const auto& name : L.names) sefa.domain_index(name);  // throws on layout mismatch
  if (event_guards.size() != result.event_guards.size()) out.push_back({"different controllable event sets", {}});
  const auto all_bits = bits_per_state(sefa, L);
  for (std::uint64_t s = 0; s < L.state_count && out.size() < limit; ++s) {
    const auto& bits = all_bits[s];
    if (sefa.manager->eval(controlled, bits) != static_cast<bool>(result.controlled[s]))
      out.push_back({"controlled", L.decode(s)});
    for (const auto& [ev, set] : result.event_guards) {
      auto it = event_guards.find(ev);
      if (it == event_guards.end()) {
        out.push_back({"missing guard " + ev, L.decode(s)});
        break;
      }
      if (sefa.manager->eval(it->second, bits) != static_cast<bool>(set[s])) out.push_back({"guard " + ev, L.decode(s)});
    }
  }
  return out;
}

}  // namespace symsynth::oracle
