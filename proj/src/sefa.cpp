#include "symsynth/sefa.hpp"

#include <algorithm>
#include <iterator>
#include <optional>
#include <stdexcept>

namespace symsynth {

using bdd::Manager;
using bdd::Op;
using bdd::VarId;

namespace {

// Two's complement bit vector, least significant bit first; the last bit is
// the sign. [lo, hi] bounds the value over every assignment of the bits.
struct BitVec {
  std::vector<Bdd> bits;
  long lo = 0;
  long hi = 0;
};

std::size_t width_for(long lo, long hi) {
  std::size_t k = 1;
  while (lo < -(1L << (k - 1)) || hi > (1L << (k - 1)) - 1) ++k;
  return k;
}

class Encoder {
 public:
  explicit Encoder(const Sefa& s) : s_(s), m_(*s.manager) {}

  BitVec constant(long c) const {
    BitVec v;
    v.lo = v.hi = c;
    for (std::size_t i = 0, k = width_for(c, c); i < k; ++i) v.bits.push_back(m_.constant((c >> i) & 1));
    return v;
  }

  BitVec variable(std::size_t d, bool next) const {
    const auto& dom = s_.domains[d];
    BitVec v;
    for (VarId b : next ? dom.next : dom.cur) v.bits.push_back(m_.var(b));
    v.bits.push_back(m_.const_false());
    v.lo = 0;
    v.hi = dom.representable_max();
    return v;
  }

  static BitVec extend(BitVec a, std::size_t k) {
    while (a.bits.size() < k) a.bits.push_back(a.bits.back());
    return a;
  }

  static BitVec trim(BitVec a) {
    const std::size_t k = width_for(a.lo, a.hi);
    if (k < a.bits.size()) a.bits.resize(k);
    return a;
  }

  BitVec add(const BitVec& a, const BitVec& b, bool subtract) const {
    const std::size_t k = std::max(a.bits.size(), b.bits.size()) + 1;
    BitVec x = extend(a, k), y = extend(b, k);
    Bdd carry = m_.constant(subtract);
    BitVec r;
    for (std::size_t i = 0; i < k; ++i) {
      Bdd yi = subtract ? !y.bits[i] : y.bits[i];
      Bdd half = x.bits[i] ^ yi;
      r.bits.push_back(half ^ carry);
      carry = (x.bits[i] & yi) | (carry & half);
    }
    r.lo = subtract ? a.lo - b.hi : a.lo + b.lo;
    r.hi = subtract ? a.hi - b.lo : a.hi + b.hi;
    return trim(std::move(r));
  }

  Bdd less_than(const BitVec& a, const BitVec& b) const {
    if (a.hi < b.lo) return m_.const_true();
    if (a.lo >= b.hi) return m_.const_false();
    return add(a, b, true).bits.back();
  }

  Bdd equal(const BitVec& a, const BitVec& b) const {
    if (a.hi < b.lo || b.hi < a.lo) return m_.const_false();
    const std::size_t k = std::max(a.bits.size(), b.bits.size());
    BitVec x = extend(a, k), y = extend(b, k);
    Bdd r = m_.const_true();
    for (std::size_t i = 0; i < k; ++i) r &= m_.apply(Op::biimp, x.bits[i], y.bits[i]);
    return r;
  }

  BitVec mux(const Bdd& c, const BitVec& a, const BitVec& b, long lo, long hi) const {
    const std::size_t k = std::max(a.bits.size(), b.bits.size());
    BitVec x = extend(a, k), y = extend(b, k);
    BitVec r;
    for (std::size_t i = 0; i < k; ++i) r.bits.push_back(m_.ite(c, x.bits[i], y.bits[i]));
    r.lo = lo;
    r.hi = hi;
    return trim(std::move(r));
  }

  // Remainder by a positive constant via restoring division.
  BitVec modulo(BitVec a, long c) const {
    if (c == 1) return constant(0);
    if (a.lo < 0) a = add(a, constant(((-a.lo + c - 1) / c) * c), false);
    if (a.hi < c) return a;
    const std::size_t magnitude = a.bits.size() - 1;
    BitVec r = constant(0);
    const BitVec divisor = constant(c);
    for (std::size_t i = magnitude; i-- > 0;) {
      BitVec shifted;
      shifted.bits.push_back(a.bits[i]);
      for (std::size_t j = 0; j + 1 < r.bits.size(); ++j) shifted.bits.push_back(r.bits[j]);
      shifted.bits.push_back(m_.const_false());
      shifted.lo = 0;
      shifted.hi = 2 * r.hi + 1;
      shifted = trim(std::move(shifted));
      Bdd fits = !less_than(shifted, divisor);
      BitVec reduced = add(shifted, divisor, true);
      r = mux(fits, reduced, shifted, 0, std::min(c - 1, shifted.hi));
    }
    return r;
  }

  bool is_boolean(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::bool_lit:
      case ExprKind::not_:
      case ExprKind::and_:
      case ExprKind::or_:
      case ExprKind::eq:
      case ExprKind::ne:
      case ExprKind::lt:
      case ExprKind::le:
      case ExprKind::gt:
      case ExprKind::ge:
      case ExprKind::loc_ref: return true;
      case ExprKind::var_ref: return s_.domains[s_.domain_index(e.name)].domain.kind == VarDomain::Kind::boolean;
      default: return false;
    }
  }

  BitVec value(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::int_lit:
      case ExprKind::enum_lit:
        if (e.value < 0) throw std::invalid_argument("unresolved enumeration literal '" + e.name + "'");
        return constant(e.value);
      case ExprKind::var_ref: return variable(s_.domain_index(e.name), false);
      case ExprKind::neg: return add(constant(0), value(e.args[0]), true);
      case ExprKind::add: return add(value(e.args[0]), value(e.args[1]), false);
      case ExprKind::sub: return add(value(e.args[0]), value(e.args[1]), true);
      case ExprKind::mod:
        if (e.args[1].kind != ExprKind::int_lit || e.args[1].value <= 0)
          throw std::invalid_argument("mod requires a positive integer literal divisor");
        return modulo(value(e.args[0]), e.args[1].value);
      default: {
        // Boolean used as a value (assignment to a boolean handled elsewhere).
        BitVec v;
        v.bits = {predicate(e), m_.const_false()};
        v.lo = 0;
        v.hi = 1;
        return v;
      }
    }
  }

  Bdd predicate(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::bool_lit: return m_.constant(e.value != 0);
      case ExprKind::var_ref: {
        const std::size_t d = s_.domain_index(e.name);
        if (s_.domains[d].domain.kind != VarDomain::Kind::boolean)
          throw std::invalid_argument("variable '" + e.name + "' is not boolean");
        return m_.var(s_.domains[d].cur[0]);
      }
      case ExprKind::not_: return !predicate(e.args[0]);
      case ExprKind::and_: return predicate(e.args[0]) & predicate(e.args[1]);
      case ExprKind::or_: return predicate(e.args[0]) | predicate(e.args[1]);
      case ExprKind::eq:
      case ExprKind::ne: {
        Bdd r = is_boolean(e.args[0]) ? m_.apply(Op::biimp, predicate(e.args[0]), predicate(e.args[1]))
                                      : equal(value(e.args[0]), value(e.args[1]));
        return e.kind == ExprKind::eq ? r : !r;
      }
      case ExprKind::lt: return less_than(value(e.args[0]), value(e.args[1]));
      case ExprKind::gt: return less_than(value(e.args[1]), value(e.args[0]));
      case ExprKind::le: return !less_than(value(e.args[1]), value(e.args[0]));
      case ExprKind::ge: return !less_than(value(e.args[0]), value(e.args[1]));
      case ExprKind::loc_ref: throw std::invalid_argument("location reference in a linearized model");
      default: throw std::invalid_argument("expression is not boolean");
    }
  }

  Sefa::EncodedAssignment assignment(const std::string& variable, const Expr& rhs) const {
    const std::size_t d = s_.domain_index(variable);
    const auto& dom = s_.domains[d];
    if (dom.domain.kind == VarDomain::Kind::boolean)
      return {m_.apply(Op::biimp, m_.var(dom.next[0]), predicate(rhs)), m_.const_false()};
    BitVec v = value(rhs);
    v = extend(std::move(v), std::max<std::size_t>(v.bits.size(), dom.width + 1));
    Bdd error = v.bits.back();
    for (std::size_t i = dom.width; i + 1 < v.bits.size(); ++i) error |= v.bits[i];
    Bdd update = m_.const_true();
    for (std::size_t i = 0; i < dom.width; ++i) update &= m_.apply(Op::biimp, m_.var(dom.next[i]), v.bits[i]);
    return {update, error};
  }

  Bdd at_most(std::size_t d, long max, bool next) const {
    return !less_than(constant(max), variable(d, next));
  }
  Bdd at_least(std::size_t d, long min, bool next) const {
    return !less_than(variable(d, next), constant(min));
  }

 private:
  const Sefa& s_;
  Manager& m_;
};

unsigned bits_needed(int max_value) {
  unsigned w = 1;
  while ((1L << w) - 1 < max_value) ++w;
  return w;
}

}  // namespace

std::size_t Sefa::domain_index(std::string_view name) const {
  for (std::size_t i = 0; i < domains.size(); ++i)
    if (domains[i].name == name) return i;
  throw std::out_of_range("unknown variable '" + std::string(name) + "'");
}

const Event* Sefa::find_event(std::string_view name) const {
  for (const auto& e : events)
    if (e.name == name) return &e;
  return nullptr;
}

Bdd Sefa::value_eq(std::size_t domain, int value, bool next) const {
  const auto& dom = domains[domain];
  Bdd r = manager->const_true();
  if (value < 0 || value > dom.representable_max()) return manager->const_false();
  const auto& bits = next ? dom.next : dom.cur;
  for (std::size_t i = bits.size(); i-- > 0;) r &= ((value >> i) & 1) ? manager->var(bits[i]) : manager->nvar(bits[i]);
  return r;
}

Bdd Sefa::domain_in_range(std::size_t domain, bool next) const {
  const auto& dom = domains[domain];
  Encoder enc(*this);
  Bdd r = manager->const_true();
  if (dom.domain.max_value() < dom.representable_max()) r &= enc.at_most(domain, dom.domain.max_value(), next);
  if (dom.domain.min_value() > 0) r &= enc.at_least(domain, dom.domain.min_value(), next);
  return r;
}

Bdd Sefa::encode_predicate(const Expr& expr) const { return Encoder(*this).predicate(expr); }

Sefa::EncodedAssignment Sefa::encode_assignment(const std::string& variable, const Expr& value) const {
  return Encoder(*this).assignment(variable, value);
}

bdd::BigInt Sefa::count(const Bdd& p) const { return manager->sat_count(p, current_vars); }

std::vector<bool> Sefa::bits_of(const std::vector<int>& values) const {
  std::vector<bool> bits(manager->num_vars(), false);
  for (std::size_t d = 0; d < domains.size(); ++d)
    for (std::size_t i = 0; i < domains[d].cur.size(); ++i) bits[domains[d].cur[i]] = (values.at(d) >> i) & 1;
  return bits;
}

void finalize_edge(const Sefa& sefa, SymbolicEdge& edge) {
  std::sort(edge.assigned.begin(), edge.assigned.end());
  std::vector<std::pair<VarId, VarId>> pairs;
  for (std::size_t d : edge.assigned)
    for (std::size_t i = 0; i < sefa.domains[d].width; ++i) pairs.push_back({sefa.domains[d].cur[i], sefa.domains[d].next[i]});
  edge.pairs = sefa.manager->varpairs(pairs);
  edge.relation = edge.guard - edge.error;
  edge.relation &= edge.update;
}

Sefa build_sefa(const LinearizedModel& model, const VarOrder& order, const EncodeOptions& options) {
  Sefa s;
  if (order.size() != model.variables.size()) throw std::invalid_argument("variable order has the wrong size");
  for (const auto& v : model.variables) {
    SymbolicDomain d;
    d.name = v.name;
    d.domain = v.domain;
    d.kind = v.kind;
    d.width = bits_needed(v.domain.max_value());
    s.domains.push_back(std::move(d));
  }
  s.order = order;
  VarId next_id = 0;
  std::vector<bool> placed(order.size(), false);
  for (std::size_t idx : order) {
    if (idx >= placed.size() || placed[idx]) throw std::invalid_argument("variable order is not a permutation");
    placed[idx] = true;
    for (unsigned i = 0; i < s.domains[idx].width; ++i) {
      s.domains[idx].cur.push_back(next_id++);
      s.domains[idx].next.push_back(next_id++);
    }
  }
  s.manager = std::make_unique<Manager>(next_id, options.manager);
  Manager& m = *s.manager;

  std::vector<VarId> cur, nxt;
  std::vector<std::pair<VarId, VarId>> n2c, c2n;
  for (const auto& d : s.domains)
    for (unsigned i = 0; i < d.width; ++i) {
      cur.push_back(d.cur[i]);
      nxt.push_back(d.next[i]);
      n2c.push_back({d.next[i], d.cur[i]});
      c2n.push_back({d.cur[i], d.next[i]});
    }
  s.current_vars = m.varset(cur);
  s.next_vars = m.varset(nxt);
  s.next_to_current = m.varmap(n2c);
  s.current_to_next = m.varmap(c2n);
  s.in_range = m.const_true();
  for (std::size_t d = 0; d < s.domains.size(); ++d) {
    Bdd f = m.const_true();
    for (unsigned i = 0; i < s.domains[d].width; ++i)
      f &= m.apply(Op::biimp, m.var(s.domains[d].cur[i]), m.var(s.domains[d].next[i]));
    s.frames.push_back(f);
    s.in_range &= s.domain_in_range(d);
  }

  s.events = model.events;
  for (const auto& d : s.domains)
    if (d.kind == VarKind::input) s.events.push_back(Event{"$" + d.name, Controllability::uncontrollable});

  // Initialization and marking.
  s.p0 = m.const_true();
  for (const auto& p : model.initial_predicates) s.p0 &= s.encode_predicate(p);
  for (std::size_t d = 0; d < s.domains.size(); ++d) {
    const auto& var = model.variables[d];
    if (var.kind == VarKind::discrete && !var.initial_values.empty()) {
      Bdd any = m.const_false();
      for (int v : var.initial_values) any |= s.value_eq(d, v);
      s.p0 &= any;
    } else {
      s.p0 &= s.domain_in_range(d);
    }
  }
  s.pm = m.const_true();
  for (const auto& p : model.marker_predicates) s.pm &= s.encode_predicate(p);

  // State/event invariants in needs form, per event.
  std::map<std::string, Bdd> plant_needs, req_needs;
  Bdd pp = m.const_true(), pr = m.const_true();
  for (const auto& inv : model.invariants) {
    Bdd p = s.encode_predicate(inv.predicate);
    const bool plant = inv.side == InvariantSide::plant;
    if (inv.kind == InvariantKind::state) {
      (plant ? pp : pr) &= p;
      continue;
    }
    if (inv.kind == InvariantKind::disables) p = !p;
    auto& table = plant ? plant_needs : req_needs;
    auto it = table.find(inv.event);
    if (it == table.end()) table.emplace(inv.event, p);
    else it->second &= p;
  }
  auto needs_of = [&](std::map<std::string, Bdd>& table, const std::string& ev) {
    auto it = table.find(ev);
    return it == table.end() ? m.const_true() : it->second;
  };

  // Edges with guard, runtime error and update.
  Bdd bad = m.const_false();
  for (std::size_t k = 0; k < model.edges.size(); ++k) {
    const auto& le = model.edges[k];
    const Event* ev = model.find_event(le.event);
    if (!ev) throw std::invalid_argument("edge with unknown event '" + le.event + "'");
    SymbolicEdge e;
    e.event = le.event;
    e.controllable = ev->controllable();
    Bdd g = s.encode_predicate(le.guard);
    e.error = m.const_false();
    e.update = m.const_true();
    for (const auto& u : le.updates) {
      auto enc = s.encode_assignment(u.variable, u.value);
      e.update &= enc.update;
      e.error |= enc.error;
      e.assigned.push_back(s.domain_index(u.variable));
    }
    e.plant_guard = g & needs_of(plant_needs, le.event);
    e.plant_error = e.plant_guard & e.error;
    e.guard = g - e.error;
    e.sources = {k};
    // An uncontrollable edge the plant allows but that would fail at
    // runtime must be avoided by the supervisor.
    if (!e.controllable) bad |= e.plant_error;
    finalize_edge(s, e);
    s.edges.push_back(std::move(e));
  }
  for (std::size_t d = 0; d < s.domains.size(); ++d) {
    if (s.domains[d].kind != VarKind::input) continue;
    SymbolicEdge e;
    e.event = "$" + s.domains[d].name;
    e.controllable = false;
    e.guard = m.const_true();
    e.error = m.const_false();
    e.update = (!s.frames[d]) & s.domain_in_range(d, true);
    e.plant_guard = m.const_true();
    e.plant_error = m.const_false();
    e.assigned = {d};
    finalize_edge(s, e);
    s.edges.push_back(std::move(e));
  }

  s.pr = pr;
  // Range invariants for domains smaller than their bit range.
  for (std::size_t d = 0; d < s.domains.size(); ++d) pr &= s.domain_in_range(d);

  // Plant state invariants: never enter a state violating them.
  s.pp = pp;
  s.p0 &= pp;
  if (!pp.is_true()) {
    for (auto& e : s.edges) {
      Bdd target_ok = m.relprev(pp, e.relation, e.pairs);
      switch (options.plant_invariants) {
        case PlantInvariantMode::implication_check:
          if ((e.guard & pp).implies(target_ok)) continue;
          e.guard &= target_ok;
          break;
        case PlantInvariantMode::always_conjoin: e.guard &= target_ok; break;
        case PlantInvariantMode::simplify: e.guard &= m.restrict(target_ok, pp); break;
      }
      finalize_edge(s, e);
    }
  }

  s.pf = (!pr) | bad;

  for (auto& e : s.edges) {
    auto it = plant_needs.find(e.event);
    if (it != plant_needs.end()) e.guard &= it->second;
  }
  for (auto& e : s.edges) {
    auto it = req_needs.find(e.event);
    if (it == req_needs.end()) continue;
    if (e.controllable) e.guard &= it->second;
    else s.pf |= e.guard - it->second;
  }
  s.requirement_needs = std::move(req_needs);
  for (auto& e : s.edges) finalize_edge(s, e);
  return s;
}

Sefa merge_per_event(Sefa&& sefa) {
  Sefa s = std::move(sefa);
  Manager& m = *s.manager;
  std::vector<SymbolicEdge> merged;
  for (const auto& ev : s.events) {
    std::optional<SymbolicEdge> acc;
    for (auto& e : s.edges) {
      if (e.event != ev.name) continue;
      if (!acc) {
        acc = e;
        continue;
      }
      Bdd frame_acc = m.const_true(), frame_e = m.const_true();
      for (std::size_t d : e.assigned)
        if (!std::binary_search(acc->assigned.begin(), acc->assigned.end(), d)) frame_acc &= s.frames[d];
      for (std::size_t d : acc->assigned)
        if (!std::binary_search(e.assigned.begin(), e.assigned.end(), d)) frame_e &= s.frames[d];
      Bdd u1 = acc->guard & acc->update & frame_acc;
      Bdd u2 = e.guard & e.update & frame_e;
      acc->error = (acc->guard & acc->error) | (e.guard & e.error);
      acc->update = u1 | u2;
      acc->guard = acc->guard | e.guard;
      acc->plant_guard = acc->plant_guard | e.plant_guard;
      acc->plant_error = acc->plant_error | e.plant_error;
      std::vector<std::size_t> assigned;
      std::set_union(acc->assigned.begin(), acc->assigned.end(), e.assigned.begin(), e.assigned.end(),
                     std::back_inserter(assigned));
      acc->assigned = std::move(assigned);
      acc->sources.insert(acc->sources.end(), e.sources.begin(), e.sources.end());
    }
    if (acc) {
      finalize_edge(s, *acc);
      merged.push_back(std::move(*acc));
    }
  }
  s.edges = std::move(merged);
  s.per_event = true;
  return s;
}

}  // namespace symsynth
