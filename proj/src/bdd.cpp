#include "symsynth/bdd.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

namespace symsynth::bdd {

namespace {

enum Tag : std::uint32_t {
  kNot = 8,
  kIte,
  kExists,
  kReplace,
  kRelNext,
  kRelPrev,
  kRelNextAnd,
  kRelPrevAnd,
  kRestrict,
};

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

bool commutative(Op op) { return op == Op::and_ || op == Op::or_ || op == Op::xor_ || op == Op::biimp; }

}  // namespace

// ---------------------------------------------------------------------------
// Bdd handle

Bdd::Bdd(const Bdd& other) : mgr_(other.mgr_), node_(other.node_) {
  if (mgr_) mgr_->ref(node_);
}

Bdd::Bdd(Bdd&& other) noexcept : mgr_(other.mgr_), node_(other.node_) {
  other.mgr_ = nullptr;
  other.node_ = kFalse;
}

Bdd& Bdd::operator=(const Bdd& other) {
  if (this == &other) return *this;
  if (other.mgr_) other.mgr_->ref(other.node_);
  if (mgr_) mgr_->deref(node_);
  mgr_ = other.mgr_;
  node_ = other.node_;
  return *this;
}

Bdd& Bdd::operator=(Bdd&& other) noexcept {
  if (this == &other) return *this;
  if (mgr_) mgr_->deref(node_);
  mgr_ = other.mgr_;
  node_ = other.node_;
  other.mgr_ = nullptr;
  other.node_ = kFalse;
  return *this;
}

Bdd::~Bdd() {
  if (mgr_) mgr_->deref(node_);
}

Bdd Bdd::operator&(const Bdd& o) const { return mgr_->apply(Op::and_, *this, o); }
Bdd Bdd::operator|(const Bdd& o) const { return mgr_->apply(Op::or_, *this, o); }
Bdd Bdd::operator^(const Bdd& o) const { return mgr_->apply(Op::xor_, *this, o); }
Bdd Bdd::operator-(const Bdd& o) const { return mgr_->apply(Op::diff, *this, o); }
Bdd Bdd::operator!() const { return mgr_->bdd_not(*this); }

Bdd& Bdd::operator&=(const Bdd& o) {
  *this = *this & o;
  return *this;
}

Bdd& Bdd::operator|=(const Bdd& o) {
  *this = *this | o;
  return *this;
}

bool Bdd::implies(const Bdd& o) const { return (*this - o).is_false(); }

// ---------------------------------------------------------------------------
// Node store

std::size_t Manager::CacheHash::operator()(const CacheKey& k) const noexcept {
  std::uint64_t h = mix((std::uint64_t{k.tag} << 32) ^ k.a);
  h = mix(h ^ (std::uint64_t{k.b} << 32 | k.c));
  return static_cast<std::size_t>(mix(h ^ k.aux));
}

Manager::Manager(std::uint32_t num_vars, ManagerOptions options) : num_vars_(num_vars), options_(options) {
  if (num_vars >= kFreeSlot) throw std::invalid_argument("too many BDD variables");
  nodes_.push_back({kTerminalLevel, kFalse, kFalse, kNil, 1});
  nodes_.push_back({kTerminalLevel, kTrue, kTrue, kNil, 1});
  std::size_t b = 1;
  while (b < options_.initial_buckets) b <<= 1;
  buckets_.assign(b, kNil);
  varset({});
  varmap({});
  varpairs({});
}

void Manager::ref(NodeRef n) {
  if (n < 2) return;
  if (nodes_[n].ref++ != 0) return;
  // A node that becomes live counts as a live parent of its children.
  stack_.clear();
  stack_.push_back(n);
  while (!stack_.empty()) {
    const NodeRef m = stack_.back();
    stack_.pop_back();
    if (++live_ > peak_) peak_ = live_;
    for (NodeRef c : {nodes_[m].lo, nodes_[m].hi})
      if (c >= 2 && nodes_[c].ref++ == 0) stack_.push_back(c);
  }
}

void Manager::deref(NodeRef n) {
  if (n < 2) return;
  if (nodes_[n].ref == 0) throw std::logic_error("BDD reference count underflow");
  if (--nodes_[n].ref != 0) return;
  stack_.clear();
  stack_.push_back(n);
  while (!stack_.empty()) {
    const NodeRef m = stack_.back();
    stack_.pop_back();
    --live_;
    for (NodeRef c : {nodes_[m].lo, nodes_[m].hi})
      if (c >= 2 && --nodes_[c].ref == 0) stack_.push_back(c);
  }
}

void Manager::grow_buckets() {
  std::vector<std::uint32_t> fresh(buckets_.size() * 2, kNil);
  const std::size_t mask = fresh.size() - 1;
  for (NodeRef n = 2; n < nodes_.size(); ++n) {
    Node& node = nodes_[n];
    if (node.var == kFreeSlot) continue;
    std::size_t b = mix((std::uint64_t{node.var} << 40) ^ (std::uint64_t{node.lo} << 20) ^ node.hi) & mask;
    node.next = fresh[b];
    fresh[b] = n;
  }
  buckets_.swap(fresh);
}

NodeRef Manager::find_or_add(VarId v, NodeRef lo, NodeRef hi) {
  std::size_t mask = buckets_.size() - 1;
  const std::uint64_t h = mix((std::uint64_t{v} << 40) ^ (std::uint64_t{lo} << 20) ^ hi);
  for (std::uint32_t n = buckets_[h & mask]; n != kNil; n = nodes_[n].next) {
    const Node& node = nodes_[n];
    if (node.var == v && node.lo == lo && node.hi == hi) return n;
  }
  if (table_nodes_ >= buckets_.size()) {
    grow_buckets();
    mask = buckets_.size() - 1;
  }
  NodeRef n;
  if (free_list_ != kNil) {
    n = free_list_;
    free_list_ = nodes_[n].next;
  } else {
    n = static_cast<NodeRef>(nodes_.size());
    if (n >= kFreeSlot) throw std::length_error("BDD node table exhausted");
    nodes_.push_back({});
  }
  const std::size_t b = h & mask;
  nodes_[n] = {v, lo, hi, buckets_[b], 0};
  buckets_[b] = n;
  ++table_nodes_;
  return n;
}

NodeRef Manager::mk(VarId v, NodeRef lo, NodeRef hi) {
  if (lo == hi) {
    deref(hi);
    return lo;
  }
  NodeRef n = find_or_add(v, lo, hi);
  ref(n);
  deref(lo);
  deref(hi);
  return n;
}

void Manager::collect_garbage() {
  cache_.clear();
  std::fill(buckets_.begin(), buckets_.end(), kNil);
  free_list_ = kNil;
  table_nodes_ = 0;
  const std::size_t mask = buckets_.size() - 1;
  for (NodeRef n = static_cast<NodeRef>(nodes_.size()); n-- > 2;) {
    Node& node = nodes_[n];
    if (node.var == kFreeSlot || node.ref == 0) {
      node.var = kFreeSlot;
      node.next = free_list_;
      free_list_ = n;
      continue;
    }
    std::size_t b = mix((std::uint64_t{node.var} << 40) ^ (std::uint64_t{node.lo} << 20) ^ node.hi) & mask;
    node.next = buckets_[b];
    buckets_[b] = n;
    ++table_nodes_;
  }
  ++gc_runs_;
}

void Manager::safe_point() {
  const std::size_t dead = table_nodes_ - live_;
  if (dead >= options_.gc_dead_threshold && dead > live_) collect_garbage();
}

void Manager::check(const Bdd& f) const {
  if (f.mgr_ != this) throw std::invalid_argument("BDD belongs to a different manager");
}

bool Manager::cache_find(const CacheKey& k, NodeRef& out) {
  auto it = cache_.find(k);
  if (it == cache_.end()) return false;
  out = it->second;
  ref(out);
  return true;
}

// ---------------------------------------------------------------------------
// Auxiliary operands

VarSet Manager::varset(std::vector<VarId> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  for (VarId v : vars)
    if (v >= num_vars_) throw std::out_of_range("variable id out of range");
  auto it = set_ids_.find(vars);
  if (it != set_ids_.end()) return VarSet{it->second};
  SetInfo info;
  info.member.assign(num_vars_, 0);
  for (VarId v : vars) info.member[v] = 1;
  info.max_var = vars.empty() ? 0 : vars.back();
  info.vars = vars;
  const auto id = static_cast<std::uint32_t>(sets_.size());
  sets_.push_back(std::move(info));
  set_ids_.emplace(std::move(vars), id);
  return VarSet{id};
}

VarMap Manager::varmap(const std::vector<std::pair<VarId, VarId>>& pairs) {
  auto sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  std::set<VarId> from, to;
  for (auto [a, b] : sorted) {
    if (a >= num_vars_ || b >= num_vars_) throw std::out_of_range("variable id out of range");
    if (!from.insert(a).second || !to.insert(b).second) throw std::invalid_argument("variable map is not injective");
  }
  auto it = map_ids_.find(sorted);
  if (it != map_ids_.end()) return VarMap{it->second};
  MapInfo info;
  info.target.resize(num_vars_);
  for (VarId v = 0; v < num_vars_; ++v) info.target[v] = v;
  for (auto [a, b] : sorted) info.target[a] = b;
  info.pairs = sorted;
  const auto id = static_cast<std::uint32_t>(maps_.size());
  maps_.push_back(std::move(info));
  map_ids_.emplace(std::move(sorted), id);
  return VarMap{id};
}

VarPairs Manager::varpairs(const std::vector<std::pair<VarId, VarId>>& current_next) {
  auto sorted = current_next;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto it = pair_ids_.find(sorted);
  if (it != pair_ids_.end()) return VarPairs{it->second};
  PairInfo info;
  info.role.assign(num_vars_, 0);
  info.partner.assign(num_vars_, 0);
  std::vector<VarId> cur, nxt;
  for (auto [c, n] : sorted) {
    if (n >= num_vars_ || n != c + 1)
      throw std::invalid_argument("next-state variable must directly follow its current-state variable");
    if (info.role[c] != 0 || info.role[n] != 0) throw std::invalid_argument("overlapping variable pairs");
    info.role[c] = 1;
    info.role[n] = 2;
    info.partner[c] = n;
    info.partner[n] = c;
    cur.push_back(c);
    nxt.push_back(n);
  }
  info.current = varset(cur);
  info.next = varset(nxt);
  const auto id = static_cast<std::uint32_t>(pairs_.size());
  pairs_.push_back(std::move(info));
  pair_ids_.emplace(std::move(sorted), id);
  return VarPairs{id};
}

// ---------------------------------------------------------------------------
// Kernels

NodeRef Manager::apply_rec(Op op, NodeRef f, NodeRef g) {
  switch (op) {
    case Op::and_:
      if (f == kFalse || g == kFalse) return kFalse;
      if (f == kTrue || f == g) return owned(g);
      if (g == kTrue) return owned(f);
      break;
    case Op::or_:
      if (f == kTrue || g == kTrue) return kTrue;
      if (f == kFalse || f == g) return owned(g);
      if (g == kFalse) return owned(f);
      break;
    case Op::xor_:
      if (f == g) return kFalse;
      if (f == kFalse) return owned(g);
      if (g == kFalse) return owned(f);
      if (f == kTrue) return not_rec(g);
      if (g == kTrue) return not_rec(f);
      break;
    case Op::diff:
      if (f == kFalse || g == kTrue || f == g) return kFalse;
      if (g == kFalse) return owned(f);
      if (f == kTrue) return not_rec(g);
      break;
    case Op::imp:
      if (f == kFalse || g == kTrue || f == g) return kTrue;
      if (f == kTrue) return owned(g);
      if (g == kFalse) return not_rec(f);
      break;
    case Op::biimp:
      if (f == g) return kTrue;
      if (f == kTrue) return owned(g);
      if (g == kTrue) return owned(f);
      if (f == kFalse) return not_rec(g);
      if (g == kFalse) return not_rec(f);
      break;
  }
  if (commutative(op) && f > g) std::swap(f, g);
  const CacheKey key{static_cast<std::uint32_t>(op), f, g, 0, 0};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const VarId v = std::min(level(f), level(g));
  NodeRef l = apply_rec(op, lo_of(f, v), lo_of(g, v));
  NodeRef h = apply_rec(op, hi_of(f, v), hi_of(g, v));
  r = mk(v, l, h);
  cache_put(key, r);
  return r;
}

NodeRef Manager::not_rec(NodeRef f) {
  if (f < 2) return f ^ 1u;
  const CacheKey key{kNot, f, 0, 0, 0};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const VarId v = level(f);
  NodeRef l = not_rec(nodes_[f].lo);
  NodeRef h = not_rec(nodes_[f].hi);
  r = mk(v, l, h);
  cache_put(key, r);
  return r;
}

NodeRef Manager::ite_rec(NodeRef f, NodeRef g, NodeRef h) {
  if (f == kTrue || g == h) return owned(g);
  if (f == kFalse) return owned(h);
  if (g == kTrue && h == kFalse) return owned(f);
  if (g == kFalse && h == kTrue) return not_rec(f);
  const CacheKey key{kIte, f, g, h, 0};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const VarId v = std::min({level(f), level(g), level(h)});
  NodeRef l = ite_rec(lo_of(f, v), lo_of(g, v), lo_of(h, v));
  NodeRef hi = ite_rec(hi_of(f, v), hi_of(g, v), hi_of(h, v));
  r = mk(v, l, hi);
  cache_put(key, r);
  return r;
}

NodeRef Manager::exists_rec(NodeRef f, std::uint32_t set) {
  const SetInfo& info = sets_[set];
  if (f < 2 || info.vars.empty() || level(f) > info.max_var) return owned(f);
  const CacheKey key{kExists, f, 0, 0, set};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const VarId v = level(f);
  const bool quantify = sets_[set].member[v];
  NodeRef l = exists_rec(nodes_[f].lo, set);
  if (quantify && l == kTrue) {
    r = kTrue;
  } else {
    NodeRef h = exists_rec(nodes_[f].hi, set);
    if (quantify) {
      r = apply_rec(Op::or_, l, h);
      deref(l);
      deref(h);
    } else {
      r = mk(v, l, h);
    }
  }
  cache_put(key, r);
  return r;
}

NodeRef Manager::replace_rec(NodeRef f, std::uint32_t map) {
  if (f < 2) return f;
  const CacheKey key{kReplace, f, 0, 0, map};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const VarId v = level(f);
  NodeRef l = replace_rec(nodes_[f].lo, map);
  NodeRef h = replace_rec(nodes_[f].hi, map);
  r = mk(maps_[map].target[v], l, h);
  cache_put(key, r);
  return r;
}

NodeRef Manager::relnext_rec(NodeRef p, NodeRef t, std::uint32_t pairs) {
  if (p == kFalse || t == kFalse) return kFalse;
  if (t == kTrue) return exists_rec(p, pairs_[pairs].current.id);
  const CacheKey key{kRelNext, p, t, 0, pairs};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const VarId v = std::min(level(p), level(t));
  const std::uint8_t role = pairs_[pairs].role[v];
  NodeRef l = relnext_rec(lo_of(p, v), lo_of(t, v), pairs);
  if (role == 1 && l == kTrue) {
    r = kTrue;
  } else {
    NodeRef h = relnext_rec(hi_of(p, v), hi_of(t, v), pairs);
    if (role == 1) {
      r = apply_rec(Op::or_, l, h);
      deref(l);
      deref(h);
    } else {
      r = mk(role == 2 ? pairs_[pairs].partner[v] : v, l, h);
    }
  }
  cache_put(key, r);
  return r;
}

NodeRef Manager::relprev_rec(NodeRef p, NodeRef t, std::uint32_t pairs) {
  if (p == kFalse || t == kFalse) return kFalse;
  if (t == kTrue) return exists_rec(p, pairs_[pairs].current.id);
  if (p == kTrue) return exists_rec(t, pairs_[pairs].next.id);
  const CacheKey key{kRelPrev, p, t, 0, pairs};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const PairInfo& info = pairs_[pairs];
  // Assigned current variables of p take the place of their next variable.
  VarId vp = level(p);
  if (vp != kTerminalLevel && info.role[vp] == 1) vp = info.partner[vp];
  const VarId v = std::min(vp, level(t));
  const std::uint8_t role = info.role[v];
  const NodeRef p0 = vp == v ? nodes_[p].lo : p;
  const NodeRef p1 = vp == v ? nodes_[p].hi : p;
  NodeRef l = relprev_rec(p0, lo_of(t, v), pairs);
  if (role == 2 && l == kTrue) {
    r = kTrue;
  } else {
    NodeRef h = relprev_rec(p1, hi_of(t, v), pairs);
    if (role == 2) {
      r = apply_rec(Op::or_, l, h);
      deref(l);
      deref(h);
    } else {
      r = mk(v, l, h);
    }
  }
  cache_put(key, r);
  return r;
}

NodeRef Manager::relnext_and_rec(NodeRef p, NodeRef t, NodeRef rs, std::uint32_t pairs) {
  if (p == kFalse || t == kFalse || rs == kFalse) return kFalse;
  if (rs == kTrue) return relnext_rec(p, t, pairs);
  if (t == kTrue) {
    NodeRef e = exists_rec(p, pairs_[pairs].current.id);
    NodeRef r = apply_rec(Op::and_, e, rs);
    deref(e);
    return r;
  }
  const CacheKey key{kRelNextAnd, p, t, rs, pairs};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const PairInfo& info = pairs_[pairs];
  // The restriction constrains the renamed result, so its assigned
  // variables align with the next-state level.
  VarId vr = level(rs);
  if (vr != kTerminalLevel && info.role[vr] == 1) vr = info.partner[vr];
  const VarId v = std::min({level(p), level(t), vr});
  const std::uint8_t role = info.role[v];
  const NodeRef r0 = vr == v ? nodes_[rs].lo : rs;
  const NodeRef r1 = vr == v ? nodes_[rs].hi : rs;
  NodeRef l = relnext_and_rec(lo_of(p, v), lo_of(t, v), r0, pairs);
  if (role == 1 && l == kTrue) {
    r = kTrue;
  } else {
    NodeRef h = relnext_and_rec(hi_of(p, v), hi_of(t, v), r1, pairs);
    if (role == 1) {
      r = apply_rec(Op::or_, l, h);
      deref(l);
      deref(h);
    } else {
      r = mk(role == 2 ? pairs_[pairs].partner[v] : v, l, h);
    }
  }
  cache_put(key, r);
  return r;
}

NodeRef Manager::relprev_and_rec(NodeRef p, NodeRef t, NodeRef rs, std::uint32_t pairs) {
  if (p == kFalse || t == kFalse || rs == kFalse) return kFalse;
  if (rs == kTrue) return relprev_rec(p, t, pairs);
  const CacheKey key{kRelPrevAnd, p, t, rs, pairs};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const PairInfo& info = pairs_[pairs];
  VarId vp = level(p);
  if (vp != kTerminalLevel && info.role[vp] == 1) vp = info.partner[vp];
  const VarId v = std::min({vp, level(t), level(rs)});
  const std::uint8_t role = info.role[v];
  const NodeRef p0 = vp == v ? nodes_[p].lo : p;
  const NodeRef p1 = vp == v ? nodes_[p].hi : p;
  NodeRef l = relprev_and_rec(p0, lo_of(t, v), lo_of(rs, v), pairs);
  if (role == 2 && l == kTrue) {
    r = kTrue;
  } else {
    NodeRef h = relprev_and_rec(p1, hi_of(t, v), hi_of(rs, v), pairs);
    if (role == 2) {
      r = apply_rec(Op::or_, l, h);
      deref(l);
      deref(h);
    } else {
      r = mk(v, l, h);
    }
  }
  cache_put(key, r);
  return r;
}

NodeRef Manager::restrict_rec(NodeRef f, NodeRef c) {
  if (c == kTrue || f < 2) return owned(f);
  if (f == c) return kTrue;
  const CacheKey key{kRestrict, f, c, 0, 0};
  NodeRef r;
  if (cache_find(key, r)) return r;
  ++operations_;
  const VarId vf = level(f);
  const VarId vc = level(c);
  if (vc < vf) {
    NodeRef cc = apply_rec(Op::or_, nodes_[c].lo, nodes_[c].hi);
    r = restrict_rec(f, cc);
    deref(cc);
  } else {
    const NodeRef c0 = lo_of(c, vf), c1 = hi_of(c, vf);
    const NodeRef f0 = nodes_[f].lo, f1 = nodes_[f].hi;
    if (c0 == kFalse) {
      r = restrict_rec(f1, c1);
    } else if (c1 == kFalse) {
      r = restrict_rec(f0, c0);
    } else {
      NodeRef l = restrict_rec(f0, c0);
      NodeRef h = restrict_rec(f1, c1);
      r = mk(vf, l, h);
    }
  }
  cache_put(key, r);
  return r;
}

// ---------------------------------------------------------------------------
// Public operations

Bdd Manager::var(VarId v) {
  if (v >= num_vars_) throw std::out_of_range("variable id out of range");
  return adopt(mk(v, kFalse, kTrue));
}

Bdd Manager::nvar(VarId v) {
  if (v >= num_vars_) throw std::out_of_range("variable id out of range");
  return adopt(mk(v, kTrue, kFalse));
}

Bdd Manager::apply(Op op, const Bdd& f, const Bdd& g) {
  check(f);
  check(g);
  safe_point();
  return adopt(apply_rec(op, f.node_, g.node_));
}

Bdd Manager::bdd_not(const Bdd& f) {
  check(f);
  safe_point();
  return adopt(not_rec(f.node_));
}

Bdd Manager::ite(const Bdd& f, const Bdd& g, const Bdd& h) {
  check(f);
  check(g);
  check(h);
  safe_point();
  return adopt(ite_rec(f.node_, g.node_, h.node_));
}

Bdd Manager::exists(const Bdd& f, VarSet vars) {
  check(f);
  safe_point();
  return adopt(exists_rec(f.node_, vars.id));
}

Bdd Manager::replace(const Bdd& f, VarMap map) {
  check(f);
  const auto& target = maps_[map.id].target;
  VarId prev = 0;
  bool first = true;
  for (VarId v : support(f)) {
    if (!first && target[v] <= prev)
      throw std::invalid_argument("replace: renaming does not preserve the variable order");
    prev = target[v];
    first = false;
  }
  safe_point();
  return adopt(replace_rec(f.node_, map.id));
}

Bdd Manager::relnext(const Bdd& p, const Bdd& t, VarPairs pairs) {
  check(p);
  check(t);
  safe_point();
  return adopt(relnext_rec(p.node_, t.node_, pairs.id));
}

Bdd Manager::relprev(const Bdd& p, const Bdd& t, VarPairs pairs) {
  check(p);
  check(t);
  safe_point();
  return adopt(relprev_rec(p.node_, t.node_, pairs.id));
}

Bdd Manager::relnext_intersect(const Bdd& p, const Bdd& t, const Bdd& r, VarPairs pairs) {
  check(p);
  check(t);
  check(r);
  safe_point();
  return adopt(relnext_and_rec(p.node_, t.node_, r.node_, pairs.id));
}

Bdd Manager::relprev_intersect(const Bdd& p, const Bdd& t, const Bdd& r, VarPairs pairs) {
  check(p);
  check(t);
  check(r);
  safe_point();
  return adopt(relprev_and_rec(p.node_, t.node_, r.node_, pairs.id));
}

Bdd Manager::restrict(const Bdd& f, const Bdd& care) {
  check(f);
  check(care);
  if (care.is_false()) throw std::invalid_argument("restrict: care set is false");
  safe_point();
  return adopt(restrict_rec(f.node_, care.node_));
}

BigInt Manager::sat_count(const Bdd& f, VarSet over) {
  check(f);
  const SetInfo& info = sets_[over.id];
  const std::size_t n = info.vars.size();
  std::vector<std::size_t> pos(num_vars_, n);
  for (std::size_t i = 0; i < n; ++i) pos[info.vars[i]] = i;
  auto position = [&](NodeRef x) -> std::size_t { return x < 2 ? n : pos[level(x)]; };

  std::unordered_map<NodeRef, BigInt> memo;
  // Iterative post-order to keep deep BDDs off the call stack.
  std::vector<std::pair<NodeRef, bool>> work{{f.node_, false}};
  while (!work.empty()) {
    auto [x, expanded] = work.back();
    work.pop_back();
    if (x < 2 || memo.count(x)) continue;
    if (!info.member[level(x)]) throw std::invalid_argument("sat_count: support outside the counted variables");
    if (!expanded) {
      work.push_back({x, true});
      work.push_back({nodes_[x].lo, false});
      work.push_back({nodes_[x].hi, false});
      continue;
    }
    auto count_of = [&](NodeRef c) -> BigInt {
      if (c == kFalse) return 0;
      BigInt base = c == kTrue ? BigInt(1) : memo.at(c);
      return base << static_cast<unsigned>(position(c) - position(x) - 1);
    };
    memo[x] = count_of(nodes_[x].lo) + count_of(nodes_[x].hi);
  }
  if (f.node_ == kFalse) return 0;
  BigInt top = f.node_ == kTrue ? BigInt(1) : memo.at(f.node_);
  return top << static_cast<unsigned>(position(f.node_));
}

std::size_t Manager::node_count(const Bdd& f) const { return node_count(std::vector<Bdd>{f}); }

std::size_t Manager::node_count(const std::vector<Bdd>& roots) const {
  std::unordered_set<NodeRef> seen;
  std::vector<NodeRef> work;
  for (const auto& r : roots) {
    check(r);
    work.push_back(r.node_);
  }
  while (!work.empty()) {
    NodeRef x = work.back();
    work.pop_back();
    if (x < 2 || !seen.insert(x).second) continue;
    work.push_back(nodes_[x].lo);
    work.push_back(nodes_[x].hi);
  }
  return seen.size();
}

std::vector<VarId> Manager::support(const Bdd& f) const {
  check(f);
  std::unordered_set<NodeRef> seen;
  std::set<VarId> vars;
  std::vector<NodeRef> work{f.node_};
  while (!work.empty()) {
    NodeRef x = work.back();
    work.pop_back();
    if (x < 2 || !seen.insert(x).second) continue;
    vars.insert(level(x));
    work.push_back(nodes_[x].lo);
    work.push_back(nodes_[x].hi);
  }
  return {vars.begin(), vars.end()};
}

bool Manager::eval(const Bdd& f, const std::vector<bool>& assignment) const {
  check(f);
  NodeRef x = f.node_;
  while (x >= 2) x = assignment.at(level(x)) ? nodes_[x].hi : nodes_[x].lo;
  return x == kTrue;
}

Bdd Manager::low(const Bdd& f) {
  check(f);
  if (f.node_ < 2) return f;
  ref(nodes_[f.node_].lo);
  return adopt(nodes_[f.node_].lo);
}

Bdd Manager::high(const Bdd& f) {
  check(f);
  if (f.node_ < 2) return f;
  ref(nodes_[f.node_].hi);
  return adopt(nodes_[f.node_].hi);
}

void Manager::register_root(const Bdd& f) {
  check(f);
  ++roots_[f.node_];
  ref(f.node_);
}

void Manager::release_root(const Bdd& f) {
  check(f);
  auto it = roots_.find(f.node_);
  if (it == roots_.end()) throw std::logic_error("release_root: BDD is not a registered root");
  if (--it->second == 0) roots_.erase(it);
  deref(f.node_);
}

Metrics Manager::metrics() const { return Metrics{operations_, live_, peak_, table_nodes_, gc_runs_}; }

bool Manager::check_invariants() const {
  std::set<std::tuple<VarId, NodeRef, NodeRef>> seen;
  std::uint64_t live = 0;
  for (NodeRef n = 2; n < nodes_.size(); ++n) {
    const Node& node = nodes_[n];
    if (node.var == kFreeSlot) continue;
    if (node.lo == node.hi) return false;
    if (level(node.lo) <= node.var || level(node.hi) <= node.var) return false;
    if (!seen.emplace(node.var, node.lo, node.hi).second) return false;
    if (node.ref > 0) {
      ++live;
      if (nodes_[node.lo].ref == 0 || nodes_[node.hi].ref == 0) return false;
    }
  }
  return live == live_ && peak_ >= live_;
}

std::string Manager::to_dot(const Bdd& f, const std::vector<std::string>& names) const {
  check(f);
  std::ostringstream os;
  os << "digraph bdd {\n";
  os << "  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n";
  std::unordered_set<NodeRef> seen;
  std::vector<NodeRef> work{f.node_};
  std::vector<NodeRef> order;
  while (!work.empty()) {
    NodeRef x = work.back();
    work.pop_back();
    if (x < 2 || !seen.insert(x).second) continue;
    order.push_back(x);
    work.push_back(nodes_[x].hi);
    work.push_back(nodes_[x].lo);
  }
  for (NodeRef x : order) {
    const VarId v = level(x);
    const std::string label = v < names.size() ? names[v] : "x" + std::to_string(v);
    os << "  n" << x << " [shape=circle,label=\"" << label << "\"];\n";
    os << "  n" << x << " -> n" << nodes_[x].lo << " [style=dotted];\n";
    os << "  n" << x << " -> n" << nodes_[x].hi << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace symsynth::bdd
