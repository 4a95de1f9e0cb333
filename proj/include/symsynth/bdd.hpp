#pragma once

// Reduced ordered BDDs without complement edges. Variable ids are levels
// (0 is closest to the root). Nodes are reference counted: a node is live
// while it is reachable from an external reference, which gives an exact
// live-node count and peak.

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace symsynth::bdd {

using NodeRef = std::uint32_t;
using VarId = std::uint32_t;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr NodeRef kFalse = 0;
inline constexpr NodeRef kTrue = 1;

enum class Op : std::uint8_t { and_, or_, xor_, diff, imp, biimp };

class Manager;

/// Owning handle to a BDD node.
class Bdd {
 public:
  Bdd() = default;
  Bdd(const Bdd& other);
  Bdd(Bdd&& other) noexcept;
  Bdd& operator=(const Bdd& other);
  Bdd& operator=(Bdd&& other) noexcept;
  ~Bdd();

  NodeRef node() const { return node_; }
  Manager* manager() const { return mgr_; }
  bool valid() const { return mgr_ != nullptr; }
  bool is_true() const { return node_ == kTrue; }
  bool is_false() const { return node_ == kFalse; }

  bool operator==(const Bdd& o) const { return mgr_ == o.mgr_ && node_ == o.node_; }
  bool operator!=(const Bdd& o) const { return !(*this == o); }

  Bdd operator&(const Bdd& o) const;
  Bdd operator|(const Bdd& o) const;
  Bdd operator^(const Bdd& o) const;
  Bdd operator-(const Bdd& o) const;  // this and not o
  Bdd operator!() const;
  Bdd& operator&=(const Bdd& o);
  Bdd& operator|=(const Bdd& o);

  /// Implication check: this => o.
  bool implies(const Bdd& o) const;

 private:
  friend class Manager;
  Bdd(Manager* m, NodeRef n) : mgr_(m), node_(n) {}

  Manager* mgr_ = nullptr;
  NodeRef node_ = kFalse;
};

/// Interned sets and maps used as auxiliary operands.
struct VarSet {
  std::uint32_t id = 0;
};
struct VarMap {
  std::uint32_t id = 0;
};
/// Current/next variable pairs of a partial transition relation. Each next
/// variable must directly follow its current variable in the order.
struct VarPairs {
  std::uint32_t id = 0;
};

struct Metrics {
  std::uint64_t operations = 0;
  std::uint64_t live_nodes = 0;
  std::uint64_t peak_live_nodes = 0;
  std::uint64_t allocated_nodes = 0;
  std::uint64_t gc_runs = 0;
};

struct ManagerOptions {
  std::size_t initial_buckets = 1 << 12;
  // Garbage collection runs at operation boundaries once this many dead
  // nodes exist and they outnumber the live ones.
  std::size_t gc_dead_threshold = 1 << 20;
};

class Manager {
 public:
  explicit Manager(std::uint32_t num_vars, ManagerOptions options = {});
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  std::uint32_t num_vars() const { return num_vars_; }

  Bdd const_true() { return Bdd(this, kTrue); }
  Bdd const_false() { return Bdd(this, kFalse); }
  Bdd constant(bool b) { return b ? const_true() : const_false(); }
  Bdd var(VarId v);
  Bdd nvar(VarId v);

  Bdd apply(Op op, const Bdd& f, const Bdd& g);
  Bdd bdd_and(const Bdd& f, const Bdd& g) { return apply(Op::and_, f, g); }
  Bdd bdd_or(const Bdd& f, const Bdd& g) { return apply(Op::or_, f, g); }
  Bdd bdd_not(const Bdd& f);
  Bdd ite(const Bdd& f, const Bdd& g, const Bdd& h);

  VarSet varset(std::vector<VarId> vars);
  VarMap varmap(const std::vector<std::pair<VarId, VarId>>& pairs);
  VarPairs varpairs(const std::vector<std::pair<VarId, VarId>>& current_next);
  const std::vector<VarId>& vars_of(VarSet s) const { return sets_[s.id].vars; }

  Bdd exists(const Bdd& f, VarSet vars);
  /// Renames variables. The renaming must keep the relative order of the
  /// support of `f`.
  Bdd replace(const Bdd& f, VarMap map);

  /// (exists A, A+ . p and t)[A+ := A] with A the current variables of
  /// `pairs`.
  Bdd relnext(const Bdd& p, const Bdd& t, VarPairs pairs);
  /// exists A+ . t and p[A := A+].
  Bdd relprev(const Bdd& p, const Bdd& t, VarPairs pairs);
  Bdd relnext_intersect(const Bdd& p, const Bdd& t, const Bdd& r, VarPairs pairs);
  Bdd relprev_intersect(const Bdd& p, const Bdd& t, const Bdd& r, VarPairs pairs);

  /// Coudert-Madre restrict; `care` must not be false.
  Bdd restrict(const Bdd& f, const Bdd& care);

  BigInt sat_count(const Bdd& f, VarSet over);
  std::size_t node_count(const Bdd& f) const;
  std::size_t node_count(const std::vector<Bdd>& roots) const;
  std::vector<VarId> support(const Bdd& f) const;
  bool eval(const Bdd& f, const std::vector<bool>& assignment) const;

  VarId top_var(const Bdd& f) const { return level(f.node()); }
  Bdd low(const Bdd& f);
  Bdd high(const Bdd& f);

  /// External root registry (in addition to Bdd handles).
  void register_root(const Bdd& f);
  void release_root(const Bdd& f);

  Metrics metrics() const;
  void collect_garbage();

  /// Reduction and uniqueness of every node in the table.
  bool check_invariants() const;

  std::string to_dot(const Bdd& f, const std::vector<std::string>& names = {}) const;

 private:
  friend class Bdd;

  struct Node {
    VarId var;
    NodeRef lo;
    NodeRef hi;
    std::uint32_t next;
    std::uint32_t ref;
  };

  struct CacheKey {
    std::uint32_t tag;
    NodeRef a, b, c;
    std::uint32_t aux;
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheHash {
    std::size_t operator()(const CacheKey& k) const noexcept;
  };

  struct SetInfo {
    std::vector<VarId> vars;
    std::vector<std::uint8_t> member;
    VarId max_var = 0;
  };
  struct MapInfo {
    std::vector<VarId> target;
    std::vector<std::pair<VarId, VarId>> pairs;
  };
  // role: 0 untouched, 1 current variable, 2 next variable.
  struct PairInfo {
    std::vector<std::uint8_t> role;
    std::vector<VarId> partner;
    VarSet current;
    VarSet next;
  };

  static constexpr VarId kTerminalLevel = 0xffffffffu;
  static constexpr VarId kFreeSlot = 0xfffffffeu;
  static constexpr std::uint32_t kNil = 0xffffffffu;

  VarId level(NodeRef n) const { return nodes_[n].var; }
  NodeRef lo_of(NodeRef n, VarId v) const { return nodes_[n].var == v ? nodes_[n].lo : n; }
  NodeRef hi_of(NodeRef n, VarId v) const { return nodes_[n].var == v ? nodes_[n].hi : n; }

  void ref(NodeRef n);
  void deref(NodeRef n);
  NodeRef find_or_add(VarId v, NodeRef lo, NodeRef hi);
  NodeRef mk(VarId v, NodeRef lo, NodeRef hi);  // consumes lo, hi
  void grow_buckets();
  void safe_point();
  void check(const Bdd& f) const;
  Bdd adopt(NodeRef owned) { return Bdd(this, owned); }

  bool cache_find(const CacheKey& k, NodeRef& out);
  void cache_put(const CacheKey& k, NodeRef r) { cache_.emplace(k, r); }

  // Recursive kernels; every result is an owned reference.
  NodeRef apply_rec(Op op, NodeRef f, NodeRef g);
  NodeRef not_rec(NodeRef f);
  NodeRef ite_rec(NodeRef f, NodeRef g, NodeRef h);
  NodeRef exists_rec(NodeRef f, std::uint32_t set);
  NodeRef replace_rec(NodeRef f, std::uint32_t map);
  NodeRef relnext_rec(NodeRef p, NodeRef t, std::uint32_t pairs);
  NodeRef relprev_rec(NodeRef p, NodeRef t, std::uint32_t pairs);
  NodeRef relnext_and_rec(NodeRef p, NodeRef t, NodeRef r, std::uint32_t pairs);
  NodeRef relprev_and_rec(NodeRef p, NodeRef t, NodeRef r, std::uint32_t pairs);
  NodeRef restrict_rec(NodeRef f, NodeRef c);
  NodeRef owned(NodeRef n) {
    ref(n);
    return n;
  }

  std::uint32_t num_vars_;
  ManagerOptions options_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> buckets_;
  std::uint32_t free_list_ = kNil;
  std::size_t table_nodes_ = 0;  // decision nodes in the unique table
  std::unordered_map<CacheKey, NodeRef, CacheHash> cache_;
  std::vector<NodeRef> stack_;

  std::vector<SetInfo> sets_;
  std::map<std::vector<VarId>, std::uint32_t> set_ids_;
  std::vector<MapInfo> maps_;
  std::map<std::vector<std::pair<VarId, VarId>>, std::uint32_t> map_ids_;
  std::vector<PairInfo> pairs_;
  std::map<std::vector<std::pair<VarId, VarId>>, std::uint32_t> pair_ids_;

  std::map<NodeRef, std::uint32_t> roots_;

  std::uint64_t operations_ = 0;
  std::uint64_t live_ = 0;
  std::uint64_t peak_ = 0;
  std::uint64_t gc_runs_ = 0;
};

}  // namespace symsynth::bdd
