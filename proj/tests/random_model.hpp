#pragma once

// Random well-typed specifications for property tests and the oracle suite.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "symsynth/model.hpp"

namespace testutil {

struct RandomOptions {
  int max_variables = 6;  // including inputs and location pointers
  int max_domain = 4;
  bool inputs = true;
  bool requirements = true;
  bool invariants = true;
};

class RandomSpec {
 public:
  RandomSpec(std::uint32_t seed, RandomOptions options = {}) : rng_(seed), opt_(options) {}

  symsynth::Specification generate() {
    using namespace symsynth;
    Specification s;
    vars_.clear();
    locs_.clear();
    int budget = opt_.max_variables;
    const int nev = range(2, 4);
    for (int i = 0; i < nev; ++i)
      s.events.push_back(Event{"e" + std::to_string(i), chance(0.35) ? Controllability::uncontrollable
                                                                         : Controllability::controllable});
    if (opt_.inputs && chance(0.4)) {
      Variable v{"in0", domain(), VarKind::input, {}};
      s.inputs.push_back(v);
      vars_.push_back({v.name, v.domain});
      --budget;
    }
    const int nplant = range(1, 3);
    const int nreq = opt_.requirements ? range(0, 1) : 0;
    for (int a = 0; a < nplant + nreq; ++a) {
      Automaton aut;
      const bool req = a >= nplant;
      aut.name = req ? "R" + std::to_string(a - nplant) : "P" + std::to_string(a);
      aut.kind = req ? AutomatonKind::requirement : AutomatonKind::plant;
      int nloc = 1;
      if (budget > 0 && chance(0.7)) {
        nloc = range(2, std::min(3, opt_.max_domain));
        --budget;
      }
      if (budget > 0 && chance(0.6)) {
        Variable v{"v" + std::to_string(vars_.size()), domain(), VarKind::discrete, {}};
        if (!chance(0.2)) {
          v.initial_values.push_back(pick_value(v.domain));
          if (chance(0.3)) {
            int w = pick_value(v.domain);
            if (w != v.initial_values[0]) v.initial_values.push_back(w);
          }
        }
        aut.variables.push_back(v);
        vars_.push_back({v.name, v.domain});
        --budget;
      }
      for (int l = 0; l < nloc; ++l) {
        aut.locations.push_back(Location{"L" + std::to_string(l), std::nullopt, std::nullopt, {}});
        locs_.push_back({aut.name, "L" + std::to_string(l)});
      }
      s.automata.push_back(std::move(aut));
    }
    // Bodies after all declarations so guards can read every variable.
    for (auto& aut : s.automata) {
      std::vector<std::string> sigma;
      for (const auto& e : s.events)
        if (chance(0.6)) sigma.push_back(e.name);
      if (sigma.empty()) sigma.push_back(s.events[0].name);
      const std::size_t nloc = aut.locations.size();
      for (std::size_t l = 0; l < nloc; ++l) {
        auto& loc = aut.locations[l];
        if (l == 0) loc.initial = symsynth::Expr::boolean(true);
        else if (chance(0.15)) loc.initial = pred(1);
        if (chance(0.75)) loc.marked = chance(0.8) ? symsynth::Expr::boolean(true) : pred(1);
        const int nedge = range(0, 2);
        for (int k = 0; k < nedge; ++k) {
          Edge e;
          e.events.push_back(sigma[index(sigma.size())]);
          if (chance(0.2)) e.events.push_back(sigma[index(sigma.size())]);
          if (e.events.size() == 2 && e.events[0] == e.events[1]) e.events.pop_back();
          if (chance(0.6)) e.guard = pred(2);
          for (const auto& v : aut.variables)
            if (chance(0.5)) e.updates.push_back(Assignment{v.name, value_for(v.domain)});
          e.target = index(nloc);
          loc.edges.push_back(std::move(e));
        }
      }
      if (chance(0.2)) {
        aut.alphabet = sigma;
        // Keep declaration order as the parser and writer expect.
        std::vector<std::string> ordered;
        for (const auto& e : s.events)
          if (std::find(sigma.begin(), sigma.end(), e.name) != sigma.end()) ordered.push_back(e.name);
        aut.alphabet = ordered;
      }
    }
    if (opt_.invariants) {
      const int ninv = range(0, 2);
      for (int i = 0; i < ninv; ++i) {
        Invariant inv;
        inv.kind = static_cast<InvariantKind>(range(0, 2));
        inv.side = chance(0.5) ? InvariantSide::plant : InvariantSide::requirement;
        if (inv.kind != InvariantKind::state) inv.event = s.events[index(s.events.size())].name;
        inv.predicate = pred(1);
        s.invariants.push_back(std::move(inv));
      }
    }
    if (chance(0.1)) s.initial_predicates.push_back(pred(1));
    if (chance(0.15)) s.marker_predicates.push_back(pred(1));
    return s;
  }

 private:
  struct VarRef {
    std::string name;
    symsynth::VarDomain domain;
  };

  std::mt19937 rng_;
  RandomOptions opt_;
  std::vector<VarRef> vars_;
  std::vector<std::pair<std::string, std::string>> locs_;

  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  symsynth::VarDomain domain() {
    using symsynth::VarDomain;
    switch (range(0, 2)) {
      case 0: return VarDomain::boolean();
      case 1: {
        int lo = chance(0.2) ? 1 : 0;
        return VarDomain::integer(lo, lo + range(1, opt_.max_domain - 1));
      }
      default: {
        std::vector<std::string> lits;
        const int n = range(2, std::min(3, opt_.max_domain));
        for (int i = 0; i < n; ++i) lits.push_back("k" + std::to_string(vars_.size()) + "_" + std::to_string(i));
        return VarDomain::enumeration(lits);
      }
    }
  }

  int pick_value(const symsynth::VarDomain& d) { return range(d.min_value(), d.max_value()); }

  std::vector<const VarRef*> of_kind(symsynth::VarDomain::Kind k) const {
    std::vector<const VarRef*> r;
    for (const auto& v : vars_)
      if (v.domain.kind == k) r.push_back(&v);
    return r;
  }

  symsynth::Expr literal_of(const symsynth::VarDomain& d, int v) const {
    using symsynth::Expr;
    switch (d.kind) {
      case symsynth::VarDomain::Kind::boolean: return Expr::boolean(v != 0);
      case symsynth::VarDomain::Kind::integer: return Expr::integer(v);
      default: return Expr::enum_lit(d.literals[v], v);
    }
  }

  symsynth::Expr value_for(const symsynth::VarDomain& d) {
    switch (d.kind) {
      case symsynth::VarDomain::Kind::boolean: return pred(1);
      case symsynth::VarDomain::Kind::integer: return chance(0.3) ? literal_of(d, pick_value(d)) : int_expr(1);
      default: return literal_of(d, pick_value(d));
    }
  }

  symsynth::Expr int_expr(int depth) {
    using namespace symsynth;
    auto ints = of_kind(VarDomain::Kind::integer);
    int k = range(0, depth > 0 ? 5 : 1);
    if (k == 1 && !ints.empty()) return Expr::var(ints[index(ints.size())]->name);
    if (k <= 1) return Expr::integer(range(0, 3));
    if (k == 2) return Expr::binary(ExprKind::add, int_expr(depth - 1), int_expr(depth - 1));
    if (k == 3) return Expr::binary(ExprKind::sub, int_expr(depth - 1), int_expr(depth - 1));
    if (k == 4) return Expr::binary(ExprKind::mod, int_expr(depth - 1), Expr::integer(range(2, 3)));
    if (chance(0.5) || ints.empty()) return Expr::unary(ExprKind::neg, int_expr(depth - 1));
    return Expr::binary(ExprKind::add, Expr::var(ints[index(ints.size())]->name), Expr::integer(1));
  }

  symsynth::Expr pred(int depth) {
    using namespace symsynth;
    int k = range(0, depth > 0 ? 8 : 4);
    switch (k) {
      case 0: {
        auto bools = of_kind(VarDomain::Kind::boolean);
        if (!bools.empty()) return Expr::var(bools[index(bools.size())]->name);
        return Expr::boolean(chance(0.7));
      }
      case 1: {
        auto enums = of_kind(VarDomain::Kind::enumeration);
        if (enums.empty()) return Expr::boolean(chance(0.7));
        const VarRef* v = enums[index(enums.size())];
        return Expr::binary(chance(0.7) ? ExprKind::eq : ExprKind::ne, Expr::var(v->name),
                            literal_of(v->domain, pick_value(v->domain)));
      }
      case 2: {
        if (locs_.empty()) return Expr::boolean(true);
        const auto& [a, l] = locs_[index(locs_.size())];
        return Expr::loc(a, l);
      }
      case 3:
      case 4: {
        static const ExprKind cmp[] = {ExprKind::eq, ExprKind::ne, ExprKind::lt, ExprKind::le, ExprKind::gt, ExprKind::ge};
        return Expr::binary(cmp[range(0, 5)], int_expr(depth), int_expr(0));
      }
      case 5: return Expr::unary(ExprKind::not_, pred(depth - 1));
      case 6: return Expr::binary(ExprKind::and_, pred(depth - 1), pred(depth - 1));
      case 7: return Expr::binary(ExprKind::or_, pred(depth - 1), pred(depth - 1));
      default: return Expr::binary(ExprKind::eq, pred(depth - 1), pred(0));
    }
  }
};

}  // namespace testutil
