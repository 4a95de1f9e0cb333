#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "random_model.hpp"
#include "symsynth/oracle.hpp"
#include "symsynth/supervisor.hpp"

using namespace symsynth;

namespace {

// Evaluates `e` on every in-range state of `s` and compares with `f`.
bool agrees(const Sefa& s, const Expr& e, const Bdd& f) {
  std::vector<int> v(s.domains.size());
  for (std::size_t d = 0; d < v.size(); ++d) v[d] = s.domains[d].domain.min_value();
  while (true) {
    MapValuation val;
    for (std::size_t d = 0; d < v.size(); ++d) {
      const auto& sd = s.domains[d];
      if (sd.kind == VarKind::location_pointer) val.locations[sd.name] = sd.domain.literals[v[d]];
      else val.values[sd.name] = v[d];
    }
    if (static_cast<bool>(eval(e, val)) != s.manager->eval(f, s.bits_of(v))) return false;
    std::size_t d = 0;
    for (; d < v.size(); ++d) {
      if (++v[d] <= s.domains[d].domain.max_value()) break;
      v[d] = s.domains[d].domain.min_value();
    }
    if (d == v.size()) return true;
  }
}

struct ClosedLoop {
  bool within_controlled = false;
  bool exact = false;  // states and enabled controllable events agree
  bool runtime_error = false;
};

// Explicit behaviour of the emitted model against the symbolic controlled
// behaviour.
ClosedLoop closed_loop(const SynthesisRun& run, const SupervisorModel& sup) {
  ClosedLoop out;
  const Sefa& s = run.sefa;
  auto ts = oracle::enumerate_product(as_plant_model(sup.spec));
  const std::size_t n = ts.layout.state_count;
  std::vector<char> everywhere(n, 1);
  auto reach = oracle::reachable(ts, ts.initial, everywhere);
  auto c = oracle::states_of(s, run.result.controlled, ts.layout);
  auto strong = strengthened_edges(s, run.result);
  std::vector<const SymbolicEdge*> ptrs;
  for (const auto& e : strong) ptrs.push_back(&e);
  auto sym = oracle::states_of(s, frs(s, run.result.controlled_initial, ptrs, run.result.controlled, ReachOptions{}),
                               ts.layout);
  out.within_controlled = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i] && !ts.in_range[i]) out.runtime_error = true;
    if (reach[i] && !c[i]) out.within_controlled = false;
  }
  if (!out.within_controlled) return out;
  out.exact = reach == sym;
  for (const auto& [ev, g] : run.result.event_guards) {
    auto sg = oracle::states_of(s, g, ts.layout);
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i]) continue;
      bool enabled = false;
      for (const auto& e : ts.edges)
        if (e.event == ev && e.guard[i] && !e.targets[i].empty()) enabled = true;
      if (enabled != static_cast<bool>(sg[i])) out.exact = false;
    }
  }
  return out;
}

const char* kSimple =
    "controllable a, b; plant P { location L0: initial; marked; edge a goto L1; location L1: marked; edge b goto L0; }";

}  // namespace

TEST_SUITE("supervisor") {
  TEST_CASE("lowering") {
    auto spec = parse(
        "controllable a; plant P { disc bool b = false; disc int[0..4] x = 0; disc enum{red, green, blue} c = red;"
        "location L0: initial; marked; edge a goto L1; location L1: edge a goto L2; location L2: }");
    auto lm = testutil::linearized(spec);
    Sefa s = testutil::encode(lm);
    auto& m = *s.manager;
    CHECK(lower_bdd_to_expr(s, m.const_true()).is_true());
    CHECK(lower_bdd_to_expr(s, m.const_false()).is_false());
    Bdd b = testutil::pred_in(s, "b");
    CHECK(lower_bdd_to_expr(s, b) == Expr::var("b"));
    CHECK(unparse_expr(lower_bdd_to_expr(s, testutil::pred_in(s, "x >= 1 and x <= 3"))) == "x >= 1 and x <= 3");
    CHECK(unparse_expr(lower_bdd_to_expr(s, testutil::pred_in(s, "x != 2"))) == "x != 2");
    // out-of-range values are free
    CHECK(lower_bdd_to_expr(s, testutil::pred_in(s, "x <= 4")).is_true());

    std::mt19937 rng(7);
    const std::size_t xd = s.domain_index("x"), cd = s.domain_index("c"), pd = s.domain_index("P");
    for (int round = 0; round < 300; ++round) {
      // random set of (x, c) or (P, b) value pairs, plus random out-of-range junk
      Bdd f = m.const_false();
      for (int x = 0; x <= 4; ++x)
        for (int c = 0; c <= 2; ++c)
          if (rng() % 2) f |= s.value_eq(xd, x) & s.value_eq(cd, c);
      if (round % 2) {
        f = m.const_false();
        for (int p = 0; p <= 2; ++p)
          for (int bv = 0; bv <= 1; ++bv)
            if (rng() % 2) f |= s.value_eq(pd, p) & (bv ? b : !b);
      }
      if (rng() % 3 == 0) f |= !s.in_range & s.value_eq(xd, 7);
      const Expr e = lower_bdd_to_expr(s, f);
      INFO(unparse_expr(e));
      CHECK(agrees(s, e, f));
      // and the printed form means the same after parsing back
      auto back = parse(unparse(spec) + "plant invariant " + unparse_expr(e) + ";");
      CHECK(agrees(s, back.invariants.back().predicate, f));
    }
  }

  TEST_CASE("nothing restricted gives true guards") {
    auto spec = parse(kSimple);
    auto run = synthesize(spec, SynthesisConfig{});
    auto sup = emit(run);
    CHECK(sup.initialization.is_true());
    for (const auto& [ev, g] : sup.guards) CHECK(g.is_true());
    const Automaton* a = sup.spec.find_automaton(sup.automaton);
    REQUIRE(a);
    CHECK(a->kind == AutomatonKind::supervisor);
    CHECK(*a->alphabet == std::vector<std::string>{"a", "b"});
    REQUIRE(a->locations.size() == 1);
    CHECK(a->locations[0].edges.size() == 2);
    for (const auto& e : a->locations[0].edges) CHECK(e.guard.is_true());
    CHECK(sup.spec.initial_predicates.back().is_true());
  }

  TEST_CASE("requirements and invariants") {
    auto spec = parse(
        "controllable inc, dec; uncontrollable tick;"
        "plant P { disc int[0..5] x = 0; location L: initial; marked;"
        "  edge inc when x < 5 do x := x + 1; edge dec when x > 0 do x := x - 1; edge tick; }"
        "requirement R { location A: initial; marked; edge inc goto B; edge tick; location B: marked; edge dec goto A; edge tick; }"
        "requirement invariant x != 4; requirement invariant dec needs x > 1;");
    auto run = synthesize(spec, SynthesisConfig{});
    REQUIRE(!run.result.empty_supervisor);
    auto on = emit(run);
    auto off = emit(run, EmitOptions{false});
    CHECK(on.spec.find_automaton("R")->kind == AutomatonKind::supervisor);
    std::size_t kept = 0;
    for (const auto& inv : on.spec.invariants) {
      CHECK(inv.side != InvariantSide::requirement);
      kept += inv.side == InvariantSide::supervisor;
    }
    CHECK(kept >= 2);
    for (const auto& inv : off.spec.invariants) CHECK(inv.side == InvariantSide::plant);
    for (const auto& [ev, g] : off.guards) CHECK(g == run.result.event_guards.at(ev));
    for (const auto& [ev, g] : on.guards) {
      const Bdd& a = on.assumptions.at(ev);
      CHECK((g & a) == (run.result.event_guards.at(ev) & a));
    }
    for (const auto* s : {&on, &off}) {
      const auto text = unparse(s->spec);
      INFO(text);
      auto back = parse(text);
      CHECK(validate(back, ValidateOptions{true}).empty());
      CHECK(unparse(back) == text);
      auto cl = closed_loop(run, *s);
      CHECK(cl.within_controlled);
      CHECK(cl.exact);
      CHECK(!cl.runtime_error);
    }
  }

  TEST_CASE("empty supervisor is refused") {
    auto spec = parse("controllable a; plant P { location L: initial; marked; edge a; } requirement invariant false;");
    auto run = synthesize(spec, SynthesisConfig{});
    CHECK_THROWS_AS(emit(run), std::invalid_argument);
  }

  TEST_CASE("name clash") {
    auto spec = parse("controllable sup; plant P { location L: initial; marked; edge sup; }");
    auto sup = emit(synthesize(spec, SynthesisConfig{}));
    CHECK(sup.automaton == "sup_1");
    CHECK(validate(parse(unparse(sup.spec)), ValidateOptions{true}).empty());
  }

  TEST_CASE("closed loop on random models") {
    std::size_t emitted = 0, exact = 0, left = 0;
    for (std::uint32_t seed = 1; seed <= 200; ++seed) {
      Specification spec = testutil::RandomSpec(seed).generate();
      auto run = synthesize(spec, SynthesisConfig{});
      if (run.result.empty_supervisor) continue;
      for (bool simplify : {true, false}) {
        INFO("seed " << seed << " simplify " << simplify);
        auto sup = emit(run, EmitOptions{simplify});
        ++emitted;
        const auto text = unparse(sup.spec);
        auto back = parse(text);
        CHECK(validate(back, ValidateOptions{true}).empty());
        CHECK(unparse(back) == text);
        for (const auto& [ev, g] : sup.guards) {
          const Bdd& a = sup.assumptions.at(ev);
          CHECK((g & a) == (run.result.event_guards.at(ev) & a));
        }
        auto cl = closed_loop(run, sup);
        CHECK(!cl.runtime_error);
        if (!cl.within_controlled) {
          ++left;
          continue;
        }
        CHECK(cl.exact);
        exact += cl.exact;
        // synthesis on the closed loop as a plant removes nothing further
        auto again = synthesize(as_plant_model(sup.spec), SynthesisConfig{});
        CHECK(count_controlled(again) == count_controlled(run));
      }
    }
    MESSAGE(emitted << " emitted, " << exact << " exact, " << left << " left the controlled states");
    CHECK(emitted >= 100);
    CHECK(exact + left == emitted);
  }
}
