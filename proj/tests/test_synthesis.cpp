#include <doctest.h>

#include "helpers.hpp"
#include "random_model.hpp"
#include "symsynth/oracle.hpp"
#include "symsynth/synthesis.hpp"

using namespace symsynth;

namespace {

// Backward search from s = 0 over e1..e6 in order: the first pass adds
// states via e1 e3 e5 e6, the second via e2 e3 e4, the third nothing.
const char* kSchedule = R"(
  controllable e1, e2, e3, e4, e5, e6;
  plant P {
    disc int[0..7] s = 7;
    location L: initial; marked;
      edge e1 when s = 1 do s := 0;
      edge e2 when s = 3 do s := 2;
      edge e3 when s = 2 or s = 4 do s := s - 1;
      edge e4 when s = 5 do s := 4;
      edge e5 when s = 6 do s := 0;
      edge e6 when s = 7 do s := 6;
  }
  marked s = 0;
)";

SynthesisConfig config_with(Granularity g, bool early, bool forward, const char* order) {
  SynthesisConfig c;
  c.granularity = g;
  c.early_stop = early;
  c.forward_reachability = forward;
  c.order = parse_order_config(order);
  return c;
}

}  // namespace

TEST_SUITE("synthesis") {
  TEST_CASE("early fixed-point detection on the six-edge schedule") {
    auto lm = testutil::linearized(std::string_view(kSchedule));
    Sefa s = testutil::encode(lm);
    REQUIRE(s.edges.size() == 6);
    auto edges = all_edges(s);
    ReachStats naive, early;
    Bdd a = brs(s, s.pm, edges, s.manager->const_true(), ReachOptions{false, EdgeApplication::compound}, &naive);
    Bdd b = brs(s, s.pm, edges, s.manager->const_true(), ReachOptions{true, EdgeApplication::compound}, &early);
    CHECK(naive.edge_applications == 18);
    CHECK(early.edge_applications == 16);
    CHECK(naive.successful_applications == 7);
    CHECK(early.successful_applications == 7);
    CHECK(a == b);
    CHECK(a == s.manager->const_true());
    ReachStats old;
    Bdd c = brs(s, s.pm, edges, s.manager->const_true(), ReachOptions{false, EdgeApplication::naive}, &old);
    CHECK(c == a);
    CHECK(old.edge_applications == 18);
  }

  TEST_CASE("reachability basics") {
    auto lm = testutil::linearized(std::string_view(
        "controllable inc; plant P { disc int[0..7] x = 0; location L: initial; marked; edge inc when x < 7 do x := x + 1; }"
        "marked x = 3;"));
    Sefa s = testutil::encode(lm);
    auto& m = *s.manager;
    const ReachOptions opts;
    CHECK(brs(s, s.pm, all_edges(s), m.const_true(), opts) == testutil::pred_in(s, "x <= 3"));
    CHECK(brs(s, s.pm, {}, m.const_true(), opts) == s.pm);
    CHECK(frs(s, s.p0, {}, m.const_true(), opts) == s.p0);
    CHECK(frs(s, s.p0, all_edges(s), m.const_false(), opts) == s.p0);
    CHECK(frs(s, s.p0, all_edges(s), m.const_true(), opts) == m.const_true());
    CHECK(frs(s, s.p0, all_edges(s), testutil::pred_in(s, "x < 5"), opts) == testutil::pred_in(s, "x < 5"));
    for (auto app : {EdgeApplication::compound, EdgeApplication::naive}) {
      ReachOptions o{false, app};
      CHECK(frs(s, s.p0, all_edges(s), testutil::pred_in(s, "x != 2"), o) == testutil::pred_in(s, "x < 2"));
      CHECK(brs(s, s.pm, all_edges(s), testutil::pred_in(s, "x != 1"), o) == testutil::pred_in(s, "x = 2 or x = 3"));
    }
  }

  TEST_CASE("nothing to restrict") {
    auto spec = parse("controllable a, b; plant P { location L0: initial; marked; edge a goto L1; location L1: marked; edge b goto L0; }");
    auto run = synthesize(spec, SynthesisConfig{});
    CHECK(!run.result.empty_supervisor);
    CHECK(run.result.controlled == run.sefa.in_range);
    for (const auto& [ev, g] : run.result.event_guards) {
      INFO(ev);
      CHECK(((run.sefa.in_range & g) == (run.sefa.in_range & run.sefa.edges[ev == "a" ? 0 : 1].guard)));
    }
  }

  TEST_CASE("empty supervisor") {
    auto spec = parse(
        "uncontrollable u; plant P { disc bool b = false; location L: initial; marked; edge u do b := true; }"
        "requirement invariant not b;");
    auto run = synthesize(spec, SynthesisConfig{});
    CHECK(run.result.empty_supervisor);
    CHECK(count_controlled(run) == 0);
    auto spec2 = parse("controllable a; plant P { location L: initial; marked; edge a; } requirement invariant false;");
    auto run2 = synthesize(spec2, SynthesisConfig{});
    CHECK(run2.result.empty_supervisor);
    CHECK(run2.result.stages.rounds == 0);
  }

  TEST_CASE("uncontrollable hazard removes its source") {
    auto spec = parse(
        "controllable go; uncontrollable fail;"
        "plant P { location A: initial; marked; edge go goto B; location B: edge fail goto C; edge go goto A; location C: }"
        "requirement invariant not P.C;");
    auto run = synthesize(spec, SynthesisConfig{});
    const Sefa& s = run.sefa;
    CHECK(run.result.controlled == testutil::pred_in(s, "P = 0"));
    CHECK(run.result.event_guards.at("go") == testutil::pred_in(s, "P = 1"));
    CHECK(count_uncontrolled(spec, SynthesisConfig{}) == 3);
    CHECK(count_controlled(run) == 1);
  }

  TEST_CASE("counter-producer pipeline") {
    auto spec = parse_file(testutil::model_path("counter_producer.efa"));
    auto a = synthesize(spec, SynthesisConfig::v40());
    auto b = synthesize(spec, SynthesisConfig::v08());
    CHECK(count_controlled(a) == count_controlled(b));
    auto ts = oracle::enumerate(a.model);
    auto ex = oracle::explicit_synthesis(ts, false);
    CHECK(oracle::compare(a.sefa, a.result.controlled, a.result.event_guards, ts, ex).empty());
    auto reach = oracle::reachable(ts, ts.initial, ts.in_range);
    CHECK(count_uncontrolled(spec, SynthesisConfig{}) == oracle::count(reach));
  }

  TEST_CASE("properties on random models") {
    for (std::uint32_t seed = 1; seed <= 60; ++seed) {
      INFO("seed " << seed);
      Specification spec = testutil::RandomSpec(seed).generate();
      for (bool forward : {false, true}) {
        SynthesisConfig cfg;
        cfg.forward_reachability = forward;
        cfg.stop_on_empty_init = false;
        auto run = synthesize(spec, cfg);
        const Sefa& s = run.sefa;
        auto& m = *s.manager;
        const auto& r = run.result;
        const Bdd& c = r.controlled;
        CHECK((c & s.pf).is_false());
        // one more round leaves C unchanged
        const ReachOptions opts;
        Bdd again = brs(s, s.pm & c, all_edges(s), c, opts);
        again = !brs(s, !again, uncontrollable_edges(s), m.const_true(), opts);
        if (forward) again = frs(s, s.p0 & again, all_edges(s), again, opts);
        CHECK(again == c);
        // no uncontrollable transition leaves C
        for (const auto* e : uncontrollable_edges(s)) CHECK(m.relnext(c, e->relation, e->pairs).implies(c));
        // strengthened guards imply the original ones
        for (std::size_t k = 0; k < s.edges.size(); ++k) CHECK(r.edge_guards[k].implies(s.edges[k].guard));
        // controlled reachable states can reach a marked controlled state
        auto strong = strengthened_edges(s, r);
        std::vector<const SymbolicEdge*> ptrs;
        for (const auto& e : strong) ptrs.push_back(&e);
        Bdd reach = frs(s, s.p0 & c, ptrs, c, opts);
        CHECK(reach.implies(brs(s, s.pm & c, ptrs, c, opts)));
        // early stop gives the same fixed points with no more applications
        ReachStats a, b;
        CHECK(brs(s, s.pm, all_edges(s), m.const_true(), ReachOptions{false}, &a) ==
              brs(s, s.pm, all_edges(s), m.const_true(), ReachOptions{true}, &b));
        CHECK(b.edge_applications <= a.edge_applications);
      }
    }
  }

  TEST_CASE("granularity and application modes agree") {
    for (std::uint32_t seed = 100; seed < 140; ++seed) {
      INFO("seed " << seed);
      Specification spec = testutil::RandomSpec(seed).generate();
      auto a = synthesize(spec, config_with(Granularity::per_edge, false, false, "model"));
      auto b = synthesize(spec, config_with(Granularity::per_event, true, false, "model"));
      SynthesisConfig naive = config_with(Granularity::per_edge, false, false, "model");
      naive.application = EdgeApplication::naive;
      auto c = synthesize(spec, naive);
      // same order, so the BDDs of different managers have equal sizes and counts
      CHECK(a.sefa.count(a.result.controlled) == b.sefa.count(b.result.controlled));
      CHECK(a.sefa.count(a.result.controlled) == c.sefa.count(c.result.controlled));
      auto ts = oracle::enumerate(a.model);
      for (auto* run : {&a, &b, &c}) {
        auto ex = oracle::explicit_synthesis(ts, false);
        CHECK(oracle::compare(run->sefa, run->result.controlled, run->result.event_guards, ts, ex).empty());
      }
    }
  }

  TEST_CASE("determinism") {
    auto spec = parse_file(testutil::model_path("counter_producer.efa"));
    for (auto cfg : {SynthesisConfig::v40(), SynthesisConfig::v08()}) {
      auto a = synthesize(spec, cfg);
      auto b = synthesize(spec, cfg);
      CHECK(a.metrics.operations == b.metrics.operations);
      CHECK(a.metrics.peak_live_nodes == b.metrics.peak_live_nodes);
      CHECK(a.result.reach.edge_applications == b.result.reach.edge_applications);
      CHECK(a.order == b.order);
    }
  }

  TEST_CASE("presets") {
    CHECK(preset("v08").application == EdgeApplication::naive);
    CHECK(preset("v40").early_stop);
    CHECK_THROWS(preset("v99"));
  }
}
