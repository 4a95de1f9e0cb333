#include <doctest.h>

#include "helpers.hpp"
#include "random_model.hpp"

using namespace symsynth;

namespace {

// Every in-domain valuation of the linearized variables.
std::vector<std::vector<int>> all_states(const LinearizedModel& lm) {
  std::vector<std::vector<int>> out{{}};
  for (const auto& v : lm.variables) {
    std::vector<std::vector<int>> next;
    for (const auto& s : out)
      for (int x = v.domain.min_value(); x <= v.domain.max_value(); ++x) {
        next.push_back(s);
        next.back().push_back(x);
      }
    out = std::move(next);
  }
  return out;
}

MapValuation valuation(const LinearizedModel& lm, const std::vector<int>& s) {
  MapValuation m;
  for (std::size_t i = 0; i < s.size(); ++i) m.values[lm.variables[i].name] = s[i];
  return m;
}

}  // namespace

TEST_SUITE("sefa") {
  TEST_CASE("bit layout is interleaved, least significant bit first") {
    auto lm = testutil::linearized(std::string_view(
        "controllable e; plant P { disc int[0..5] x = 0; disc bool b; location L: initial; edge e; }"));
    Sefa s = testutil::encode(lm);
    REQUIRE(s.domains.size() == 2);
    CHECK(s.domains[0].width == 3);
    CHECK(s.domains[0].cur == std::vector<bdd::VarId>{0, 2, 4});
    CHECK(s.domains[0].next == std::vector<bdd::VarId>{1, 3, 5});
    CHECK(s.domains[1].cur == std::vector<bdd::VarId>{6});
    CHECK(s.manager->num_vars() == 8);
    // x = 3 is x0 and x1
    CHECK(s.value_eq(0, 3) == (s.manager->var(0) & s.manager->var(2) & s.manager->nvar(4)));

    Sefa r = build_sefa(lm, {1, 0});
    CHECK(r.domains[1].cur == std::vector<bdd::VarId>{0});
    CHECK(r.domains[0].cur == std::vector<bdd::VarId>{2, 4, 6});
  }

  TEST_CASE("runtime error predicate of an increment") {
    auto lm = testutil::linearized(std::string_view(
        "controllable e; plant P { disc int[0..5] y = 0; location L: initial; edge e do y := y + 1; }"));
    Sefa s = testutil::encode(lm);
    CHECK(s.domains[0].width == 3);
    auto enc = s.encode_assignment("y", lm.edges[0].updates[0].value);
    CHECK(enc.error == testutil::pred_in(s, "y + 1 > 7"));
    CHECK(enc.error == s.value_eq(0, 7));
    CHECK(s.edges[0].error == enc.error);
    // the domain bound is not part of the error; it is a forbidden state
    CHECK(s.pf == !s.domain_in_range(0));
  }

  TEST_CASE("counter-producer SEFA") {
    auto lm = testutil::linearized(parse_file(testutil::model_path("counter_producer.efa")));
    Sefa s = testutil::encode(lm);
    CHECK(s.p0 == testutil::pred_in(s, "l1 = 0 and not v and x = 0 and l2 = 0 and y = 0"));
    CHECK(s.count(s.p0) == 1);
    CHECK(s.pm == testutil::pred_in(s, "l1 = 4 and l2 = 3"));
    REQUIRE(s.edges.size() == 10);
    CHECK(s.edges[0].error.is_false());
    CHECK(s.edges[1].error == testutil::pred_in(s, "x + 1 > 7"));
    CHECK(s.edges[3].error == testutil::pred_in(s, "y + x > 15"));
    CHECK(s.domains[0].representable_max() == 7);
    CHECK(s.domains[4].representable_max() == 15);
    CHECK(s.count(s.in_range) == 5 * 2 * 6 * 4 * 13);
    CHECK(s.pf == !s.in_range);

    Sefa m = merge_per_event(testutil::encode(lm));
    REQUIRE(m.edges.size() == 7);
    std::vector<std::string> evs;
    for (const auto& e : m.edges) evs.push_back(e.event);
    CHECK(evs == std::vector<std::string>{"start", "increase", "proceed", "produce", "decide", "reset", "again"});
    CHECK(m.edges[4].sources == std::vector<std::size_t>{4, 5, 6, 7});
  }

  TEST_CASE("merging two edges of one event") {
    auto lm = testutil::linearized(std::string_view(
        "controllable e; plant P { disc int[0..7] x = 0; disc int[0..6] y = 0; disc int[0..6] z = 0;"
        " location L: initial; marked; edge e when x <= 4 do y := y + 1; edge e when x >= 4 do z := z + 1; }"));
    Sefa s = merge_per_event(testutil::encode(lm));
    REQUIRE(s.edges.size() == 1);
    const auto& e = s.edges[0];
    auto& m = *s.manager;
    // The combined guard is x <= 4 or x >= 4, minus the states where an
    // increment would leave the 3-bit range.
    CHECK(e.guard == testutil::pred_in(s, "x <= 4 and y != 7 or x >= 4 and z != 7"));
    CHECK(e.error.is_false());
    // y+ = y + 1 as integers: the bit update outside the error states
    auto inc = [&](const char* v) {
      auto enc = s.encode_assignment(v, testutil::expr_in(s, std::string(v) + " + 1"));
      return enc.update - enc.error;
    };
    Bdd y_inc = inc("y"), z_inc = inc("z");
    Bdd y_keep = s.frames[1], z_keep = s.frames[2];
    Bdd want = (testutil::pred_in(s, "x <= 4") & y_inc & z_keep) |
               (testutil::pred_in(s, "x >= 4") & y_keep & z_inc);
    CHECK(e.update == want);
    CHECK(e.relation == want);
    CHECK(e.assigned == std::vector<std::size_t>{1, 2});
    CHECK(m.support(e.relation).size() == 3 + 6 + 6);
  }

  TEST_CASE("input variables get an uncontrollable edge") {
    auto lm = testutil::linearized(std::string_view(
        "controllable e; input int[0..2] i; plant P { location L: initial; marked; edge e when i = 1; }"));
    Sefa s = testutil::encode(lm);
    REQUIRE(s.edges.size() == 2);
    const auto& in = s.edges[1];
    CHECK(in.event == "$i");
    CHECK(!in.controllable);
    CHECK(s.find_event("$i"));
    auto& m = *s.manager;
    // from i = 1 exactly the values 0 and 2 are reachable
    Bdd img = m.relnext(s.value_eq(0, 1), in.relation, in.pairs);
    CHECK(img == (s.value_eq(0, 0) | s.value_eq(0, 2)));
    CHECK(s.count(s.p0) == 3);
  }

  TEST_CASE("invariants") {
    auto lm = testutil::linearized(std::string_view(
        "controllable c; uncontrollable u;"
        "plant P { disc int[0..3] x = 0; location L: initial; marked; edge c do x := x + 1; edge u do x := 0; }"
        "plant invariant x != 3;"
        "requirement invariant c needs x < 1;"
        "requirement invariant x = 2 disables u;"
        "plant invariant x = 1 disables c;"));
    Sefa s = testutil::encode(lm);
    auto P = [&](const char* t) { return testutil::pred_in(s, t); };
    REQUIRE(s.edges.size() == 2);
    // plant state invariant x != 3 blocks c from x = 2; plant disables blocks x = 1
    CHECK(s.edges[0].guard == (P("x != 2") & P("x != 1") & P("x < 1")));
    CHECK(s.edges[0].plant_guard == P("x != 1"));
    CHECK(s.edges[1].guard.is_true());
    CHECK(s.pf == P("x = 2"));
    CHECK(s.p0 == P("x = 0"));
    CHECK(s.requirement_needs.at("c") == P("x < 1"));
  }

  TEST_CASE("encoding agrees with evaluation on random models") {
    for (std::uint32_t seed = 1; seed <= 120; ++seed) {
      INFO("seed " << seed);
      auto lm = testutil::linearized(testutil::RandomSpec(seed).generate());
      Sefa s = testutil::encode(lm);
      const auto& m = *s.manager;
      const auto states = all_states(lm);
      for (const auto& st : states) {
        auto val = valuation(lm, st);
        auto bits = s.bits_of(st);
        for (const auto& e : lm.edges) {
          CHECK(m.eval(s.encode_predicate(e.guard), bits) == (eval(e.guard, val) != 0));
          for (const auto& u : e.updates) {
            const std::size_t d = s.domain_index(u.variable);
            const int v = eval(u.value, val);
            auto enc = s.encode_assignment(u.variable, u.value);
            const bool out = v < 0 || v > s.domains[d].representable_max();
            CHECK(m.eval(enc.error, bits) == out);
            if (out) continue;
            auto next = bits;
            for (int cand = 0; cand <= s.domains[d].representable_max(); ++cand) {
              for (std::size_t i = 0; i < s.domains[d].width; ++i) next[s.domains[d].next[i]] = (cand >> i) & 1;
              CHECK(m.eval(enc.update, next) == (cand == v));
            }
          }
        }
        for (const auto& p : lm.initial_predicates) CHECK(m.eval(s.encode_predicate(p), bits) == (eval(p, val) != 0));
      }
    }
  }
}
