#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "symsynth/var_order.hpp"

using namespace symsynth;

namespace {

// WES straight from its defining sum, in floating point.
double wes_direct(const VarOrder& order, const std::vector<Hyperedge>& hs) {
  if (hs.empty()) return 0;
  const double n = static_cast<double>(order.size());
  double sum = 0;
  for (const auto& h : hs) {
    std::vector<double> ps;
    for (std::size_t v : h) ps.push_back(static_cast<double>(std::find(order.begin(), order.end(), v) - order.begin()));
    const double hi = *std::max_element(ps.begin(), ps.end()), lo = *std::min_element(ps.begin(), ps.end());
    sum += (2 * (hi + 1) / n) * (hi - lo + 1) / n;
  }
  return sum / static_cast<double>(hs.size());
}

bool is_permutation(const VarOrder& o, std::size_t n) {
  VarOrder s = o;
  std::sort(s.begin(), s.end());
  VarOrder id(n);
  std::iota(id.begin(), id.end(), 0);
  return s == id;
}

std::vector<Hyperedge> random_hyperedges(std::mt19937& rng, std::size_t n, std::size_t count) {
  std::vector<Hyperedge> hs;
  for (std::size_t i = 0; i < count; ++i) {
    Hyperedge h;
    for (std::size_t v = 0; v < n; ++v)
      if (rng() % 3 == 0) h.push_back(v);
    if (h.empty()) h.push_back(rng() % n);
    hs.push_back(h);
  }
  return hs;
}

VarRelations relations_of(const std::vector<Hyperedge>& hs, std::size_t n) {
  VarRelations r;
  for (std::size_t i = 0; i < n; ++i) r.names.push_back("v" + std::to_string(i));
  r.weight.assign(n, std::vector<std::uint64_t>(n, 0));
  for (const auto& h : hs)
    for (std::size_t a : h)
      for (std::size_t b : h)
        if (a != b) ++r.weight[a][b];
  return r;
}

}  // namespace

TEST_SUITE("order") {
  TEST_CASE("counter-producer variable relations") {
    auto lm = testutil::linearized(parse_file(testutil::model_path("counter_producer.efa")));
    auto rel = extract_relations(lm);
    const auto& r = rel.relations;
    CHECK(rel.hyperedges.size() == 10);
    CHECK(r.at("l1", "x") == 7);
    CHECK(r.at("x", "l2") == 5);
    CHECK(r.at("l1", "l2") == 4);
    CHECK(r.at("l1", "v") == 2);
    CHECK(r.at("v", "x") == 2);
    CHECK(r.at("v", "l2") == 1);
    CHECK(r.at("v", "y") == 1);
    CHECK(r.at("x", "y") == 1);
    CHECK(r.at("l2", "y") == 1);
    CHECK(r.at("l1", "y") == 0);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(r.weight[i][i] == 0);
      for (std::size_t j = 0; j < 5; ++j) CHECK(r.weight[i][j] == r.weight[j][i]);
    }
    CHECK(dsm_csv(r).rfind(",l1,v,x,l2,y\nl1,0,2,7,4,0\n", 0) == 0);
  }

  TEST_CASE("small relation examples") {
    auto one = testutil::linearized(std::string_view(
        "controllable e; plant P { disc bool a; disc bool b; location L: initial; edge e when a; }"));
    CHECK(extract_relations(one).relations.at("a", "b") == 0);
    auto two = testutil::linearized(std::string_view(
        "controllable e, f; plant P { disc bool a; disc bool b; location L: initial; edge e when a do b := true;"
        " edge f do a := b; }"));
    CHECK(extract_relations(two).relations.at("a", "b") == 2);
  }

  TEST_CASE("wes values") {
    CHECK(wes({0, 1, 2, 3}, {{0, 1, 2, 3}}).value() == doctest::Approx(2.0));
    CHECK(wes({0, 1, 2, 3}, {{0}}).value() == doctest::Approx(0.125));
    CHECK(wes({0, 1, 2, 3}, {}).value() == 0.0);
    CHECK(wes({0, 1, 2, 3}, {{0, 1}}).value() != wes({2, 3, 0, 1}, {{0, 1}}).value());
    std::mt19937 rng(5);
    for (int i = 0; i < 100; ++i) {
      auto hs = random_hyperedges(rng, 6, 5);
      VarOrder o(6);
      std::iota(o.begin(), o.end(), 0);
      std::shuffle(o.begin(), o.end(), rng);
      CHECK(wes(o, hs).value() == doctest::Approx(wes_direct(o, hs)));
    }
  }

  TEST_CASE("dcsh picks the best candidate") {
    // path a - b - c
    VarRelations path{{"a", "b", "c"}, {{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}};
    std::vector<Hyperedge> hs{{0, 1}, {1, 2}};
    auto cands = dcsh_candidates(path);
    REQUIRE(cands.size() == 4);
    double best = 1e9;
    for (const auto& c : cands) best = std::min(best, wes_direct(c, hs));
    CHECK(wes_direct(dcsh(path, hs), hs) == doctest::Approx(best));

    VarRelations single{{"a"}, {{0}}};
    CHECK(dcsh(single, {}) == VarOrder{0});

    // components {0,1,2} and singleton {3}
    std::vector<Hyperedge> comp{{0, 1}, {1, 2}, {3}};
    auto rel = relations_of(comp, 4);
    for (const auto& c : dcsh_candidates(rel)) CHECK(c.back() == 3);

    std::mt19937 rng(9);
    for (int i = 0; i < 100; ++i) {
      auto hs2 = random_hyperedges(rng, 7, 4);
      auto r2 = relations_of(hs2, 7);
      double b = 1e9;
      for (const auto& c : dcsh_candidates(r2)) {
        CHECK(is_permutation(c, 7));
        b = std::min(b, wes_direct(c, hs2));
      }
      CHECK(wes_direct(dcsh(r2, hs2), hs2) == doctest::Approx(b));
    }
  }

  TEST_CASE("force") {
    CHECK(force({2, 0, 1}, {}) == VarOrder{2, 0, 1});
    auto r = force({0, 1, 2}, {{0, 2}});
    auto pos = [&](std::size_t v) { return static_cast<long>(std::find(r.begin(), r.end(), v) - r.begin()); };
    CHECK(std::abs(pos(0) - pos(2)) == 1);
    // a - b - c already has minimal total span
    CHECK(force({0, 1, 2}, {{0, 1}, {1, 2}}) == VarOrder{0, 1, 2});
    std::mt19937 rng(3);
    for (int i = 0; i < 100; ++i) {
      auto hs = random_hyperedges(rng, 6, 4);
      VarOrder o(6);
      std::iota(o.begin(), o.end(), 0);
      auto f = force(o, hs);
      CHECK(is_permutation(f, 6));
      CHECK(total_span(f, hs) <= total_span(o, hs));
    }
  }

  TEST_CASE("sliding window") {
    CHECK(sliding_window({0}, {{0}}) == VarOrder{0});
    std::vector<Hyperedge> hs{{0, 2}, {2}, {1, 2}};
    auto r = sliding_window({0, 1, 2}, hs);
    VarOrder p{0, 1, 2};
    std::uint64_t best = ~0ull;
    do best = std::min(best, wes(p, hs).numerator);
    while (std::next_permutation(p.begin(), p.end()));
    CHECK(wes(r, hs).numerator == best);
    std::mt19937 rng(4);
    for (int i = 0; i < 100; ++i) {
      auto hs2 = random_hyperedges(rng, 7, 5);
      VarOrder o(7);
      std::iota(o.begin(), o.end(), 0);
      std::shuffle(o.begin(), o.end(), rng);
      auto s = sliding_window(o, hs2);
      CHECK(is_permutation(s, 7));
      CHECK(wes(s, hs2).numerator <= wes(o, hs2).numerator);
    }
  }

  TEST_CASE("pipelines and configs") {
    auto lm = testutil::linearized(parse_file(testutil::model_path("counter_producer.efa")));
    for (const char* c : {"model", "dcsh", "force", "sloan", "cm", "pipeline-v08", "pipeline-v40"}) {
      auto cfg = parse_order_config(c);
      CHECK(to_string(cfg) == c);
      auto o = order_variables(lm, cfg);
      CHECK(is_permutation(o, 5));
      CHECK(o == order_variables(lm, cfg));
    }
    CHECK(order_variables(lm, parse_order_config("model")) == VarOrder{0, 1, 2, 3, 4});
    CHECK(order_variables(lm, parse_order_config("custom:y,x,v,l2,l1")) == VarOrder{4, 2, 1, 3, 0});
    CHECK_THROWS(order_variables(lm, parse_order_config("custom:y,x")));
    CHECK_THROWS(order_variables(lm, parse_order_config("custom:y,y,v,l2,l1")));
    CHECK_THROWS(parse_order_config("bogus"));
  }
}
