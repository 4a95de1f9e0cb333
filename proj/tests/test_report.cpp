#include <doctest.h>

#include "helpers.hpp"
#include "symsynth/report.hpp"

using namespace symsynth;

TEST_SUITE("report") {
  TEST_CASE("one model, one config, three repetitions") {
    std::vector<NamedModel> models{{"counter_producer", parse_file(testutil::model_path("counter_producer.efa"))}};
    auto t = bench(models, {{"v40", preset("v40")}}, 3);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].deterministic);
    CHECK(t.rows[0].repetitions == 3);
    CHECK(t.factors.empty());
    CHECK(t.rows[0].report.us_states == bdd::BigInt(482));
    CHECK(t.rows[0].report.cs_states == bdd::BigInt(249));
  }

  TEST_CASE("equal runs give factor 1") {
    std::vector<NamedModel> models{{"counter_producer", parse_file(testutil::model_path("counter_producer.efa"))}};
    auto t = bench(models, {{"a", preset("v08")}, {"b", preset("v08")}}, 1, false);
    REQUIRE(t.factors.size() == 1);
    CHECK(t.factors[0].operations == 1.0);
    CHECK(t.factors[0].peak_nodes == 1.0);
    CHECK(t.factors[0].edge_applications == 1.0);
  }

  TEST_CASE("factors are baseline over other") {
    std::vector<NamedModel> models{{"counter_producer", parse_file(testutil::model_path("counter_producer.efa"))}};
    auto t = bench(models, {{"v08", preset("v08")}, {"v40", preset("v40")}}, 1, false);
    REQUIRE(t.rows.size() == 2);
    REQUIRE(t.factors.size() == 1);
    CHECK(t.factors[0].operations == doctest::Approx(static_cast<double>(t.rows[0].report.operations) /
                                                     static_cast<double>(t.rows[1].report.operations)));
    CHECK(t.rows[0].config_name == "v08");
  }

  TEST_CASE("early stop never adds edge applications") {
    for (const char* name : {"counter_producer.efa", "dining_philosophers.efa", "agv_mutex.efa"}) {
      auto spec = parse_file(testutil::model_path(name));
      SynthesisConfig on = preset("v08"), off = preset("v08");
      on.early_stop = true;
      auto a = synthesize(spec, on), b = synthesize(spec, off);
      INFO(name);
      CHECK(a.result.reach.edge_applications <= b.result.reach.edge_applications);
      CHECK(count_controlled(a) == count_controlled(b));
    }
  }

  TEST_CASE("stats") {
    auto st = model_stats(parse_file(testutil::model_path("counter_producer.efa")));
    CHECK(st.plant_automata == 2);
    CHECK(st.plant_locations == 9);
    CHECK(model_stats(parse("")) == ModelStats{});
  }

  TEST_CASE("reports repeat exactly") {
    auto spec = parse_file(testutil::model_path("agv_mutex.efa"));
    RunOptions o;
    o.config = preset("v08");
    auto a = run_model(spec, "agv", o), b = run_model(spec, "agv", o);
    CHECK(same_metrics(a, b));
    CHECK(!a.output.empty());
    CHECK(a.output == b.output);
    auto j = to_json(a);
    CHECK(j["schema"] == kReportSchemaVersion);
    CHECK(j["us_states"] == "64");
    CHECK(j["cs_states"] == "55");
    CHECK(j["config"].get<std::string>().find("granularity=edge") != std::string::npos);
    // only the wall time may differ
    b.wall_ms += 1;
    CHECK(same_metrics(a, b));
    b.output += " ";
    CHECK(!same_metrics(a, b));
  }

  TEST_CASE("empty supervisor has no output") {
    auto spec = parse_file(testutil::data_path("empty_initial.efa"));
    auto r = run_model(spec, "empty", RunOptions{});
    CHECK(r.empty_supervisor);
    CHECK(r.output.empty());
    CHECK(r.cs_states == bdd::BigInt(0));
  }

  TEST_CASE("csv") {
    std::vector<NamedModel> models{{"m", parse("controllable a; plant P { location L: initial; marked; edge a; }")}};
    auto csv = to_csv(bench(models, {{"v40", preset("v40")}}, 2));
    CHECK(csv.rfind("config_name,model,config,bdd_operations,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.find(",1,1,0,") != std::string::npos);  // us, cs, not empty
  }
}
