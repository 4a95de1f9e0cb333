#include "symsynth/report.hpp"

#include <chrono>
#include <exception>
#include <sstream>

#include "symsynth/parser.hpp"

namespace symsynth {

namespace {

const char* on_off(bool b) { return b ? "on" : "off"; }

const char* mode_name(PlantInvariantMode m) {
  switch (m) {
    case PlantInvariantMode::implication_check: return "implication";
    case PlantInvariantMode::always_conjoin: return "conjoin";
    case PlantInvariantMode::simplify: return "simplify";
  }
  return "?";
}

std::string big(const std::optional<bdd::BigInt>& v) { return v ? v->str() : ""; }

double ratio(double a, double b) { return b == 0 ? (a == 0 ? 1.0 : 0.0) : a / b; }

}  // namespace

std::string fingerprint(const SynthesisConfig& c, const EmitOptions& emit) {
  std::ostringstream os;
  os << "order=" << to_string(c.order) << ";granularity=" << (c.granularity == Granularity::per_edge ? "edge" : "event")
     << ";early-stop=" << on_off(c.early_stop) << ";forward=" << on_off(c.forward_reachability)
     << ";application=" << (c.application == EdgeApplication::compound ? "compound" : "naive")
     << ";plant-invariants=" << mode_name(c.plant_invariants) << ";skip=" << on_off(c.skip_redundant)
     << ";simplify=" << on_off(emit.simplify);
  return os.str();
}

RunReport run_model(const Specification& spec, const std::string& name, const RunOptions& options,
                    SynthesisRun* out) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.model = name;
  r.config = fingerprint(options.config, options.emit_options);
  SynthesisRun run = synthesize(spec, options.config);
  r.operations = run.metrics.operations;
  r.peak_live_nodes = run.metrics.peak_live_nodes;
  r.encode_operations = run.encode_operations;
  r.stage_operations = run.result.operations;
  r.stages = run.result.stages;
  r.reach = run.result.reach;
  r.empty_supervisor = run.result.empty_supervisor;
  if (options.emit && !r.empty_supervisor) r.output = unparse(emit(run, options.emit_options).spec);
  if (options.count_states) {
    r.us_states = count_uncontrolled(spec, options.config);
    r.cs_states = count_controlled(run);
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (out) *out = std::move(run);
  return r;
}

bool same_metrics(const RunReport& a, const RunReport& b) {
  auto ops = [](const StageOperations& s) { return std::tuple(s.nonblocking, s.controllable, s.forward, s.guards); };
  auto stages = [](const StageCounts& s) { return std::tuple(s.nonblocking, s.controllable, s.forward, s.skipped, s.rounds); };
  auto reach = [](const ReachStats& s) { return std::tuple(s.edge_applications, s.successful_applications, s.searches); };
  return a.model == b.model && a.config == b.config && a.operations == b.operations &&
         a.peak_live_nodes == b.peak_live_nodes && a.encode_operations == b.encode_operations &&
         ops(a.stage_operations) == ops(b.stage_operations) && stages(a.stages) == stages(b.stages) &&
         reach(a.reach) == reach(b.reach) && a.us_states == b.us_states && a.cs_states == b.cs_states &&
         a.empty_supervisor == b.empty_supervisor && a.output == b.output;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["schema"] = kReportSchemaVersion;
  j["model"] = r.model;
  j["config"] = r.config;
  j["bdd_operations"] = r.operations;
  j["peak_live_nodes"] = r.peak_live_nodes;
  j["operations_by_stage"] = {{"encode", r.encode_operations},
                              {"nonblocking", r.stage_operations.nonblocking},
                              {"controllable", r.stage_operations.controllable},
                              {"forward", r.stage_operations.forward},
                              {"guards", r.stage_operations.guards}};
  j["stage_runs"] = {{"nonblocking", r.stages.nonblocking},
                     {"controllable", r.stages.controllable},
                     {"forward", r.stages.forward},
                     {"skipped", r.stages.skipped},
                     {"rounds", r.stages.rounds}};
  j["edge_applications"] = r.reach.edge_applications;
  j["successful_applications"] = r.reach.successful_applications;
  j["searches"] = r.reach.searches;
  // Counts can exceed 64 bits.
  j["us_states"] = r.us_states ? nlohmann::json(r.us_states->str()) : nlohmann::json();
  j["cs_states"] = r.cs_states ? nlohmann::json(r.cs_states->str()) : nlohmann::json();
  j["empty_supervisor"] = r.empty_supervisor;
  j["wall_ms"] = r.wall_ms;
  return j;
}

std::string csv_header() {
  return "model,config,bdd_operations,peak_live_nodes,encode_operations,nonblocking_operations,"
         "controllable_operations,forward_operations,guard_operations,edge_applications,us_states,cs_states,"
         "empty_supervisor,wall_ms";
}

std::string csv_row(const RunReport& r) {
  std::ostringstream os;
  os << r.model << ",\"" << r.config << "\"," << r.operations << ',' << r.peak_live_nodes << ','
     << r.encode_operations << ',' << r.stage_operations.nonblocking << ',' << r.stage_operations.controllable << ','
     << r.stage_operations.forward << ',' << r.stage_operations.guards << ',' << r.reach.edge_applications << ','
     << big(r.us_states) << ',' << big(r.cs_states) << ',' << (r.empty_supervisor ? 1 : 0) << ',' << r.wall_ms;
  return os.str();
}

BenchTable bench(const std::vector<NamedModel>& models, const std::vector<NamedConfig>& configs, int repetitions,
                 bool count_states) {
  if (repetitions < 1) repetitions = 1;
  const std::size_t jobs = models.size() * configs.size();
  std::vector<BenchRow> rows(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  // One manager per run; rows land in fixed slots, so the table does not
  // depend on scheduling.
#pragma omp parallel for schedule(dynamic)
  for (long long j = 0; j < static_cast<long long>(jobs); ++j) {
    const auto& model = models[j / configs.size()];
    const auto& cfg = configs[j % configs.size()];
    try {
      RunOptions o;
      o.config = cfg.config;
      o.count_states = count_states;
      BenchRow row;
      row.config_name = cfg.name;
      row.report = run_model(model.spec, model.name, o);
      row.repetitions = repetitions;
      for (int k = 1; k < repetitions; ++k)
        if (!same_metrics(row.report, run_model(model.spec, model.name, o))) row.deterministic = false;
      rows[j] = std::move(row);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  BenchTable t;
  t.rows = std::move(rows);
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const auto& base = t.rows[mi * configs.size()].report;
    for (std::size_t ci = 1; ci < configs.size(); ++ci) {
      const auto& other = t.rows[mi * configs.size() + ci].report;
      t.factors.push_back(BenchFactor{models[mi].name, configs[ci].name,
                                      ratio(static_cast<double>(base.operations), static_cast<double>(other.operations)),
                                      ratio(static_cast<double>(base.peak_live_nodes),
                                            static_cast<double>(other.peak_live_nodes)),
                                      ratio(static_cast<double>(base.reach.edge_applications),
                                            static_cast<double>(other.reach.edge_applications))});
    }
  }
  return t;
}

nlohmann::json to_json(const BenchTable& t) {
  nlohmann::json j;
  j["schema"] = kReportSchemaVersion;
  j["runs"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    auto r = to_json(row.report);
    r["config_name"] = row.config_name;
    r["repetitions"] = row.repetitions;
    r["deterministic"] = row.deterministic;
    j["runs"].push_back(std::move(r));
  }
  j["factors"] = nlohmann::json::array();
  for (const auto& f : t.factors)
    j["factors"].push_back({{"model", f.model},
                            {"config_name", f.config_name},
                            {"operations", f.operations},
                            {"peak_nodes", f.peak_nodes},
                            {"edge_applications", f.edge_applications}});
  return j;
}

std::string to_csv(const BenchTable& t) {
  std::ostringstream os;
  os << "config_name," << csv_header() << ",deterministic\n";
  for (const auto& row : t.rows)
    os << row.config_name << ',' << csv_row(row.report) << ',' << (row.deterministic ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace symsynth
