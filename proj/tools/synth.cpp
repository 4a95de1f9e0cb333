// synth: command-line driver for synthesis runs, benchmarks and model
// inspection.
//
// Exit codes: 0 ok, 1 diagnostics, 2 empty supervisor, 3 internal invariant
// violation.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "symsynth/oracle.hpp"
#include "symsynth/parser.hpp"
#include "symsynth/report.hpp"

namespace fs = std::filesystem;
using namespace symsynth;

namespace {

enum Exit { kOk = 0, kDiagnostics = 1, kEmpty = 2, kInternal = 3 };

struct Toggles {
  std::string config = "v40";
  std::string order, granularity, early_stop, forward, application, plant_invariants, simplify;
};

void add_toggles(CLI::App* app, Toggles& t) {
  app->add_option("--config", t.config, "preset: v08 or v40")->check(CLI::IsMember({"v08", "v40"}));
  app->add_option("--order", t.order, "model, dcsh, force, sloan, cm, pipeline-v08, pipeline-v40 or custom:a,b,...");
  app->add_option("--granularity", t.granularity)->check(CLI::IsMember({"edge", "event"}));
  app->add_option("--early-stop", t.early_stop)->check(CLI::IsMember({"on", "off"}));
  app->add_option("--forward", t.forward)->check(CLI::IsMember({"on", "off"}));
  app->add_option("--application", t.application)->check(CLI::IsMember({"compound", "naive"}));
  app->add_option("--plant-invariants", t.plant_invariants)->check(CLI::IsMember({"implication", "conjoin", "simplify"}));
  app->add_option("--simplify", t.simplify, "supervisor guard simplification")->check(CLI::IsMember({"on", "off"}));
}

RunOptions options_of(const Toggles& t) {
  RunOptions o;
  o.config = preset(t.config);
  auto& c = o.config;
  if (!t.order.empty()) c.order = parse_order_config(t.order);
  if (!t.granularity.empty()) c.granularity = t.granularity == "edge" ? Granularity::per_edge : Granularity::per_event;
  if (!t.early_stop.empty()) c.early_stop = t.early_stop == "on";
  if (!t.forward.empty()) c.forward_reachability = t.forward == "on";
  if (!t.application.empty())
    c.application = t.application == "naive" ? EdgeApplication::naive : EdgeApplication::compound;
  if (t.plant_invariants == "implication") c.plant_invariants = PlantInvariantMode::implication_check;
  else if (t.plant_invariants == "conjoin") c.plant_invariants = PlantInvariantMode::always_conjoin;
  else if (t.plant_invariants == "simplify") c.plant_invariants = PlantInvariantMode::simplify;
  if (!t.simplify.empty()) o.emit_options.simplify = t.simplify == "on";
  return o;
}

void print_diagnostics(const std::vector<Diagnostic>& ds, const std::string& file) {
  for (const auto& d : ds) {
    if (d.span) std::cerr << d.span->file << ':' << d.span->line << ':' << d.span->column << ": ";
    else std::cerr << file << ": ";
    if (!d.element.empty()) std::cerr << d.element << ": ";
    std::cerr << d.message << '\n';
  }
}

// Parsed and validated, or nullopt after printing the problems.
std::optional<Specification> load(const std::string& path) {
  try {
    Specification spec = parse_file(path);
    auto ds = validate(spec);
    if (!ds.empty()) {
      print_diagnostics(ds, path);
      return std::nullopt;
    }
    return spec;
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return std::nullopt;
  }
}

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

void print_report(const RunReport& r) {
  std::cout << "model              " << r.model << '\n'
            << "config             " << r.config << '\n'
            << "bdd operations     " << r.operations << '\n'
            << "peak live nodes    " << r.peak_live_nodes << '\n'
            << "  encode           " << r.encode_operations << '\n'
            << "  nonblocking      " << r.stage_operations.nonblocking << '\n'
            << "  controllable     " << r.stage_operations.controllable << '\n'
            << "  forward          " << r.stage_operations.forward << '\n'
            << "  guards           " << r.stage_operations.guards << '\n'
            << "edge applications  " << r.reach.edge_applications << '\n';
  if (r.us_states) std::cout << "uncontrolled       " << *r.us_states << '\n';
  if (r.cs_states) std::cout << "controlled         " << *r.cs_states << '\n';
  std::cout << "wall time (ms)     " << r.wall_ms << '\n';
}

int cmd_run(const std::string& path, const Toggles& t, const std::string& out, const std::string& stats_json,
            bool count) {
  auto spec = load(path);
  if (!spec) return kDiagnostics;
  RunOptions o = options_of(t);
  o.count_states = count;
  RunReport r = run_model(*spec, stem(path), o);
  print_report(r);
  if (!stats_json.empty()) std::ofstream(stats_json) << to_json(r).dump(2) << '\n';
  if (r.empty_supervisor) {
    std::cout << "empty supervisor\n";
    return kEmpty;
  }
  std::string target = out;
  if (target.empty()) target = (fs::path(path).parent_path() / (stem(path) + ".sup.efa")).string();
  std::ofstream(target) << r.output;
  // The output must be readable again.
  try {
    if (!validate(parse(r.output), ValidateOptions{true}).empty()) return kInternal;
  } catch (const ParseError& e) {
    std::cerr << "emitted model does not parse: " << e.what() << '\n';
    return kInternal;
  }
  std::cout << "supervisor written to " << target << '\n';
  return kOk;
}

int cmd_bench(const std::string& dir, const std::vector<std::string>& configs, int reps, const std::string& csv,
              const std::string& json, bool count) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto p = entry.path();
    if (p.extension() == ".efa" && p.filename().string().find(".sup.") == std::string::npos) files.push_back(p.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedModel> models;
  for (const auto& f : files) {
    auto spec = load(f);
    if (!spec) return kDiagnostics;
    models.push_back({stem(f), std::move(*spec)});
  }
  std::vector<NamedConfig> named;
  for (const auto& c : configs) named.push_back({c, preset(c)});
  BenchTable table = bench(models, named, reps, count);
  const std::string text = to_csv(table);
  std::cout << text;
  for (const auto& f : table.factors)
    std::cout << "factor " << f.model << ' ' << f.config_name << " operations " << f.operations << " peak "
              << f.peak_nodes << " applications " << f.edge_applications << '\n';
  if (!csv.empty()) std::ofstream(csv) << text;
  if (!json.empty()) std::ofstream(json) << to_json(table).dump(2) << '\n';
  bool flagged = false;
  for (const auto& row : table.rows)
    if (!row.deterministic) {
      std::cerr << "non-identical repetitions: " << row.report.model << ' ' << row.config_name << '\n';
      flagged = true;
    }
  return flagged ? kInternal : kOk;
}

int cmd_stats(const std::string& path) {
  auto spec = load(path);
  if (!spec) return kDiagnostics;
  for (const auto& [name, value] : stats_columns(model_stats(*spec))) std::cout << name << ' ' << value << '\n';
  return kOk;
}

int cmd_count(const std::string& path, const Toggles& t) {
  auto spec = load(path);
  if (!spec) return kDiagnostics;
  auto c = count_states(*spec, options_of(t).config);
  std::cout << "uncontrolled " << c.uncontrolled << "\ncontrolled " << c.controlled << '\n';
  return kOk;
}

int cmd_oracle(const std::string& path, const Toggles& t, std::uint64_t cap) {
  auto spec = load(path);
  if (!spec) return kDiagnostics;
  RunOptions o = options_of(t);
  SynthesisRun run = synthesize(*spec, o.config);
  oracle::Options oo;
  oo.state_cap = cap;
  oracle::ExplicitTs ts;
  try {
    ts = oracle::enumerate(run.model, oo);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kDiagnostics;
  }
  auto ex = oracle::explicit_synthesis(ts, o.config.forward_reachability, o.config.stop_on_empty_init);
  auto diff = oracle::compare(run.sefa, run.result.controlled, run.result.event_guards, ts, ex);
  std::cout << "states " << ts.layout.state_count << "\ncontrolled " << oracle::count(ex.controlled)
            << "\nempty supervisor " << (ex.empty_supervisor ? "yes" : "no") << '\n';
  for (const auto& m : diff) {
    std::cout << "mismatch " << m.what << " at";
    for (std::size_t i = 0; i < m.state.size(); ++i) std::cout << ' ' << ts.layout.names[i] << '=' << m.state[i];
    std::cout << '\n';
  }
  if (!diff.empty() || ex.empty_supervisor != run.result.empty_supervisor) return kInternal;
  std::cout << "symbolic and explicit results agree\n";
  return kOk;
}

int cmd_linearize(const std::string& path) {
  auto spec = load(path);
  if (!spec) return kDiagnostics;
  std::vector<Diagnostic> ds;
  auto lm = linearize(plantify(*spec), &ds);
  print_diagnostics(ds, path);
  std::cout << unparse(to_specification(lm));
  return kOk;
}

int cmd_order(const std::string& path, const Toggles& t, bool dsm) {
  auto spec = load(path);
  if (!spec) return kDiagnostics;
  auto lm = linearize(plantify(*spec));
  const auto rel = extract_relations(lm);
  const auto cfg = t.order.empty() ? options_of(t).config.order : parse_order_config(t.order);
  const auto order = order_variables(lm, cfg);
  const Wes w = wes(order, rel.hyperedges);
  std::cout << to_string(cfg) << ':';
  for (auto i : order) std::cout << ' ' << lm.variables[i].name;
  std::cout << "\nwes " << w.numerator << '/' << w.denominator << " = " << w.value() << "\nspan "
            << total_span(order, rel.hyperedges) << '\n';
  if (dsm) std::cout << dsm_csv(rel.relations);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic supervisory controller synthesis for extended finite automata"};
  app.require_subcommand(1);

  std::string file, out, stats_json, dir, csv, json;
  Toggles toggles;
  bool no_count = false, dsm = false;
  int reps = 3;
  std::uint64_t cap = 1'000'000;
  std::vector<std::string> configs{"v08", "v40"};

  auto* run = app.add_subcommand("run", "synthesize a supervisor");
  run->add_option("file", file)->required()->check(CLI::ExistingFile);
  add_toggles(run, toggles);
  run->add_option("--out", out, "output model (default <name>.sup.efa next to the input)");
  run->add_option("--stats-json", stats_json, "write the report as JSON");
  run->add_flag("--no-count", no_count, "skip the state counts");

  auto* bench_cmd = app.add_subcommand("bench", "run every .efa model of a directory under several configurations");
  bench_cmd->add_option("dir", dir)->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--configs", configs, "presets; the first is the baseline of the factors")->delimiter(',');
  bench_cmd->add_option("--reps", reps, "repetitions (checked for identical metrics)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--csv", csv);
  bench_cmd->add_option("--json", json);
  bench_cmd->add_flag("--no-count", no_count);

  auto* stats = app.add_subcommand("stats", "model statistics");
  stats->add_option("file", file)->required()->check(CLI::ExistingFile);

  auto* count = app.add_subcommand("count", "uncontrolled and controlled reachable state counts");
  count->add_option("file", file)->required()->check(CLI::ExistingFile);
  add_toggles(count, toggles);

  auto* orc = app.add_subcommand("oracle", "compare with explicit-state synthesis (small models)");
  orc->add_option("file", file)->required()->check(CLI::ExistingFile);
  add_toggles(orc, toggles);
  orc->add_option("--cap", cap, "maximum number of explicit states");

  auto* lin = app.add_subcommand("linearize", "print the linearized model");
  lin->add_option("file", file)->required()->check(CLI::ExistingFile);

  auto* ord = app.add_subcommand("order", "print the variable order and its weighted event span");
  ord->add_option("file", file)->required()->check(CLI::ExistingFile);
  add_toggles(ord, toggles);
  ord->add_flag("--dsm", dsm, "also print the relation matrix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(file, toggles, out, stats_json, !no_count);
    if (*bench_cmd) return cmd_bench(dir, configs, reps, csv, json, !no_count);
    if (*stats) return cmd_stats(file);
    if (*count) return cmd_count(file, toggles);
    if (*orc) return cmd_oracle(file, toggles, cap);
    if (*lin) return cmd_linearize(file);
    if (*ord) return cmd_order(file, toggles, dsm);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiagnostics;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
