#pragma once

// Single runs with their metric report, and the benchmark table over a set
// of models and configurations.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsynth/supervisor.hpp"
#include "symsynth/synthesis.hpp"

namespace symsynth {

inline constexpr int kReportSchemaVersion = 1;

struct RunOptions {
  SynthesisConfig config;
  bool emit = true;
  EmitOptions emit_options;
  bool count_states = true;
};

struct RunReport {
  std::string model;
  std::string config;  // fingerprint
  std::uint64_t operations = 0;
  std::uint64_t peak_live_nodes = 0;
  std::uint64_t encode_operations = 0;
  StageOperations stage_operations;
  StageCounts stages;
  ReachStats reach;
  std::optional<bdd::BigInt> us_states;
  std::optional<bdd::BigInt> cs_states;
  bool empty_supervisor = false;
  std::string output;  // emitted model text, empty for an empty supervisor
  double wall_ms = 0;  // informative only
};

std::string fingerprint(const SynthesisConfig& config, const EmitOptions& emit = {});

RunReport run_model(const Specification& spec, const std::string& name, const RunOptions& options,
                    SynthesisRun* run = nullptr);

/// Equality of everything but the wall time.
bool same_metrics(const RunReport& a, const RunReport& b);

nlohmann::json to_json(const RunReport& report);
std::string csv_header();
std::string csv_row(const RunReport& report);

struct NamedConfig {
  std::string name;
  SynthesisConfig config;
};

struct NamedModel {
  std::string name;
  Specification spec;
};

struct BenchRow {
  RunReport report;
  std::string config_name;
  int repetitions = 0;
  bool deterministic = true;  // all repetitions identical
};

/// Reduction factors of one configuration against the baseline (the first
/// configuration) on one model: baseline / other.
struct BenchFactor {
  std::string model;
  std::string config_name;
  double operations = 1.0;
  double peak_nodes = 1.0;
  double edge_applications = 1.0;
};

struct BenchTable {
  std::vector<BenchRow> rows;  // models in input order, then configs
  std::vector<BenchFactor> factors;
};

BenchTable bench(const std::vector<NamedModel>& models, const std::vector<NamedConfig>& configs, int repetitions,
                 bool count_states = true);

nlohmann::json to_json(const BenchTable& table);
std::string to_csv(const BenchTable& table);

}  // namespace symsynth
