#pragma once

// Static variable ordering: relations between the variables of a linearized
// model, DCSH (weighted Cuthill-McKee and Sloan, best WES wins), FORCE and
// sliding-window refinement.

#include <cstdint>
#include <string>
#include <vector>

#include "symsynth/transform.hpp"

namespace symsynth {

/// Indices into LinearizedModel::variables.
using Hyperedge = std::vector<std::size_t>;
/// order[position] = variable index.
using VarOrder = std::vector<std::size_t>;

struct VarRelations {
  std::vector<std::string> names;
  std::vector<std::vector<std::uint64_t>> weight;  // symmetric, zero diagonal

  std::uint64_t at(std::string_view a, std::string_view b) const;
};

struct Relations {
  std::vector<Hyperedge> hyperedges;
  VarRelations relations;
};

Relations extract_relations(const LinearizedModel& model);

/// Weighted event span as an exact fraction: numerator / denominator.
struct Wes {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return denominator ? static_cast<double>(numerator) / static_cast<double>(denominator) : 0.0; }
};

Wes wes(const VarOrder& order, const std::vector<Hyperedge>& hyperedges);

VarOrder cuthill_mckee(const VarRelations& relations);
VarOrder sloan(const VarRelations& relations);
/// The four DCSH candidates: CM, Sloan and both reversed per component.
std::vector<VarOrder> dcsh_candidates(const VarRelations& relations);
VarOrder dcsh(const VarRelations& relations, const std::vector<Hyperedge>& hyperedges);
VarOrder force(const VarOrder& initial, const std::vector<Hyperedge>& hyperedges, int max_rounds = 20);
VarOrder sliding_window(const VarOrder& initial, const std::vector<Hyperedge>& hyperedges, std::size_t window = 4);

std::uint64_t total_span(const VarOrder& order, const std::vector<Hyperedge>& hyperedges);

enum class OrderMode { model, dcsh, force, sloan, cm, pipeline_v08, pipeline_v40, custom };

struct OrderConfig {
  OrderMode mode = OrderMode::pipeline_v40;
  std::vector<std::string> custom;
};

/// Parses `model`, `dcsh`, ..., `custom:a,b,c`.
OrderConfig parse_order_config(const std::string& text);
std::string to_string(const OrderConfig& config);

VarOrder order_variables(const LinearizedModel& model, const OrderConfig& config);

std::string dsm_csv(const VarRelations& relations);

}  // namespace symsynth
