#pragma once

#include <string>

#include "symsynth/parser.hpp"
#include "symsynth/sefa.hpp"
#include "symsynth/transform.hpp"

namespace testutil {

inline std::string model_path(const std::string& name) { return std::string(SYMSYNTH_MODELS_DIR) + "/" + name; }
inline std::string data_path(const std::string& name) { return std::string(SYMSYNTH_TEST_DATA_DIR) + "/" + name; }

inline symsynth::LinearizedModel linearized(const symsynth::Specification& spec) {
  return symsynth::linearize(symsynth::plantify(spec));
}

inline symsynth::LinearizedModel linearized(std::string_view text) { return linearized(symsynth::parse(text)); }

inline symsynth::Sefa encode(const symsynth::LinearizedModel& lm, symsynth::EncodeOptions options = {}) {
  symsynth::VarOrder order(lm.variables.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return symsynth::build_sefa(lm, order, options);
}

// Parses a predicate; identifiers naming SEFA variables become variable
// references (the parser alone cannot tell without declarations).
inline symsynth::Expr bind(symsynth::Expr e, const symsynth::Sefa& s) {
  if (e.kind == symsynth::ExprKind::enum_lit) {
    for (const auto& d : s.domains)
      if (d.name == e.name) return symsynth::Expr::var(e.name);
  }
  for (auto& a : e.args) a = bind(std::move(a), s);
  return e;
}

inline symsynth::Expr expr_in(const symsynth::Sefa& s, const std::string& text) {
  return bind(symsynth::parse("plant invariant " + text + ";").invariants[0].predicate, s);
}

inline symsynth::Bdd pred_in(const symsynth::Sefa& s, const std::string& text) {
  return s.encode_predicate(expr_in(s, text));
}

}  // namespace testutil
