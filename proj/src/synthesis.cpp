#include "symsynth/synthesis.hpp"

#include <algorithm>
#include <stdexcept>

namespace symsynth {

using bdd::Manager;

ReachStats& ReachStats::operator+=(const ReachStats& o) {
  edge_applications += o.edge_applications;
  successful_applications += o.successful_applications;
  searches += o.searches;
  return *this;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

class Applier {
 public:
  Applier(const Sefa& s, const std::vector<const SymbolicEdge*>& edges, const Bdd& restriction, bool forward,
          EdgeApplication mode)
      : s_(s), m_(*s.manager), edges_(edges), restriction_(restriction), forward_(forward), mode_(mode) {
    if (mode_ != EdgeApplication::naive) return;
    for (const auto* e : edges_) {
      Bdd full = e->guard & e->update;
      for (std::size_t d = 0; d < s_.domains.size(); ++d)
        if (!std::binary_search(e->assigned.begin(), e->assigned.end(), d)) full &= s_.frames[d];
      if (!forward_) full &= restriction_;
      full_.push_back(std::move(full));
    }
  }

  Bdd apply(std::size_t k, const Bdd& p) {
    const SymbolicEdge& e = *edges_[k];
    if (mode_ == EdgeApplication::compound)
      return forward_ ? m_.relnext_intersect(p, e.relation, restriction_, e.pairs)
                      : m_.relprev_intersect(p, e.relation, restriction_, e.pairs);
    if (forward_) {
      Bdd q = p & full_[k];
      q = q - e.error;
      q = m_.exists(q, s_.current_vars);
      q = m_.replace(q, s_.next_to_current);
      return q & restriction_;
    }
    Bdd q = m_.replace(p, s_.current_to_next);
    q &= full_[k];
    q = q - e.error;
    return m_.exists(q, s_.next_vars);
  }

  std::size_t size() const { return edges_.size(); }

 private:
  const Sefa& s_;
  Manager& m_;
  const std::vector<const SymbolicEdge*>& edges_;
  Bdd restriction_;
  bool forward_;
  EdgeApplication mode_;
  std::vector<Bdd> full_;
};

Bdd reach(const Sefa& sefa, const Bdd& start, const std::vector<const SymbolicEdge*>& edges, const Bdd& restriction,
          const ReachOptions& options, ReachStats* stats, bool forward) {
  ReachStats local;
  ++local.searches;
  Bdd p = start;
  Applier app(sefa, edges, restriction, forward, options.application);
  const std::size_t n = app.size();
  auto step = [&](std::size_t k) {
    ++local.edge_applications;
    Bdd q = p | app.apply(k, p);
    if (q == p) return false;
    p = std::move(q);
    ++local.successful_applications;
    return true;
  };
  if (n > 0) {
    if (options.early_stop) {
      // Stop after n consecutive applications without new states.
      std::size_t idle = 0;
      for (std::size_t k = 0; idle < n; k = (k + 1) % n) idle = step(k) ? 0 : idle + 1;
    } else {
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t k = 0; k < n; ++k) changed |= step(k);
      }
    }
  }
  if (stats) *stats += local;
  return p;
}

}  // namespace

Bdd brs(const Sefa& sefa, const Bdd& start, const std::vector<const SymbolicEdge*>& edges, const Bdd& restriction,
        const ReachOptions& options, ReachStats* stats) {
  return reach(sefa, start, edges, restriction, options, stats, false);
}

Bdd frs(const Sefa& sefa, const Bdd& start, const std::vector<const SymbolicEdge*>& edges, const Bdd& restriction,
        const ReachOptions& options, ReachStats* stats) {
  return reach(sefa, start, edges, restriction, options, stats, true);
}

std::vector<const SymbolicEdge*> all_edges(const Sefa& sefa) {
  std::vector<const SymbolicEdge*> out;
  for (const auto& e : sefa.edges) out.push_back(&e);
  return out;
}

std::vector<const SymbolicEdge*> uncontrollable_edges(const Sefa& sefa) {
  std::vector<const SymbolicEdge*> out;
  for (const auto& e : sefa.edges)
    if (!e.controllable) out.push_back(&e);
  return out;
}

SynthesisConfig SynthesisConfig::v40() { return SynthesisConfig{}; }

SynthesisConfig SynthesisConfig::v08() {
  SynthesisConfig c;
  c.early_stop = false;
  c.granularity = Granularity::per_edge;
  c.skip_redundant = false;
  c.application = EdgeApplication::naive;
  c.plant_invariants = PlantInvariantMode::simplify;
  c.order.mode = OrderMode::pipeline_v08;
  return c;
}

SynthesisConfig preset(const std::string& name) {
  if (name == "v40") return SynthesisConfig::v40();
  if (name == "v08") return SynthesisConfig::v08();
  throw std::invalid_argument("unknown configuration preset '" + name + "'");
}

SynthesisResult sscs(const Sefa& sefa, const SynthesisConfig& config) {
  Manager& m = *sefa.manager;
  SynthesisResult r;
  const ReachOptions opts{config.early_stop, config.application};
  const auto edges = all_edges(sefa);
  const auto unctrl = uncontrollable_edges(sefa);

  Bdd c = !sefa.pf;
  // Output of each stage's last run; a stage whose input equals its own
  // last output would return it unchanged.
  Bdd last_nb, last_ctrl, last_fwd;
  auto empty_init = [&] { return config.stop_on_empty_init && (sefa.p0 & c).is_false(); };
  auto ops = [&] { return m.metrics().operations; };
  // Runs a stage and books its operations.
  auto timed = [&](std::uint64_t& bucket, auto&& body) {
    const auto before = ops();
    body();
    bucket += ops() - before;
  };
  bool stop = empty_init();
  while (!stop) {
    const Bdd before = c;
    ++r.stages.rounds;
    if (config.skip_redundant && last_nb.valid() && c == last_nb) {
      ++r.stages.skipped;
    } else {
      timed(r.operations.nonblocking, [&] { c = brs(sefa, sefa.pm & c, edges, c, opts, &r.reach); });
      last_nb = c;
      ++r.stages.nonblocking;
      if ((stop = empty_init())) break;
    }
    if (config.skip_redundant && last_ctrl.valid() && c == last_ctrl) {
      ++r.stages.skipped;
    } else {
      timed(r.operations.controllable, [&] { c = !brs(sefa, !c, unctrl, m.const_true(), opts, &r.reach); });
      last_ctrl = c;
      ++r.stages.controllable;
      if ((stop = empty_init())) break;
    }
    if (config.forward_reachability) {
      if (config.skip_redundant && last_fwd.valid() && c == last_fwd) {
        ++r.stages.skipped;
      } else {
        timed(r.operations.forward, [&] { c = frs(sefa, sefa.p0 & c, edges, c, opts, &r.reach); });
        last_fwd = c;
        ++r.stages.forward;
        if ((stop = empty_init())) break;
      }
    }
    if (c == before) break;
  }

  const auto guards_start = ops();
  r.controlled = c;
  r.controlled_initial = sefa.p0 & c;
  r.controlled_marked = sefa.pm & c;
  r.empty_supervisor = r.controlled_initial.is_false();
  for (const auto& e : sefa.edges) {
    Bdd g = e.guard;
    if (e.controllable) g &= m.relprev(c, e.relation, e.pairs);
    r.edge_guards.push_back(g);
  }
  for (std::size_t k = 0; k < sefa.edges.size(); ++k) {
    const auto& e = sefa.edges[k];
    if (!e.controllable) continue;
    auto it = r.event_guards.find(e.event);
    if (it == r.event_guards.end()) r.event_guards.emplace(e.event, r.edge_guards[k]);
    else it->second |= r.edge_guards[k];
  }
  // Controllable events without any edge are never enabled.
  for (const auto& ev : sefa.events)
    if (ev.controllable() && !r.event_guards.count(ev.name)) r.event_guards.emplace(ev.name, m.const_false());
  r.operations.guards = ops() - guards_start;
  return r;
}

std::vector<SymbolicEdge> strengthened_edges(const Sefa& sefa, const SynthesisResult& result) {
  std::vector<SymbolicEdge> out = sefa.edges;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].guard = result.edge_guards[k];
    finalize_edge(sefa, out[k]);
  }
  return out;
}

namespace {

Sefa encode_for(const LinearizedModel& lm, const VarOrder& order, const SynthesisConfig& config) {
  EncodeOptions eo;
  eo.plant_invariants = config.plant_invariants;
  eo.manager = config.manager;
  Sefa s = build_sefa(lm, order, eo);
  if (config.granularity == Granularity::per_event) s = merge_per_event(std::move(s));
  return s;
}

}  // namespace

SynthesisRun synthesize(const Specification& spec, const SynthesisConfig& config) {
  SynthesisRun run;
  run.input = spec;
  auto t0 = std::chrono::steady_clock::now();
  run.model = linearize(plantify(spec), &run.diagnostics);
  run.times.linearize_ms = ms_since(t0);
  t0 = std::chrono::steady_clock::now();
  run.order = order_variables(run.model, config.order);
  run.times.order_ms = ms_since(t0);
  t0 = std::chrono::steady_clock::now();
  run.sefa = encode_for(run.model, run.order, config);
  run.times.encode_ms = ms_since(t0);
  run.encode_operations = run.sefa.manager->metrics().operations;
  t0 = std::chrono::steady_clock::now();
  run.result = sscs(run.sefa, config);
  run.times.synthesis_ms = ms_since(t0);
  run.metrics = run.sefa.manager->metrics();
  return run;
}

bdd::BigInt count_uncontrolled(const Specification& spec, const SynthesisConfig& config) {
  LinearizedModel lm = linearize(plant_only(spec));
  Sefa s = encode_for(lm, order_variables(lm, config.order), config);
  const ReachOptions opts{config.early_stop, config.application};
  Bdd reach = frs(s, s.p0 & s.in_range, all_edges(s), s.in_range & s.pp, opts);
  return s.count(reach);
}

bdd::BigInt count_controlled(const SynthesisRun& run) {
  const Sefa& s = run.sefa;
  if (run.result.empty_supervisor) return 0;
  auto edges = strengthened_edges(s, run.result);
  std::vector<const SymbolicEdge*> ptrs;
  for (const auto& e : edges) ptrs.push_back(&e);
  Bdd reach = frs(s, run.result.controlled_initial, ptrs, run.result.controlled, ReachOptions{});
  return s.count(reach);
}

StateCounts count_states(const Specification& spec, const SynthesisConfig& config) {
  StateCounts c;
  c.uncontrolled = count_uncontrolled(spec, config);
  c.controlled = count_controlled(synthesize(spec, config));
  return c;
}

}  // namespace symsynth
