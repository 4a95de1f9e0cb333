#include "symsynth/var_order.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace symsynth {

std::uint64_t VarRelations::at(std::string_view a, std::string_view b) const {
  auto idx = [&](std::string_view n) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw std::out_of_range("unknown variable '" + std::string(n) + "'");
    return static_cast<std::size_t>(it - names.begin());
  };
  return weight[idx(a)][idx(b)];
}

Relations extract_relations(const LinearizedModel& model) {
  Relations out;
  const std::size_t n = model.variables.size();
  for (const auto& v : model.variables) out.relations.names.push_back(v.name);
  out.relations.weight.assign(n, std::vector<std::uint64_t>(n, 0));
  for (const auto& e : model.edges) {
    std::vector<std::string> names;
    collect_variables(e.guard, names);
    for (const auto& u : e.updates) {
      if (std::find(names.begin(), names.end(), u.variable) == names.end()) names.push_back(u.variable);
      collect_variables(u.value, names);
    }
    Hyperedge h;
    for (const auto& name : names) h.push_back(model.variable_index(name));
    std::sort(h.begin(), h.end());
    if (h.empty()) continue;
    for (std::size_t i = 0; i < h.size(); ++i)
      for (std::size_t j = i + 1; j < h.size(); ++j) {
        ++out.relations.weight[h[i]][h[j]];
        ++out.relations.weight[h[j]][h[i]];
      }
    out.hyperedges.push_back(std::move(h));
  }
  return out;
}

Wes wes(const VarOrder& order, const std::vector<Hyperedge>& hyperedges) {
  const std::uint64_t n = order.size();
  if (hyperedges.empty() || n == 0) return {0, 1};
  std::vector<std::size_t> pos(n);
  for (std::size_t p = 0; p < n; ++p) pos[order[p]] = p;
  std::uint64_t num = 0;
  for (const auto& h : hyperedges) {
    std::size_t lo = n, hi = 0;
    for (std::size_t v : h) {
      lo = std::min(lo, pos[v]);
      hi = std::max(hi, pos[v]);
    }
    num += 2 * (hi + 1) * (hi - lo + 1);
  }
  return {num, hyperedges.size() * n * n};
}

std::uint64_t total_span(const VarOrder& order, const std::vector<Hyperedge>& hyperedges) {
  std::vector<std::size_t> pos(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = p;
  std::uint64_t total = 0;
  for (const auto& h : hyperedges) {
    std::size_t lo = order.size(), hi = 0;
    for (std::size_t v : h) {
      lo = std::min(lo, pos[v]);
      hi = std::max(hi, pos[v]);
    }
    if (!h.empty()) total += hi - lo + 1;
  }
  return total;
}

namespace {

struct Graph {
  // adjacency sorted by neighbour index
  std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> adj;

  explicit Graph(const VarRelations& r) : adj(r.weight.size()) {
    for (std::size_t i = 0; i < r.weight.size(); ++i)
      for (std::size_t j = 0; j < r.weight.size(); ++j)
        if (i != j && r.weight[i][j] > 0) adj[i].push_back({j, r.weight[i][j]});
  }
  std::size_t degree(std::size_t v) const { return adj[v].size(); }
  std::size_t size() const { return adj.size(); }
};

std::vector<std::vector<std::size_t>> components(const Graph& g) {
  std::vector<std::vector<std::size_t>> comps;
  std::vector<bool> seen(g.size(), false);
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp{s};
    seen[s] = true;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (auto [w, wt] : g.adj[comp[k]])
        if (!seen[w]) {
          seen[w] = true;
          comp.push_back(w);
        }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

std::vector<std::vector<std::size_t>> bfs_levels(const Graph& g, std::size_t root) {
  std::vector<std::vector<std::size_t>> levels{{root}};
  std::vector<bool> seen(g.size(), false);
  seen[root] = true;
  for (;;) {
    std::vector<std::size_t> next;
    for (std::size_t v : levels.back())
      for (auto [w, wt] : g.adj[v])
        if (!seen[w]) {
          seen[w] = true;
          next.push_back(w);
        }
    if (next.empty()) break;
    levels.push_back(std::move(next));
  }
  return levels;
}

std::size_t min_degree(const Graph& g, const std::vector<std::size_t>& nodes) {
  std::size_t best = nodes.front();
  for (std::size_t v : nodes)
    if (g.degree(v) < g.degree(best) || (g.degree(v) == g.degree(best) && v < best)) best = v;
  return best;
}

// George-Liu pseudo-peripheral node search.
std::size_t pseudo_peripheral(const Graph& g, const std::vector<std::size_t>& comp) {
  std::size_t r = min_degree(g, comp);
  auto levels = bfs_levels(g, r);
  for (;;) {
    std::size_t c = min_degree(g, levels.back());
    auto lc = bfs_levels(g, c);
    if (lc.size() <= levels.size()) return r;
    r = c;
    levels = std::move(lc);
  }
}

VarOrder cm_component(const Graph& g, const std::vector<std::size_t>& comp) {
  if (comp.size() == 1) return comp;
  std::vector<bool> seen(g.size(), false);
  std::size_t start = pseudo_peripheral(g, comp);
  VarOrder out{start};
  seen[start] = true;
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto nbrs = g.adj[out[k]];
    std::sort(nbrs.begin(), nbrs.end(), [&](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      if (g.degree(a.first) != g.degree(b.first)) return g.degree(a.first) < g.degree(b.first);
      return a.first < b.first;
    });
    for (auto [w, wt] : nbrs)
      if (!seen[w]) {
        seen[w] = true;
        out.push_back(w);
      }
  }
  return out;
}

VarOrder sloan_component(const Graph& g, const std::vector<std::size_t>& comp) {
  if (comp.size() == 1) return comp;
  constexpr long kW1 = 1, kW2 = 2;
  const std::size_t s = pseudo_peripheral(g, comp);
  const std::size_t e = min_degree(g, bfs_levels(g, s).back());
  std::vector<long> dist(g.size(), 0);
  auto from_end = bfs_levels(g, e);
  for (std::size_t d = 0; d < from_end.size(); ++d)
    for (std::size_t v : from_end[d]) dist[v] = static_cast<long>(d);

  enum Status { inactive, preactive, active, postactive };
  std::vector<Status> status(g.size(), inactive);
  std::vector<long> prio(g.size(), 0);
  for (std::size_t v : comp) prio[v] = kW1 * dist[v] - kW2 * static_cast<long>(g.degree(v) + 1);

  std::vector<std::size_t> queue{s};
  status[s] = preactive;
  VarOrder out;
  while (!queue.empty()) {
    auto it = std::max_element(queue.begin(), queue.end(), [&](std::size_t a, std::size_t b) {
      return prio[a] < prio[b] || (prio[a] == prio[b] && a > b);
    });
    const std::size_t i = *it;
    queue.erase(it);
    if (status[i] == preactive) {
      for (auto [j, wt] : g.adj[i]) {
        prio[j] += kW2;
        if (status[j] == inactive) {
          status[j] = preactive;
          queue.push_back(j);
        }
      }
    }
    out.push_back(i);
    status[i] = postactive;
    for (auto [j, wt] : g.adj[i]) {
      if (status[j] != preactive) continue;
      status[j] = active;
      prio[j] += kW2;
      for (auto [k, wt2] : g.adj[j]) {
        if (status[k] == postactive) continue;
        prio[k] += kW2;
        if (status[k] == inactive) {
          status[k] = preactive;
          queue.push_back(k);
        }
      }
    }
  }
  return out;
}

template <typename F>
VarOrder per_component(const VarRelations& relations, F&& f, bool reversed) {
  Graph g(relations);
  VarOrder out;
  for (const auto& comp : components(g)) {
    VarOrder part = f(g, comp);
    if (reversed) std::reverse(part.begin(), part.end());
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace

VarOrder cuthill_mckee(const VarRelations& relations) { return per_component(relations, cm_component, false); }

VarOrder sloan(const VarRelations& relations) { return per_component(relations, sloan_component, false); }

std::vector<VarOrder> dcsh_candidates(const VarRelations& relations) {
  return {per_component(relations, cm_component, false), per_component(relations, sloan_component, false),
          per_component(relations, cm_component, true), per_component(relations, sloan_component, true)};
}

VarOrder dcsh(const VarRelations& relations, const std::vector<Hyperedge>& hyperedges) {
  auto candidates = dcsh_candidates(relations);
  std::size_t best = 0;
  std::uint64_t best_wes = wes(candidates[0], hyperedges).numerator;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const std::uint64_t w = wes(candidates[i], hyperedges).numerator;
    if (w < best_wes) {
      best = i;
      best_wes = w;
    }
  }
  return candidates[best];
}

VarOrder force(const VarOrder& initial, const std::vector<Hyperedge>& hyperedges, int max_rounds) {
  if (hyperedges.empty()) return initial;
  const std::size_t n = initial.size();
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t h = 0; h < hyperedges.size(); ++h)
    for (std::size_t v : hyperedges[h]) incident[v].push_back(h);

  VarOrder order = initial;
  VarOrder best = initial;
  std::uint64_t best_span = total_span(initial, hyperedges);
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<double> pos(n);
    for (std::size_t p = 0; p < n; ++p) pos[order[p]] = static_cast<double>(p);
    std::vector<double> cog(hyperedges.size());
    for (std::size_t h = 0; h < hyperedges.size(); ++h) {
      double sum = 0;
      for (std::size_t v : hyperedges[h]) sum += pos[v];
      cog[h] = sum / static_cast<double>(hyperedges[h].size());
    }
    std::vector<double> score(n, std::numeric_limits<double>::infinity());
    for (std::size_t v = 0; v < n; ++v) {
      if (incident[v].empty()) continue;
      double sum = 0;
      for (std::size_t h : incident[v]) sum += cog[h];
      score[v] = sum / static_cast<double>(incident[v].size());
    }
    VarOrder next = order;
    std::stable_sort(next.begin(), next.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
    const std::uint64_t span = total_span(next, hyperedges);
    if (span < best_span) {
      best_span = span;
      best = next;
    }
    if (next == order) break;
    order = std::move(next);
  }
  return best;
}

VarOrder sliding_window(const VarOrder& initial, const std::vector<Hyperedge>& hyperedges, std::size_t window) {
  VarOrder order = initial;
  const std::size_t n = order.size();
  const std::size_t w = std::min(window, n);
  if (w < 2 || hyperedges.empty()) return order;
  std::uint64_t current = wes(order, hyperedges).numerator;
  for (std::size_t start = 0; start + w <= n; ++start) {
    VarOrder trial = order;
    std::vector<std::size_t> slice(order.begin() + start, order.begin() + start + w);
    std::sort(slice.begin(), slice.end());
    VarOrder best = order;
    do {
      std::copy(slice.begin(), slice.end(), trial.begin() + start);
      const std::uint64_t v = wes(trial, hyperedges).numerator;
      if (v < current) {
        current = v;
        best = trial;
      }
    } while (std::next_permutation(slice.begin(), slice.end()));
    order = std::move(best);
  }
  return order;
}

OrderConfig parse_order_config(const std::string& text) {
  OrderConfig c;
  if (text == "model") c.mode = OrderMode::model;
  else if (text == "dcsh") c.mode = OrderMode::dcsh;
  else if (text == "force") c.mode = OrderMode::force;
  else if (text == "sloan") c.mode = OrderMode::sloan;
  else if (text == "cm") c.mode = OrderMode::cm;
  else if (text == "pipeline-v08") c.mode = OrderMode::pipeline_v08;
  else if (text == "pipeline-v40") c.mode = OrderMode::pipeline_v40;
  else if (text.rfind("custom:", 0) == 0) {
    c.mode = OrderMode::custom;
    std::stringstream ss(text.substr(7));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) c.custom.push_back(item);
  } else {
    throw std::invalid_argument("unknown variable order '" + text + "'");
  }
  return c;
}

std::string to_string(const OrderConfig& config) {
  switch (config.mode) {
    case OrderMode::model: return "model";
    case OrderMode::dcsh: return "dcsh";
    case OrderMode::force: return "force";
    case OrderMode::sloan: return "sloan";
    case OrderMode::cm: return "cm";
    case OrderMode::pipeline_v08: return "pipeline-v08";
    case OrderMode::pipeline_v40: return "pipeline-v40";
    case OrderMode::custom: {
      std::string s = "custom:";
      for (std::size_t i = 0; i < config.custom.size(); ++i) s += (i ? "," : "") + config.custom[i];
      return s;
    }
  }
  return {};
}

VarOrder order_variables(const LinearizedModel& model, const OrderConfig& config) {
  const std::size_t n = model.variables.size();
  VarOrder identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  if (n == 0) return identity;
  if (config.mode == OrderMode::model) return identity;
  if (config.mode == OrderMode::custom) {
    VarOrder order;
    std::vector<bool> used(n, false);
    for (const auto& name : config.custom) {
      const std::size_t i = model.variable_index(name);
      if (used[i]) throw std::invalid_argument("custom order lists '" + name + "' twice");
      used[i] = true;
      order.push_back(i);
    }
    if (order.size() != n) throw std::invalid_argument("custom order is not a permutation of the model variables");
    return order;
  }
  const Relations rel = extract_relations(model);
  switch (config.mode) {
    case OrderMode::dcsh: return dcsh(rel.relations, rel.hyperedges);
    case OrderMode::force: return force(identity, rel.hyperedges);
    case OrderMode::sloan: return sloan(rel.relations);
    case OrderMode::cm: return cuthill_mckee(rel.relations);
    case OrderMode::pipeline_v08: return sliding_window(force(identity, rel.hyperedges), rel.hyperedges);
    case OrderMode::pipeline_v40:
      return sliding_window(force(dcsh(rel.relations, rel.hyperedges), rel.hyperedges), rel.hyperedges);
    default: return identity;
  }
}

std::string dsm_csv(const VarRelations& relations) {
  std::ostringstream os;
  for (const auto& n : relations.names) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < relations.names.size(); ++i) {
    os << relations.names[i];
    for (std::uint64_t w : relations.weight[i]) os << ',' << w;
    os << '\n';
  }
  return os.str();
}

}  // namespace symsynth
