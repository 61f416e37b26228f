#include "xfpt/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "xfpt/errors.hpp"
#include "xfpt/special.hpp"

namespace xfpt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kUnreached = std::numeric_limits<int>::max();
constexpr std::uint64_t kCountCap = 1'000'000'000'000'000'000ull;

// Accumulated t0 sums along different routes may disagree in the last bits;
// treat them as tied within this tolerance. The brute-force oracle uses the
// same comparison so both routes resolve ties identically.
bool t0_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}
bool t0_less(double a, double b) { return a < b && !t0_equal(a, b); }

// Lexicographic on (t0 sum, jump count) with tolerant first component.
bool lex_less(double a_t0, int a_d, double b_t0, int b_d) {
  if (t0_less(a_t0, b_t0)) return true;
  if (t0_less(b_t0, a_t0)) return false;
  return a_d < b_d;
}

struct EdgeAttr {
  double t0;
  double weight;  // rate, or pi * lambda
};

EdgeAttr edge_attr(const Network& network, const Network::OutEdge& e) {
  if (network.mode() == Mode::Markov) return {0.0, e.weight};
  return {e.waiting->t0(), e.weight * e.waiting->lambda()};
}

struct Distances {
  std::vector<double> t0;
  std::vector<int> d;
};

// Multi-source lexicographic Dijkstra over (t0 sum, jump count). The jump
// count strictly increases along every edge, so zero-t0 cycles cannot enter
// an optimal path and the tight-edge subgraph is a DAG.
Distances lex_shortest(const Network& network, const std::vector<NodeId>& sources) {
  const std::size_t n = network.node_count();
  Distances dist{std::vector<double>(n, kInf), std::vector<int>(n, kUnreached)};

  using Item = std::tuple<double, int, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (NodeId s : sources) {
    dist.t0[s] = 0.0;
    dist.d[s] = 0;
    heap.emplace(0.0, 0, s);
  }
  while (!heap.empty()) {
    const auto [ut0, ud, u] = heap.top();
    heap.pop();
    if (lex_less(dist.t0[u], dist.d[u], ut0, ud)) continue;  // stale entry
    for (std::size_t s = 0; s < network.out_degree(u); ++s) {
      const auto out = network.out_edge(u, s);
      const auto attr = edge_attr(network, out);
      const NodeId v = out.to;
      double cand_t0 = ut0 + attr.t0;
      const int cand_d = ud + 1;
      if (lex_less(cand_t0, cand_d, dist.t0[v], dist.d[v])) {
        // Keep the smaller stored t0 on a tolerant tie so values do not drift.
        if (t0_equal(cand_t0, dist.t0[v])) cand_t0 = std::min(cand_t0, dist.t0[v]);
        dist.t0[v] = cand_t0;
        dist.d[v] = cand_d;
        heap.emplace(cand_t0, cand_d, v);
      }
    }
  }
  return dist;
}

std::vector<NodeId> support_of(const Query& query) {
  std::vector<NodeId> support;
  for (std::size_t i = 0; i < query.rho.size(); ++i) {
    if (query.rho[i] > 0.0) support.push_back(static_cast<NodeId>(i));
  }
  return support;
}

bool edge_is_tight(const Distances& dist, NodeId u, NodeId v, double edge_t0) {
  if (dist.d[u] == kUnreached || dist.d[v] == kUnreached) return false;
  if (dist.d[v] != dist.d[u] + 1) return false;
  return t0_equal(dist.t0[u] + edge_t0, dist.t0[v]);
}

struct OptimalTargets {
  double t_min;
  int d;
  std::vector<NodeId> nodes;  // targets achieving (t_min, d)
};

OptimalTargets optimal_targets(const Distances& dist, const Query& query) {
  double t_min = kInf;
  int d = kUnreached;
  for (NodeId t : query.targets) {
    if (dist.d[t] == kUnreached) continue;
    if (lex_less(dist.t0[t], dist.d[t], t_min, d)) {
      t_min = dist.t0[t];
      d = dist.d[t];
    }
  }
  if (d == kUnreached) throw ValidationError("unreachable_target: no target is reachable");
  OptimalTargets best{t_min == kInf ? 0.0 : t_min, d, {}};
  for (NodeId t : query.targets) {
    if (dist.d[t] == best.d && t0_equal(dist.t0[t], best.t_min)) best.nodes.push_back(t);
  }
  return best;
}

void saturating_add(std::uint64_t& acc, std::uint64_t inc, bool& saturated) {
  if (acc >= kCountCap || inc >= kCountCap || acc + inc >= kCountCap) {
    acc = kCountCap;
    saturated = true;
  } else {
    acc += inc;
  }
}

}  // namespace

std::vector<int> jump_distances(const Network& network, NodeId source) {
  std::vector<int> dist(network.node_count(), -1);
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (std::size_t s = 0; s < network.out_degree(u); ++s) {
        const NodeId v = network.out_edge(u, s).to;
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          next.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

GeodesicSummary geodesic_summary(const Network& network, const Query& query) {
  require_valid(network, query);
  const auto sources = support_of(query);
  const auto dist = lex_shortest(network, sources);
  const auto best = optimal_targets(dist, query);

  // Weight-sum DP over tight edges in increasing jump-count order. Optimal
  // paths never pass through a target, so targets do not propagate weight.
  const std::size_t n = network.node_count();
  std::vector<std::vector<NodeId>> by_level(static_cast<std::size_t>(best.d) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (dist.d[i] != kUnreached && dist.d[i] <= best.d) {
      by_level[static_cast<std::size_t>(dist.d[i])].push_back(static_cast<NodeId>(i));
    }
  }

  std::vector<double> weight(n, 0.0);
  std::vector<std::uint64_t> count(n, 0);
  bool saturated = false;
  for (NodeId s : sources) {
    weight[s] = query.rho[s];
    count[s] = 1;
  }

  double log_scale = 0.0;
  for (int level = 0; level < best.d; ++level) {
    // Rescale to keep weights inside the representable range for very long
    // geodesics (d in the hundreds).
    double peak = 0.0;
    for (NodeId u : by_level[static_cast<std::size_t>(level)]) peak = std::max(peak, weight[u]);
    if (peak > 1e250 || (peak > 0.0 && peak < 1e-250)) {
      const double factor = peak;
      log_scale += std::log(factor);
      for (auto& level_nodes : by_level)
        for (NodeId u : level_nodes) weight[u] /= factor;
    }
    for (NodeId u : by_level[static_cast<std::size_t>(level)]) {
      if (weight[u] == 0.0 && count[u] == 0) continue;
      if (query.is_target(u)) continue;
      for (std::size_t s = 0; s < network.out_degree(u); ++s) {
        const auto out = network.out_edge(u, s);
        const auto attr = edge_attr(network, out);
        if (!edge_is_tight(dist, u, out.to, attr.t0)) continue;
        weight[out.to] += weight[u] * attr.weight;
        saturating_add(count[out.to], count[u], saturated);
      }
    }
  }

  double lambda_scaled = 0.0;
  std::uint64_t path_count = 0;
  for (NodeId t : best.nodes) {
    lambda_scaled += weight[t];
    saturating_add(path_count, count[t], saturated);
  }
  if (lambda_scaled <= 0.0) throw NumericalError("geodesic weight sum vanished");

  GeodesicSummary summary;
  summary.mode = network.mode();
  summary.t_min = network.mode() == Mode::Markov ? 0.0 : best.t_min;
  summary.d = best.d;
  summary.log_lambda = std::log(lambda_scaled) + log_scale;
  summary.lambda = std::exp(summary.log_lambda);
  summary.r = network.waiting_exponent();
  if (network.mode() == Mode::Markov) {
    summary.log_A = summary.log_lambda - special::log_factorial(static_cast<std::uint64_t>(best.d));
  } else {
    summary.log_A = best.d * special::log_gamma(summary.r + 1.0) -
                    special::log_gamma(best.d * summary.r + 1.0) + summary.log_lambda;
  }
  summary.A = std::exp(summary.log_A);
  summary.path_count = path_count;
  summary.path_count_saturated = saturated;
  return summary;
}

PathEnumeration enumerate_optimal_paths(const Network& network, const Query& query,
                                        std::size_t cap) {
  require_valid(network, query);
  const auto sources = support_of(query);
  const auto dist = lex_shortest(network, sources);
  const auto best = optimal_targets(dist, query);

  // Nodes from which an optimal target can be completed along tight edges.
  const std::size_t n = network.node_count();
  std::vector<bool> completes(n, false);
  for (NodeId t : best.nodes) completes[t] = true;
  for (int level = best.d - 1; level >= 0; --level) {
    for (std::size_t i = 0; i < n; ++i) {
      if (dist.d[i] != level || query.is_target(static_cast<NodeId>(i))) continue;
      const auto u = static_cast<NodeId>(i);
      for (std::size_t s = 0; s < network.out_degree(u); ++s) {
        const auto out = network.out_edge(u, s);
        const auto attr = edge_attr(network, out);
        if (edge_is_tight(dist, u, out.to, attr.t0) && completes[out.to]) {
          completes[u] = true;
          break;
        }
      }
    }
  }

  PathEnumeration result;
  std::vector<NodeId> stack;
  double t0_acc = 0.0;
  double weight_acc = 1.0;

  auto dfs = [&](auto&& self, NodeId u) -> bool {
    if (query.is_target(u)) {
      if (result.paths.size() == cap) {
        result.truncated = true;
        return false;
      }
      result.paths.push_back(PathRecord{stack, t0_acc, weight_acc});
      return true;
    }
    for (std::size_t s = 0; s < network.out_degree(u); ++s) {
      const auto out = network.out_edge(u, s);
      const auto attr = edge_attr(network, out);
      if (!edge_is_tight(dist, u, out.to, attr.t0) || !completes[out.to]) continue;
      stack.push_back(out.to);
      t0_acc += attr.t0;
      weight_acc *= attr.weight;
      const bool keep_going = self(self, out.to);
      weight_acc /= attr.weight;
      t0_acc -= attr.t0;
      stack.pop_back();
      if (!keep_going) return false;
    }
    return true;
  };

  auto ordered_sources = sources;
  std::sort(ordered_sources.begin(), ordered_sources.end());
  for (NodeId s : ordered_sources) {
    if (!completes[s]) continue;
    stack.assign(1, s);
    t0_acc = 0.0;
    weight_acc = 1.0;
    if (!dfs(dfs, s)) break;
  }
  return result;
}

BruteForceGeodesic brute_force_lambda(const Network& network, const Query& query, int max_len) {
  require_valid(network, query);
  const auto sources = support_of(query);

  BruteForceGeodesic best{kInf, kUnreached, 0.0};
  std::uint64_t expansions = 0;

  auto consider = [&](double t0, int d, double weighted) {
    if (lex_less(t0, d, best.t_min, best.d)) {
      best.t_min = t0;
      best.d = d;
      best.lambda = weighted;
    } else if (t0_equal(t0, best.t_min) && d == best.d) {
      best.lambda += weighted;
    }
  };

  auto dfs = [&](auto&& self, NodeId u, int len, double t0, double weight, double rho0) -> void {
    if (query.is_target(u)) {  // walks end at the first target hit
      consider(t0, len, rho0 * weight);
      return;
    }
    if (len == max_len) return;
    if (++expansions > 10'000'000ull) {
      throw NumericalError("brute_force_lambda: enumeration budget exceeded");
    }
    for (std::size_t s = 0; s < network.out_degree(u); ++s) {
      const auto out = network.out_edge(u, s);
      const auto attr = edge_attr(network, out);
      self(self, out.to, len + 1, t0 + attr.t0, weight * attr.weight, rho0);
    }
  };

  for (NodeId s : sources) dfs(dfs, s, 0, 0.0, 1.0, query.rho[s]);
  if (best.d == kUnreached) {
    throw ValidationError("unreachable_target: no target reached within max_len jumps");
  }
  if (network.mode() == Mode::Markov) best.t_min = 0.0;
  return best;
}

}  // namespace xfpt
