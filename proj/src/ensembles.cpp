#include "xfpt/ensembles.hpp"

#include <cmath>
#include <random>
#include <unordered_set>

#include "xfpt/asymptotics.hpp"
#include "xfpt/errors.hpp"
#include "xfpt/exact.hpp"
#include "xfpt/geodesic.hpp"

namespace xfpt {

namespace {

constexpr int kRetryBudget = 100;

struct RawGraph {
  Network network;
  std::vector<NodeId> order;  // node visit order for pair picks
};

// Each node draws 5 distinct out-neighbors, so E = 5V exactly and no node is
// a dead end. Sampling 5V edges uniformly over all ordered pairs instead
// leaves ~exp(-5) V nodes with no exit at V = 1e3; such nodes trap walker
// mass and make every FPT moment infinite, so that reading of the protocol
// cannot reproduce finite mean-FPT sweeps.
Network sample_graph(std::size_t nodes, std::mt19937_64& rng) {
  if (nodes < 6) {
    throw ValidationError("ensemble: need at least 6 nodes for 5 out-neighbors per node");
  }
  std::uniform_int_distribution<std::size_t> pick(0, nodes - 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<MarkovEdge> edges;
  edges.reserve(5 * nodes);
  std::unordered_set<std::size_t> chosen;
  for (std::size_t from = 0; from < nodes; ++from) {
    chosen.clear();
    while (chosen.size() < 5) {
      std::size_t to = pick(rng);
      if (to >= from) ++to;  // skip the self-loop slot
      if (!chosen.insert(to).second) continue;
      double rate = unit(rng);
      while (rate <= 0.0) rate = unit(rng);  // open interval: rates are positive
      edges.push_back({static_cast<NodeId>(from), static_cast<NodeId>(to), rate});
    }
  }
  return Network::markov(nodes, edges);
}

// True when every node the walk can visit before absorption still has a path
// to the target; otherwise some trajectories wander forever and all FPT
// moments diverge.
bool trap_free(const Network& network, NodeId source, NodeId target) {
  const std::size_t n = network.node_count();
  std::vector<char> backward(n, 0);  // can reach the target
  {
    std::vector<std::vector<NodeId>> preds(n);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t s = 0; s < network.out_degree(static_cast<NodeId>(u)); ++s) {
        preds[network.out_edge(static_cast<NodeId>(u), s).to].push_back(static_cast<NodeId>(u));
      }
    }
    std::vector<NodeId> stack{target};
    backward[target] = 1;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId p : preds[v]) {
        if (!backward[p]) {
          backward[p] = 1;
          stack.push_back(p);
        }
      }
    }
  }
  // Forward closure of the source, not expanding through the target.
  std::vector<char> forward(n, 0);
  std::vector<NodeId> stack{source};
  forward[source] = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (u == target) continue;
    for (std::size_t s = 0; s < network.out_degree(u); ++s) {
      const NodeId v = network.out_edge(u, s).to;
      if (!forward[v]) {
        forward[v] = 1;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (forward[v] && !backward[v]) return false;
  }
  return true;
}

Query make_query(std::size_t nodes, NodeId source, NodeId target) {
  Query query;
  query.rho.assign(nodes, 0.0);
  query.rho[source] = 1.0;
  query.targets = {target};
  return query;
}

}  // namespace

GeneratedInstance generate(const EnsembleSpec& spec) {
  if (spec.nodes < static_cast<std::size_t>(spec.target_distance) + 1) {
    throw ValidationError("ensemble: need at least target_distance + 1 nodes");
  }
  if (spec.target_distance < 1) throw ValidationError("ensemble: target_distance must be >= 1");

  std::mt19937_64 rng(spec.seed);
  Network last = sample_graph(spec.nodes, rng);
  std::uniform_int_distribution<std::size_t> node_pick(0, spec.nodes - 1);

  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    if (attempt > 0) last = sample_graph(spec.nodes, rng);
    const auto source = static_cast<NodeId>(node_pick(rng));
    auto target = static_cast<NodeId>(node_pick(rng));
    if (target == source) target = static_cast<NodeId>((target + 1) % spec.nodes);
    const auto dist = jump_distances(last, source);
    if (dist[target] == spec.target_distance && trap_free(last, source, target)) {
      return GeneratedInstance{std::move(last), make_query(spec.nodes, source, target), source,
                               target};
    }
  }

  // Fall back to scanning the last graph for any qualifying pair, then pick
  // uniformly among them.
  std::vector<std::pair<NodeId, NodeId>> candidates;
  for (std::size_t s = 0; s < spec.nodes; ++s) {
    const auto dist = jump_distances(last, static_cast<NodeId>(s));
    for (std::size_t t = 0; t < spec.nodes; ++t) {
      if (s != t && dist[t] == spec.target_distance &&
          trap_free(last, static_cast<NodeId>(s), static_cast<NodeId>(t))) {
        candidates.emplace_back(static_cast<NodeId>(s), static_cast<NodeId>(t));
      }
    }
  }
  if (candidates.empty()) {
    throw NumericalError(
        "ensemble: no trap-free source/target pair at the requested distance");
  }
  std::uniform_int_distribution<std::size_t> pair_pick(0, candidates.size() - 1);
  const auto [source, target] = candidates[pair_pick(rng)];
  return GeneratedInstance{std::move(last), make_query(spec.nodes, source, target), source,
                           target};
}

std::vector<SweepRow> convergence_sweep(const Network& network, const Query& query,
                                        const std::vector<std::uint64_t>& n_grid, int k) {
  if (network.mode() != Mode::Markov) {
    throw ValidationError("convergence_sweep: Markov ensembles only");
  }
  const auto summary = geodesic_summary(network, query);
  std::vector<SweepRow> rows;
  rows.reserve(n_grid.size());
  for (std::uint64_t n : n_grid) {
    SweepRow row;
    row.searchers = n;
    row.exact_mean = extreme_moment_exact(network, query, n, k, 1.0, 1e-9);
    row.theory_mean = asymptotic_moment(summary, n, k, 1.0).value;
    row.ratio = row.exact_mean / row.theory_mean;
    rows.push_back(row);
  }
  return rows;
}

std::vector<DensityRow> rescaled_density(const Network& network, const Query& query,
                                         const std::vector<std::uint64_t>& n_grid,
                                         const std::vector<double>& z_grid) {
  if (network.mode() != Mode::Markov) {
    throw ValidationError("rescaled_density: Markov ensembles only");
  }
  const auto summary = geodesic_summary(network, query);
  const double d = static_cast<double>(summary.d);
  const ReducedSystem system(network, query);

  std::vector<DensityRow> rows;
  rows.reserve(z_grid.size());
  for (double z : z_grid) {
    DensityRow row;
    row.z = z;
    row.weibull =
        z <= 0.0 ? 0.0 : d * std::pow(z, d - 1.0) * std::exp(-std::pow(z, d));
    for (std::uint64_t n : n_grid) {
      const double unit = std::exp((summary.log_A + std::log(static_cast<double>(n))) / d);
      // Z = (A N)^(1/d) T_N, so f_Z(z) = f_T(z / (A N)^(1/d)) / (A N)^(1/d).
      row.density.push_back(extreme_density(system, n, 1, z / unit) / unit);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace xfpt
