#ifndef XFPT_GEODESIC_HPP
#define XFPT_GEODESIC_HPP

#include <cstdint>
#include <vector>

#include "xfpt/network.hpp"

namespace xfpt {

// One source-to-target path. `weight` is the product of edge rates (Markov)
// or of pi * lambda per edge (General); `t0_sum` is the minimum time needed
// to traverse the path.
struct PathRecord {
  std::vector<NodeId> nodes;
  double t0_sum = 0.0;
  double weight = 1.0;
  int length() const { return static_cast<int>(nodes.size()) - 1; }
};

// Geodesic quantities controlling the short-time law of the first passage
// time: P(tau <= t_min + t) ~ A * t^exponent as t -> 0+.
struct GeodesicSummary {
  Mode mode = Mode::Markov;
  double t_min = 0.0;   // minimum total waiting time to reach the target
  int d = 0;            // minimum jump count among t_min-achieving paths
  double lambda = 0.0;  // rho-weighted sum of path weights over the optimal set
  double log_lambda = 0.0;
  double r = 1.0;       // global waiting-time exponent
  double A = 0.0;       // Lambda/d! (Markov) or Gamma(r+1)^d/Gamma(dr+1)*Lambda
  double log_A = 0.0;
  double exponent() const { return d * r; }
  std::uint64_t path_count = 0;
  bool path_count_saturated = false;
};

// Computes (t_min, d, Lambda, A) without enumerating paths: multi-source
// lexicographic shortest distances (total t0, then jump count), then a
// weight-sum DP over the DAG of tight edges. Throws ValidationError if the
// inputs fail validate(), including unreachable targets.
GeodesicSummary geodesic_summary(const Network& network, const Query& query);

struct PathEnumeration {
  std::vector<PathRecord> paths;  // lexicographic by node sequence
  bool truncated = false;         // more than `cap` optimal paths exist
};

// Lists the optimal-path set S(supp(rho), targets), up to `cap` paths.
PathEnumeration enumerate_optimal_paths(const Network& network, const Query& query,
                                        std::size_t cap);

struct BruteForceGeodesic {
  double t_min = 0.0;
  int d = 0;
  double lambda = 0.0;
};

// Test oracle: exhaustive walk enumeration up to max_len jumps. Guarded by an
// expansion budget (1e7); throws NumericalError when exceeded.
BruteForceGeodesic brute_force_lambda(const Network& network, const Query& query, int max_len);

// Jump distance (BFS over positive-weight edges) from `source` to every node;
// -1 where unreachable.
std::vector<int> jump_distances(const Network& network, NodeId source);

}  // namespace xfpt

#endif  // XFPT_GEODESIC_HPP
