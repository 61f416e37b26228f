#ifndef XFPT_ENSEMBLES_HPP
#define XFPT_ENSEMBLES_HPP

#include <cstdint>
#include <vector>

#include "xfpt/network.hpp"

namespace xfpt {

// Random-network protocol: exactly 5V distinct directed edges sampled
// uniformly over ordered pairs (no self-loops), i.i.d. uniform(0,1) rates,
// and a source/target pair at the requested geodesic jump distance.
struct EnsembleSpec {
  std::size_t nodes = 0;
  int target_distance = 1;
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  Network network;
  Query query;
  NodeId source = 0;
  NodeId target = 0;
};

// Deterministic in the seed: two calls with equal specs produce identical
// networks, rates, and query. Tries fresh graphs with a random source/target
// pick first; after the retry budget, searches the last graph for any pair
// at the requested distance. Throws NumericalError when none exists.
GeneratedInstance generate(const EnsembleSpec& spec);

struct SweepRow {
  std::uint64_t searchers = 0;  // N
  double exact_mean = 0.0;      // quadrature of the survival power
  double theory_mean = 0.0;     // Gamma(k + 1/d)/Gamma(k) / (A N)^(1/d)
  double ratio = 0.0;           // exact / theory
};

// Mean of T_{k,N} across a grid of N values, exact vs asymptotic.
std::vector<SweepRow> convergence_sweep(const Network& network, const Query& query,
                                        const std::vector<std::uint64_t>& n_grid, int k);

struct DensityRow {
  double z = 0.0;
  std::vector<double> density;  // one column per N in the grid
  double weibull = 0.0;         // limiting density d z^(d-1) exp(-z^d)
};

// Density of the rescaled fastest FPT (A N)^(1/d) T_N on a z-grid, for each
// N in the grid, next to the limiting Weibull(1, d) density.
std::vector<DensityRow> rescaled_density(const Network& network, const Query& query,
                                         const std::vector<std::uint64_t>& n_grid,
                                         const std::vector<double>& z_grid);

}  // namespace xfpt

#endif  // XFPT_ENSEMBLES_HPP
