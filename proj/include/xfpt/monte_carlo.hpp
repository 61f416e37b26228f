#ifndef XFPT_MONTE_CARLO_HPP
#define XFPT_MONTE_CARLO_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "xfpt/network.hpp"
#include "xfpt/rng.hpp"

namespace xfpt {

struct SimConfig {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t searchers = 1;   // N walkers per replicate
  std::uint64_t replicates = 1;
  std::optional<double> time_cap;  // censoring horizon per walker
};

// Estimates are a pure function of (seed, searchers, replicates): every
// walker owns a counter-based stream keyed by (seed, replicate, walker), and
// reductions run in fixed index order, so the worker count never changes the
// output bits.
struct McEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double stderr_value = 0.0;  // sample std / sqrt(count)
  std::uint64_t count = 0;
  double censored_fraction = 0.0;
};

enum class FptOutcome { Hit, Censored };

struct FptSample {
  FptOutcome outcome = FptOutcome::Hit;
  double time = 0.0;
  std::uint64_t jumps = 0;
};

// Simulates one trajectory until the target set is entered or `time_cap`
// elapses. Markov mode draws Exponential(q(i)) holding times and the next
// state proportional to q(i,.); General mode draws the next state from
// pi(i,.) first, then the waiting time from F_{i,next} by inversion.
// Throws NumericalError for walkers stuck in absorbing non-target states
// with no cap, or after 1e9 jumps.
FptSample sample_fpt(const Network& network, const Query& query, RngStream& rng,
                     std::optional<double> time_cap = std::nullopt);

struct ExtremeSimResult {
  McEstimate estimate;             // statistics of T_{k,N} across replicates
  std::vector<double> kth_times;   // per-replicate k-th smallest FPT
  std::uint64_t total_walkers = 0;
};

// Per replicate, runs N walkers and records the k-th smallest FPT. With
// `early_abort`, a shared monotone threshold kills walkers that are already
// slower than the current k-th minimum; aborted walkers cannot enter the k
// fastest, so results are unchanged.
ExtremeSimResult sample_extreme(const Network& network, const Query& query, int k,
                                const SimConfig& config, bool early_abort = true);

// Ratio estimator of E[tau^m | tau < sigma] with sigma ~ Exponential(gamma)
// drawn per walker; the walker aborts exactly when its elapsed time passes
// sigma, so acceptance sampling is unbiased. Total sample budget is
// searchers * replicates. Throws NumericalError when nothing is accepted.
McEstimate sample_conditional_mortal(const Network& network, const Query& query, double gamma,
                                     double m, const SimConfig& config);

}  // namespace xfpt

#endif  // XFPT_MONTE_CARLO_HPP
