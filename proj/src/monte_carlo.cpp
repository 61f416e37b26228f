#include "xfpt/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "xfpt/errors.hpp"

namespace xfpt {

namespace {

constexpr std::uint64_t kJumpGuard = 1'000'000'000ull;
constexpr std::uint64_t kChunk = 8192;  // fixed reduction granularity

// Inverse-CDF sampler for the initial distribution.
class StartSampler {
 public:
  explicit StartSampler(const std::vector<double>& rho) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (rho[i] > 0.0) {
        acc += rho[i];
        cum_.push_back(acc);
        node_.push_back(static_cast<NodeId>(i));
      }
    }
  }
  NodeId draw(RngStream& rng) const {
    if (node_.size() == 1) return node_[0];
    const double u = rng.uniform() * cum_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    return node_[std::min<std::size_t>(it - cum_.begin(), node_.size() - 1)];
  }

 private:
  std::vector<double> cum_;
  std::vector<NodeId> node_;
};

enum class StepResult { Hit, Censored, Aborted, Trapped };

struct WalkOutcome {
  StepResult result;
  double time;
  std::uint64_t jumps;
};

// Core trajectory loop shared by all estimators. `abort_at` is the current
// early-abort threshold (+inf when disabled); `cap` censors.
WalkOutcome walk(const Network& network, const Query& query, const StartSampler& start,
                 RngStream& rng, double cap, const std::atomic<double>* abort_at) {
  NodeId node = start.draw(rng);
  double elapsed = 0.0;
  std::uint64_t jumps = 0;
  const bool markov = network.mode() == Mode::Markov;

  while (true) {
    const std::size_t degree = network.out_degree(node);
    if (degree == 0) {
      if (cap < std::numeric_limits<double>::infinity()) return {StepResult::Censored, cap, jumps};
      return {StepResult::Trapped, elapsed, jumps};
    }

    double wait;
    NodeId next;
    if (markov) {
      const double q = network.row_sum(node);
      wait = rng.exponential(q);
      const double u = rng.uniform() * q;
      double acc = 0.0;
      std::size_t slot = 0;
      for (; slot + 1 < degree; ++slot) {
        acc += network.out_edge(node, slot).weight;
        if (u < acc) break;
      }
      next = network.out_edge(node, slot).to;
    } else {
      const double u = rng.uniform() * network.row_sum(node);
      double acc = 0.0;
      std::size_t slot = 0;
      for (; slot + 1 < degree; ++slot) {
        acc += network.out_edge(node, slot).weight;
        if (u < acc) break;
      }
      const auto edge = network.out_edge(node, slot);
      next = edge.to;
      wait = edge.waiting->quantile(rng.uniform());
    }

    elapsed += wait;
    if (elapsed > cap) return {StepResult::Censored, cap, jumps};
    node = next;
    ++jumps;
    if (query.is_target(node)) return {StepResult::Hit, elapsed, jumps};
    if (abort_at != nullptr && elapsed > abort_at->load(std::memory_order_relaxed)) {
      return {StepResult::Aborted, elapsed, jumps};
    }
    if (jumps >= kJumpGuard) {
      throw NumericalError("walker exceeded the jump guard (1e9) without reaching a target");
    }
  }
}

// Bounded collection of the k smallest completed hit times.
class TopK {
 public:
  explicit TopK(int k) : k_(static_cast<std::size_t>(k)) {}
  void insert(double value) {
    if (heap_.size() < k_) {
      heap_.push_back(value);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (value < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = value;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }
  bool full() const { return heap_.size() == k_; }
  double kth() const { return heap_.front(); }  // max of the k smallest
  std::size_t size() const { return heap_.size(); }

 private:
  std::size_t k_;
  std::vector<double> heap_;
};

struct ReplicateOutcome {
  double kth_time = 0.0;
  std::uint64_t censored = 0;
};

// One replicate of N walkers; threshold shared through an atomic so the
// walkers can be split across threads within the replicate.
ReplicateOutcome run_replicate(const Network& network, const Query& query,
                               const StartSampler& start, std::uint64_t seed,
                               std::uint32_t replicate, std::uint64_t searchers, int k,
                               double cap, bool early_abort, unsigned workers) {
  std::atomic<double> threshold{std::numeric_limits<double>::infinity()};
  TopK global_top(k);
  std::mutex top_lock;
  std::atomic<std::uint64_t> censored{0};

  auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t local_censored = 0;
    for (std::uint64_t w = lo; w < hi; ++w) {
      RngStream rng(seed, replicate, static_cast<std::uint32_t>(w));
      const auto out = walk(network, query, start, rng, cap,
                            early_abort ? &threshold : nullptr);
      switch (out.result) {
        case StepResult::Hit: {
          // Publish a tighter k-th minimum as soon as one exists.
          std::lock_guard<std::mutex> g(top_lock);
          global_top.insert(out.time);
          if (global_top.full()) {
            const double kth = global_top.kth();
            double cur = threshold.load(std::memory_order_relaxed);
            while (kth < cur &&
                   !threshold.compare_exchange_weak(cur, kth, std::memory_order_relaxed)) {
            }
          }
          break;
        }
        case StepResult::Censored:
          ++local_censored;
          break;
        case StepResult::Aborted:
          break;  // provably slower than the k-th minimum
        case StepResult::Trapped:
          throw NumericalError(
              "walker entered an absorbing non-target state; set a time_cap to censor");
      }
    }
    censored.fetch_add(local_censored, std::memory_order_relaxed);
  };

  if (workers <= 1 || searchers < 2 * workers) {
    run_range(0, searchers);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t stride = (searchers + workers - 1) / workers;
    std::exception_ptr failure;
    std::mutex failure_lock;
    for (unsigned wk = 0; wk < workers; ++wk) {
      const std::uint64_t lo = std::min<std::uint64_t>(searchers, wk * stride);
      const std::uint64_t hi = std::min<std::uint64_t>(searchers, lo + stride);
      pool.emplace_back([&, lo, hi] {
        try {
          run_range(lo, hi);
        } catch (...) {
          std::lock_guard<std::mutex> g(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  if (global_top.size() < static_cast<std::size_t>(k)) {
    throw NumericalError("replicate produced fewer than k hits; raise time_cap or the budget");
  }
  return ReplicateOutcome{global_top.kth(), censored.load()};
}

McEstimate reduce_to_estimate(const std::vector<double>& values, std::uint64_t censored,
                              std::uint64_t walker_total) {
  McEstimate est;
  est.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - est.mean) * (v - est.mean);
  est.variance = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
  est.stderr_value = std::sqrt(est.variance / static_cast<double>(values.size()));
  est.censored_fraction =
      walker_total > 0 ? static_cast<double>(censored) / static_cast<double>(walker_total) : 0.0;
  return est;
}

}  // namespace

FptSample sample_fpt(const Network& network, const Query& query, RngStream& rng,
                     std::optional<double> time_cap) {
  require_valid(network, query);
  const StartSampler start(query.rho);
  const double cap = time_cap.value_or(std::numeric_limits<double>::infinity());
  const auto out = walk(network, query, start, rng, cap, nullptr);
  if (out.result == StepResult::Trapped) {
    throw NumericalError("walker entered an absorbing non-target state; set a time_cap to censor");
  }
  return FptSample{out.result == StepResult::Hit ? FptOutcome::Hit : FptOutcome::Censored,
                   out.time, out.jumps};
}

ExtremeSimResult sample_extreme(const Network& network, const Query& query, int k,
                                const SimConfig& config, bool early_abort) {
  require_valid(network, query);
  if (k < 1 || static_cast<std::uint64_t>(k) > config.searchers) {
    throw ValidationError("sample_extreme: k must satisfy 1 <= k <= N");
  }
  if (config.replicates < 1) throw ValidationError("sample_extreme: need at least one replicate");
  if (config.searchers > std::numeric_limits<std::uint32_t>::max() ||
      config.replicates > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("sample_extreme: walker/replicate indices must fit in 32 bits");
  }

  const StartSampler start(query.rho);
  const double cap = config.time_cap.value_or(std::numeric_limits<double>::infinity());
  const unsigned workers = std::max(1u, config.workers);

  std::vector<ReplicateOutcome> outcomes(config.replicates);
  if (config.replicates >= 2 * workers && workers > 1) {
    // Whole replicates per worker; each replicate keeps a private threshold.
    std::atomic<std::uint64_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::thread> pool;
    for (unsigned wk = 0; wk < workers; ++wk) {
      pool.emplace_back([&] {
        try {
          while (true) {
            const std::uint64_t r = cursor.fetch_add(1, std::memory_order_relaxed);
            if (r >= config.replicates) break;
            outcomes[r] = run_replicate(network, query, start, config.seed,
                                        static_cast<std::uint32_t>(r), config.searchers, k, cap,
                                        early_abort, 1);
          }
        } catch (...) {
          std::lock_guard<std::mutex> g(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::uint64_t r = 0; r < config.replicates; ++r) {
      outcomes[r] = run_replicate(network, query, start, config.seed,
                                  static_cast<std::uint32_t>(r), config.searchers, k, cap,
                                  early_abort, workers);
    }
  }

  ExtremeSimResult result;
  result.total_walkers = config.searchers * config.replicates;
  result.kth_times.reserve(config.replicates);
  std::uint64_t censored = 0;
  for (const auto& o : outcomes) {
    result.kth_times.push_back(o.kth_time);
    censored += o.censored;
  }
  result.estimate = reduce_to_estimate(result.kth_times, censored, result.total_walkers);
  return result;
}

McEstimate sample_conditional_mortal(const Network& network, const Query& query, double gamma,
                                     double m, const SimConfig& config) {
  require_valid(network, query);
  if (!(gamma > 0.0)) throw ValidationError("sample_conditional_mortal: gamma must be positive");
  if (!(m > 0.0)) throw ValidationError("sample_conditional_mortal: m must be positive");

  if (config.searchers > std::numeric_limits<std::uint32_t>::max() ||
      config.replicates > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("sample_conditional_mortal: indices must fit in 32 bits");
  }
  const StartSampler start(query.rho);
  const std::uint64_t total = config.searchers * config.replicates;
  if (total == 0) throw ValidationError("sample_conditional_mortal: empty sample budget");

  // Fixed-size chunks keep the floating-point reduction order independent of
  // the worker count.
  struct ChunkStat {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t accepted = 0;
  };
  const std::uint64_t chunk_count = (total + kChunk - 1) / kChunk;
  std::vector<ChunkStat> chunks(chunk_count);

  auto run_chunk = [&](std::uint64_t c) {
    ChunkStat stat;
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(total, lo + kChunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto replicate = static_cast<std::uint32_t>(i / config.searchers);
      const auto walker = static_cast<std::uint32_t>(i % config.searchers);
      RngStream rng(config.seed, replicate, walker);
      const double sigma = rng.exponential(gamma);
      const double cap = config.time_cap ? std::min(sigma, *config.time_cap) : sigma;
      const auto out = walk(network, query, start, rng, cap, nullptr);
      if (out.result == StepResult::Hit && out.time < sigma) {
        const double powered = std::pow(out.time, m);
        stat.sum += powered;
        stat.sum_sq += powered * powered;
        ++stat.accepted;
      }
      if (out.result == StepResult::Trapped) {
        throw NumericalError("walker entered an absorbing non-target state");
      }
    }
    chunks[c] = stat;
  };

  const unsigned workers = std::max(1u, config.workers);
  if (workers > 1 && chunk_count > 1) {
    std::atomic<std::uint64_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::thread> pool;
    for (unsigned wk = 0; wk < workers; ++wk) {
      pool.emplace_back([&] {
        try {
          while (true) {
            const std::uint64_t c = cursor.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunk_count) break;
            run_chunk(c);
          }
        } catch (...) {
          std::lock_guard<std::mutex> g(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::uint64_t c = 0; c < chunk_count; ++c) run_chunk(c);
  }

  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t accepted = 0;
  for (const auto& s : chunks) {
    sum += s.sum;
    sum_sq += s.sum_sq;
    accepted += s.accepted;
  }
  if (accepted == 0) {
    throw NumericalError("no sample survived the inactivation time; "
                         "increase the sample budget or lower gamma");
  }

  McEstimate est;
  est.count = accepted;
  est.mean = sum / static_cast<double>(accepted);
  est.variance = accepted > 1
                     ? std::max(0.0, (sum_sq - sum * sum / static_cast<double>(accepted)) /
                                         static_cast<double>(accepted - 1))
                     : 0.0;
  est.stderr_value = std::sqrt(est.variance / static_cast<double>(accepted));
  est.censored_fraction =
      static_cast<double>(total - accepted) / static_cast<double>(total);
  return est;
}

}  // namespace xfpt
