#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "xfpt/errors.hpp"
#include "xfpt/exact.hpp"
#include "xfpt/monte_carlo.hpp"

using namespace xfpt;

namespace {

Query single_source(std::size_t nodes, NodeId source, NodeId target) {
  Query q;
  q.rho.assign(nodes, 0.0);
  q.rho[source] = 1.0;
  q.targets = {target};
  return q;
}

Network unit_chain(int length) {
  std::vector<MarkovEdge> edges;
  for (int i = 0; i < length; ++i) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 1.0});
  }
  return Network::markov(static_cast<std::size_t>(length) + 1, edges);
}

double sample_mean(const Network& net, const Query& query, std::uint64_t draws,
                   std::uint64_t seed) {
  double sum = 0.0;
  for (std::uint64_t w = 0; w < draws; ++w) {
    RngStream rng(seed, 0, static_cast<std::uint32_t>(w));
    sum += sample_fpt(net, query, rng).time;
  }
  return sum / static_cast<double>(draws);
}

}  // namespace

TEST_CASE("single-edge FPT sample mean") {
  const double q = 2.0;
  const auto net = Network::markov(2, {{0, 1, q}});
  const auto query = single_source(2, 0, 1);
  const std::uint64_t draws = 400000;
  const double mean = sample_mean(net, query, draws, 1);
  const double se = (1.0 / q) / std::sqrt(static_cast<double>(draws));
  CHECK(std::abs(mean - 1.0 / q) <= 4.0 * se);
}

TEST_CASE("three-chain FPT sample mean is about 3") {
  const auto net = unit_chain(3);
  const auto query = single_source(4, 0, 3);
  const std::uint64_t draws = 200000;
  const double mean = sample_mean(net, query, draws, 2);
  const double se = std::sqrt(3.0) / std::sqrt(static_cast<double>(draws));
  CHECK(std::abs(mean - 3.0) <= 4.0 * se);
}

TEST_CASE("shifted waits keep every sample above t0") {
  const auto w = WaitingSpec::shifted_stretched(1.0, 2.0, 1.0);
  const auto net = Network::general(2, {{0, 1, 1.0, w}});
  const auto query = single_source(2, 0, 1);
  for (std::uint32_t i = 0; i < 2000; ++i) {
    RngStream rng(7, 0, i);
    CHECK(sample_fpt(net, query, rng).time > 1.0);
  }
}

TEST_CASE("censoring reports instead of hanging") {
  const auto net = Network::markov(3, {{0, 1, 1.0}, {0, 2, 1.0}});
  const auto query = single_source(3, 0, 2);  // node 1 is an absorbing dead end
  RngStream rng(3, 0, 0);
  CHECK_THROWS_AS(
      [&] {
        for (std::uint32_t w = 0; w < 100; ++w) {
          RngStream stream(3, 0, w);
          sample_fpt(net, query, stream);
        }
      }(),
      NumericalError);
  const auto censored = sample_fpt(net, query, rng, 5.0);
  CHECK((censored.outcome == FptOutcome::Censored || censored.time <= 5.0));
}

TEST_CASE("extreme sampling matches the exact min law") {
  const auto net = Network::markov(2, {{0, 1, 1.0}});
  const auto query = single_source(2, 0, 1);
  SimConfig config;
  config.seed = 11;
  config.searchers = 1000;
  config.replicates = 10000;
  const auto result = sample_extreme(net, query, 1, config);
  const double exact_mean = 1.0 / 1000.0;
  CHECK(std::abs(result.estimate.mean - exact_mean) <= 4.0 * result.estimate.stderr_value);
}

TEST_CASE("determinism across worker counts") {
  const auto instance = oracles::random_markov_instance(17, 10, 26);
  for (int k : {1, 2}) {
    SimConfig base;
    base.seed = 5;
    base.searchers = 400;
    base.replicates = 6;
    base.workers = 1;
    const auto one = sample_extreme(instance.network, instance.query, k, base);
    for (unsigned workers : {4u, 16u}) {
      auto cfg = base;
      cfg.workers = workers;
      const auto many = sample_extreme(instance.network, instance.query, k, cfg);
      CHECK(many.kth_times == one.kth_times);  // bit-identical
      CHECK(many.estimate.mean == one.estimate.mean);
      CHECK(many.estimate.variance == one.estimate.variance);
    }
  }
}

TEST_CASE("early abort does not change the estimates") {
  const auto instance = oracles::random_markov_instance(23, 8, 20);
  SimConfig config;
  config.seed = 9;
  config.searchers = 300;
  config.replicates = 8;
  for (int k : {1, 3}) {
    const auto with_abort = sample_extreme(instance.network, instance.query, k, config, true);
    const auto without = sample_extreme(instance.network, instance.query, k, config, false);
    CHECK(with_abort.kth_times == without.kth_times);
  }
}

TEST_CASE("per-replicate order statistics are ordered") {
  const auto net = unit_chain(2);
  const auto query = single_source(3, 0, 2);
  SimConfig config;
  config.seed = 31;
  config.searchers = 50;
  config.replicates = 64;
  const auto first = sample_extreme(net, query, 1, config);
  const auto second = sample_extreme(net, query, 2, config);
  for (std::size_t r = 0; r < config.replicates; ++r) {
    CHECK(second.kth_times[r] >= first.kth_times[r]);
  }
}

TEST_CASE("empirical extreme cdf tracks the exact solver") {
  const auto instance = oracles::random_markov_instance(29, 12, 30);
  SimConfig config;
  config.seed = 13;
  config.searchers = 1000;
  config.replicates = 4000;
  config.workers = 2;
  const auto result = sample_extreme(instance.network, instance.query, 1, config);
  auto sorted = result.kth_times;
  std::sort(sorted.begin(), sorted.end());
  const ReducedSystem system(instance.network, instance.query);
  for (int i = 1; i <= 20; ++i) {
    const double t = sorted[sorted.size() * i / 21];
    const double exact = extreme_cdf(system, config.searchers, 1, t);
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    const double empirical = static_cast<double>(below) / static_cast<double>(sorted.size());
    const double se =
        std::sqrt(std::max(exact * (1.0 - exact), 1e-12) / static_cast<double>(sorted.size()));
    CHECK(std::abs(empirical - exact) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("general-mode samples obey the short-time law") {
  // Two-edge shifted chain: P(tau <= t_min + s) ~ A s^2 with A = 2.
  const auto w = WaitingSpec::shifted_stretched(1.0, 2.0, 1.0);
  const auto net = Network::general(3, {{0, 1, 1.0, w}, {1, 2, 1.0, w}});
  const auto query = single_source(3, 0, 2);

  const std::uint64_t draws = 2000000;
  std::vector<double> squeezed;  // samples shifted by t_min = 2
  for (std::uint64_t i = 0; i < draws; ++i) {
    RngStream rng(71, 0, static_cast<std::uint32_t>(i));
    squeezed.push_back(sample_fpt(net, query, rng).time - 2.0);
  }
  std::nth_element(squeezed.begin(), squeezed.begin() + 499, squeezed.end());
  const double s = squeezed[499];  // smallest s with >= 500 hits below t_min + s
  const double empirical = 500.0 / static_cast<double>(draws);
  const double ratio = empirical / (2.0 * s * s);
  CHECK(ratio >= 0.8);
  CHECK(ratio <= 1.2);
}

TEST_CASE("conditional mortal sampling: competing exponentials") {
  const double q = 2.0, gamma = 3.0;
  const auto net = Network::markov(2, {{0, 1, q}});
  const auto query = single_source(2, 0, 1);
  SimConfig config;
  config.seed = 41;
  config.searchers = 300000;
  config.replicates = 1;
  const auto est = sample_conditional_mortal(net, query, gamma, 1.0, config);
  CHECK(std::abs(est.mean - 1.0 / (q + gamma)) <= 4.0 * est.stderr_value);
  // Acceptance probability is q/(q+gamma).
  CHECK(est.censored_fraction == doctest::Approx(gamma / (q + gamma)).epsilon(0.02));
}

TEST_CASE("conditional mortal sampling: fast-inactivation limit on the 2-chain") {
  const auto net = unit_chain(2);
  const auto query = single_source(3, 0, 2);
  const double gamma = 100.0;
  SimConfig config;
  config.seed = 43;
  config.searchers = 2000000;
  config.replicates = 1;
  config.workers = 2;
  const auto est = sample_conditional_mortal(net, query, gamma, 1.0, config);
  CHECK(est.mean * gamma == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("gamma to zero recovers the unconditional mean") {
  const auto net = unit_chain(2);
  const auto query = single_source(3, 0, 2);
  SimConfig config;
  config.seed = 47;
  config.searchers = 200000;
  config.replicates = 1;
  const auto est = sample_conditional_mortal(net, query, 1e-7, 1.0, config);
  CHECK(est.mean == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("mortal workers do not change the bits") {
  const auto net = unit_chain(2);
  const auto query = single_source(3, 0, 2);
  SimConfig config;
  config.seed = 53;
  config.searchers = 40000;
  config.replicates = 1;
  config.workers = 1;
  const auto one = sample_conditional_mortal(net, query, 5.0, 1.0, config);
  config.workers = 16;
  const auto many = sample_conditional_mortal(net, query, 5.0, 1.0, config);
  CHECK(one.mean == many.mean);
  CHECK(one.count == many.count);
}
