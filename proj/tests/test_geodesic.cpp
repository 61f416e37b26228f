#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "xfpt/errors.hpp"
#include "xfpt/geodesic.hpp"

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

Network diamond() {
  return Network::markov(4, {{0, 1, 1.0}, {1, 3, 2.0}, {0, 2, 3.0}, {2, 3, 4.0}});
}

}  // namespace

TEST_CASE("forward chain geodesic") {
  const auto net = unit_chain(3);
  const auto summary = geodesic_summary(net, single_source(4, 0, 3));
  CHECK(summary.t_min == 0.0);
  CHECK(summary.d == 3);
  CHECK(summary.lambda == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(summary.A == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(summary.path_count == 1);
}

TEST_CASE("diamond sums both geodesics") {
  const auto summary = geodesic_summary(diamond(), single_source(4, 0, 3));
  CHECK(summary.d == 2);
  CHECK(summary.lambda == doctest::Approx(14.0).epsilon(1e-14));
  CHECK(summary.path_count == 2);
}

TEST_CASE("low-rate direct edge still wins on jump count") {
  const auto net = Network::markov(3, {{0, 1, 5.0}, {1, 2, 5.0}, {0, 2, 0.1}});
  const auto summary = geodesic_summary(net, single_source(3, 0, 2));
  CHECK(summary.d == 1);
  CHECK(summary.lambda == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("general-mode chain with shifted waiting times") {
  const auto w = WaitingSpec::shifted_stretched(1.0, 2.0, 1.0);
  const auto net = Network::general(3, {{0, 1, 1.0, w}, {1, 2, 1.0, w}});
  const auto summary = geodesic_summary(net, single_source(3, 0, 2));
  CHECK(summary.t_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(summary.d == 2);
  CHECK(summary.lambda == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(summary.A == doctest::Approx(2.0).epsilon(1e-12));  // Gamma(2)^2/Gamma(3) * 4
  CHECK(summary.exponent() == doctest::Approx(2.0));
}

TEST_CASE("mixed support counts only globally shortest paths") {
  // Node 0 sits two jumps from the target (two routes), node 1 three jumps.
  const auto net = Network::markov(6, {{0, 2, 1.5},
                                       {2, 5, 2.0},
                                       {0, 3, 0.5},
                                       {3, 5, 4.0},
                                       {1, 0, 1.0},
                                       {1, 4, 2.0},
                                       {4, 2, 1.0}});
  Query query;
  query.rho.assign(6, 0.0);
  query.rho[0] = 0.6;
  query.rho[1] = 0.4;
  query.targets = {5};
  const auto summary = geodesic_summary(net, query);
  CHECK(summary.d == 2);
  CHECK(summary.lambda == doctest::Approx(0.6 * (1.5 * 2.0 + 0.5 * 4.0)).epsilon(1e-14));

  const auto oracle = brute_force_lambda(net, query, 3);
  CHECK(oracle.d == summary.d);
  CHECK(oracle.lambda == doctest::Approx(summary.lambda).epsilon(1e-14));
}

TEST_CASE("unreachable target raises") {
  const auto net = Network::markov(3, {{0, 1, 1.0}});
  CHECK_THROWS_AS(geodesic_summary(net, single_source(3, 0, 2)), ValidationError);
}

TEST_CASE("path enumeration") {
  const auto both = enumerate_optimal_paths(diamond(), single_source(4, 0, 3), 16);
  REQUIRE(both.paths.size() == 2);
  CHECK(!both.truncated);
  CHECK(both.paths[0].nodes == std::vector<NodeId>{0, 1, 3});
  CHECK(both.paths[1].nodes == std::vector<NodeId>{0, 2, 3});
  CHECK(both.paths[0].weight == doctest::Approx(2.0));
  CHECK(both.paths[1].weight == doctest::Approx(12.0));

  const auto chain = enumerate_optimal_paths(unit_chain(3), single_source(4, 0, 3), 16);
  REQUIRE(chain.paths.size() == 1);
  CHECK(chain.paths[0].nodes == std::vector<NodeId>{0, 1, 2, 3});

  // Complete digraph on 5 nodes: the direct edge is the unique geodesic.
  std::vector<MarkovEdge> complete;
  for (NodeId i = 0; i < 5; ++i) {
    for (NodeId j = 0; j < 5; ++j) {
      if (i != j) complete.push_back({i, j, 1.0});
    }
  }
  const auto k5 = Network::markov(5, complete);
  const auto direct = enumerate_optimal_paths(k5, single_source(5, 0, 4), 16);
  REQUIRE(direct.paths.size() == 1);
  CHECK(direct.paths[0].nodes == std::vector<NodeId>{0, 4});

  const auto capped = enumerate_optimal_paths(diamond(), single_source(4, 0, 3), 1);
  CHECK(capped.paths.size() == 1);
  CHECK(capped.truncated);
}

TEST_CASE("dp agrees with the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto instance = oracles::random_markov_instance(seed);
    const auto summary = geodesic_summary(instance.network, instance.query);
    const auto oracle = brute_force_lambda(instance.network, instance.query, summary.d);
    CHECK(oracle.d == summary.d);
    CHECK(oracle.t_min == summary.t_min);
    CHECK(oracle.lambda ==
          doctest::Approx(summary.lambda).epsilon(1e-12));
  }
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto instance = oracles::random_general_instance(seed, 5, 12);
    const auto summary = geodesic_summary(instance.network, instance.query);
    const auto oracle = brute_force_lambda(instance.network, instance.query, summary.d + 2);
    CHECK(oracle.d == summary.d);
    CHECK(oracle.t_min == doctest::Approx(summary.t_min).epsilon(1e-12));
    CHECK(oracle.lambda == doctest::Approx(summary.lambda).epsilon(1e-12));
  }
}

TEST_CASE("enumerated paths reproduce the DP weight sum") {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    const auto instance = seed % 3 == 0 ? oracles::random_general_instance(seed, 6, 14)
                                        : oracles::random_markov_instance(seed, 7, 18);
    const auto summary = geodesic_summary(instance.network, instance.query);
    const auto paths = enumerate_optimal_paths(instance.network, instance.query, 100000);
    REQUIRE(!paths.truncated);
    CHECK(paths.paths.size() == summary.path_count);
    double total = 0.0;
    for (const auto& p : paths.paths) {
      CHECK(p.length() == summary.d);
      CHECK(p.t0_sum == doctest::Approx(summary.t_min).epsilon(1e-9));
      total += instance.query.rho[p.nodes.front()] * p.weight;
    }
    CHECK(total == doctest::Approx(summary.lambda).epsilon(1e-11));
  }
}

TEST_CASE("off-geodesic edges do not matter; geodesic edges do") {
  // Diamond plus a decoy edge hanging off the geodesic.
  auto edges = std::vector<MarkovEdge>{{0, 1, 1.0}, {1, 3, 2.0}, {0, 2, 3.0}, {2, 3, 4.0}};
  const auto base = geodesic_summary(Network::markov(5, edges), single_source(5, 0, 3));

  auto with_decoy = edges;
  with_decoy.push_back({1, 4, 9.0});  // node 4 is a dead end off the geodesic
  const auto decoyed = geodesic_summary(Network::markov(5, with_decoy), single_source(5, 0, 3));
  CHECK(decoyed.d == base.d);
  CHECK(decoyed.lambda == doctest::Approx(base.lambda).epsilon(1e-14));

  // Removing an edge of the unique geodesic changes (d, Lambda).
  const auto chain = unit_chain(3);
  const auto with_detour = Network::markov(
      4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {1, 0, 0.5}});
  const auto full = geodesic_summary(with_detour, single_source(4, 0, 3));
  const auto cut = geodesic_summary(Network::markov(4, {{0, 1, 1.0}, {1, 0, 0.5}, {1, 2, 1.0}}),
                                    single_source(4, 0, 2));
  CHECK(full.d == 3);
  CHECK(cut.d == 2);
}

TEST_CASE("lambda is linear in the initial distribution") {
  const auto net = diamond();
  Query q1 = single_source(4, 0, 3);
  // Second distribution with the same (t_min, d): mass on node 0 only, but
  // mix with a copy of itself weighted differently via a second support node
  // at equal distance.
  const auto two_source_net =
      Network::markov(5, {{0, 1, 1.0}, {1, 3, 2.0}, {0, 2, 3.0}, {2, 3, 4.0}, {4, 1, 5.0}});
  Query qa;
  qa.rho.assign(5, 0.0);
  qa.rho[0] = 1.0;
  qa.targets = {3};
  Query qb;
  qb.rho.assign(5, 0.0);
  qb.rho[4] = 1.0;
  qb.targets = {3};
  const double alpha = 0.3;
  Query mix;
  mix.rho.assign(5, 0.0);
  for (std::size_t i = 0; i < 5; ++i) mix.rho[i] = alpha * qa.rho[i] + (1 - alpha) * qb.rho[i];
  mix.targets = {3};

  const auto la = geodesic_summary(two_source_net, qa);
  const auto lb = geodesic_summary(two_source_net, qb);
  const auto lm = geodesic_summary(two_source_net, mix);
  REQUIRE(la.d == lb.d);
  CHECK(lm.lambda ==
        doctest::Approx(alpha * la.lambda + (1 - alpha) * lb.lambda).epsilon(1e-12));
}

TEST_CASE("scaling all rates by c scales lambda by c^d") {
  const auto base = geodesic_summary(diamond(), single_source(4, 0, 3));
  const double c = 3.7;
  const auto scaled_net =
      Network::markov(4, {{0, 1, c * 1.0}, {1, 3, c * 2.0}, {0, 2, c * 3.0}, {2, 3, c * 4.0}});
  const auto scaled = geodesic_summary(scaled_net, single_source(4, 0, 3));
  CHECK(scaled.d == base.d);
  CHECK(scaled.lambda ==
        doctest::Approx(base.lambda * std::pow(c, base.d)).epsilon(1e-12));
}

TEST_CASE("long chains stay finite through log-space accumulation") {
  const int length = 400;
  std::vector<MarkovEdge> edges;
  for (int i = 0; i < length; ++i) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 10.0});
  }
  const auto net = Network::markov(length + 1, edges);
  const auto summary =
      geodesic_summary(net, single_source(length + 1, 0, static_cast<NodeId>(length)));
  CHECK(summary.d == length);
  // Lambda = 10^400 overflows; the log stays exact.
  CHECK(summary.log_lambda == doctest::Approx(length * std::log(10.0)).epsilon(1e-12));
  CHECK(std::isfinite(summary.log_A));
}
