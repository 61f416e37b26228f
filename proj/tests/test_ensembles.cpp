#include <doctest.h>

#include <cmath>
#include <set>

#include "xfpt/asymptotics.hpp"
#include "xfpt/ensembles.hpp"
#include "xfpt/exact.hpp"
#include "xfpt/geodesic.hpp"
#include "xfpt/graph_io.hpp"

using namespace xfpt;

TEST_CASE("generator: exactly 5V distinct edges, no self-loops") {
  const auto instance = generate({100, 3, 3});
  CHECK(instance.network.edge_count() == 500);
  std::set<std::pair<NodeId, NodeId>> seen;
  for (NodeId i = 0; i < 100; ++i) {
    for (std::size_t s = 0; s < instance.network.out_degree(i); ++s) {
      const auto e = instance.network.out_edge(i, s);
      CHECK(e.to != i);
      CHECK(e.weight > 0.0);
      CHECK(e.weight <= 1.0);
      CHECK(seen.emplace(i, e.to).second);
    }
  }
  CHECK(seen.size() == 500);
}

TEST_CASE("generator: requested geodesic distance is delivered") {
  for (int distance : {2, 3, 4}) {
    const auto instance = generate({60, distance, 7});
    const auto summary = geodesic_summary(instance.network, instance.query);
    CHECK(summary.d == distance);
  }
}

TEST_CASE("generator: identical seeds give byte-identical graph files") {
  const auto a = generate({80, 3, 42});
  const auto b = generate({80, 3, 42});
  CHECK(to_json(a.network, a.query).dump() == to_json(b.network, b.query).dump());
  const auto c = generate({80, 3, 43});
  CHECK(to_json(a.network, a.query).dump() != to_json(c.network, c.query).dump());
}

TEST_CASE("sweep ratio approaches one on the unit 3-chain") {
  const auto net = Network::markov(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  Query query;
  query.rho = {1.0, 0.0, 0.0, 0.0};
  query.targets = {3};
  const auto rows =
      convergence_sweep(net, query, {100, 1000, 10000, 100000, 1000000}, 1);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(rows[i].ratio - 1.0) < std::abs(rows[i - 1].ratio - 1.0));
  }
  CHECK(std::abs(rows.back().ratio - 1.0) < std::abs(rows.front().ratio - 1.0));
  CHECK(rows.back().ratio == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sweep ratio is exactly one for a single edge") {
  const auto net = Network::markov(2, {{0, 1, 0.8}});
  Query query;
  query.rho = {1.0, 0.0};
  query.targets = {1};
  for (const auto& row : convergence_sweep(net, query, {1, 10, 1000}, 1)) {
    CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("single-searcher mean FPT on the reference ensemble is order 1e2") {
  const auto instance = generate({1000, 3, 11});
  const double mean = extreme_moment_exact(instance.network, instance.query, 1, 1, 1.0, 1e-7);
  CHECK(mean >= 10.0);
  CHECK(mean <= 1000.0);
}

TEST_CASE("ratio sanity on a generated instance") {
  const auto instance = generate({40, 2, 19});
  const auto rows = convergence_sweep(instance.network, instance.query, {100, 1000000}, 1);
  for (const auto& row : rows) {
    CHECK(row.ratio > 0.0);
    CHECK(std::isfinite(row.ratio));
  }
  CHECK(std::abs(rows[1].ratio - 1.0) < std::abs(rows[0].ratio - 1.0));
}

TEST_CASE("interval lattice agrees with the generic formula") {
  // Escape from {-d..d} with per-side rate D d^2/L^2; two straight geodesics
  // give Lambda = 2 (D d^2/L^2)^d, and the generic mean formula follows.
  const int d = 3;
  const auto lattice = make_interval_lattice(d, 9.0);
  const auto summary = geodesic_summary(lattice.network, lattice.query);
  CHECK(summary.d == d);
  CHECK(summary.lambda == doctest::Approx(2.0 * std::pow(9.0, 3)).epsilon(1e-12));
  const std::uint64_t n = 1000000;
  const double exact = extreme_moment_exact(lattice.network, lattice.query, n, 1, 1.0, 1e-9);
  const double theory = asymptotic_moment(summary, n, 1, 1.0).value;
  CHECK(exact / theory == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rescaled density approaches the weibull limit") {
  const auto net = Network::markov(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  Query query;
  query.rho = {1.0, 0.0, 0.0, 0.0};
  query.targets = {3};
  std::vector<double> z_grid;
  for (int i = 1; i <= 30; ++i) z_grid.push_back(0.1 * i);
  const auto rows = rescaled_density(net, query, {100, 100000}, z_grid);
  double err_small_n = 0.0, err_large_n = 0.0;
  for (const auto& row : rows) {
    err_small_n = std::max(err_small_n, std::abs(row.density[0] - row.weibull));
    err_large_n = std::max(err_large_n, std::abs(row.density[1] - row.weibull));
  }
  CHECK(err_large_n < err_small_n);
  CHECK(err_large_n < 0.05);
}
