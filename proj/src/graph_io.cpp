#include "xfpt/graph_io.hpp"

#include <cmath>
#include <fstream>

#include "xfpt/errors.hpp"

namespace xfpt {

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ValidationError(std::string(where) + ": missing numeric field '" + key + "'");
  }
  return obj[key].get<double>();
}

NodeId require_node(const json& obj, const char* key, const char* where) {
  const double v = require_number(obj, key, where);
  if (v < 0 || v != std::floor(v)) {
    throw ValidationError(std::string(where) + ": '" + key + "' must be a nonnegative integer");
  }
  return static_cast<NodeId>(v);
}

WaitingSpec parse_waiting(const json& w) {
  if (!w.is_object() || !w.contains("kind") || !w["kind"].is_string()) {
    throw ValidationError("waiting: expected an object with a 'kind' string");
  }
  const std::string kind = w["kind"].get<std::string>();
  if (kind == "exponential") {
    return WaitingSpec::exponential(require_number(w, "rate", "waiting"));
  }
  if (kind == "shifted_stretched") {
    return WaitingSpec::shifted_stretched(require_number(w, "t0", "waiting"),
                                          require_number(w, "c", "waiting"),
                                          require_number(w, "r", "waiting"));
  }
  if (kind == "lomax") {
    return WaitingSpec::lomax(require_number(w, "alpha", "waiting"),
                              require_number(w, "beta", "waiting"));
  }
  throw ValidationError("waiting: unknown kind '" + kind + "'");
}

json waiting_to_json(const WaitingSpec& w) {
  switch (w.kind()) {
    case WaitingSpec::Kind::Exponential:
      return {{"kind", "exponential"}, {"rate", w.param_a()}};
    case WaitingSpec::Kind::ShiftedStretched:
      return {{"kind", "shifted_stretched"}, {"t0", w.param_a()}, {"c", w.param_b()}, {"r", w.param_c()}};
    case WaitingSpec::Kind::Lomax:
      return {{"kind", "lomax"}, {"alpha", w.param_a()}, {"beta", w.param_b()}};
  }
  return {};
}

}  // namespace

Problem parse_problem(const json& doc) {
  if (!doc.is_object()) throw ValidationError("graph file: top-level value must be an object");
  if (!doc.contains("nodes") || !doc["nodes"].is_number_integer() || doc["nodes"].get<long long>() <= 0) {
    throw ValidationError("graph file: 'nodes' must be a positive integer");
  }
  const auto node_count = doc["nodes"].get<std::size_t>();

  std::string mode = "markov";
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ValidationError("graph file: 'mode' must be a string");
    mode = doc["mode"].get<std::string>();
  }
  if (mode != "markov" && mode != "general") {
    throw ValidationError("graph file: mode must be 'markov' or 'general'");
  }

  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw ValidationError("graph file: 'edges' must be an array");
  }

  Network network = [&] {
    if (mode == "markov") {
      std::vector<MarkovEdge> edges;
      edges.reserve(doc["edges"].size());
      for (const auto& e : doc["edges"]) {
        edges.push_back({require_node(e, "from", "edge"), require_node(e, "to", "edge"),
                         require_number(e, "rate", "edge")});
      }
      return Network::markov(node_count, edges);
    }
    std::vector<GeneralEdge> edges;
    edges.reserve(doc["edges"].size());
    for (const auto& e : doc["edges"]) {
      if (!e.contains("waiting")) throw ValidationError("edge: general mode requires 'waiting'");
      edges.push_back({require_node(e, "from", "edge"), require_node(e, "to", "edge"),
                       require_number(e, "prob", "edge"), parse_waiting(e["waiting"])});
    }
    return Network::general(node_count, edges);
  }();

  Query query;
  query.rho.assign(node_count, 0.0);
  if (!doc.contains("rho") || !doc["rho"].is_object()) {
    throw ValidationError("graph file: 'rho' must be an object mapping node -> weight");
  }
  double total = 0.0;
  for (const auto& [key, value] : doc["rho"].items()) {
    std::size_t pos = 0;
    unsigned long node = 0;
    try {
      node = std::stoul(key, &pos);
    } catch (const std::exception&) {
      throw ValidationError("rho: key '" + key + "' is not a node index");
    }
    if (pos != key.size() || node >= node_count) {
      throw ValidationError("rho: key '" + key + "' is not a valid node index");
    }
    if (!value.is_number() || value.get<double>() < 0.0) {
      throw ValidationError("rho: weight of node " + key + " must be a nonnegative number");
    }
    query.rho[node] += value.get<double>();
    total += value.get<double>();
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw ValidationError("rho: weights sum to " + std::to_string(total) +
                          ", outside 1 +/- 1e-6; refusing to normalize");
  }
  for (double& w : query.rho) w /= total;

  if (!doc.contains("targets") || !doc["targets"].is_array() || doc["targets"].empty()) {
    throw ValidationError("graph file: 'targets' must be a non-empty array");
  }
  for (const auto& t : doc["targets"]) {
    if (!t.is_number_integer() || t.get<long long>() < 0 ||
        t.get<std::size_t>() >= node_count) {
      throw ValidationError("targets: entries must be node indices");
    }
    query.targets.push_back(t.get<NodeId>());
  }

  return Problem{std::move(network), std::move(query)};
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("graph file " + path + ": " + e.what());
  }
  return parse_problem(doc);
}

json to_json(const Network& network, const Query& query) {
  json edges = json::array();
  for (std::size_t i = 0; i < network.node_count(); ++i) {
    const auto node = static_cast<NodeId>(i);
    for (std::size_t s = 0; s < network.out_degree(node); ++s) {
      const auto e = network.out_edge(node, s);
      if (network.mode() == Mode::Markov) {
        edges.push_back({{"from", node}, {"to", e.to}, {"rate", e.weight}});
      } else {
        edges.push_back({{"from", node}, {"to", e.to}, {"prob", e.weight},
                         {"waiting", waiting_to_json(*e.waiting)}});
      }
    }
  }
  json rho = json::object();
  for (std::size_t i = 0; i < query.rho.size(); ++i) {
    if (query.rho[i] > 0.0) rho[std::to_string(i)] = query.rho[i];
  }
  return {{"nodes", network.node_count()},
          {"mode", network.mode() == Mode::Markov ? "markov" : "general"},
          {"edges", std::move(edges)},
          {"rho", std::move(rho)},
          {"targets", query.targets}};
}

void save_problem(const Network& network, const Query& query, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write graph file: " + path);
  out << to_json(network, query).dump(2) << "\n";
}

}  // namespace xfpt
