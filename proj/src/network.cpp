#include "xfpt/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "xfpt/errors.hpp"

namespace xfpt {

WaitingSpec WaitingSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw ValidationError("waiting spec: exponential rate must be positive");
  return WaitingSpec(Kind::Exponential, rate, 0.0, 0.0);
}

WaitingSpec WaitingSpec::shifted_stretched(double t0, double c, double r) {
  if (!(t0 >= 0.0)) throw ValidationError("waiting spec: t0 must be nonnegative");
  if (!(c > 0.0)) throw ValidationError("waiting spec: c must be positive");
  if (!(r > 0.0)) throw ValidationError("waiting spec: r must be positive");
  return WaitingSpec(Kind::ShiftedStretched, t0, c, r);
}

WaitingSpec WaitingSpec::lomax(double alpha, double beta) {
  if (!(alpha > 0.0)) throw ValidationError("waiting spec: lomax alpha must be positive");
  if (!(beta > 0.0)) throw ValidationError("waiting spec: lomax beta must be positive");
  return WaitingSpec(Kind::Lomax, alpha, beta, 0.0);
}

double WaitingSpec::t0() const {
  return kind_ == Kind::ShiftedStretched ? a_ : 0.0;
}

double WaitingSpec::lambda() const {
  switch (kind_) {
    case Kind::Exponential: return a_;
    case Kind::ShiftedStretched: return b_;
    case Kind::Lomax: return a_ / b_;
  }
  return 0.0;
}

double WaitingSpec::r() const {
  return kind_ == Kind::ShiftedStretched ? c_ : 1.0;
}

double WaitingSpec::cdf(double t) const {
  switch (kind_) {
    case Kind::Exponential:
      return t <= 0.0 ? 0.0 : -std::expm1(-a_ * t);
    case Kind::ShiftedStretched:
      return t <= a_ ? 0.0 : -std::expm1(-b_ * std::pow(t - a_, c_));
    case Kind::Lomax:
      return t <= 0.0 ? 0.0 : -std::expm1(-a_ * std::log1p(t / b_));
  }
  return 0.0;
}

double WaitingSpec::quantile(double u) const {
  if (u < 0.0 || u >= 1.0) throw std::domain_error("WaitingSpec::quantile: u must be in [0,1)");
  switch (kind_) {
    case Kind::Exponential:
      return -std::log1p(-u) / a_;
    case Kind::ShiftedStretched:
      return a_ + std::pow(-std::log1p(-u) / b_, 1.0 / c_);
    case Kind::Lomax:
      return b_ * std::expm1(-std::log1p(-u) / a_);
  }
  return 0.0;
}

namespace {

void check_edge_endpoints(std::size_t node_count, NodeId from, NodeId to) {
  if (from >= node_count || to >= node_count) {
    std::ostringstream msg;
    msg << "edge (" << from << " -> " << to << ") references a node outside [0, " << node_count << ")";
    throw ValidationError(msg.str());
  }
  if (from == to) {
    std::ostringstream msg;
    msg << "self-loop on node " << from << " is not allowed";
    throw ValidationError(msg.str());
  }
}

}  // namespace

Network Network::markov(std::size_t node_count, const std::vector<MarkovEdge>& edges) {
  if (node_count == 0) throw ValidationError("network must have at least one node");
  // Merge parallel edges by summing rates.
  std::map<std::pair<NodeId, NodeId>, double> merged;
  for (const auto& e : edges) {
    check_edge_endpoints(node_count, e.from, e.to);
    if (!(e.rate > 0.0)) {
      std::ostringstream msg;
      msg << "edge (" << e.from << " -> " << e.to << ") must have positive rate";
      throw ValidationError(msg.str());
    }
    merged[{e.from, e.to}] += e.rate;
  }

  Network net;
  net.mode_ = Mode::Markov;
  net.node_count_ = node_count;
  net.row_ptr_.assign(node_count + 1, 0);
  for (const auto& [key, rate] : merged) ++net.row_ptr_[key.first + 1];
  for (std::size_t i = 0; i < node_count; ++i) net.row_ptr_[i + 1] += net.row_ptr_[i];
  net.to_.resize(merged.size());
  net.weight_.resize(merged.size());
  net.row_sum_.assign(node_count, 0.0);
  std::size_t slot = 0;  // map iteration is (from, to)-sorted, matching CSR order
  for (const auto& [key, rate] : merged) {
    net.to_[slot] = key.second;
    net.weight_[slot] = rate;
    net.row_sum_[key.first] += rate;
    ++slot;
  }
  if (!std::all_of(net.row_sum_.begin(), net.row_sum_.end(),
                   [](double q) { return std::isfinite(q); })) {
    throw ValidationError("total exit rate q(i) must be finite for every node");
  }
  return net;
}

Network Network::general(std::size_t node_count, const std::vector<GeneralEdge>& edges) {
  if (node_count == 0) throw ValidationError("network must have at least one node");
  std::map<std::pair<NodeId, NodeId>, const GeneralEdge*> seen;
  for (const auto& e : edges) {
    check_edge_endpoints(node_count, e.from, e.to);
    if (!(e.prob > 0.0 && e.prob <= 1.0)) {
      std::ostringstream msg;
      msg << "edge (" << e.from << " -> " << e.to << ") must have jump probability in (0,1]";
      throw ValidationError(msg.str());
    }
    if (!seen.emplace(std::make_pair(e.from, e.to), &e).second) {
      std::ostringstream msg;
      msg << "parallel general-mode edges (" << e.from << " -> " << e.to
          << ") are not supported; merge them upstream";
      throw ValidationError(msg.str());
    }
  }

  double global_r = 0.0;
  for (const auto& [key, e] : seen) {
    const double r = e->waiting.r();
    if (global_r == 0.0) {
      global_r = r;
    } else if (r != global_r) {
      std::ostringstream msg;
      msg << "edge (" << key.first << " -> " << key.second << ") has short-time exponent r=" << r
          << " but the network uses r=" << global_r << "; a single global r is required";
      throw ValidationError(msg.str());
    }
  }

  Network net;
  net.mode_ = Mode::General;
  net.node_count_ = node_count;
  net.waiting_exponent_ = global_r == 0.0 ? 1.0 : global_r;
  net.row_ptr_.assign(node_count + 1, 0);
  for (const auto& [key, e] : seen) ++net.row_ptr_[key.first + 1];
  for (std::size_t i = 0; i < node_count; ++i) net.row_ptr_[i + 1] += net.row_ptr_[i];
  net.to_.reserve(seen.size());
  net.weight_.reserve(seen.size());
  net.waiting_.reserve(seen.size());
  net.row_sum_.assign(node_count, 0.0);
  for (const auto& [key, e] : seen) {
    net.to_.push_back(key.second);
    net.weight_.push_back(e->prob);
    net.waiting_.push_back(e->waiting);
    net.row_sum_[key.first] += e->prob;
  }
  return net;
}

Network::OutEdge Network::out_edge(NodeId i, std::size_t slot) const {
  const std::size_t idx = row_ptr_[i] + slot;
  return OutEdge{to_[idx], weight_[idx],
                 mode_ == Mode::General ? &waiting_[idx] : nullptr};
}

double Network::max_rate() const {
  if (mode_ != Mode::Markov) throw ValidationError("max_rate is defined for Markov mode only");
  double best = 0.0;
  for (double q : row_sum_) best = std::max(best, q);
  return best;
}

Network Network::as_general() const {
  if (mode_ != Mode::Markov) throw ValidationError("as_general requires a Markov-mode network");
  std::vector<GeneralEdge> edges;
  edges.reserve(to_.size());
  for (std::size_t i = 0; i < node_count_; ++i) {
    const double q = row_sum_[i];
    if (q <= 0.0) continue;  // absorbing: no outgoing edges in either view
    const auto node = static_cast<NodeId>(i);
    for (std::size_t s = 0; s < out_degree(node); ++s) {
      const auto e = out_edge(node, s);
      edges.push_back(GeneralEdge{node, e.to, e.weight / q, WaitingSpec::exponential(q)});
    }
  }
  return Network::general(node_count_, edges);
}

bool Query::is_target(NodeId i) const {
  return std::find(targets.begin(), targets.end(), i) != targets.end();
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    out << issues[i].code << ": " << issues[i].detail;
  }
  return out.str();
}

std::vector<bool> reachable_from(const Network& network, std::span<const NodeId> sources) {
  std::vector<bool> seen(network.node_count(), false);
  std::vector<NodeId> stack(sources.begin(), sources.end());
  for (NodeId s : stack) seen[s] = true;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (std::size_t s = 0; s < network.out_degree(u); ++s) {
      const NodeId v = network.out_edge(u, s).to;
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

ValidationReport validate(const Network& network, const Query& query) {
  ValidationReport report;
  const std::size_t n = network.node_count();

  if (query.rho.size() != n) {
    report.issues.push_back({"rho_size", "initial distribution has wrong length"});
    return report;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (query.rho[i] < 0.0) {
      report.issues.push_back({"rho_negative", "rho(" + std::to_string(i) + ") < 0"});
      return report;
    }
    total += query.rho[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    report.issues.push_back({"rho_not_normalized",
                             "sum of rho deviates from 1 by " + std::to_string(total - 1.0)});
  }

  if (query.targets.empty()) {
    report.issues.push_back({"no_targets", "target set is empty"});
    return report;
  }
  for (NodeId t : query.targets) {
    if (t >= n) {
      report.issues.push_back({"target_out_of_range", "target " + std::to_string(t)});
      return report;
    }
  }

  std::vector<NodeId> support;
  for (std::size_t i = 0; i < n; ++i) {
    if (query.rho[i] > 0.0) support.push_back(static_cast<NodeId>(i));
  }
  if (support.empty()) {
    report.issues.push_back({"rho_empty", "initial distribution has empty support"});
    return report;
  }
  for (NodeId s : support) {
    if (query.is_target(s)) {
      report.issues.push_back({"start_on_target",
                               "rho places mass on target node " + std::to_string(s)});
    }
  }

  const auto seen = reachable_from(network, support);
  const bool hit = std::any_of(query.targets.begin(), query.targets.end(),
                               [&](NodeId t) { return seen[t]; });
  if (!hit) {
    report.issues.push_back({"unreachable_target",
                             "no target is reachable from the support of rho"});
  }

  if (network.mode() == Mode::General) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto node = static_cast<NodeId>(i);
      if (network.out_degree(node) == 0) continue;  // absorbing
      const double s = network.row_sum(node);
      if (std::abs(s - 1.0) > 1e-9) {
        report.issues.push_back({"jump_probs_not_normalized",
                                 "outgoing probabilities of node " + std::to_string(i) +
                                     " sum to " + std::to_string(s)});
      }
    }
  }
  return report;
}

void require_valid(const Network& network, const Query& query) {
  const auto report = validate(network, query);
  if (!report.ok()) throw ValidationError(report.to_string());
}

LatticeProblem make_interval_lattice(int d, double rate_per_side) {
  if (d < 1) throw ValidationError("interval lattice needs d >= 1");
  const std::size_t n = static_cast<std::size_t>(2 * d + 1);
  std::vector<MarkovEdge> edges;
  for (int i = -d + 1; i <= d - 1; ++i) {
    const auto node = static_cast<NodeId>(i + d);
    edges.push_back({node, static_cast<NodeId>(node - 1), rate_per_side});
    edges.push_back({node, static_cast<NodeId>(node + 1), rate_per_side});
  }
  Query query;
  query.rho.assign(n, 0.0);
  query.rho[static_cast<std::size_t>(d)] = 1.0;
  query.targets = {0, static_cast<NodeId>(2 * d)};
  return LatticeProblem{Network::markov(n, edges), std::move(query)};
}

}  // namespace xfpt
