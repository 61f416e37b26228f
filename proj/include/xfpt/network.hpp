#ifndef XFPT_NETWORK_HPP
#define XFPT_NETWORK_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace xfpt {

using NodeId = std::uint32_t;

// Per-edge waiting-time distribution for General-mode networks. Every kind
// exposes the triple (t0, lambda, r) describing the CDF near its lower
// support point: F(t0 + s) ~ lambda * s^r as s -> 0+, with F(t) = 0 for
// t <= t0.
class WaitingSpec {
 public:
  enum class Kind { Exponential, ShiftedStretched, Lomax };

  static WaitingSpec exponential(double rate);
  // CDF 1 - exp(-c (t - t0)^r) for t > t0.
  static WaitingSpec shifted_stretched(double t0, double c, double r);
  // Density alpha beta^alpha / (t + beta)^(1+alpha); heavy power-law tail.
  static WaitingSpec lomax(double alpha, double beta);

  Kind kind() const { return kind_; }
  double t0() const;
  double lambda() const;
  double r() const;

  double cdf(double t) const;
  double quantile(double u) const;  // inverse CDF, u in [0,1)

  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double param_c() const { return c_; }

 private:
  WaitingSpec(Kind kind, double a, double b, double c) : kind_(kind), a_(a), b_(b), c_(c) {}
  Kind kind_;
  double a_, b_, c_;
};

struct MarkovEdge {
  NodeId from;
  NodeId to;
  double rate;
};

struct GeneralEdge {
  NodeId from;
  NodeId to;
  double prob;
  WaitingSpec waiting;
};

enum class Mode { Markov, General };

// Finite directed network, immutable after construction. Markov mode stores
// the off-diagonal generator entries q(i,j) > 0; the diagonal -q(i) is
// implicit, so rows sum to zero by construction. General mode stores the
// jump chain pi(i,j) plus a waiting-time spec per edge; all edges must share
// one global short-time exponent r.
class Network {
 public:
  // Markov builder merges parallel edges by summing their rates.
  static Network markov(std::size_t node_count, const std::vector<MarkovEdge>& edges);
  // General builder rejects parallel edges (no defined merge for waiting specs).
  static Network general(std::size_t node_count, const std::vector<GeneralEdge>& edges);

  Mode mode() const { return mode_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return to_.size(); }

  struct OutEdge {
    NodeId to;
    double weight;  // rate (Markov) or jump probability (General)
    const WaitingSpec* waiting;  // null in Markov mode
  };

  std::size_t out_degree(NodeId i) const { return row_ptr_[i + 1] - row_ptr_[i]; }
  OutEdge out_edge(NodeId i, std::size_t slot) const;

  // Total exit rate q(i) in Markov mode; total jump probability in General.
  double row_sum(NodeId i) const { return row_sum_[i]; }

  // max_i q(i); Markov mode only.
  double max_rate() const;

  // Jump-chain view of a Markov network: pi(i,j) = q(i,j)/q(i) with waiting
  // time Exponential(q(i)). Absorbing nodes keep no outgoing edges.
  Network as_general() const;

  // Global short-time exponent r shared by all edges (1 in Markov mode).
  double waiting_exponent() const { return waiting_exponent_; }

 private:
  Network() = default;

  Mode mode_ = Mode::Markov;
  std::size_t node_count_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<NodeId> to_;
  std::vector<double> weight_;
  std::vector<WaitingSpec> waiting_;  // parallel to weight_, General only
  std::vector<double> row_sum_;
  double waiting_exponent_ = 1.0;
};

// Initial distribution plus target set.
struct Query {
  std::vector<double> rho;  // dense over nodes, nonnegative, sums to 1
  std::vector<NodeId> targets;

  bool is_target(NodeId i) const;
};

struct ValidationIssue {
  std::string code;    // stable machine-readable identifier
  std::string detail;  // human-readable location/explanation
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

// Checks the standing assumptions: rho is a probability vector, the walk
// cannot start on the target, some target is reachable from supp(rho), and
// mode-specific row-sum conditions hold.
ValidationReport validate(const Network& network, const Query& query);

// Throws ValidationError when validate() reports any issue.
void require_valid(const Network& network, const Query& query);

// Nodes reachable from `sources` along positive-weight edges.
std::vector<bool> reachable_from(const Network& network, std::span<const NodeId> sources);

// 1-d lattice on {-d,...,d} with jump rates q(i, i+-1) = rate_per_side and
// absorbing boundary; query starts at 0 with targets {-d, +d}. Node i of the
// lattice maps to index i + d.
struct LatticeProblem {
  Network network;
  Query query;
};
LatticeProblem make_interval_lattice(int d, double rate_per_side);

}  // namespace xfpt

#endif  // XFPT_NETWORK_HPP
