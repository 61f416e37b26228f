#ifndef XFPT_EXACT_HPP
#define XFPT_EXACT_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "xfpt/network.hpp"

namespace xfpt {

// Target-deleted generator of a Markov-mode network, prepared for repeated
// survival evaluations by uniformization. Let mu be the uniformization rate
// and P = I + Q~/mu the substochastic jump matrix of the retained nodes. The
// mass absorbed at jump number j and the cumulative hit probability
//   h_j = P(target hit within j jumps)
// depend only on the network, so they are cached once and every S(t)
// evaluation reduces to a Poisson-weighted scalar sum:
//   S(t) = sum_k Pois(mu t; k) (1 - h_k).
// The cache grows lazily and is safe to share across threads.
class ReducedSystem {
 public:
  ReducedSystem(const Network& network, const Query& query);
  ~ReducedSystem();
  ReducedSystem(const ReducedSystem&) = delete;
  ReducedSystem& operator=(const ReducedSystem&) = delete;

  struct Eval {
    double survival;      // S(t), absolute error <= eps
    double hit_cdf;       // F(t) = 1 - S(t), relative-accurate when F is small
    double log_survival;  // log S(t) via log1p(-F)
  };
  Eval eval(double t, double eps) const;

  double survival(double t, double eps) const { return eval(t, eps).survival; }
  double hit_cdf(double t, double eps) const { return eval(t, eps).hit_cdf; }
  double log_survival(double t, double eps) const { return eval(t, eps).log_survival; }

  // -dS/dt, assembled from the same absorbed-mass cache.
  double fpt_density(double t, double eps) const;

  double uniformization_rate() const;
  // True when a positive fraction of the walk can wander forever without
  // hitting the target; every moment of tau is then infinite.
  bool has_trapped_mass() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// P(tau > t) with absolute error <= eps. Markov mode only; eps in (0, 1e-3].
double survival(const Network& network, const Query& query, double t, double eps);

// P(T_{k,N} <= t). The k = 1 case is computed as -expm1(N log S); for k > 1
// the binomial order-statistic sum is evaluated from whichever tail
// converges without cancellation.
double extreme_cdf(const Network& network, const Query& query, std::uint64_t searchers, int k,
                   double t, double eps = 1e-13);
double extreme_cdf(const ReducedSystem& system, std::uint64_t searchers, int k, double t,
                   double eps = 1e-13);

// E[(T_{k,N})^m] by adaptive quadrature of the tail integral
//   int_0^inf m t^(m-1) P(T_{k,N} > t) dt,
// on a logarithmic grid anchored at the asymptotic scale (A N)^(-1/d).
// Relative tolerance eps. Throws NumericalError when the moment is infinite.
double extreme_moment_exact(const Network& network, const Query& query, std::uint64_t searchers,
                            int k, double m, double eps);

// Density of tau at t.
double fpt_density(const Network& network, const Query& query, double t, double eps);

// Density of T_{k,N} at t:  N binom(N-1, k-1) F^(k-1) S^(N-k) f(t).
double extreme_density(const ReducedSystem& system, std::uint64_t searchers, int k, double t,
                       double eps = 1e-13);

struct SurvivalCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double trunc_error = 0.0;  // uniform absolute bound
};

// S(t) on an inclusive linear grid from t0 to t1 with `steps` intervals.
SurvivalCurve survival_curve(const Network& network, const Query& query, double t0, double t1,
                             std::size_t steps, double eps);

}  // namespace xfpt

#endif  // XFPT_EXACT_HPP
