#ifndef XFPT_MORTAL_HPP
#define XFPT_MORTAL_HPP

#include "xfpt/geodesic.hpp"
#include "xfpt/network.hpp"

namespace xfpt {

// Searcher with an independent Exponential(gamma) inactivation time sigma;
// statistics are conditioned on finding the target first (tau < sigma).
struct MortalQuery {
  double gamma = 1.0;  // inactivation rate (1/time)
  double m = 1.0;      // moment order
};

// E[tau^m | tau < sigma] as a ratio of Laplace-type integrals of the FPT
// CDF F(t):
//   ( int t^m gamma e^(-gamma t) F dt - int m t^(m-1) e^(-gamma t) F dt )
//   / int gamma e^(-gamma t) F dt.
// F comes from the exact solver with tolerance eps/10, since the ratio of
// two small integrals amplifies error. Markov mode only.
double conditional_moment_exact(const Network& network, const Query& query,
                                const MortalQuery& mortal, double eps);

// Fast-inactivation limit:
//   t_min = 0:  Gamma(d + m)/Gamma(d) / gamma^m, with d the short-time
//               exponent of P(tau <= t_min + t) ~ A t^d;
//   t_min > 0:  t_min^m + (d m / gamma) t_min^(m-1).
double conditional_moment_asymptotic(const GeodesicSummary& summary, const MortalQuery& mortal);

}  // namespace xfpt

#endif  // XFPT_MORTAL_HPP
