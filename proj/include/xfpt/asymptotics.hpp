#ifndef XFPT_ASYMPTOTICS_HPP
#define XFPT_ASYMPTOTICS_HPP

#include <cstdint>

#include "xfpt/geodesic.hpp"
#include "xfpt/network.hpp"
#include "xfpt/special.hpp"

namespace xfpt {

// Limiting law of the k-th fastest first passage time out of N searchers:
//   T_{k,N} ~ t_min + (A N)^(-1/shape) * genGamma(1, shape, k),
// with shape = d * r (shape = d for Markov networks, where r = 1). This is
// the large-N approximation evaluated at finite N; it is labeled
// "asymptotic" wherever it is emitted to keep it distinct from exact
// finite-N laws.
class ExtremeLaw {
 public:
  ExtremeLaw(const GeodesicSummary& summary, std::uint64_t searchers, int k);

  double cdf(double t) const;
  double pdf(double t) const;
  double quantile(double p) const;
  // m-th moment of the shifted variable T_{k,N} - t_min.
  double moment(double m) const;

  double scale() const { return scale_; }
  double t_min() const { return t_min_; }
  double shape() const { return shape_; }
  int k() const { return k_; }

 private:
  double t_min_;
  double shape_;
  double scale_;
  int k_;
  special::GenGamma law_;
};

struct MomentReport {
  double m = 1.0;
  double value = 0.0;     // E[(T_{k,N} - t_min)^m]
  double mean = 0.0;      // first moment of the shifted variable
  double variance = 0.0;  // variance (shift-invariant)
  bool shifted = false;   // true when t_min > 0, i.e. value is for T - t_min
  // First-order convenience: t_min + E[T - t_min]; exact only to leading order.
  double unshifted_mean_first_order = 0.0;
};

// Closed-form asymptotic moments: value = Gamma(k + m/shape)/Gamma(k) /
// (A N)^(m/shape).
MomentReport asymptotic_moment(const GeodesicSummary& summary, std::uint64_t searchers, int k,
                               double m);

struct ShortTimeLaw {
  double coefficient = 0.0;  // A
  double exponent = 0.0;     // d (Markov) or d*r (General)
};

// Coefficient and exponent of P(tau <= t_min + t) ~ A t^exponent.
ShortTimeLaw short_time_coefficient(const GeodesicSummary& summary);

// N* = d! * max_rate^d / Lambda: the asymptotics are trustworthy for N >> N*.
// Markov networks only; throws ValidationError in General mode.
double regime_threshold(const GeodesicSummary& summary, const Network& network);

}  // namespace xfpt

#endif  // XFPT_ASYMPTOTICS_HPP
