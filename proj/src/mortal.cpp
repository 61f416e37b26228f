#include "xfpt/mortal.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "xfpt/errors.hpp"
#include "xfpt/exact.hpp"
#include "xfpt/special.hpp"

namespace xfpt {

double conditional_moment_exact(const Network& network, const Query& query,
                                const MortalQuery& mortal, double eps) {
  if (!(mortal.gamma > 0.0)) throw ValidationError("mortal: gamma must be positive");
  if (!(mortal.m > 0.0)) throw ValidationError("mortal: moment order must be positive");
  if (!(eps > 0.0 && eps <= 1e-3)) throw ValidationError("mortal: eps must lie in (0, 1e-3]");

  const ReducedSystem system(network, query);
  const double gamma = mortal.gamma;
  const double m = mortal.m;
  const double inner_eps = std::max(eps / 10.0, 1e-14);

  auto cdf = [&](double t) { return system.hit_cdf(t, inner_eps); };

  using boost::math::quadrature::gauss_kronrod;
  const double tol = 0.1 * eps;
  // e^(-gamma t) confines the integrands to t <~ 40/gamma; integrate a bit
  // further so slowly-absorbing networks keep full accuracy.
  const double upper = 60.0 / gamma;
  auto integrate = [&](auto&& f) {
    double total = 0.0;
    double lo = 0.0;
    for (double hi = upper; hi <= 16.0 * upper; hi *= 2.0) {
      const double piece = gauss_kronrod<double, 15>::integrate(f, lo, hi, 12, tol);
      total += piece;
      lo = hi;
      if (std::abs(piece) <= tol * std::abs(total)) break;
    }
    return total;
  };

  const double denom = integrate([&](double t) { return gamma * std::exp(-gamma * t) * cdf(t); });
  if (!(denom > 1e-300)) {
    throw NumericalError("conditioning event numerically null: P(tau < sigma) underflows");
  }
  const double weighted = integrate(
      [&](double t) { return std::pow(t, m) * gamma * std::exp(-gamma * t) * cdf(t); });
  const double boundary = integrate([&](double t) {
    if (t <= 0.0) return 0.0;  // t^(m-1) blows up for m < 1; F(0) = 0 wins
    return m * std::pow(t, m - 1.0) * std::exp(-gamma * t) * cdf(t);
  });
  return weighted / denom - boundary / denom;
}

double conditional_moment_asymptotic(const GeodesicSummary& summary, const MortalQuery& mortal) {
  if (!(mortal.gamma > 0.0)) throw ValidationError("mortal: gamma must be positive");
  if (!(mortal.m > 0.0)) throw ValidationError("mortal: moment order must be positive");
  const double d = summary.exponent();
  const double m = mortal.m;
  if (summary.t_min > 0.0) {
    return std::pow(summary.t_min, m) +
           d * m / mortal.gamma * std::pow(summary.t_min, m - 1.0);
  }
  return std::exp(special::log_gamma(d + m) - special::log_gamma(d) -
                  m * std::log(mortal.gamma));
}

}  // namespace xfpt
