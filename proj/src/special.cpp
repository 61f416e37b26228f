#include "xfpt/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "xfpt/errors.hpp"

namespace xfpt::special {

double log_gamma(double x) { return boost::math::lgamma(x); }

double log_factorial(std::uint64_t n) { return boost::math::lgamma(static_cast<double>(n) + 1.0); }

double gamma_q(double a, double x) { return boost::math::gamma_q(a, x); }

double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double gamma_q_inverse(double a, double q) {
  if (a <= 0.0) throw std::domain_error("gamma_q_inverse: a must be positive");
  if (q <= 0.0) throw std::domain_error("gamma_q_inverse: q must be in (0,1]");
  if (q >= 1.0) return 0.0;
  // Bracket the root: Q(a,x) decreases from 1 at x=0 to 0 at infinity.
  double lo = 0.0;
  double hi = a + 1.0;
  while (gamma_q(a, hi) > q) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("gamma_q_inverse: bracketing failed");
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_q(a, mid) > q)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double convolution_coefficient(const double* lambdas, int count, double r) {
  if (count < 1) throw std::domain_error("convolution_coefficient: empty product");
  if (r <= 0.0) throw std::domain_error("convolution_coefficient: r must be positive");
  double log_prod = 0.0;
  for (int i = 0; i < count; ++i) {
    if (lambdas[i] <= 0.0) throw std::domain_error("convolution_coefficient: lambda must be positive");
    log_prod += std::log(lambdas[i]);
  }
  const double d = static_cast<double>(count);
  return std::exp(d * log_gamma(r + 1.0) - log_gamma(d * r + 1.0) + log_prod);
}

double Weibull::cdf(double z) const {
  if (z <= 0.0) return 0.0;
  return -std::expm1(-std::pow(z / scale, shape));
}

double Weibull::pdf(double z) const {
  if (z <= 0.0) return 0.0;
  const double u = std::pow(z / scale, shape);
  return shape / z * u * std::exp(-u);
}

double Weibull::quantile(double p) const {
  if (p < 0.0 || p >= 1.0) throw std::domain_error("Weibull::quantile: p must be in [0,1)");
  if (p == 0.0) return 0.0;
  return scale * std::pow(-std::log1p(-p), 1.0 / shape);
}

double Weibull::moment(double m) const {
  return std::exp(m * std::log(scale) + log_gamma(1.0 + m / shape));
}

double GenGamma::cdf(double z) const {
  if (z <= 0.0) return 0.0;
  return gamma_p(k, std::pow(z / scale, shape));
}

double GenGamma::pdf(double z) const {
  if (z <= 0.0) return 0.0;
  const double x = z / scale;
  const double log_pdf = std::log(shape / scale) + (shape * k - 1.0) * std::log(x) -
                         std::pow(x, shape) - log_gamma(k);
  return std::exp(log_pdf);
}

double GenGamma::quantile(double p) const {
  if (p < 0.0 || p >= 1.0) throw std::domain_error("GenGamma::quantile: p must be in [0,1)");
  if (p == 0.0) return 0.0;
  const double u = gamma_q_inverse(k, 1.0 - p);
  return scale * std::pow(u, 1.0 / shape);
}

double GenGamma::moment(double m) const {
  return std::exp(m * std::log(scale) + log_gamma(k + m / shape) - log_gamma(k));
}

}  // namespace xfpt::special
