#ifndef XFPT_SPECIAL_HPP
#define XFPT_SPECIAL_HPP

#include <cstdint>

// Small wrappers around the special functions the library leans on, plus the
// Weibull / generalized-Gamma laws used for extreme first-passage statistics.

namespace xfpt::special {

double log_gamma(double x);           // log Gamma(x), x > 0
double log_factorial(std::uint64_t n);
double gamma_q(double a, double x);   // regularized upper incomplete gamma Q(a,x)
double gamma_p(double a, double x);   // regularized lower incomplete gamma P(a,x)
double log_binomial(std::uint64_t n, std::uint64_t k);

// Solves Q(a, x) = q for x by bisection, to 1e-12 relative.
double gamma_q_inverse(double a, double q);

// Short-time coefficient of a sum of independent nonnegative variables whose
// CDFs behave like lambda_i * t^r near zero: the sum's CDF behaves like
//   (Gamma(r+1)^d / Gamma(d*r+1)) * prod(lambda_i) * t^(d*r).
// Returns the full coefficient (including the product of lambdas).
double convolution_coefficient(const double* lambdas, int count, double r);

// Weibull(scale, shape): survival exp(-(z/scale)^shape), z >= 0.
struct Weibull {
  double scale = 1.0;
  double shape = 1.0;
  double cdf(double z) const;
  double pdf(double z) const;
  double quantile(double p) const;      // p in [0,1)
  double moment(double m) const;        // E[Z^m] = scale^m * Gamma(1+m/shape)
};

// Generalized Gamma genGamma(scale, shape, k): survival
// Gamma(k, (z/scale)^shape) / Gamma(k). k = 1 reduces to Weibull.
struct GenGamma {
  double scale = 1.0;
  double shape = 1.0;
  double k = 1.0;
  double cdf(double z) const;
  double pdf(double z) const;
  double quantile(double p) const;      // bisection on gamma_q, 1e-12 relative
  double moment(double m) const;        // scale^m * Gamma(k+m/shape)/Gamma(k)
};

}  // namespace xfpt::special

#endif  // XFPT_SPECIAL_HPP
