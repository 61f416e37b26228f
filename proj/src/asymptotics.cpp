#include "xfpt/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "xfpt/errors.hpp"

namespace xfpt {

namespace {

double law_shape(const GeodesicSummary& summary) { return summary.exponent(); }

// (A N)^(-1/shape), evaluated in log space.
double law_scale(const GeodesicSummary& summary, std::uint64_t searchers) {
  const double shape = law_shape(summary);
  return std::exp(-(summary.log_A + std::log(static_cast<double>(searchers))) / shape);
}

}  // namespace

ExtremeLaw::ExtremeLaw(const GeodesicSummary& summary, std::uint64_t searchers, int k)
    : t_min_(summary.t_min),
      shape_(law_shape(summary)),
      scale_(law_scale(summary, searchers)),
      k_(k) {
  if (searchers < 1) throw std::domain_error("ExtremeLaw: N must be >= 1");
  if (k < 1) throw std::domain_error("ExtremeLaw: k must be >= 1");
  law_ = special::GenGamma{scale_, shape_, static_cast<double>(k)};
}

double ExtremeLaw::cdf(double t) const { return law_.cdf(t - t_min_); }

double ExtremeLaw::pdf(double t) const { return law_.pdf(t - t_min_); }

double ExtremeLaw::quantile(double p) const { return t_min_ + law_.quantile(p); }

double ExtremeLaw::moment(double m) const { return law_.moment(m); }

MomentReport asymptotic_moment(const GeodesicSummary& summary, std::uint64_t searchers, int k,
                               double m) {
  if (searchers < 1) throw std::domain_error("asymptotic_moment: N must be >= 1");
  if (k < 1) throw std::domain_error("asymptotic_moment: k must be >= 1");
  if (!(m > 0.0)) throw std::domain_error("asymptotic_moment: moment order must be positive");

  const double shape = law_shape(summary);
  const double log_scale = -(summary.log_A + std::log(static_cast<double>(searchers))) / shape;
  const double kk = static_cast<double>(k);
  auto shifted_moment = [&](double order) {
    return std::exp(special::log_gamma(kk + order / shape) - special::log_gamma(kk) +
                    order * log_scale);
  };

  MomentReport report;
  report.m = m;
  report.value = shifted_moment(m);
  report.mean = shifted_moment(1.0);
  report.variance = shifted_moment(2.0) - report.mean * report.mean;
  report.shifted = summary.t_min > 0.0;
  report.unshifted_mean_first_order = summary.t_min + report.mean;
  return report;
}

ShortTimeLaw short_time_coefficient(const GeodesicSummary& summary) {
  return ShortTimeLaw{summary.A, summary.exponent()};
}

double regime_threshold(const GeodesicSummary& summary, const Network& network) {
  if (network.mode() != Mode::Markov) {
    throw ValidationError("regime_threshold: not available for general waiting times");
  }
  const double log_n_star = special::log_factorial(static_cast<std::uint64_t>(summary.d)) +
                            summary.d * std::log(network.max_rate()) - summary.log_lambda;
  return std::exp(log_n_star);
}

}  // namespace xfpt
