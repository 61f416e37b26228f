#include "xfpt/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "xfpt/asymptotics.hpp"
#include "xfpt/errors.hpp"
#include "xfpt/geodesic.hpp"
#include "xfpt/special.hpp"

namespace xfpt {

namespace {

constexpr double kSeriesThreshold = 30.0;  // mu*t below which the full series is summed

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1e-3)) {
    throw ValidationError("eps must lie in (0, 1e-3]");
  }
}

}  // namespace

struct ReducedSystem::Impl {
  // Transposed off-diagonal entries of P restricted to retained nodes:
  // col_ptr/row_idx/value describe, for each retained j, the entries
  // q(i,j)/mu over retained i.
  std::vector<std::size_t> col_ptr;
  std::vector<std::uint32_t> row_idx;
  std::vector<double> value;
  std::vector<double> keep_prob;    // 1 - q(i)/mu per retained node
  std::vector<double> absorb_prob;  // (rate from i into targets)/mu
  std::vector<double> rho;          // restricted initial vector
  std::vector<char> live;           // node can still reach the target
  double mu = 0.0;
  bool trapped = false;

  // Lazily extended jump-count caches, guarded by `lock`.
  mutable std::mutex lock;
  mutable std::vector<double> hit;       // hit[k] = P(hit within k jumps)
  mutable std::vector<double> absorbed;  // absorbed[k] = P(hit exactly at jump k)
  mutable std::vector<double> state;     // current mass vector v_k
  mutable bool exhausted = false;        // hit[] no longer changes beyond its end

  void extend(std::size_t upto) const;
  double poisson_mix_survival(double lt, double eps) const;
  double hit_cdf_series(double lt) const;
  double density_series(double lt) const;
  double density_window(double lt, double eps) const;
};

ReducedSystem::ReducedSystem(const Network& network, const Query& query)
    : impl_(std::make_unique<Impl>()) {
  if (network.mode() != Mode::Markov) {
    throw ValidationError("exact solver requires a Markov-mode network; use Monte Carlo for "
                          "general waiting times");
  }
  require_valid(network, query);

  const std::size_t n = network.node_count();
  std::vector<bool> is_target(n, false);
  for (NodeId t : query.targets) is_target[t] = true;

  std::vector<std::uint32_t> retained_index(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<NodeId> retained;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_target[i]) {
      retained_index[i] = static_cast<std::uint32_t>(retained.size());
      retained.push_back(static_cast<NodeId>(i));
    }
  }
  const std::size_t m = retained.size();

  impl_->mu = network.max_rate();
  if (impl_->mu <= 0.0) throw ValidationError("network has no transitions");

  impl_->keep_prob.assign(m, 1.0);
  impl_->absorb_prob.assign(m, 0.0);
  impl_->rho.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    impl_->keep_prob[j] = 1.0 - network.row_sum(retained[j]) / impl_->mu;
    impl_->rho[j] = query.rho[retained[j]];
  }

  // Count in-edges per retained node, then fill the transposed structure.
  std::vector<std::size_t> counts(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const NodeId u = retained[i];
    for (std::size_t s = 0; s < network.out_degree(u); ++s) {
      const auto e = network.out_edge(u, s);
      if (is_target[e.to]) {
        impl_->absorb_prob[i] += e.weight / impl_->mu;
      } else {
        ++counts[retained_index[e.to]];
      }
    }
  }
  impl_->col_ptr.assign(m + 1, 0);
  for (std::size_t j = 0; j < m; ++j) impl_->col_ptr[j + 1] = impl_->col_ptr[j] + counts[j];
  impl_->row_idx.resize(impl_->col_ptr[m]);
  impl_->value.resize(impl_->col_ptr[m]);
  std::vector<std::size_t> cursor(impl_->col_ptr.begin(), impl_->col_ptr.end() - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const NodeId u = retained[i];
    for (std::size_t s = 0; s < network.out_degree(u); ++s) {
      const auto e = network.out_edge(u, s);
      if (is_target[e.to]) continue;
      const std::size_t j = retained_index[e.to];
      impl_->row_idx[cursor[j]] = static_cast<std::uint32_t>(i);
      impl_->value[cursor[j]] = e.weight / impl_->mu;
      ++cursor[j];
    }
  }

  // Trapped mass: some retained node reachable from supp(rho) cannot reach
  // the target through retained nodes.
  {
    std::vector<bool> can_absorb(m, false);
    std::vector<std::uint32_t> stack;
    for (std::size_t j = 0; j < m; ++j) {
      if (impl_->absorb_prob[j] > 0.0) {
        can_absorb[j] = true;
        stack.push_back(static_cast<std::uint32_t>(j));
      }
    }
    while (!stack.empty()) {  // walk the transposed edges: predecessors of j
      const std::uint32_t j = stack.back();
      stack.pop_back();
      for (std::size_t s = impl_->col_ptr[j]; s < impl_->col_ptr[j + 1]; ++s) {
        const std::uint32_t i = impl_->row_idx[s];
        if (!can_absorb[i]) {
          can_absorb[i] = true;
          stack.push_back(i);
        }
      }
    }
    std::vector<bool> forward(m, false);
    for (std::size_t j = 0; j < m; ++j)
      if (impl_->rho[j] > 0.0) forward[j] = true;
    bool changed = true;
    while (changed) {  // forward reachability over retained edges
      changed = false;
      for (std::size_t j = 0; j < m; ++j) {
        if (forward[j]) continue;
        for (std::size_t s = impl_->col_ptr[j]; s < impl_->col_ptr[j + 1]; ++s) {
          if (forward[impl_->row_idx[s]]) {
            forward[j] = true;
            changed = true;
            break;
          }
        }
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (forward[j] && !can_absorb[j]) {
        impl_->trapped = true;
        break;
      }
    }
    impl_->live.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) impl_->live[j] = can_absorb[j] ? 1 : 0;
  }

  impl_->hit.assign(1, 0.0);
  impl_->absorbed.assign(1, 0.0);
  impl_->state = impl_->rho;
}

ReducedSystem::~ReducedSystem() = default;

double ReducedSystem::uniformization_rate() const { return impl_->mu; }

bool ReducedSystem::has_trapped_mass() const { return impl_->trapped; }

void ReducedSystem::Impl::extend(std::size_t upto) const {
  if (exhausted || hit.size() > upto) return;
  const std::size_t m = rho.size();
  std::vector<double> next(m);
  while (hit.size() <= upto && !exhausted) {
    double newly = 0.0;
    double reachable_mass = 0.0;
    for (std::size_t j = 0; j < m; ++j) newly += absorb_prob[j] * state[j];
    for (std::size_t j = 0; j < m; ++j) {
      double acc = keep_prob[j] * state[j];
      for (std::size_t s = col_ptr[j]; s < col_ptr[j + 1]; ++s) {
        acc += value[s] * state[row_idx[s]];
      }
      next[j] = acc;
      if (live[j]) reachable_mass += acc;
    }
    state.swap(next);
    absorbed.push_back(newly);
    hit.push_back(hit.back() + newly);
    // Mass on dead nodes can never absorb, so all future increments of hit
    // are bounded by reachable_mass; freeze the cache once those increments
    // cannot move hit at double precision.
    if (reachable_mass <= 1e-310 || reachable_mass <= 1e-17 * hit.back()) {
      exhausted = true;
    }
  }
}

namespace {

// Largest jump index the Poisson(lt) window can need at absolute accuracy ~1e-16.
std::size_t window_upper(double lt) {
  const double sd = std::sqrt(std::max(lt, 1.0));
  return static_cast<std::size_t>(lt + 10.0 * sd + 60.0);
}

}  // namespace

// S(t) = sum_k Pois(lt; k) (1 - hit[k]) over a window around the Poisson mode.
double ReducedSystem::Impl::poisson_mix_survival(double lt, double eps) const {
  const std::size_t mode = static_cast<std::size_t>(lt);
  auto c_of = [&](std::size_t k) {
    return 1.0 - (k < hit.size() ? hit[k] : hit.back());
  };
  const double log_p_mode =
      static_cast<double>(mode) * std::log(lt) - lt - special::log_factorial(mode);
  const double p_mode = std::exp(log_p_mode);

  double total = p_mode * c_of(mode);
  // Downward from the mode; remaining lower tail <= p_k * q/(1-q), q = k/lt.
  double p = p_mode;
  for (std::size_t k = mode; k-- > 0;) {
    p *= static_cast<double>(k + 1) / lt;
    total += p * c_of(k);
    const double q = static_cast<double>(k) / lt;
    if (p * q / (1.0 - q) < 0.25 * eps) break;
    if (k == 0) break;
  }
  // Upward; remaining upper tail <= p_k * q/(1-q), q = lt/(k+2).
  p = p_mode;
  for (std::size_t k = mode + 1;; ++k) {
    p *= lt / static_cast<double>(k);
    total += p * c_of(k);
    const double q = lt / static_cast<double>(k + 2);
    if (q < 1.0 && p * q / (1.0 - q) < 0.25 * eps) break;
    if (p == 0.0) break;
  }
  return std::min(1.0, total);
}

// F(t) summed term by term from k = 0; all terms positive, so the result is
// relative-accurate, which is what powers S^N in the extreme regime.
double ReducedSystem::Impl::hit_cdf_series(double lt) const {
  double p = std::exp(-lt);  // Pois(lt; 0)
  double acc = 0.0;
  const std::size_t hard_cap = window_upper(lt) + 80;
  for (std::size_t k = 1; k <= hard_cap; ++k) {
    p *= lt / static_cast<double>(k);
    const double h = k < hit.size() ? hit[k] : hit.back();
    acc += p * h;
    if (k > static_cast<std::size_t>(lt)) {
      const double q = lt / static_cast<double>(k + 1);
      // Remaining terms bounded by the Poisson tail times h <= 1.
      if (p * q / (1.0 - q) < std::max(1e-18 * acc, 1e-320)) break;
    }
  }
  return acc;
}

ReducedSystem::Eval ReducedSystem::eval(double t, double eps) const {
  check_eps(eps);
  if (t < 0.0) throw ValidationError("survival: t must be nonnegative");
  if (t == 0.0) return Eval{1.0, 0.0, 0.0};
  const double lt = impl_->mu * t;

  std::lock_guard<std::mutex> guard(impl_->lock);
  impl_->extend(window_upper(lt) + 80);

  if (lt <= kSeriesThreshold) {
    const double F = impl_->hit_cdf_series(lt);
    return Eval{1.0 - F, F, std::log1p(-F)};
  }
  const double S = impl_->poisson_mix_survival(lt, std::min(eps, 1e-13));
  if (S <= 0.0) return Eval{0.0, 1.0, -std::numeric_limits<double>::infinity()};
  return Eval{S, 1.0 - S, std::log(S)};
}

double ReducedSystem::Impl::density_series(double lt) const {
  double p = std::exp(-lt);
  double acc = p * (absorbed.size() > 1 ? absorbed[1] : 0.0);
  const std::size_t hard_cap = window_upper(lt) + 80;
  for (std::size_t k = 1; k <= hard_cap; ++k) {
    p *= lt / static_cast<double>(k);
    const double a = k + 1 < absorbed.size() ? absorbed[k + 1] : 0.0;
    acc += p * a;
    if (k > static_cast<std::size_t>(lt)) {
      const double q = lt / static_cast<double>(k + 1);
      if (p * q / (1.0 - q) < std::max(1e-18 * acc, 1e-320)) break;
    }
  }
  return acc;
}

double ReducedSystem::Impl::density_window(double lt, double eps) const {
  const std::size_t mode = static_cast<std::size_t>(lt);
  auto a_of = [&](std::size_t k) { return k < absorbed.size() ? absorbed[k] : 0.0; };
  const double p_mode =
      std::exp(static_cast<double>(mode) * std::log(lt) - lt - special::log_factorial(mode));
  double total = p_mode * a_of(mode + 1);
  double p = p_mode;
  for (std::size_t k = mode; k-- > 0;) {
    p *= static_cast<double>(k + 1) / lt;
    total += p * a_of(k + 1);
    const double q = static_cast<double>(k) / lt;
    if (p * q / (1.0 - q) < 0.25 * eps) break;
    if (k == 0) break;
  }
  p = p_mode;
  for (std::size_t k = mode + 1;; ++k) {
    p *= lt / static_cast<double>(k);
    total += p * a_of(k + 1);
    const double q = lt / static_cast<double>(k + 2);
    if (q < 1.0 && p * q / (1.0 - q) < 0.25 * eps) break;
    if (p == 0.0) break;
  }
  return total;
}

double ReducedSystem::fpt_density(double t, double eps) const {
  check_eps(eps);
  if (t < 0.0) throw ValidationError("fpt_density: t must be nonnegative");
  const double lt = impl_->mu * t;

  std::lock_guard<std::mutex> guard(impl_->lock);
  impl_->extend(window_upper(lt) + 80);
  if (t == 0.0) return impl_->mu * (impl_->absorbed.size() > 1 ? impl_->absorbed[1] : 0.0);
  if (lt <= kSeriesThreshold) return impl_->mu * impl_->density_series(lt);
  return impl_->mu * impl_->density_window(lt, std::min(eps, 1e-13));
}

double survival(const Network& network, const Query& query, double t, double eps) {
  return ReducedSystem(network, query).survival(t, eps);
}

double fpt_density(const Network& network, const Query& query, double t, double eps) {
  return ReducedSystem(network, query).fpt_density(t, eps);
}

double extreme_cdf(const ReducedSystem& system, std::uint64_t searchers, int k, double t,
                   double eps) {
  if (searchers < 1) throw ValidationError("extreme_cdf: N must be >= 1");
  if (k < 1 || static_cast<std::uint64_t>(k) > searchers) {
    throw ValidationError("extreme_cdf: k must satisfy 1 <= k <= N");
  }
  const auto ev = system.eval(t, eps);
  const double n = static_cast<double>(searchers);
  if (k == 1) return -std::expm1(n * ev.log_survival);

  if (ev.hit_cdf <= 0.0) return 0.0;
  if (ev.survival <= 0.0) return 1.0;
  const double log_f = std::log(ev.hit_cdf);
  const double log_s = ev.log_survival;
  auto log_term = [&](std::uint64_t j) {
    return special::log_binomial(searchers, j) + static_cast<double>(j) * log_f +
           static_cast<double>(searchers - j) * log_s;
  };

  if (n * ev.hit_cdf < static_cast<double>(k)) {
    // Rare-hit side: P(T_{k,N} <= t) = sum_{j >= k}, terms decay fast.
    double acc = 0.0;
    for (std::uint64_t j = static_cast<std::uint64_t>(k); j <= searchers; ++j) {
      const double term = std::exp(log_term(j));
      acc += term;
      if (term < 1e-17 * acc) break;
    }
    return acc;
  }
  double upper = 0.0;  // P(T_{k,N} > t) = sum_{j < k}
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(k); ++j) {
    upper += std::exp(log_term(j));
  }
  return std::max(0.0, 1.0 - upper);
}

double extreme_cdf(const Network& network, const Query& query, std::uint64_t searchers, int k,
                   double t, double eps) {
  return extreme_cdf(ReducedSystem(network, query), searchers, k, t, eps);
}

double extreme_density(const ReducedSystem& system, std::uint64_t searchers, int k, double t,
                       double eps) {
  const auto ev = system.eval(t, eps);
  const double f = system.fpt_density(t, eps);
  if (f <= 0.0) return 0.0;
  const double n = static_cast<double>(searchers);
  if (k == 1) return n * std::exp((n - 1.0) * ev.log_survival) * f;
  if (ev.hit_cdf <= 0.0 || ev.survival <= 0.0) return 0.0;
  const double log_density = std::log(n) + special::log_binomial(searchers - 1, k - 1) +
                             (k - 1.0) * std::log(ev.hit_cdf) +
                             (n - static_cast<double>(k)) * ev.log_survival + std::log(f);
  return std::exp(log_density);
}

double extreme_moment_exact(const Network& network, const Query& query, std::uint64_t searchers,
                            int k, double m, double eps) {
  check_eps(eps);
  if (!(m > 0.0)) throw ValidationError("extreme_moment_exact: m must be positive");
  if (searchers < 1) throw ValidationError("extreme_moment_exact: N must be >= 1");
  if (k < 1 || static_cast<std::uint64_t>(k) > searchers) {
    throw ValidationError("extreme_moment_exact: k must satisfy 1 <= k <= N");
  }
  const ReducedSystem system(network, query);
  if (system.has_trapped_mass()) {
    throw NumericalError("infinite moment: part of the initial mass can never reach the target");
  }

  // Anchor the integration grid at the asymptotic scale of T_{k,N}.
  const auto summary = geodesic_summary(network, query);
  const double scale =
      std::exp(-(summary.log_A + std::log(static_cast<double>(searchers))) / summary.d);
  const double n = static_cast<double>(searchers);

  auto tail_prob = [&](double t) {
    const auto ev = system.eval(t, 1e-13);
    if (k == 1) return std::exp(n * ev.log_survival);
    if (ev.survival <= 0.0) return 0.0;
    if (ev.hit_cdf <= 0.0) return 1.0;
    const double log_f = std::log(ev.hit_cdf);
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      acc += std::exp(special::log_binomial(searchers, static_cast<std::uint64_t>(j)) +
                      j * log_f + (n - j) * ev.log_survival);
    }
    return std::min(1.0, acc);
  };

  // Substituting t = scale * e^x removes the t^(m-1) endpoint singularity:
  //   integral = int m t^m P(T_{k,N} > t) dx.
  auto integrand = [&](double x) {
    const double t = scale * std::exp(x);
    return m * std::pow(t, m) * tail_prob(t);
  };

  using boost::math::quadrature::gauss_kronrod;
  const double x_lo = (std::log(eps) - 5.0) / m;
  double total = 0.0;
  double x = x_lo;
  for (int seg = 0; seg < 800; ++seg) {
    const double piece =
        gauss_kronrod<double, 15>::integrate(integrand, x, x + 1.0, 12, 0.5 * eps);
    total += piece;
    x += 1.0;
    if (x > 2.0 && piece <= 0.1 * eps * total) return total;
  }
  throw NumericalError("extreme_moment_exact: tail integral did not converge");
}

SurvivalCurve survival_curve(const Network& network, const Query& query, double t0, double t1,
                             std::size_t steps, double eps) {
  check_eps(eps);
  if (!(t1 >= t0) || t0 < 0.0) throw ValidationError("survival_curve: need 0 <= t0 <= t1");
  if (steps == 0) throw ValidationError("survival_curve: need at least one step");
  const ReducedSystem system(network, query);
  SurvivalCurve curve;
  curve.trunc_error = eps;
  curve.grid.reserve(steps + 1);
  curve.values.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(steps);
    curve.grid.push_back(t);
    curve.values.push_back(system.survival(t, eps));
  }
  return curve;
}

}  // namespace xfpt
