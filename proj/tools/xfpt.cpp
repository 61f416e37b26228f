// xfpt: extreme first-passage-time statistics for random walks on networks.
//
// Subcommands: analyze, theory, exact, simulate, mortal, ensemble.
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 64 usage.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xfpt/asymptotics.hpp"
#include "xfpt/ensembles.hpp"
#include "xfpt/errors.hpp"
#include "xfpt/exact.hpp"
#include "xfpt/geodesic.hpp"
#include "xfpt/graph_io.hpp"
#include "xfpt/monte_carlo.hpp"
#include "xfpt/mortal.hpp"
#include "xfpt/network.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

// All numeric output is rounded to 12 significant digits.
double sig12(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return std::strtod(buffer, nullptr);
}

std::string csv12(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::ostringstream buffer;
  buffer << in.rdbuf();
  char hex[32];
  std::snprintf(hex, sizeof(hex), "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a(buffer.str())));
  return hex;
}

struct ManifestClock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  json finish(const std::string& command_line, const std::string& input_hash,
              std::optional<std::uint64_t> seed) const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest{{"command", command_line},
                  {"input_hash", input_hash},
                  {"version", kVersion},
                  {"wall_time_s", sig12(wall)}};
    manifest["seed"] = seed ? json(*seed) : json(nullptr);
    return manifest;
  }
};

std::string join_argv(int argc, char** argv) {
  std::string joined;
  for (int i = 0; i < argc; ++i) {
    if (i) joined += ' ';
    joined += argv[i];
  }
  return joined;
}

// Seed precedence: --seed flag > XFPT_SEED environment variable > 0.
std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t flag_value) {
  if (seed_opt != nullptr && seed_opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("XFPT_SEED")) {
    char* end = nullptr;
    const auto parsed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      throw xfpt::ValidationError("XFPT_SEED must be a nonnegative integer");
    }
    return parsed;
  }
  return flag_value;
}

std::vector<std::uint64_t> parse_n_grid(const std::string& text) {
  // a:b:points, log-spaced inclusive.
  double lo = 0, hi = 0;
  int points = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &points) != 3 || lo < 1 || hi < lo ||
      points < 1) {
    throw CLI::ValidationError("--Ngrid", "expected a:b:points with 1 <= a <= b, points >= 1");
  }
  std::vector<std::uint64_t> grid;
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const auto n = static_cast<std::uint64_t>(
        std::llround(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))));
    if (grid.empty() || grid.back() != n) grid.push_back(n);
  }
  return grid;
}

json estimate_to_json(const xfpt::McEstimate& est) {
  return {{"mean", sig12(est.mean)},
          {"variance", sig12(est.variance)},
          {"stderr", sig12(est.stderr_value)},
          {"count", est.count},
          {"censored_fraction", sig12(est.censored_fraction)}};
}

int run(int argc, char** argv) {
  const std::string command_line = join_argv(argc, argv);
  ManifestClock clock;

  CLI::App app{"Extreme first-passage-time statistics on finite directed networks"};
  app.name("xfpt");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- analyze ----------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "Geodesic summary (t_min, d, Lambda, A) of a graph");
  std::string analyze_path;
  analyze->add_option("graph", analyze_path, "Graph JSON file")->required();

  // ---- theory -----------------------------------------------------------
  auto* theory = app.add_subcommand("theory", "Asymptotic law and moments of the k-th fastest FPT");
  std::string theory_path;
  std::uint64_t theory_n = 1;
  int theory_k = 1;
  std::string theory_moments = "1,2";
  theory->add_option("graph", theory_path, "Graph JSON file")->required();
  theory->add_option("--N", theory_n, "Number of searchers")->required()->check(CLI::PositiveNumber);
  theory->add_option("--k", theory_k, "Order statistic (k-th fastest)")->check(CLI::PositiveNumber);
  theory->add_option("--moments", theory_moments, "Comma-separated moment orders (default 1,2)");

  // ---- exact ------------------------------------------------------------
  auto* exact = app.add_subcommand("exact", "Exact finite-N numerics via uniformization");
  std::string exact_path;
  std::uint64_t exact_n = 1;
  int exact_k = 1;
  std::string exact_curve;
  double exact_moment = 0.0;
  double exact_eps = 1e-10;
  exact->add_option("graph", exact_path, "Graph JSON file")->required();
  exact->add_option("--N", exact_n, "Number of searchers")->required()->check(CLI::PositiveNumber);
  exact->add_option("--k", exact_k, "Order statistic")->check(CLI::PositiveNumber);
  auto* curve_opt =
      exact->add_option("--curve", exact_curve, "t0:t1:steps -> CSV (t, S, cdf_TkN, pdf_TkN)");
  auto* moment_opt =
      exact->add_option("--moment", exact_moment, "Moment order -> JSON moment of T_{k,N}");
  exact->add_option("--eps", exact_eps, "Tolerance (default 1e-10)");

  // ---- simulate ---------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectories (the only route for "
                                                  "general waiting times)");
  std::string sim_path;
  std::uint64_t sim_n = 1000;
  int sim_k = 1;
  std::uint64_t sim_replicates = 100;
  std::uint64_t sim_seed = 0;
  unsigned sim_workers = 1;
  double sim_gamma = 0.0;
  double sim_moment = 1.0;
  double sim_time_cap = 0.0;
  std::string sim_ecdf_out;
  bool sim_no_abort = false;
  simulate->add_option("graph", sim_path, "Graph JSON file")->required();
  simulate->add_option("--N", sim_n, "Walkers per replicate")->check(CLI::PositiveNumber);
  simulate->add_option("--k", sim_k, "Order statistic")->check(CLI::PositiveNumber);
  simulate->add_option("--replicates", sim_replicates, "Replicates")->check(CLI::PositiveNumber);
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "RNG seed (XFPT_SEED overrides "
                                                                "the default; the flag wins)");
  simulate->add_option("--workers", sim_workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* gamma_opt = simulate->add_option(
      "--gamma", sim_gamma, "Inactivation rate: estimate E[tau^m | tau < sigma] instead");
  simulate->add_option("--moment", sim_moment, "Moment order for --gamma runs (default 1)");
  auto* cap_opt = simulate->add_option("--time-cap", sim_time_cap, "Censoring horizon per walker");
  simulate->add_option("--ecdf-out", sim_ecdf_out, "Write the empirical CDF of T_{k,N} as CSV");
  simulate->add_flag("--no-early-abort", sim_no_abort,
                     "Disable the monotone k-th-minimum abort threshold");

  // ---- mortal -----------------------------------------------------------
  auto* mortal_cmd = app.add_subcommand("mortal", "Conditional FPT moments under fast inactivation");
  std::string mortal_path;
  double mortal_gamma = 0.0;
  double mortal_m = 1.0;
  bool mortal_exact = false, mortal_asym = false, mortal_mc = false;
  std::uint64_t mortal_samples = 1000000;
  std::uint64_t mortal_seed = 0;
  unsigned mortal_workers = 1;
  double mortal_eps = 1e-9;
  mortal_cmd->add_option("graph", mortal_path, "Graph JSON file")->required();
  mortal_cmd->add_option("--gamma", mortal_gamma, "Inactivation rate")->required();
  mortal_cmd->add_option("--moment", mortal_m, "Moment order m (default 1)");
  mortal_cmd->add_flag("--exact", mortal_exact, "Quadrature of the exact representation (default)");
  mortal_cmd->add_flag("--asymptotic", mortal_asym, "Fast-inactivation closed form");
  mortal_cmd->add_flag("--mc", mortal_mc, "Monte Carlo ratio estimator");
  mortal_cmd->add_option("--samples", mortal_samples, "Monte Carlo sample budget");
  auto* mortal_seed_opt = mortal_cmd->add_option("--seed", mortal_seed, "RNG seed for --mc");
  mortal_cmd->add_option("--workers", mortal_workers, "Worker threads for --mc");
  mortal_cmd->add_option("--eps", mortal_eps, "Tolerance for --exact (default 1e-9)");

  // ---- ensemble ---------------------------------------------------------
  auto* ensemble = app.add_subcommand("ensemble", "Random-graph protocol plus convergence sweep");
  std::size_t ens_nodes = 0;
  int ens_distance = 3;
  std::uint64_t ens_seed = 0;
  int ens_k = 1;
  std::string ens_grid = "100:1000000:5";
  std::string ens_out;
  ensemble->add_option("--V", ens_nodes, "Node count")->required()->check(CLI::PositiveNumber);
  ensemble->add_option("--distance", ens_distance, "Source-target geodesic jump distance")
      ->check(CLI::PositiveNumber);
  auto* ens_seed_opt = ensemble->add_option("--seed", ens_seed, "Generator seed");
  ensemble->add_option("--k", ens_k, "Order statistic for the sweep")->check(CLI::PositiveNumber);
  ensemble->add_option("--Ngrid", ens_grid, "a:b:points, log-spaced searcher counts");
  ensemble->add_option("--out", ens_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help / --version
      return app.exit(e);
    }
    json err{{"error", {{"code", "usage"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 64;
  }

  if (analyze->parsed()) {
    const auto problem = xfpt::load_problem(analyze_path);
    const auto summary = xfpt::geodesic_summary(problem.network, problem.query);
    json out{{"t_min", sig12(summary.t_min)},
             {"d", summary.d},
             {"lambda", sig12(summary.lambda)},
             {"r", sig12(summary.r)},
             {"A", sig12(summary.A)},
             {"path_count", summary.path_count},
             {"truncated", summary.path_count_saturated}};
    out["manifest"] = clock.finish(command_line, file_hash(analyze_path), std::nullopt);
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (theory->parsed()) {
    const auto problem = xfpt::load_problem(theory_path);
    const auto summary = xfpt::geodesic_summary(problem.network, problem.query);
    const auto base = xfpt::asymptotic_moment(summary, theory_n, theory_k, 1.0);
    json moments = json::object();
    std::stringstream orders(theory_moments);
    std::string item;
    while (std::getline(orders, item, ',')) {
      const double m = std::strtod(item.c_str(), nullptr);
      if (!(m > 0.0)) throw xfpt::ValidationError("--moments entries must be positive numbers");
      moments[item] = sig12(xfpt::asymptotic_moment(summary, theory_n, theory_k, m).value);
    }
    const xfpt::ExtremeLaw law(summary, theory_n, theory_k);
    json out{{"A", sig12(summary.A)},
             {"d", summary.d},
             {"t_min", sig12(summary.t_min)},
             {"scale", sig12(law.scale())},
             {"mean", sig12(base.mean)},
             {"variance", sig12(base.variance)},
             {"moments", moments},
             {"shifted", base.shifted},
             {"mean_unshifted_first_order", sig12(base.unshifted_mean_first_order)},
             {"label", "asymptotic"}};
    if (problem.network.mode() == xfpt::Mode::Markov) {
      out["regime_threshold"] = sig12(xfpt::regime_threshold(summary, problem.network));
    } else {
      out["regime_threshold"] = nullptr;  // the estimate exists only for CTMCs
    }
    out["manifest"] = clock.finish(command_line, file_hash(theory_path), std::nullopt);
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (exact->parsed()) {
    const auto problem = xfpt::load_problem(exact_path);
    if ((curve_opt->count() > 0) == (moment_opt->count() > 0)) {
      json err{{"error",
                {{"code", "usage"}, {"message", "exact: pass exactly one of --curve/--moment"}}}};
      std::cerr << err.dump() << "\n";
      return 64;
    }
    if (moment_opt->count() > 0) {
      const double value = xfpt::extreme_moment_exact(problem.network, problem.query, exact_n,
                                                      exact_k, exact_moment, exact_eps);
      json out{{"N", exact_n},
               {"k", exact_k},
               {"m", sig12(exact_moment)},
               {"value", sig12(value)},
               {"eps", sig12(exact_eps)}};
      out["manifest"] = clock.finish(command_line, file_hash(exact_path), std::nullopt);
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    double t0 = 0, t1 = 0;
    int steps = 0;
    if (std::sscanf(exact_curve.c_str(), "%lf:%lf:%d", &t0, &t1, &steps) != 3 || steps < 1 ||
        t0 < 0 || t1 < t0) {
      json err{{"error", {{"code", "usage"}, {"message", "--curve expects t0:t1:steps"}}}};
      std::cerr << err.dump() << "\n";
      return 64;
    }
    const xfpt::ReducedSystem system(problem.network, problem.query);
    const auto manifest = clock.finish(command_line, file_hash(exact_path), std::nullopt);
    std::cout << "# manifest: " << manifest.dump() << "\n";
    std::cout << "t,S,cdf_TkN,pdf_TkN\n";
    for (int i = 0; i <= steps; ++i) {
      const double t = t0 + (t1 - t0) * i / steps;
      std::cout << csv12(t) << ',' << csv12(system.survival(t, exact_eps)) << ','
                << csv12(xfpt::extreme_cdf(system, exact_n, exact_k, t)) << ','
                << csv12(xfpt::extreme_density(system, exact_n, exact_k, t)) << "\n";
    }
    return 0;
  }

  if (simulate->parsed()) {
    const auto problem = xfpt::load_problem(sim_path);
    xfpt::SimConfig config;
    config.seed = resolve_seed(sim_seed_opt, sim_seed);
    config.workers = sim_workers;
    config.searchers = sim_n;
    config.replicates = sim_replicates;
    if (cap_opt->count() > 0) config.time_cap = sim_time_cap;

    if (gamma_opt->count() > 0) {
      const auto est = xfpt::sample_conditional_mortal(problem.network, problem.query, sim_gamma,
                                                       sim_moment, config);
      json out{{"route", "mc"},
               {"gamma", sig12(sim_gamma)},
               {"m", sig12(sim_moment)},
               {"estimate", estimate_to_json(est)}};
      out["manifest"] = clock.finish(command_line, file_hash(sim_path), config.seed);
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    const auto result =
        xfpt::sample_extreme(problem.network, problem.query, sim_k, config, !sim_no_abort);
    if (!sim_ecdf_out.empty()) {
      std::ofstream csv(sim_ecdf_out);
      if (!csv) throw xfpt::ValidationError("cannot write " + sim_ecdf_out);
      auto sorted = result.kth_times;
      std::sort(sorted.begin(), sorted.end());
      csv << "# manifest: "
          << clock.finish(command_line, file_hash(sim_path), config.seed).dump() << "\n";
      csv << "t,ecdf\n";
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        csv << csv12(sorted[i]) << ','
            << csv12(static_cast<double>(i + 1) / static_cast<double>(sorted.size())) << "\n";
      }
    }
    json out{{"N", sim_n},
             {"k", sim_k},
             {"replicates", sim_replicates},
             {"workers", sim_workers},
             {"early_abort", !sim_no_abort},
             {"estimate", estimate_to_json(result.estimate)}};
    if (!sim_ecdf_out.empty()) out["ecdf_file"] = sim_ecdf_out;
    out["manifest"] = clock.finish(command_line, file_hash(sim_path), config.seed);
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (mortal_cmd->parsed()) {
    const auto problem = xfpt::load_problem(mortal_path);
    const int routes = int(mortal_exact) + int(mortal_asym) + int(mortal_mc);
    if (routes > 1) {
      json err{{"error",
                {{"code", "usage"},
                 {"message", "mortal: pick at most one of --exact/--asymptotic/--mc"}}}};
      std::cerr << err.dump() << "\n";
      return 64;
    }
    const auto summary = xfpt::geodesic_summary(problem.network, problem.query);
    const xfpt::MortalQuery mq{mortal_gamma, mortal_m};
    std::string route = "exact";
    double value = 0.0;
    std::optional<std::uint64_t> used_seed;
    if (mortal_asym) {
      route = "asymptotic";
      value = xfpt::conditional_moment_asymptotic(summary, mq);
    } else if (mortal_mc) {
      route = "mc";
      xfpt::SimConfig config;
      config.seed = resolve_seed(mortal_seed_opt, mortal_seed);
      config.workers = mortal_workers;
      config.searchers = mortal_samples;
      config.replicates = 1;
      used_seed = config.seed;
      value = xfpt::sample_conditional_mortal(problem.network, problem.query, mortal_gamma,
                                              mortal_m, config)
                  .mean;
    } else {
      if (problem.network.mode() != xfpt::Mode::Markov) {
        throw xfpt::ValidationError(
            "mortal --exact needs a Markov network; use --asymptotic or --mc");
      }
      value = xfpt::conditional_moment_exact(problem.network, problem.query, mq, mortal_eps);
    }
    json out{{"value", sig12(value)},
             {"route", route},
             {"gamma", sig12(mortal_gamma)},
             {"m", sig12(mortal_m)},
             {"t_min", sig12(summary.t_min)},
             {"d", summary.d}};
    out["manifest"] = clock.finish(command_line, file_hash(mortal_path), used_seed);
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (ensemble->parsed()) {
    const std::uint64_t seed = resolve_seed(ens_seed_opt, ens_seed);
    const auto grid = parse_n_grid(ens_grid);
    const auto instance = xfpt::generate({ens_nodes, ens_distance, seed});

    std::filesystem::create_directories(ens_out);
    const auto graph_path = (std::filesystem::path(ens_out) / "graph.json").string();
    xfpt::save_problem(instance.network, instance.query, graph_path);

    const auto rows = xfpt::convergence_sweep(instance.network, instance.query, grid, ens_k);
    const auto sweep_path = (std::filesystem::path(ens_out) / "sweep.csv").string();
    {
      std::ofstream csv(sweep_path);
      csv << "N,exact,theory,ratio\n";
      for (const auto& row : rows) {
        csv << row.searchers << ',' << csv12(row.exact_mean) << ',' << csv12(row.theory_mean)
            << ',' << csv12(row.ratio) << "\n";
      }
    }

    std::vector<double> z_grid;
    for (int i = 1; i <= 80; ++i) z_grid.push_back(0.05 * i);
    const auto density = xfpt::rescaled_density(instance.network, instance.query, grid, z_grid);
    const auto density_path = (std::filesystem::path(ens_out) / "density.csv").string();
    {
      std::ofstream csv(density_path);
      csv << "z";
      for (auto n : grid) csv << ",density_N" << n;
      csv << ",weibull_density\n";
      for (const auto& row : density) {
        csv << csv12(row.z);
        for (double v : row.density) csv << ',' << csv12(v);
        csv << ',' << csv12(row.weibull) << "\n";
      }
    }

    json out{{"graph", graph_path},
             {"sweep", sweep_path},
             {"density", density_path},
             {"source", instance.source},
             {"target", instance.target},
             {"edges", instance.network.edge_count()}};
    out["manifest"] = clock.finish(command_line, file_hash(graph_path), seed);
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  return 64;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const xfpt::ValidationError& e) {
    json err{{"error", {{"code", "validation"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const xfpt::NumericalError& e) {
    json err{{"error", {{"code", "numerical"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    json err{{"error", {{"code", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 70;
  }
}
