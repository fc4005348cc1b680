#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bandit_subspace/error.hpp"
#include "bandit_subspace/harness.hpp"
#include "bandit_subspace/lower_bounds.hpp"
#include "bandit_subspace/oracles.hpp"

namespace bandit_subspace {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

namespace detail {

struct RunFlags {
  std::string config_path;
  std::optional<std::string> algo, dist, out;
  std::optional<int> d, k, r, trials, threads;
  std::optional<double> G, eta, alpha;
  std::optional<std::uint64_t> seed;
  std::vector<int> m;
};

struct FixtureFlags {
  std::string name;
  int d = 4;
  int k = 1;
  double G = 1.0;
  int s = 1;
  double eps = 0.05;
  double c = 4.0;
  double alpha = 0.4;
  std::string signs;
  std::string out;
};

struct DemoFlags {
  std::uint64_t seed = 1;
  int threads = 1;
  int trials = 500;
  int draws = 100000;
};

inline ExperimentConfig build_run_config(const RunFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw Error(ErrorCode::BadConfig, "cannot open config '" + f.config_path + "'");
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::BadConfig, "'" + f.config_path + "': " + e.what());
    }
  }
  auto& dom = j["domain"];
  if (f.d) dom["d"] = *f.d;
  if (f.k) dom["k"] = *f.k;
  if (f.r) dom["r"] = *f.r;
  if (f.G) dom["G"] = *f.G;
  if (f.algo) j["algo"] = *f.algo;
  if (f.dist) j["distribution"] = *f.dist;
  if (!f.m.empty()) j["m_values"] = f.m;
  if (f.trials) j["trials"] = *f.trials;
  if (f.seed) j["base_seed"] = *f.seed;
  if (f.eta) j["overrides"]["eta"] = *f.eta;
  if (f.alpha) j["overrides"]["alpha"] = *f.alpha;
  if (f.out) j["output_path"] = *f.out;
  if (f.threads) j["threads"] = *f.threads;
  return config_from_json(j);
}

inline int run_command(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = build_run_config(flags);
  if (!cfg.domain.k_within_sqrt_d()) {
    err << "warning: k = " << cfg.domain.k << " exceeds sqrt(d); the sample-complexity bounds "
        << "assume k <= sqrt(d)\n";
  }
  const auto records = run_sweep(cfg);
  if (cfg.output_path.empty()) {
    write_csv(records, out);
  } else {
    emit_csv(records, cfg.output_path);
  }
  err << "algo=" << to_string(cfg.algo) << " dist=" << cfg.distribution->tag() << '\n';
  err << std::setw(10) << "m" << std::setw(16) << "mean_excess" << std::setw(10) << "failed"
      << '\n';
  for (int m : cfg.m_values) {
    double sum = 0.0;
    int ok = 0, failed = 0;
    for (const auto& r : records) {
      if (r.m != m) continue;
      if (r.ok()) {
        sum += r.excess_loss;
        ++ok;
      } else {
        ++failed;
      }
    }
    err << std::setw(10) << m << std::setw(16) << (ok ? sum / ok : std::nan("")) << std::setw(10)
        << failed << '\n';
  }
  for (const auto& r : records) {
    if (!r.ok()) {
      err << "trial m=" << r.m << " #" << r.trial << " failed: " << r.error << '\n';
      break;
    }
  }
  return kExitOk;
}

inline int fixtures_command(const FixtureFlags& f, std::ostream& out) {
  DistributionSpec dist = [&] {
    if (f.name == "impossibility") return impossibility_fixture(f.d, f.G, f.s - 1);
    if (f.name == "dyadic") return dyadic_fixture(f.d, f.s - 1, f.eps, f.c);
    if (f.name == "coin") {
      std::vector<int> signs(f.k, 1);
      if (!f.signs.empty()) {
        if (static_cast<int>(f.signs.size()) != f.k) {
          throw Error(ErrorCode::BadConfig, "--b needs exactly k sign characters");
        }
        for (int j = 0; j < f.k; ++j) signs[j] = f.signs[j] == '-' ? -1 : 1;
      }
      return coin_fixture(f.d, f.k, f.G, f.alpha, signs, default_coin_basis(f.d, f.k, f.G));
    }
    throw Error(ErrorCode::BadConfig, "unknown fixture '" + f.name + "'");
  }();
  const std::string text = to_json(dist).dump(2);
  if (f.out.empty()) {
    out << text << '\n';
  } else {
    std::ofstream file(f.out);
    if (!file) throw Error(ErrorCode::Io, "cannot open '" + f.out + "' for writing");
    file << text << '\n';
  }
  return kExitOk;
}

inline int demo_command(const DemoFlags& f, std::ostream& out) {
  const MarginalCheck mc = impossibility_marginal_check(4, 1.0, f.draws, f.seed);
  const NoSignalDemo ns = dyadic_no_signal_demo(20, 2, 0.05, 4.0, 200, f.trials, f.seed, f.threads);
  out << "Lower-bound constructions\n";
  out << "--------------------------------------------------------------\n";
  out << "r = 1, two-point family u_s = sqrt(G/d)(sum_{j!=s} e_j - e_s), d = " << mc.d
      << ", G = " << mc.G << '\n';
  out << "  single-coordinate marginal identical for all s (exact): "
      << (mc.exact_identical ? "yes" : "NO") << '\n';
  out << "  max |P(+" << mc.level << ") - 1/2| exact:       " << mc.exact_max_deviation << '\n';
  out << "  max |P(+" << mc.level << ") - 1/2| Monte Carlo: " << mc.mc_max_deviation << " ("
      << mc.draws << " draws per cell)\n";
  out << "spike at e_s w.p. c*eps, MBGD, d = " << ns.d << ", r = " << ns.r << ", eps = " << ns.eps
      << ", c = " << ns.c << ", m = " << ns.m << ", trials = " << ns.trials << '\n';
  out << "  P(no informative query) predicted: " << ns.predicted_no_signal << '\n';
  out << "  fraction of trials with excess > eps: " << ns.failure_rate << '\n';
  out << "  mean excess: " << ns.mean_excess << '\n';
  if (ns.failed_records) out << "  failed trials: " << ns.failed_records << '\n';
  return kExitOk;
}

}  // namespace detail

/// Entry point for the experiment CLI. Returns 0 on success, 2 on usage or
/// configuration errors, 1 on runtime failures.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Subspace learning under an attribute budget: experiments and fixtures"};
  app.require_subcommand(1);

  detail::RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run a seeded sample-size sweep and emit CSV");
  run_cmd->add_option("--config", run.config_path, "JSON experiment config");
  run_cmd->add_option("--algo", run.algo, "bandit-pca | mbgd | mbeg | pca");
  run_cmd->add_option("--d", run.d, "Ambient dimension");
  run_cmd->add_option("--k", run.k, "Subspace dimension");
  run_cmd->add_option("--r", run.r, "Attribute budget");
  run_cmd->add_option("--G", run.G, "Squared-norm bound");
  run_cmd->add_option("--m", run.m, "Sample budgets (comma separated)")->delimiter(',');
  run_cmd->add_option("--trials", run.trials, "Trials per m");
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_option("--dist", run.dist, "Distribution, e.g. dyadic:s=3,eps=0.25,c=4");
  run_cmd->add_option("--out", run.out, "CSV output path (stdout if omitted)");
  run_cmd->add_option("--eta", run.eta, "Step-size override");
  run_cmd->add_option("--alpha", run.alpha, "MBEG mixing-weight override");
  run_cmd->add_option("--threads", run.threads, "Worker threads across trials");

  detail::FixtureFlags fx;
  auto* fx_cmd = app.add_subcommand("fixtures", "Write a named fixture distribution as JSON");
  fx_cmd->add_option("name", fx.name, "impossibility | dyadic | coin")->required();
  fx_cmd->add_option("--d", fx.d, "Ambient dimension");
  fx_cmd->add_option("--k", fx.k, "Number of coins (coin)");
  fx_cmd->add_option("--G", fx.G, "Squared-norm bound");
  fx_cmd->add_option("--s", fx.s, "Planted coordinate, 1-based");
  fx_cmd->add_option("--eps", fx.eps, "Accuracy parameter (dyadic)");
  fx_cmd->add_option("--c", fx.c, "Spike multiplier (dyadic)");
  fx_cmd->add_option("--alpha", fx.alpha, "Coin bias (coin)");
  fx_cmd->add_option("--b", fx.signs, "Coin signs as +/- characters (coin)");
  fx_cmd->add_option("--out", fx.out, "Output path (stdout if omitted)");

  detail::DemoFlags demo;
  auto* demo_cmd =
      app.add_subcommand("demo-lower-bounds", "Run the lower-bound constructions and summarize");
  demo_cmd->add_option("--seed", demo.seed, "Base seed");
  demo_cmd->add_option("--threads", demo.threads, "Worker threads across trials");
  demo_cmd->add_option("--trials", demo.trials, "MBGD trials for the spike construction");
  demo_cmd->add_option("--draws", demo.draws, "Oracle draws per (s, coordinate) cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return detail::run_command(run, out, err);
    if (*fx_cmd) return detail::fixtures_command(fx, out);
    if (*demo_cmd) return detail::demo_command(demo, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Io ? kExitRuntime : kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace bandit_subspace
