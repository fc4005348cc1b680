#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "bandit_subspace/harness.hpp"
#include "bandit_subspace/oracles.hpp"
#include "bandit_subspace/random.hpp"

namespace bandit_subspace {

/// Single-attribute view of the two-point impossibility family.
struct MarginalCheck {
  int d = 0;
  double G = 0.0;
  double level = 0.0;             // sqrt(G/d)
  bool exact_identical = false;   // every (s, i) marginal equal to every other
  double exact_max_deviation = 0; // max |P(x_i = +level) - 1/2| by enumeration
  double mc_max_deviation = 0;    // same, estimated from `draws` oracle calls per cell
  int draws = 0;
};

inline MarginalCheck impossibility_marginal_check(int d, double G, int draws, std::uint64_t seed) {
  MarginalCheck out;
  out.d = d;
  out.G = G;
  out.level = std::sqrt(G / d);
  out.draws = draws;
  out.exact_identical = true;
  std::vector<double> reference;
  for (int s = 0; s < d; ++s) {
    const auto dist = impossibility_fixture(d, G, s);
    std::vector<double> law;  // P(x_i = +level), P(x_i = -level), per coordinate
    for (int i = 0; i < d; ++i) {
      double plus = 0.0, minus = 0.0;
      for (const auto& pt : dist.support()) {
        if (pt.x[i] > 0) plus += pt.p; else minus += pt.p;
      }
      law.push_back(plus);
      law.push_back(minus);
      out.exact_max_deviation = std::max(out.exact_max_deviation, std::abs(plus - 0.5));
      CounterRng rng = CounterRng(seed).split(static_cast<std::uint64_t>(s) * d + i);
      const std::array<int, 1> idx{i};
      int hits = 0;
      for (int t = 0; t < draws; ++t) hits += observe(dist, idx, rng).values[0] > 0 ? 1 : 0;
      out.mc_max_deviation =
          std::max(out.mc_max_deviation, std::abs(static_cast<double>(hits) / draws - 0.5));
    }
    if (reference.empty()) reference = law;
    else if (law != reference) out.exact_identical = false;
  }
  return out;
}

/// MBGD against the planted-spike distribution with too few samples.
struct NoSignalDemo {
  int d = 0, r = 0, m = 0, trials = 0;
  double eps = 0.0, c = 0.0;
  double failure_rate = 0.0;          // fraction of trials with excess > eps
  double predicted_no_signal = 0.0;   // (1 - c eps / d^2)^m for r = 2
  double mean_excess = 0.0;
  int failed_records = 0;
};

inline NoSignalDemo dyadic_no_signal_demo(int d, int r, double eps, double c, int m, int trials,
                                          std::uint64_t seed, int threads = 1) {
  ExperimentConfig cfg;
  cfg.domain = DomainSpec{d, 1, r, 1.0};
  cfg.distribution = std::make_shared<const DistributionSpec>(dyadic_fixture(d, 0, eps, c));
  cfg.algo = Algo::Mbgd;
  cfg.m_values = {m};
  cfg.trials = trials;
  cfg.base_seed = seed;
  cfg.threads = threads;
  const auto records = run_sweep(cfg);

  NoSignalDemo out{d, r, m, trials, eps, c};
  int over = 0;
  for (const auto& rec : records) {
    if (!rec.ok()) {
      ++out.failed_records;
      continue;
    }
    out.mean_excess += rec.excess_loss;
    if (rec.excess_loss > eps) ++over;
  }
  const int ok = trials - out.failed_records;
  out.failure_rate = static_cast<double>(over) / trials;
  out.mean_excess = ok > 0 ? out.mean_excess / ok : 0.0;
  // An informative query needs both halves to contain the spike coordinate.
  const double half_hit = 1.0 - std::pow(1.0 - 1.0 / d, r / 2);
  const double hit = c * eps * half_hit * half_hit;
  out.predicted_no_signal = std::pow(1.0 - hit, m);
  return out;
}

}  // namespace bandit_subspace
