#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandit_subspace/decomposition.hpp"
#include "bandit_subspace/domain.hpp"
#include "bandit_subspace/error.hpp"
#include "bandit_subspace/estimators.hpp"
#include "bandit_subspace/oracles.hpp"
#include "bandit_subspace/projections.hpp"
#include "bandit_subspace/random.hpp"
#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace {

/// Anything that answers coordinate queries on fresh draws.
template <class O>
concept PartialOracle = requires(O& o, std::span<const int> idx, CounterRng& rng) {
  { o.observe(idx, rng) } -> std::same_as<PartialObservation>;
  { o.dim() } -> std::convertible_to<int>;
};

struct LearnerConfig {
  DomainSpec spec;
  int m = 1;
  std::optional<double> eta_override;
  std::optional<double> alpha_override;
  std::uint64_t seed = 0;
};

struct TraceStep {
  int step = 0;
  std::vector<int> indices;
  std::vector<double> values;
  double estimate_norm = 0.0;
  double trace_error = 0.0;
  bool in_hull = true;  // MBEG only: iterate after projection
};

/// Optional per-step record of a learner run.
struct LearnerTrace {
  double eta = 0.0;
  double alpha = 0.0;
  std::vector<TraceStep> steps;
  /// Bandit PCA: symmetrized accumulator. MBGD: W_{m+1} before projection.
  std::optional<SymMatrix> unprojected;
  /// MBGD: projected W~. MBEG: averaged iterate. Input to the decomposition.
  std::optional<SymMatrix> final_iterate;
};

/// Default MBGD step size sqrt(k / (d^2 G^2 m)).
inline double mbgd_default_eta(const DomainSpec& s, int m) {
  return std::sqrt(static_cast<double>(s.k) / (static_cast<double>(s.d) * s.d * s.G * s.G * m));
}

/// Default MBEG step size sqrt(log(d/k) / (d m G^2)).
inline double mbeg_default_eta(const DomainSpec& s, int m) {
  return std::sqrt(std::log(static_cast<double>(s.d) / s.k) / (static_cast<double>(s.d) * m * s.G * s.G));
}

inline ProjectionMatrix top_k_projector(const SymMatrix& m, int k) {
  return ProjectionMatrix::from_basis(top_k_basis(sym_eig(m), k));
}

namespace detail {

// Independent streams per role so the index choices, the oracle draws and the
// final projector draw never interleave.
struct LearnerStreams {
  CounterRng choice;
  CounterRng oracle;
  CounterRng rounding;

  explicit LearnerStreams(std::uint64_t seed)
      : choice(CounterRng(seed).split(0)),
        oracle(CounterRng(seed).split(1)),
        rounding(CounterRng(seed).split(2)) {}
};

inline void require_even_budget(const DomainSpec& s) {
  if (s.r < 2 || s.r % 2 != 0) {
    throw Error(ErrorCode::OddBudget, "budget r = " + std::to_string(s.r) + " must be even");
  }
}

inline double dense_spectral_norm(const Matrix& m) {
  // Largest singular value, for the non-symmetric Bandit PCA terms.
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

}  // namespace detail

/// Averages (1/2) x_hat y_hat^T over m queries, symmetrizes, and returns the
/// top-k eigenprojector.
template <PartialOracle O>
ProjectionMatrix bandit_pca(O& oracle, const LearnerConfig& cfg, LearnerTrace* trace = nullptr) {
  const DomainSpec& spec = cfg.spec;
  spec.validate();
  detail::require_even_budget(spec);
  if (cfg.m < 1) throw Error(ErrorCode::BadParams, "m must be >= 1");
  detail::LearnerStreams rng(cfg.seed);
  const int d = spec.d;

  Matrix acc = Matrix::Zero(d, d);
  for (int i = 0; i < cfg.m; ++i) {
    const auto idx = draw_uniform_indices(d, spec.r, rng.choice);
    const auto obs = oracle.observe(idx, rng.oracle);
    const RawEstimate est = estimate_asym(split_halves(obs, spec));
    est.add_to(acc, 1.0 / cfg.m);
    if (trace) {
      trace->steps.push_back({i, obs.indices, obs.values, detail::dense_spectral_norm(est.dense()),
                              0.0, true});
    }
  }
  const SymMatrix sym(acc);  // (acc + acc^T) / 2
  if (trace) trace->unprojected = sym;
  return top_k_projector(sym, spec.k);
}

/// Lazy stochastic gradient ascent on conv(P) from (k/d) I with the
/// symmetric split-half estimate, one eigenvalue projection onto the capped
/// simplex at the end, then a projector sampled from the decomposition.
/// m = 0 is accepted and returns a projector drawn from the initial iterate.
template <PartialOracle O>
ProjectionMatrix mbgd(O& oracle, const LearnerConfig& cfg, LearnerTrace* trace = nullptr) {
  const DomainSpec& spec = cfg.spec;
  spec.validate();
  detail::require_even_budget(spec);
  if (cfg.m < 0) throw Error(ErrorCode::BadParams, "m must be >= 0");
  detail::LearnerStreams rng(cfg.seed);
  const int d = spec.d;
  const int k = spec.k;
  const double eta = cfg.eta_override.value_or(cfg.m > 0 ? mbgd_default_eta(spec, cfg.m) : 0.0);
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::BadParams, "bad step size");
  if (trace) trace->eta = eta;

  SymMatrix w = SymMatrix::identity(d) * (static_cast<double>(k) / d);
  double w_trace = k;
  for (int i = 0; i < cfg.m; ++i) {
    const auto idx = draw_uniform_indices(d, spec.r, rng.choice);
    const auto obs = oracle.observe(idx, rng.oracle);
    const SparseSymEstimate est = estimate_sym(split_halves(obs, spec));
    est.add_to(w, eta);
    if (trace) {
      for (const auto& t : est.terms) {
        if (t.row == t.col) w_trace += eta * t.value;
      }
      trace->steps.push_back({i, obs.indices, obs.values, spectral_norm(est.dense()),
                              std::abs(w_trace - k), true});
    }
  }
  if (trace) trace->unprojected = w;

  EigenSystem es = sym_eig(w);
  es.values = capped_simplex_project(es.values, k);
  if (trace) trace->final_iterate = es.reconstruct();
  const MixtureDecomposition mix = decompose(es, k);
  return sample_component(mix, rng.rounding);
}

/// Exponentiated-gradient learner with r = 2. Each step samples a pair from
/// the iterate-dependent law, forms the importance-weighted estimate, sets
/// U = exp(log W + eta C_hat), and projects U back onto conv(P) under the
/// quantum relative entropy. The iterate is kept in eigendecomposed form;
/// the returned projector is sampled from the decomposition of the average
/// iterate (1/m) sum_{i<=m} W_i.
template <PartialOracle O>
ProjectionMatrix mbeg(O& oracle, const LearnerConfig& cfg, LearnerTrace* trace = nullptr) {
  const DomainSpec& spec = cfg.spec;
  spec.validate();
  if (spec.r != 2) throw Error(ErrorCode::BudgetNotTwo, "MBEG needs r = 2");
  if (cfg.m < 1) throw Error(ErrorCode::BadParams, "m must be >= 1");
  const int d = spec.d;
  const int k = spec.k;
  const double eta = cfg.eta_override.value_or(mbeg_default_eta(spec, cfg.m));
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::BadParams, "bad step size");
  double alpha = 0.0;
  if (cfg.alpha_override) {
    alpha = *cfg.alpha_override;
    if (!(alpha > 0.0 && alpha <= 0.5)) {
      throw Error(ErrorCode::BadAlpha, "alpha must lie in (0, 1/2], got " + std::to_string(alpha));
    }
  } else {
    alpha = 0.5 * eta * d * d;
    if (alpha > 0.5) {
      throw Error(ErrorCode::AlphaTooLarge,
                  "default alpha = eta d^2 / 2 = " + std::to_string(alpha) +
                      " exceeds 1/2; m = " + std::to_string(cfg.m) + " is too small");
    }
    if (!(alpha > 0.0)) throw Error(ErrorCode::BadAlpha, "alpha must be positive");
  }
  if (trace) {
    trace->eta = eta;
    trace->alpha = alpha;
  }
  detail::LearnerStreams rng(cfg.seed);

  EigenSystem w{Vector::Constant(d, static_cast<double>(k) / d), Matrix::Identity(d, d)};
  SymMatrix w_mat = w.reconstruct();
  SymMatrix w_sum(d);
  for (int i = 0; i < cfg.m; ++i) {
    w_sum += w_mat;
    const PairProbabilities probs =
        pair_probs_from_diagonal(w_mat.matrix().diagonal(), k, alpha);
    const auto [s, q] = draw_pair(probs, rng.choice);
    const std::array<int, 2> idx{s, q};
    const auto obs = oracle.observe(idx, rng.oracle);
    const double p = probs(s, q);
    const SparseSymEstimate est = mbeg_estimate(d, s, q, obs.values[0], obs.values[1], p);
    if (!est.terms.empty()) {
      SymMatrix exponent = sym_fn(w, SpectralFn::Log);
      est.add_to(exponent, eta);
      EigenSystem u = sym_eig(exponent);
      // The projection is scale invariant, so shift before exponentiating.
      const double top = u.values.maxCoeff();
      const Vector mu = (u.values.array() - top).exp().matrix();
      w = EigenSystem{entropic_project(mu, k), std::move(u.vectors)};
      w_mat = w.reconstruct();
    }
    if (trace) {
      const HullReport rep = check_hull_membership(w_mat, k, kStructuralTol);
      const double norm = std::abs(obs.values[0] * obs.values[1]) / (s == q ? p : 2.0 * p);
      trace->steps.push_back({i, obs.indices, obs.values, norm, rep.trace_error, rep.passed});
    }
  }
  const SymMatrix w_bar = w_sum * (1.0 / cfg.m);
  if (trace) trace->final_iterate = w_bar;
  const MixtureDecomposition mix = decompose(w_bar, k);
  return sample_component(mix, rng.rounding);
}

/// Top-k eigenprojector of the empirical correlation (1/m) sum x x^T.
inline ProjectionMatrix full_info_pca(std::span<const Instance> samples, int k) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "no samples");
  const int d = static_cast<int>(samples.front().x.size());
  Matrix c = Matrix::Zero(d, d);
  for (const auto& s : samples) {
    if (s.x.size() != d) throw Error(ErrorCode::DimMismatch, "sample length mismatch");
    c.noalias() += s.x * s.x.transpose();
  }
  c /= static_cast<double>(samples.size());
  return top_k_projector(SymMatrix(c), k);
}

}  // namespace bandit_subspace
