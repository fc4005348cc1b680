#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "bandit_subspace/domain.hpp"
#include "bandit_subspace/error.hpp"
#include "bandit_subspace/projections.hpp"
#include "bandit_subspace/random.hpp"
#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace {

struct MixtureComponent {
  double weight = 0.0;
  ProjectionMatrix projector;
  std::vector<int> support;  // columns of the shared eigenbasis spanning the projector
};

/// Convex combination of rank-k projectors sharing one eigenbasis.
struct MixtureDecomposition {
  int k = 0;
  Matrix eigenbasis;
  std::vector<MixtureComponent> components;
  std::vector<double> residual_mass;  // sum of normalized spectrum before each step

  SymMatrix reconstruct() const {
    SymMatrix out(static_cast<int>(eigenbasis.rows()));
    for (const auto& c : components) out += c.projector.matrix() * c.weight;
    return out;
  }

  double total_weight() const {
    double t = 0.0;
    for (const auto& c : components) t += c.weight;
    return t;
  }
};

namespace detail {

inline constexpr double kDecompositionSanitizeTol = 1e-8;
inline constexpr double kDecompositionZeroTol = 1e-10;

// k largest entries; among equal values the lowest index wins.
inline std::vector<int> top_k_indices(const std::vector<double>& v, int k) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

/// Splits W in conv(rank-k projectors) into at most d weighted projectors.
///
/// With W = U diag(lambda) U^T and lambda normalized by k, each round takes
/// the k largest entries J, the smallest of them s and the largest entry l
/// outside J (0 when J is everything), and peels off weight
/// min(s k, sum(lambda) - l k) of the projector onto U_J. Eigenvalues that
/// miss [0, 1] by at most 1e-8 are clipped and the spectrum is moved back to
/// trace k by the capped-simplex projection before the loop; larger violations are rejected. The spectrum
/// overload expects values sorted descending.
inline MixtureDecomposition decompose(const EigenSystem& es, int k) {
  const int d = es.dim();
  if (k < 1 || k > d) throw Error(ErrorCode::InfeasibleK, "k outside [1, d]");
  const double tol = detail::kDecompositionSanitizeTol;
  const double trace_err = std::abs(es.values.sum() - k);
  if (trace_err > tol) {
    throw Error(ErrorCode::NotInHull, "trace differs from k by " + std::to_string(trace_err));
  }
  if (es.values.maxCoeff() > 1.0 + tol || es.values.minCoeff() < -tol) {
    throw Error(ErrorCode::NotInHull, "eigenvalue outside [0, 1]: [" +
                                          std::to_string(es.values.minCoeff()) + ", " +
                                          std::to_string(es.values.maxCoeff()) + "]");
  }
  // Rescaling after clipping can push a clipped 1 back above 1; the capped
  // projection restores trace k without leaving [0, 1] and keeps the order.
  const Vector clipped = capped_simplex_project(es.values.cwiseMax(0.0).cwiseMin(1.0), k);

  std::vector<double> lambda(d);
  for (int j = 0; j < d; ++j) lambda[j] = clipped[j] / k;

  MixtureDecomposition mix;
  mix.k = k;
  mix.eigenbasis = es.vectors;
  auto exhausted = [&] {
    return std::all_of(lambda.begin(), lambda.end(),
                       [](double v) { return v <= detail::kDecompositionZeroTol; });
  };
  for (int round = 0; round < d && !exhausted(); ++round) {
    const auto J = detail::top_k_indices(lambda, k);
    std::vector<char> in_j(d, 0);
    for (int j : J) in_j[j] = 1;
    double s = lambda[J.front()];
    for (int j : J) s = std::min(s, lambda[j]);
    double l = 0.0;
    for (int j = 0; j < d; ++j) {
      if (!in_j[j]) l = std::max(l, lambda[j]);
    }
    const double mass = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    const double weight = std::min(s * k, mass - l * k);
    mix.residual_mass.push_back(mass);
    for (int j : J) lambda[j] = std::max(0.0, lambda[j] - weight / k);

    Matrix cols(d, k);
    for (int c = 0; c < k; ++c) cols.col(c) = es.vectors.col(J[c]);
    mix.components.push_back({weight, ProjectionMatrix::from_basis(cols), J});
  }
  if (!exhausted()) {
    throw Error(ErrorCode::NonTermination,
                "residual spectrum did not vanish within " + std::to_string(d) + " rounds");
  }
  mix.residual_mass.push_back(std::accumulate(lambda.begin(), lambda.end(), 0.0));
  return mix;
}

inline MixtureDecomposition decompose(const SymMatrix& w, int k) { return decompose(sym_eig(w), k); }

inline MixtureDecomposition decompose(const HullElement& w) { return decompose(w.matrix(), w.k()); }

/// Draws a component with probability proportional to its weight (negative
/// weights count as zero).
inline const ProjectionMatrix& sample_component(const MixtureDecomposition& mix, CounterRng& rng) {
  if (mix.components.empty()) throw Error(ErrorCode::BadParams, "empty mixture");
  double total = 0.0;
  for (const auto& c : mix.components) total += std::max(0.0, c.weight);
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  const MixtureComponent* last = &mix.components.front();
  for (const auto& c : mix.components) {
    if (c.weight <= 0.0) continue;
    last = &c;
    acc += c.weight;
    if (u < acc) return c.projector;
  }
  return last->projector;
}

}  // namespace bandit_subspace
