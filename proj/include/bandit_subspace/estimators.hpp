#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bandit_subspace/domain.hpp"
#include "bandit_subspace/error.hpp"
#include "bandit_subspace/oracles.hpp"
#include "bandit_subspace/random.hpp"
#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace {

/// Sparse vector as (coordinate, value) pairs with distinct coordinates.
struct SparseVector {
  int dim = 0;
  std::vector<std::pair<int, double>> entries;

  void accumulate(int i, double v) {
    for (auto& [j, w] : entries) {
      if (j == i) {
        w += v;
        return;
      }
    }
    entries.emplace_back(i, v);
  }

  Vector dense() const {
    Vector out = Vector::Zero(dim);
    for (const auto& [i, v] : entries) out[i] += v;
    return out;
  }
};

/// x_hat from the first r/2 observed coordinates, y_hat from the rest.
struct SplitHalves {
  SparseVector x_hat;
  SparseVector y_hat;
};

struct EstimateTerm {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Non-symmetric sparse matrix: each term adds `value` at (row, col) only.
struct RawEstimate {
  int dim = 0;
  std::vector<EstimateTerm> terms;

  Matrix dense() const {
    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& t : terms) out(t.row, t.col) += t.value;
    return out;
  }

  void add_to(Matrix& m, double scale) const {
    for (const auto& t : terms) m(t.row, t.col) += scale * t.value;
  }
};

/// Symmetric sparse matrix: an off-diagonal term adds `value` at both (row,
/// col) and (col, row); a diagonal term adds it once.
struct SparseSymEstimate {
  int dim = 0;
  std::vector<EstimateTerm> terms;

  SymMatrix dense() const {
    SymMatrix out(dim);
    add_to(out, 1.0);
    return out;
  }

  void add_to(SymMatrix& m, double scale) const {
    for (const auto& t : terms) m.add_pair(t.row, t.col, scale * t.value);
  }
};

/// r i.i.d. uniform coordinates (with replacement).
inline std::vector<int> draw_uniform_indices(int d, int r, CounterRng& rng) {
  if (r < 2 || r % 2 != 0) {
    throw Error(ErrorCode::OddBudget, "split-half estimators need an even budget r >= 2, got " +
                                          std::to_string(r));
  }
  std::vector<int> idx(r);
  for (auto& i : idx) i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(d)));
  return idx;
}

/// x_hat = (2d/r) sum_{t < r/2} x_{i_t} e_{i_t}, y_hat likewise over the
/// second half. Repeated coordinates within a half accumulate.
inline SplitHalves split_halves(const PartialObservation& obs, const DomainSpec& spec) {
  const int r = static_cast<int>(obs.indices.size());
  if (r % 2 != 0 || r < 2) throw Error(ErrorCode::OddBudget, "observation length must be even");
  if (r != spec.r || obs.values.size() != obs.indices.size()) {
    throw Error(ErrorCode::DimMismatch, "observation length " + std::to_string(r) +
                                            " differs from budget " + std::to_string(spec.r));
  }
  const double scale = 2.0 * spec.d / r;
  SplitHalves h;
  h.x_hat.dim = h.y_hat.dim = spec.d;
  for (int t = 0; t < r; ++t) {
    auto& half = t < r / 2 ? h.x_hat : h.y_hat;
    half.accumulate(obs.indices[t], scale * obs.values[t]);
  }
  return h;
}

/// (1/2) x_hat y_hat^T, left unsymmetrized.
inline RawEstimate estimate_asym(const SplitHalves& h) {
  RawEstimate e{h.x_hat.dim, {}};
  for (const auto& [i, a] : h.x_hat.entries) {
    for (const auto& [j, b] : h.y_hat.entries) {
      if (a * b != 0.0) e.terms.push_back({i, j, 0.5 * a * b});
    }
  }
  return e;
}

/// (1/2) x_hat y_hat^T + (1/2) y_hat x_hat^T.
inline SparseSymEstimate estimate_sym(const SplitHalves& h) {
  SparseSymEstimate e{h.x_hat.dim, {}};
  for (const auto& [i, a] : h.x_hat.entries) {
    for (const auto& [j, b] : h.y_hat.entries) {
      if (a * b == 0.0) continue;
      e.terms.push_back({i, j, i == j ? a * b : 0.5 * a * b});
    }
  }
  return e;
}

/// Sampling law over ordered coordinate pairs, row-major d x d.
struct PairProbabilities {
  int dim = 0;
  double alpha = 0.0;
  std::vector<double> table;

  double operator()(int s, int q) const { return table[static_cast<std::size_t>(s) * dim + q]; }
};

/// p_{s,q} = (1 - alpha) (W_ss + W_qq) / (2 d k) + alpha / d^2 from the
/// diagonal of an iterate with trace k.
inline PairProbabilities pair_probs_from_diagonal(const Vector& diag, int k, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) {
    throw Error(ErrorCode::BadAlpha, "alpha must lie in [0, 1/2], got " + std::to_string(alpha));
  }
  const int d = static_cast<int>(diag.size());
  PairProbabilities p{d, alpha, std::vector<double>(static_cast<std::size_t>(d) * d)};
  const double floor = alpha / (static_cast<double>(d) * d);
  const double scale = (1.0 - alpha) / (2.0 * d * k);
  for (int s = 0; s < d; ++s) {
    for (int q = 0; q < d; ++q) {
      // Clamp roundoff-negative diagonals so the floor alpha/d^2 is respected.
      const double w = std::max(0.0, diag[s]) + std::max(0.0, diag[q]);
      p.table[static_cast<std::size_t>(s) * d + q] = scale * w + floor;
    }
  }
  return p;
}

inline PairProbabilities mbeg_pair_probs(const HullElement& w, double alpha) {
  return pair_probs_from_diagonal(w.matrix().matrix().diagonal(), w.k(), alpha);
}

/// Ordered pair (s, q) with probability table(s, q). Zero entries are never drawn.
inline std::pair<int, int> draw_pair(const PairProbabilities& probs, CounterRng& rng) {
  const double total = [&] {
    double t = 0.0;
    for (double v : probs.table) t += v;
    return t;
  }();
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.table.size(); ++i) {
    if (probs.table[i] <= 0.0) continue;
    last_positive = i;
    acc += probs.table[i];
    if (u < acc) {
      return {static_cast<int>(i / probs.dim), static_cast<int>(i % probs.dim)};
    }
  }
  return {static_cast<int>(last_positive / probs.dim), static_cast<int>(last_positive % probs.dim)};
}

/// (x_s x_q / (2p)) (E_sq + E_qs); for s == q this is (x_s^2 / p) E_ss.
inline SparseSymEstimate mbeg_estimate(int dim, int s, int q, double x_s, double x_q, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::ZeroProbability, "pair probability must be positive");
  SparseSymEstimate e{dim, {}};
  const double prod = x_s * x_q;
  if (prod != 0.0) e.terms.push_back({s, q, s == q ? prod / p : prod / (2.0 * p)});
  return e;
}

}  // namespace bandit_subspace
