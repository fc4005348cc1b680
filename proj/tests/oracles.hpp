#pragma once

// Independent reference solvers used to check the library's projections.

#include <cmath>
#include <limits>

#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace::testing {

/// Euclidean projection onto {0 <= v <= 1, sum v = k} by enumerating every
/// assignment of coordinates to {at 0, at 1, free} (3^n faces), solving the
/// equality-constrained problem on each face, and keeping the nearest
/// feasible candidate.
inline Vector brute_force_capped_projection(const Vector& lambda, double k) {
  const int n = static_cast<int>(lambda.size());
  int faces = 1;
  for (int i = 0; i < n; ++i) faces *= 3;
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int code = 0; code < faces; ++code) {
    Vector v(n);
    int n_free = 0, n_up = 0;
    double free_sum = 0.0;
    for (int i = 0, c = code; i < n; ++i, c /= 3) {
      if (c % 3 == 1) ++n_up;
      if (c % 3 == 2) {
        ++n_free;
        free_sum += lambda[i];
      }
    }
    const double theta = n_free ? (free_sum - (k - n_up)) / n_free : 0.0;
    if (!n_free && std::abs(n_up - k) > 1e-12) continue;
    bool feasible = true;
    double sum = 0.0;
    for (int i = 0, c = code; i < n; ++i, c /= 3) {
      v[i] = c % 3 == 0 ? 0.0 : c % 3 == 1 ? 1.0 : lambda[i] - theta;
      if (v[i] < -1e-12 || v[i] > 1.0 + 1e-12) feasible = false;
      sum += v[i];
    }
    if (!feasible || std::abs(sum - k) > 1e-9) continue;
    const double dist = (v - lambda).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = v;
    }
  }
  return best;
}

/// Relative-entropy projection of mu onto the capped simplex via KKT:
/// v_j = min(1, z mu_j) with z found by bisection on sum v = k.
inline Vector bisection_entropic_projection(const Vector& mu, int k) {
  auto total = [&](double z) { return (z * mu.array()).min(1.0).sum(); };
  double lo = 0.0, hi = 1.0;
  while (total(hi) < k) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < k ? lo : hi) = mid;
  }
  return (hi * mu.array()).min(1.0).matrix();
}

/// Unnormalized relative entropy sum v log(v/mu) - v + mu.
inline double entropic_objective(const Vector& v, const Vector& mu) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc += (v[i] > 0 ? v[i] * std::log(v[i] / mu[i]) : 0.0) - v[i] + mu[i];
  }
  return acc;
}

}  // namespace bandit_subspace::testing
