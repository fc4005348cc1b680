#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "bandit_subspace/error.hpp"
#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace {

namespace detail {

inline std::vector<int> descending_order(const Vector& v) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v[a] > v[b]; });
  return order;
}

}  // namespace detail

/// Euclidean projection onto the scaled simplex {v >= 0, sum v = k}: with the
/// values sorted descending, rho is the last position j where
/// lambda_j - (sum_{s<=j} lambda_s - k) / j is positive, theta is that mean
/// shift at rho, and v = max(lambda - theta, 0). No upper cap is applied.
inline Vector simplex_project_scaled(const Vector& lambda, double k) {
  const int n = static_cast<int>(lambda.size());
  if (n == 0) return lambda;
  const auto order = detail::descending_order(lambda);
  double prefix = 0.0;
  double theta = 0.0;
  for (int j = 0; j < n; ++j) {
    prefix += lambda[order[j]];
    const double shift = (prefix - k) / (j + 1);
    if (lambda[order[j]] - shift > 0.0) theta = shift;
  }
  return (lambda.array() - theta).cwiseMax(0.0).matrix();
}

/// Euclidean projection onto the capped simplex {0 <= v <= 1, sum v = k}.
///
/// v = clamp(lambda - theta, 0, 1) for the theta at which the clamped sum
/// equals k. The clamped sum is piecewise linear and non-increasing in theta
/// with kinks at lambda_j - 1 and lambda_j, so theta is found exactly by
/// locating the bracketing kinks and interpolating.
inline Vector capped_simplex_project(const Vector& lambda, double k) {
  const int n = static_cast<int>(lambda.size());
  if (k < 0.0 || k > n) {
    throw Error(ErrorCode::InfeasibleK, "k = " + std::to_string(k) + " outside [0, " +
                                            std::to_string(n) + "]");
  }
  if (n == 0) return lambda;
  auto clamped_sum = [&](double theta) {
    return (lambda.array() - theta).cwiseMax(0.0).cwiseMin(1.0).sum();
  };
  std::vector<double> kinks;
  kinks.reserve(2 * n);
  for (int j = 0; j < n; ++j) {
    kinks.push_back(lambda[j] - 1.0);
    kinks.push_back(lambda[j]);
  }
  std::sort(kinks.begin(), kinks.end());

  double theta = kinks.front();
  double f_lo = clamped_sum(kinks.front());  // == n
  for (std::size_t i = 1; i < kinks.size(); ++i) {
    const double f_hi = clamped_sum(kinks[i]);
    if (f_hi <= k) {
      theta = f_lo > f_hi ? kinks[i - 1] + (f_lo - k) * (kinks[i] - kinks[i - 1]) / (f_lo - f_hi)
                          : kinks[i];
      break;
    }
    f_lo = f_hi;
  }
  return (lambda.array() - theta).cwiseMax(0.0).cwiseMin(1.0).matrix();
}

/// Relative-entropy projection of a positive spectrum onto the capped
/// simplex. The solution is v = min(1, z mu): with mu sorted descending, take
/// the smallest c such that capping the top c entries at 1 and rescaling the
/// rest to sum k - c leaves every rescaled entry <= 1.
inline Vector entropic_project(const Vector& mu, int k) {
  const int n = static_cast<int>(mu.size());
  if (k > n || k < 0) {
    throw Error(ErrorCode::InfeasibleK, "k = " + std::to_string(k) + " exceeds dimension " +
                                            std::to_string(n));
  }
  for (int j = 0; j < n; ++j) {
    if (!(mu[j] > 0.0) || !std::isfinite(mu[j])) {
      throw Error(ErrorCode::BadParams, "entropic projection needs a positive finite spectrum");
    }
  }
  const auto order = detail::descending_order(mu);
  std::vector<double> suffix(n + 1, 0.0);
  for (int j = n - 1; j >= 0; --j) suffix[j] = suffix[j + 1] + mu[order[j]];

  Vector out(n);
  for (int c = 0; c <= n; ++c) {
    if (c == n) {
      out.setOnes();
      break;
    }
    const double z = (k - c) / suffix[c];
    if (mu[order[c]] * z <= 1.0) {
      for (int j = 0; j < n; ++j) out[order[j]] = j < c ? 1.0 : mu[order[j]] * z;
      break;
    }
  }
  return out;
}

}  // namespace bandit_subspace
