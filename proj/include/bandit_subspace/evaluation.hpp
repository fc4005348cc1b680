#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "bandit_subspace/domain.hpp"
#include "bandit_subspace/error.hpp"
#include "bandit_subspace/learners.hpp"
#include "bandit_subspace/oracles.hpp"
#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace {

struct LossReport {
  double loss = 0.0;
  double optimal_loss = 0.0;
  double excess = 0.0;
};

/// E||x - Pi x||^2 = E||x||^2 - <Pi, C>.
inline double loss(const ProjectionMatrix& pi, const Moments& mom) {
  return mom.mean_sq_norm - frob_inner(pi.matrix(), mom.C);
}

/// Leading-k eigenprojector of C and its loss.
inline std::pair<ProjectionMatrix, double> optimal_projection(const Moments& mom, int k) {
  if (k < 1 || k >= mom.C.dim()) throw Error(ErrorCode::BadParams, "need 1 <= k < d");
  ProjectionMatrix best = top_k_projector(mom.C, k);
  const double l = loss(best, mom);
  return {std::move(best), l};
}

/// Negative excess down to -1e-9 is reported as zero.
inline LossReport excess_loss(const ProjectionMatrix& pi, const Moments& mom, int k) {
  LossReport rep;
  rep.loss = loss(pi, mom);
  rep.optimal_loss = optimal_projection(mom, k).second;
  rep.excess = rep.loss - rep.optimal_loss;
  if (rep.excess < 0.0 && rep.excess >= -1e-9) rep.excess = 0.0;
  return rep;
}

struct CoinReport {
  std::vector<double> theta;  // theta_j for j = 1..2k
  std::vector<int> identified;  // 0-based coin indices in J
  double beta = 0.0;
};

/// Fraction of coins whose favored direction carries more of Pi_hat than the
/// disfavored one. theta_j = sum_i <u_hat_i, u_j>^2 / (||u_hat_i||^2 ||u_j||^2).
inline CoinReport identified_fraction(const ProjectionMatrix& pi_hat, const DistributionSpec& fixture) {
  const auto& coin = fixture.coin();
  if (!coin) throw Error(ErrorCode::MissingBasis, "distribution carries no coin basis");
  const int k = coin->k;
  const Matrix& basis = pi_hat.basis();
  if (basis.rows() != fixture.dim()) throw Error(ErrorCode::DimMismatch, "projector dimension");
  CoinReport rep;
  rep.theta.assign(2 * k, 0.0);
  for (int j = 0; j < 2 * k; ++j) {
    const Vector& u = coin->basis[j];
    for (Eigen::Index i = 0; i < basis.cols(); ++i) {
      const double t = std::abs(basis.col(i).dot(u)) / (basis.col(i).norm() * u.norm());
      rep.theta[j] += t * t;
    }
  }
  for (int j = 0; j < k; ++j) {
    const bool favored_first = coin->signs[j] == 1;
    if ((favored_first && rep.theta[j] > rep.theta[j + k]) ||
        (!favored_first && rep.theta[j] < rep.theta[j + k])) {
      rep.identified.push_back(j);
    }
  }
  rep.beta = static_cast<double>(rep.identified.size()) / k;
  return rep;
}

}  // namespace bandit_subspace
