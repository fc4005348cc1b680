#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "bandit_subspace/error.hpp"
#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace {

/// Structural tolerance for projector idempotence and trace.
inline constexpr double kStructuralTol = 1e-8;
/// Tolerance for spectrum-in-[0,1] membership.
inline constexpr double kMembershipTol = 1e-9;

/// Instance domain and observation budget: d-dimensional vectors with
/// ||x||_inf <= 1 and ||x||^2 <= G, of which r coordinates may be observed.
struct DomainSpec {
  int d = 2;
  int k = 1;
  int r = 2;
  double G = 1.0;

  void validate() const {
    if (d < 2) throw Error(ErrorCode::BadParams, "d must be >= 2, got " + std::to_string(d));
    if (k < 1 || k >= d) {
      throw Error(ErrorCode::BadParams, "k must satisfy 1 <= k < d, got k=" + std::to_string(k));
    }
    if (r < 1 || r > d) {
      throw Error(ErrorCode::BadParams, "r must satisfy 1 <= r <= d, got r=" + std::to_string(r));
    }
    if (!(G > 0.0) || G > static_cast<double>(d)) {
      throw Error(ErrorCode::BadParams, "G must satisfy 0 < G <= d, got G=" + std::to_string(G));
    }
  }

  /// The upper bounds are stated for k <= sqrt(d); the algorithms do not need it.
  bool k_within_sqrt_d() const { return static_cast<double>(k) * k <= static_cast<double>(d); }
};

struct Instance {
  Vector x;
};

/// Checks ||x||_inf <= 1 first, then ||x||^2 <= G.
inline Instance validate_instance(const Vector& x, const DomainSpec& spec) {
  if (x.size() != spec.d) {
    throw Error(ErrorCode::DimMismatch,
                "instance has length " + std::to_string(x.size()) + ", expected " +
                    std::to_string(spec.d));
  }
  if (!x.allFinite()) throw Error(ErrorCode::InfNormViolation, "non-finite coordinate");
  const double inf = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (inf > 1.0 + 1e-12) {
    throw ValueError(ErrorCode::InfNormViolation, inf,
                     "||x||_inf = " + std::to_string(inf) + " > 1");
  }
  const double sq = x.squaredNorm();
  if (sq > spec.G + 1e-9) {
    throw ValueError(ErrorCode::NormViolation, sq,
                     "||x||^2 = " + std::to_string(sq) + " > G = " + std::to_string(spec.G));
  }
  return Instance{x};
}

/// Rank-k orthogonal projector, carried with an orthonormal basis of its range.
class ProjectionMatrix {
 public:
  /// Pi = V V^T for column-orthonormal V.
  static ProjectionMatrix from_basis(const Matrix& basis) {
    const Matrix gram = basis.transpose() * basis;
    const double err = max_abs_diff(gram, Matrix::Identity(basis.cols(), basis.cols()));
    if (err > kStructuralTol) {
      throw Error(ErrorCode::NotOrthonormal,
                  "||V^T V - I||_max = " + std::to_string(err));
    }
    ProjectionMatrix p;
    p.basis_ = basis;
    p.matrix_ = SymMatrix(Matrix(basis * basis.transpose()));
    return p;
  }

  /// Validates an explicit projector and recovers its basis from the
  /// eigenvalue-1 eigenvectors.
  static ProjectionMatrix from_matrix(const SymMatrix& m, int rank) {
    const EigenSystem es = sym_eig(m);
    for (int j = 0; j < es.dim(); ++j) {
      const double target = j < rank ? 1.0 : 0.0;
      if (std::abs(es.values[j] - target) > kStructuralTol) {
        throw Error(ErrorCode::NotOrthonormal,
                    "not a rank-" + std::to_string(rank) + " projector (eigenvalue " +
                        std::to_string(es.values[j]) + ")");
      }
    }
    ProjectionMatrix p;
    p.basis_ = top_k_basis(es, rank);
    p.matrix_ = m;
    return p;
  }

  const SymMatrix& matrix() const noexcept { return matrix_; }
  const Matrix& basis() const noexcept { return basis_; }
  int rank() const noexcept { return static_cast<int>(basis_.cols()); }
  int dim() const noexcept { return matrix_.dim(); }

 private:
  ProjectionMatrix() = default;
  SymMatrix matrix_;
  Matrix basis_;
};

inline ProjectionMatrix projector_from_basis(const Matrix& basis) {
  return ProjectionMatrix::from_basis(basis);
}

struct HullReport {
  double trace_error = 0.0;
  double below_zero = 0.0;  // max(0, -lambda_min)
  double above_one = 0.0;   // max(0, lambda_max - 1)
  bool passed = false;
};

/// Diagnostic check of W against conv(rank-k projectors): trace k and
/// spectrum inside [0, 1], each within `tol`.
inline HullReport check_hull_membership(const SymMatrix& w, int k, double tol) {
  HullReport rep;
  rep.trace_error = std::abs(w.trace() - k);
  if (w.dim() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(w.matrix(), Eigen::EigenvaluesOnly);
    const Vector& ev = solver.eigenvalues();
    rep.below_zero = std::max(0.0, -ev.minCoeff());
    rep.above_one = std::max(0.0, ev.maxCoeff() - 1.0);
  }
  rep.passed = rep.trace_error <= tol && rep.below_zero <= tol && rep.above_one <= tol;
  return rep;
}

/// Element of conv(P): symmetric, spectrum in [0,1], trace k.
class HullElement {
 public:
  HullElement(SymMatrix w, int k) : w_(std::move(w)), k_(k) {
    const HullReport rep = check_hull_membership(w_, k_, kStructuralTol);
    if (rep.trace_error > kStructuralTol || rep.below_zero > kMembershipTol ||
        rep.above_one > kMembershipTol) {
      throw Error(ErrorCode::NotInHull,
                  "trace error " + std::to_string(rep.trace_error) + ", below zero " +
                      std::to_string(rep.below_zero) + ", above one " +
                      std::to_string(rep.above_one));
    }
  }

  /// (k/d) I, the learners' initial iterate.
  static HullElement uniform(int d, int k) {
    return HullElement(SymMatrix::identity(d) * (static_cast<double>(k) / d), k);
  }

  const SymMatrix& matrix() const noexcept { return w_; }
  int k() const noexcept { return k_; }
  int dim() const noexcept { return w_.dim(); }

 private:
  SymMatrix w_;
  int k_;
};

}  // namespace bandit_subspace
