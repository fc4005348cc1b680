#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bandit_subspace/error.hpp"

namespace bandit_subspace {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric matrix. Every constructor path that accepts arbitrary
/// storage symmetrizes once with (A + A^T) / 2, which is exactly symmetric in
/// floating point because addition commutes.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(int dim) : a_(Matrix::Zero(dim, dim)) {}

  explicit SymMatrix(const Matrix& m) {
    if (m.rows() != m.cols()) {
      throw Error(ErrorCode::InvalidMatrix, "matrix is " + std::to_string(m.rows()) + "x" +
                                                std::to_string(m.cols()) + ", expected square");
    }
    if (!m.allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
    a_ = (m + m.transpose()) * 0.5;
  }

  static SymMatrix zero(int dim) { return SymMatrix(dim); }

  static SymMatrix identity(int dim) {
    SymMatrix s(dim);
    s.a_.setIdentity();
    return s;
  }

  static SymMatrix diagonal(const Vector& diag) {
    SymMatrix s(static_cast<int>(diag.size()));
    if (!diag.allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
    s.a_.diagonal() = diag;
    return s;
  }

  /// E_ij + E_ji (or E_ii when i == j) scaled by `value`.
  static SymMatrix unit_pair(int dim, int i, int j, double value = 1.0) {
    SymMatrix s(dim);
    s.add_pair(i, j, value);
    return s;
  }

  int dim() const noexcept { return static_cast<int>(a_.rows()); }
  const Matrix& matrix() const noexcept { return a_; }
  double operator()(int i, int j) const { return a_(i, j); }
  double trace() const { return a_.trace(); }
  double max_abs() const { return a_.size() == 0 ? 0.0 : a_.cwiseAbs().maxCoeff(); }

  /// Adds `value` at (i, j) and (j, i); a diagonal hit is added once.
  void add_pair(int i, int j, double value) {
    a_(i, j) += value;
    if (i != j) a_(j, i) += value;
  }

  SymMatrix& operator+=(const SymMatrix& o) {
    require_same_dim(o);
    a_ += o.a_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    require_same_dim(o);
    a_ -= o.a_;
    return *this;
  }
  SymMatrix& operator*=(double s) {
    a_ *= s;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  void require_same_dim(const SymMatrix& o) const {
    if (o.dim() != dim()) {
      throw Error(ErrorCode::DimMismatch,
                  std::to_string(dim()) + " vs " + std::to_string(o.dim()));
    }
  }

 private:
  Matrix a_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimMismatch, "max_abs_diff shape mismatch");
  }
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  return max_abs_diff(a.matrix(), b.matrix());
}

/// Eigenpairs sorted by descending eigenvalue; column j of `vectors` pairs
/// with values[j].
struct EigenSystem {
  Vector values;
  Matrix vectors;

  int dim() const noexcept { return static_cast<int>(values.size()); }

  SymMatrix reconstruct() const {
    return SymMatrix(Matrix(vectors * values.asDiagonal() * vectors.transpose()));
  }

  /// Same eigenbasis, replaced spectrum.
  SymMatrix with_values(const Vector& v) const {
    return SymMatrix(Matrix(vectors * v.asDiagonal() * vectors.transpose()));
  }
};

namespace detail {

inline constexpr double kTieTolerance = 1e-12;
inline constexpr double kSignThreshold = 1e-12;

// Flip so the first component with magnitude above the threshold is positive.
inline void canonicalize_sign(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kSignThreshold) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

inline bool lex_greater(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

}  // namespace detail

/// Eigendecomposition with a reproducible ordering. Values are descending;
/// each eigenvector is sign-canonicalized (first clearly nonzero component
/// positive), and within a run of eigenvalues whose neighbours differ by at
/// most 1e-12 the eigenvectors are ordered lexicographically descending, so
/// e_1 precedes e_2 for a multiple of the identity.
inline EigenSystem sym_eig(const SymMatrix& m) {
  const int n = m.dim();
  if (!m.matrix().allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
  EigenSystem out;
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidMatrix, "eigensolver did not converge");
  }
  // Eigen returns ascending order.
  Vector values = solver.eigenvalues().reverse();
  Matrix vectors = solver.eigenvectors().rowwise().reverse();
  for (int j = 0; j < n; ++j) detail::canonicalize_sign(vectors.col(j));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && values[end - 1] - values[end] <= detail::kTieTolerance) ++end;
    if (end - start > 1) {
      std::stable_sort(order.begin() + start, order.begin() + end, [&](int a, int b) {
        return detail::lex_greater(vectors.col(a), vectors.col(b));
      });
    }
    start = end;
  }

  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = values[order[j]];
    out.vectors.col(j) = vectors.col(order[j]);
  }
  return out;
}

enum class SpectralFn { Exp, Log };

/// Smallest eigenvalue accepted by the matrix logarithm.
inline constexpr double kLogFloor = 1e-300;

inline Vector apply_spectral(const Vector& values, SpectralFn fn, bool clamp_log = true) {
  Vector out(values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const double v = values[j];
    if (fn == SpectralFn::Exp) {
      out[j] = std::exp(v);
    } else {
      if (v < kLogFloor && !clamp_log) {
        throw Error(ErrorCode::SingularLog, "eigenvalue " + std::to_string(v) + " below floor");
      }
      out[j] = std::log(std::max(v, kLogFloor));
    }
  }
  return out;
}

/// V diag(f(lambda)) V^T for f in {exp, log}.
inline SymMatrix sym_fn(const EigenSystem& es, SpectralFn fn, bool clamp_log = true) {
  return es.with_values(apply_spectral(es.values, fn, clamp_log));
}

inline SymMatrix sym_fn(const SymMatrix& m, SpectralFn fn, bool clamp_log = true) {
  return sym_fn(sym_eig(m), fn, clamp_log);
}

/// Frobenius inner product; equals tr(AB) for symmetric arguments.
inline double frob_inner(const SymMatrix& a, const SymMatrix& b) {
  a.require_same_dim(b);
  return (a.matrix().array() * b.matrix().array()).sum();
}

inline double spectral_norm(const SymMatrix& m) {
  if (!m.matrix().allFinite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
  if (m.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// The k leading eigenvectors as a d x k column block.
inline Matrix top_k_basis(const EigenSystem& es, int k) {
  return es.vectors.leftCols(k);
}

}  // namespace bandit_subspace
