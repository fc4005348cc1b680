#include <cmath>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace bandit_subspace {
namespace {

using testing::Gen;

TEST(SymEig, IdentityHasUnitSpectrum) {
  const EigenSystem es = sym_eig(SymMatrix::identity(3));
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(es.values[j], 1.0);
  EXPECT_LT(testing::max_abs(es.vectors.transpose() * es.vectors - Matrix::Identity(3, 3)), 1e-12);
  // Tie rule: lexicographically largest canonical vector first.
  EXPECT_LT(testing::max_abs(es.vectors - Matrix::Identity(3, 3)), 1e-12);
}

TEST(SymEig, DiagonalIsSortedDescending) {
  Vector diag(2);
  diag << -1.0, 2.0;
  const EigenSystem es = sym_eig(SymMatrix::diagonal(diag));
  EXPECT_DOUBLE_EQ(es.values[0], 2.0);
  EXPECT_DOUBLE_EQ(es.values[1], -1.0);
  EXPECT_NEAR(std::abs(es.vectors(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(es.vectors(0, 1)), 1.0, 1e-14);
}

TEST(SymEig, ReconstructionAndOrthonormalityUpTo64) {
  Gen gen(11);
  for (int d : {1, 2, 5, 8, 17, 32, 64}) {
    for (int rep = 0; rep < 5; ++rep) {
      const SymMatrix m = testing::random_sym(d, gen) * (rep + 1.0);
      const EigenSystem es = sym_eig(m);
      for (int j = 1; j < d; ++j) EXPECT_GE(es.values[j - 1], es.values[j]);
      EXPECT_LE(testing::max_abs(es.vectors.transpose() * es.vectors - Matrix::Identity(d, d)),
                1e-10);
      const Matrix rec = es.vectors * es.values.asDiagonal() * es.vectors.transpose();
      EXPECT_LE(testing::max_abs(rec - m.matrix()), 1e-8 * (1.0 + m.max_abs())) << "d=" << d;
    }
  }
}

TEST(SymEig, DeterministicAndSignCanonical) {
  Gen gen(3);
  const SymMatrix m = testing::random_sym(6, gen);
  const EigenSystem a = sym_eig(m);
  const EigenSystem b = sym_eig(m);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.vectors, b.vectors);
  for (int j = 0; j < 6; ++j) {
    int first = 0;
    while (std::abs(a.vectors(first, j)) <= 1e-12) ++first;
    EXPECT_GT(a.vectors(first, j), 0.0);
  }
}

TEST(SymEig, ZeroMatrixTieBreakIsE1First) {
  const EigenSystem es = sym_eig(SymMatrix::zero(4));
  EXPECT_NEAR(es.vectors(0, 0), 1.0, 1e-15);
}

TEST(SymEig, RejectsNonFinite) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::nan("");
  EXPECT_THROW(SymMatrix{m}, Error);
  try {
    SymMatrix s{m};
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidMatrix);
  }
}

TEST(SymMatrix, ConstructorSymmetrizesExactly) {
  Gen gen(5);
  const Matrix raw = testing::gaussian(7, 7, gen);
  const SymMatrix s(raw);
  EXPECT_EQ(s.matrix(), s.matrix().transpose());
  EXPECT_LT(testing::max_abs(s.matrix() - 0.5 * (raw + raw.transpose())), 1e-15);
}

TEST(SymFn, ExpOfZeroIsIdentity) {
  const SymMatrix e = sym_fn(SymMatrix::zero(3), SpectralFn::Exp);
  EXPECT_LT(max_abs_diff(e, SymMatrix::identity(3)), 1e-15);
}

TEST(SymFn, LogInvertsExp) {
  Vector diag(2);
  diag << 1.0, 2.0;
  const SymMatrix back = sym_fn(sym_fn(SymMatrix::diagonal(diag), SpectralFn::Exp), SpectralFn::Log);
  EXPECT_LT(max_abs_diff(back, SymMatrix::diagonal(diag)), 1e-9);
}

TEST(SymFn, ExpLogRoundTripOnPositiveDefinite) {
  Gen gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = testing::gaussian(5, 5, gen);
    const SymMatrix w(Matrix(a * a.transpose() + 0.1 * Matrix::Identity(5, 5)));
    const SymMatrix round = sym_fn(sym_fn(w, SpectralFn::Log), SpectralFn::Exp);
    EXPECT_LT(max_abs_diff(round, w), 1e-9 * (1.0 + w.max_abs()));
  }
}

TEST(SymFn, ExpIsPositiveDefinite) {
  Gen gen(13);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix e = sym_fn(testing::random_sym(6, gen) * 3.0, SpectralFn::Exp);
    EXPECT_GT(sym_eig(e).values.minCoeff(), 0.0);
  }
}

TEST(SymFn, LogFloorClampsOrThrows) {
  Vector diag(2);
  diag << 1.0, 0.0;
  const SymMatrix z = SymMatrix::diagonal(diag);
  const SymMatrix l = sym_fn(z, SpectralFn::Log);
  EXPECT_NEAR(l(1, 1), std::log(kLogFloor), 1e-9);
  try {
    sym_fn(z, SpectralFn::Log, /*clamp_log=*/false);
    FAIL() << "expected SingularLog";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularLog);
  }
}

TEST(FrobInner, Examples) {
  EXPECT_DOUBLE_EQ(frob_inner(SymMatrix::identity(4), SymMatrix::identity(4)), 4.0);
  EXPECT_DOUBLE_EQ(frob_inner(SymMatrix::unit_pair(3, 0, 0), SymMatrix::unit_pair(3, 1, 1)), 0.0);
  try {
    frob_inner(SymMatrix::identity(2), SymMatrix::identity(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
}

TEST(FrobInner, MatchesTraceOfProductAndIsBilinear) {
  Gen gen(17);
  for (int rep = 0; rep < 50; ++rep) {
    const SymMatrix a = testing::random_sym(4, gen);
    const SymMatrix b = testing::random_sym(4, gen);
    const SymMatrix c = testing::random_sym(4, gen);
    const double s = testing::uniform(gen, -2, 2);
    EXPECT_NEAR(frob_inner(a, b), (a.matrix() * b.matrix()).trace(), 1e-10);
    EXPECT_NEAR(frob_inner(a, b), frob_inner(b, a), 1e-12);
    EXPECT_NEAR(frob_inner(a * s + c, b), s * frob_inner(a, b) + frob_inner(c, b), 1e-12);
  }
}

TEST(SpectralNorm, Examples) {
  Vector diag(2);
  diag << 3.0, -5.0;
  EXPECT_DOUBLE_EQ(spectral_norm(SymMatrix::diagonal(diag)), 5.0);
  Gen gen(19);
  const Matrix v = testing::random_orthonormal(5, 2, gen);
  EXPECT_NEAR(spectral_norm(SymMatrix(Matrix(v * v.transpose()))), 1.0, 1e-12);
}

TEST(SpectralNorm, TriangleInequality) {
  Gen gen(23);
  for (int rep = 0; rep < 100; ++rep) {
    const SymMatrix a = testing::random_sym(5, gen);
    const SymMatrix b = testing::random_sym(5, gen);
    EXPECT_LE(spectral_norm(a + b), spectral_norm(a) + spectral_norm(b) + 1e-12);
  }
}

TEST(SpectralNorm, SplitHalfEstimateBound) {
  // d = 4, r = 2, G = 1: ||(x_hat y_hat^T + y_hat x_hat^T)/2||_sp <= 4 d^2 G / r^2 = 16.
  Gen gen(29);
  const DomainSpec spec{4, 1, 2, 1.0};
  CounterRng rng(29);
  for (int rep = 0; rep < 20000; ++rep) {
    Vector x = testing::gaussian(4, 1, gen).col(0);
    x /= x.norm();
    const auto idx = draw_uniform_indices(4, 2, rng);
    PartialObservation obs{idx, {x[idx[0]], x[idx[1]]}};
    const SymMatrix est = estimate_sym(split_halves(obs, spec)).dense();
    EXPECT_LE(spectral_norm(est), 16.0 + 1e-12);
  }
}

}  // namespace
}  // namespace bandit_subspace
