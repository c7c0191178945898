#include <gtest/gtest.h>

#include "qrf/linalg.hpp"

using namespace qrf;

namespace {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
Ket psi_minus() {
  Ket k = Ket::Zero(4);
  k(1) = 1 / std::sqrt(2.0);
  k(2) = -1 / std::sqrt(2.0);
  return k;
}

// Straight-loop reduced state used as an oracle for partial_trace.
Matrix trace_out_middle(const Matrix& rho) {
  Matrix out = Matrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int c2 = 0; c2 < 2; ++c2)
          for (int b = 0; b < 2; ++b)
            out(2 * a + c, 2 * a2 + c2) += rho(4 * a + 2 * b + c, 4 * a2 + 2 * b + c2);
  return out;
}

}  // namespace

TEST(Tensor, IdentityAndPauli) {
  EXPECT_EQ(max_abs_diff(tensor(identity(2), identity(2)), identity(4)), 0.0);
  const Matrix zz = tensor(pauli_z(), identity(2));
  Matrix expect = Matrix::Zero(4, 4);
  expect.diagonal() << 1, 1, -1, -1;
  EXPECT_EQ(max_abs_diff(zz, expect), 0.0);
}

TEST(Tensor, BasisAction) {
  const Matrix op = tensor(projector(basis_ket(2, 0)), pauli_x());
  const Ket out = op * basis_ket(4, 0);
  EXPECT_EQ((out - basis_ket(4, 1)).norm(), 0.0);
}

TEST(Tensor, Associative) {
  Rng rng(1);
  const Matrix a = ginibre(2, 3, rng), b = ginibre(3, 2, rng), c = ginibre(2, 2, rng);
  EXPECT_LT(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))), 1e-14);
}

TEST(PartialTrace, SingletMarginal) {
  const Matrix r = partial_trace(projector(psi_minus()), {2, 2}, {0});
  EXPECT_LT(max_abs_diff(r, identity(2) / 2.0), 1e-15);
}

TEST(PartialTrace, ProductState) {
  Rng rng(2);
  const Matrix ra = random_density(3, rng), rb = random_density(2, rng);
  EXPECT_LT(max_abs_diff(partial_trace(tensor(ra, rb), {3, 2}, {1}), rb), 1e-14);
  EXPECT_LT(max_abs_diff(partial_trace(tensor(ra, rb), {3, 2}, {0}), ra), 1e-14);
}

TEST(PartialTrace, MatchesDirectSummation) {
  Rng rng(3);
  const Matrix rho = projector(random_pure_state(8, rng));
  const Matrix r = partial_trace(rho, {2, 2, 2}, {0, 2});
  EXPECT_LT(max_abs_diff(r, trace_out_middle(rho)), 1e-15);
  EXPECT_NEAR(r.trace().real(), 1.0, 1e-12);
}

TEST(PartialTrace, DimensionErrors) {
  EXPECT_THROW(partial_trace(identity(4), {2, 3}, {0}), DimensionError);
  EXPECT_THROW(partial_trace(Matrix::Zero(4, 2), {2, 2}, {0}), DimensionError);
  EXPECT_THROW(partial_trace(identity(4), {2, 2}, {2}), DimensionError);
}

TEST(PartialTranspose, SingletSpectrum) {
  const RealVector ev = eigvalsh(partial_transpose(projector(psi_minus()), {2, 2}, 1));
  EXPECT_NEAR(ev(0), -0.5, 1e-14);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(ev(k), 0.5, 1e-14);
}

TEST(PartialTranspose, ProductStateSpectrumUnchanged) {
  Rng rng(4);
  const Matrix rho = tensor(random_density(2, rng), random_density(3, rng));
  const RealVector a = eigvalsh(rho), b = eigvalsh(partial_transpose(rho, {2, 3}, 1));
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PartialTranspose, InvolutionAndHermiticity) {
  Rng rng(5);
  const Matrix rho = random_density(12, rng);
  const Matrix pt = partial_transpose(rho, {2, 3, 2}, Dims{0, 2});
  EXPECT_EQ(max_abs_diff(partial_transpose(pt, {2, 3, 2}, Dims{0, 2}), rho), 0.0);
  EXPECT_LT(hermiticity_residual(pt), 1e-15);
}

TEST(PartialTranspose, LeavesOtherMarginalAlone) {
  Rng rng(6);
  const Matrix rho = random_density(6, rng);
  EXPECT_LT(max_abs_diff(partial_trace(partial_transpose(rho, {2, 3}, 1), {2, 3}, {0}),
                         partial_trace(rho, {2, 3}, {0})),
            1e-12);
}

TEST(Eigh, PauliZ) {
  const auto es = eigh(pauli_z());
  EXPECT_DOUBLE_EQ(es.values(0), -1.0);
  EXPECT_DOUBLE_EQ(es.values(1), 1.0);
  EXPECT_NEAR(std::abs(es.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(0, 1)), 1.0, 1e-15);
}

TEST(Eigh, Identity) {
  const RealVector ev = eigh(identity(7)).values;
  for (Eigen::Index k = 0; k < 7; ++k) EXPECT_DOUBLE_EQ(ev(k), 1.0);
}

TEST(Eigh, ReconstructionAndOrthonormality) {
  Rng rng(7);
  for (std::size_t d : {3u, 64u, 300u}) {
    const Matrix h = random_hermitian(d, rng);
    const auto es = eigh(h);
    const Matrix back =
        es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
    EXPECT_LT(max_abs_diff(back, h), 1e-10);
    EXPECT_LT(max_abs_diff(es.vectors.adjoint() * es.vectors, identity(d)), 1e-10);
    for (Eigen::Index k = 1; k < es.values.size(); ++k)
      EXPECT_LE(es.values(k - 1), es.values(k));
  }
}

TEST(Eigh, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_THROW(eigh(m), ShapeError);
  EXPECT_THROW(eigh(Matrix::Zero(2, 3)), ShapeError);
}

TEST(TraceNorm, Basics) {
  Rng rng(8);
  EXPECT_NEAR(trace_norm(random_density(5, rng)), 1.0, 1e-13);
  EXPECT_NEAR(trace_norm(pauli_z()), 2.0, 1e-15);
  EXPECT_NEAR(trace_norm(partial_transpose(projector(psi_minus()), {2, 2}, 1)), 2.0, 1e-14);
  EXPECT_THROW(trace_norm(Matrix::Zero(2, 3)), ShapeError);
}

TEST(TraceNorm, NonHermitianIsSumOfSingularValues) {
  Matrix m(2, 2);
  m << 0, 3, 0, 0;
  EXPECT_NEAR(trace_norm(m), 3.0, 1e-14);
}

TEST(TraceNorm, UnitaryInvariance) {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const Matrix m = ginibre(16, 16, rng);
    const Matrix u = haar_unitary(16, rng);
    EXPECT_NEAR(trace_norm(u * m * u.adjoint()), trace_norm(m), 1e-9);
  }
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs |= (x != c.normal());
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(Rng::algorithm, "mt19937_64");
  EXPECT_NE(Rng::derive(1, 0), Rng::derive(1, 1));
}

TEST(Random, HaarUnitaryIsUnitary) {
  Rng rng(10);
  const Matrix u = haar_unitary(9, rng);
  EXPECT_LT(max_abs_diff(u.adjoint() * u, identity(9)), 1e-13);
}
