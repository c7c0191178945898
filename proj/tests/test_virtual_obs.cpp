#include <gtest/gtest.h>

#include "qrf/measures.hpp"
#include "qrf/virtual_obs.hpp"

using namespace qrf;

namespace {

const IdentityCheck& find(const std::vector<IdentityCheck>& v, const std::string& name) {
  for (const auto& c : v)
    if (c.name == name) return c;
  throw std::runtime_error("no check named " + name);
}

}  // namespace

TEST(Permutation, SwapOfTwoQubits) {
  const Matrix p = permutation_operator({2, 2}, {1, 0});
  const Ket out = p * basis_ket(4, 1);  // |01> -> |10>
  EXPECT_EQ((out - basis_ket(4, 2)).norm(), 0.0);
  EXPECT_LT(max_abs_diff(p * p, identity(4)), 1e-15);
}

TEST(Permutation, UnequalDims) {
  Rng rng(41);
  const Matrix a = random_density(2, rng), b = random_density(3, rng);
  const Matrix p = permutation_operator({2, 3}, {1, 0});
  EXPECT_LT(max_abs_diff(p * tensor(a, b) * p.adjoint(), tensor(b, a)), 1e-14);
}

TEST(Observables, HermitianAndTraceless) {
  const ObservableSet& o = observables();
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(hermiticity_residual(o.n(i)), 1e-15);
    EXPECT_NEAR(std::abs(o.n(i).trace()), 0.0, 1e-14);
  }
  EXPECT_NEAR(std::abs(o.S.trace()), 0.0, 1e-14);
}

TEST(Observables, SuTwoAlgebra) {
  const ObservableSet& o = observables();
  EXPECT_LT(max_abs_diff(commutator(o.Nx, o.Ny), I_UNIT * o.Nz), 1e-14);
  EXPECT_LT(max_abs_diff(commutator(o.Ny, o.Nz), I_UNIT * o.Nx), 1e-14);
  EXPECT_LT(max_abs_diff(commutator(o.Nz, o.Nx), I_UNIT * o.Ny), 1e-14);
}

TEST(Observables, SquaresAreQuarterOfProjector) {
  const ObservableSet& o = observables();
  const Matrix pi2 = three_qubit_decomposition().projector(1);
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(max_abs_diff(o.n(i) * o.n(i), pi2 / 4.0), 1e-14);
    // N_i^2 - Pi2 = -3/4 Pi2, whose largest entry is 3/4 * 2/3.
    EXPECT_NEAR(max_abs_diff(o.n(i) * o.n(i), pi2), 0.5, 1e-14);
  }
}

TEST(Observables, SSpectrum) {
  const RealVector ev = eigvalsh(observables().S);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev(k), -0.25, 1e-14);
  for (int k = 4; k < 8; ++k) EXPECT_NEAR(ev(k), 0.25, 1e-14);
}

TEST(Observables, NzInVirtualBasis) {
  // On the J = 1/2 sector, N acts as spin-1/2 on the protected qubit.
  const SectorDecomposition d = three_qubit_decomposition();
  const Matrix& v = d.isometries[1];
  const AngularMomentum h = angular_momentum_ops(SPIN_HALF);
  const Matrix nz = v * observables().Nz * v.adjoint();
  EXPECT_LT(max_abs_diff(nz, tensor(identity(2), h.z)), 1e-14);
  const Matrix nx = v * observables().Nx * v.adjoint();
  EXPECT_LT(max_abs_diff(nx, tensor(identity(2), h.x)), 1e-14);
}

TEST(Observables, ExpectationMatchesBlochImage) {
  Rng rng(42);
  const ObservableSet& o = observables();
  for (int t = 0; t < 5; ++t) {
    QrfParams p;
    p.alpha = rng.uniform() - 0.5;
    p.beta = rng.uniform() * std::numbers::pi;
    p.delta = rng.uniform();
    const double th = rng.uniform(), ph = rng.uniform() * 6;
    const Ket psi = tensor(canonical_qrf_state(p), spin_state(th, ph));
    const Vec3 r = bloch_image(p, th, ph);
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(2 * psi.dot(o.n(i) * psi).real(), r(i), 1e-13);
  }
}

TEST(Identities, AssertedChecksPass) {
  const auto checks = verify_identities();
  EXPECT_GE(checks.size(), 15u);
  for (const auto& c : checks) {
    if (c.asserted) {
      EXPECT_TRUE(c.passed()) << c.name << " residual " << c.residual;
    }
  }
}

TEST(Identities, ProjectorSquareIsReportedNotAsserted) {
  const auto checks = verify_identities();
  for (const char* axis : {"Nx", "Ny", "Nz"}) {
    const IdentityCheck& full = find(checks, std::string(axis) + "^2 = Pi2");
    EXPECT_FALSE(full.asserted);
    EXPECT_NEAR(full.residual, 0.5, 1e-12);
    EXPECT_TRUE(find(checks, std::string(axis) + "^2 = Pi2 / 4").passed());
  }
}

TEST(Identities, CyclicPermutationIsRotation) {
  const Mat3 r = cyclic_virtual_rotation(observables());
  EXPECT_LT((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  // 120 degrees: trace = 1 + 2 cos(2 pi / 3) = 0.
  EXPECT_NEAR(r.trace(), 0.0, 1e-12);
  EXPECT_LT((r * r * r - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Identities, SeedIndependent) {
  for (std::uint64_t s : {1u, 99u}) {
    for (const auto& c : verify_identities(s)) {
      if (c.asserted) {
        EXPECT_TRUE(c.passed()) << c.name;
      }
    }
  }
}
