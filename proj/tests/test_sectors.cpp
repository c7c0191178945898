#include <gtest/gtest.h>

#include "qrf/twirl.hpp"

using namespace qrf;

namespace {

Ket bits(std::initializer_list<std::pair<int, double>> terms) {
  Ket k = Ket::Zero(8);
  for (auto [b, a] : terms) k(b) = a;
  return k;
}

}  // namespace

TEST(ThreeQubit, ExplicitVectors) {
  const SectorDecomposition d = three_qubit_decomposition();
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.sectors[0].total_j, SpinJ(3));
  EXPECT_EQ(d.sectors[0].decohered_dim, 4u);
  EXPECT_EQ(d.sectors[0].multiplicity_dim, 1u);
  EXPECT_EQ(d.sectors[1].decohered_dim, 2u);
  EXPECT_EQ(d.sectors[1].multiplicity_dim, 2u);
  // |3/2, 0, 0> = |000>
  EXPECT_EQ((Ket(d.isometries[0].row(0).adjoint()) - bits({{0, 1.0}})).norm(), 0.0);
  // |1/2, s=0, p=1> = (2|001> - |010> - |100>)/sqrt6
  const double r6 = std::sqrt(6.0);
  const Ket v = d.isometries[1].row(1).adjoint();
  EXPECT_EQ((v - bits({{1, 2 / r6}, {2, -1 / r6}, {4, -1 / r6}})).norm(), 0.0);
}

TEST(ThreeQubit, AmplitudesFromFixedSet) {
  const SectorDecomposition d = three_qubit_decomposition();
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  const std::vector<double> allowed{0, 1, 1 / r2, -1 / r2, 1 / r3, 2 / r6, -1 / r6, -2 / r6, 1 / r6};
  for (const auto& v : d.isometries)
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const double x = v(i, j).real();
        EXPECT_EQ(v(i, j).imag(), 0.0);
        EXPECT_TRUE(std::any_of(allowed.begin(), allowed.end(), [&](double a) { return a == x; }))
            << x;
      }
}

TEST(ThreeQubit, Completeness) {
  const SectorDecomposition d = three_qubit_decomposition();
  EXPECT_LT(max_abs_diff(d.projector(0) + d.projector(1), identity(8)), 1e-15);
  for (const auto& v : d.isometries)
    EXPECT_LT(max_abs_diff(v * v.adjoint(), identity(static_cast<std::size_t>(v.rows()))), 1e-15);
}

TEST(QrfSystem, HalfReproducesExplicitBasis) {
  const SectorDecomposition& g = qrf_system_decomposition(SPIN_HALF);
  const SectorDecomposition t = three_qubit_decomposition();
  ASSERT_EQ(g.size(), 2u);
  for (std::size_t q = 0; q < 2; ++q) {
    EXPECT_EQ(g.sectors[q], t.sectors[q]);
    EXPECT_LT(max_abs_diff(g.projector(q), t.projector(q)), 1e-12);
  }
  // In fact identical, signs included.
  EXPECT_LT(max_abs_diff(g.isometries[1], t.isometries[1]), 1e-12);
}

TEST(QrfSystem, SpinOneStructure) {
  const SectorDecomposition& d = qrf_system_decomposition(SpinJ(2));
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.sectors[0].total_j, SpinJ(5));
  EXPECT_EQ(d.sectors[0].multiplicity_dim, 1u);
  EXPECT_EQ(d.sectors[1].total_j, SpinJ(3));
  EXPECT_EQ(d.sectors[1].multiplicity_dim, 2u);
  EXPECT_EQ(d.sectors[2].total_j, SpinJ(1));
  EXPECT_EQ(d.sectors[2].multiplicity_dim, 2u);
  std::size_t sum = 0;
  for (const auto& s : d.sectors) sum += s.dim();
  EXPECT_EQ(sum, 18u);
}

TEST(QrfSystem, SixProtectedQubitsAtL3) {
  const SectorDecomposition& d = qrf_system_decomposition(SpinJ(6));
  EXPECT_EQ(std::count_if(d.sectors.begin(), d.sectors.end(),
                          [](const SectorLabel& s) { return s.protects(); }),
            6);
}

TEST(QrfSystem, CompletenessAndLadders) {
  for (int t = 1; t <= 8; ++t) {
    const SpinJ L(t);
    const SectorDecomposition& d = qrf_system_decomposition(L);
    const Matrix u = d.virtual_unitary();
    EXPECT_LT(max_abs_diff(u.adjoint() * u, identity(d.dimension())), 1e-12) << t;
    std::size_t sum = 0;
    for (const auto& s : d.sectors) {
      EXPECT_EQ(s.decohered_dim, s.total_j.dim());
      sum += s.dim();
    }
    EXPECT_EQ(sum, d.dimension());
    if (t > 6) continue;
    const AngularMomentum a = angular_momentum_ops(L), h = angular_momentum_ops(SPIN_HALF);
    const Matrix il = identity(L.dim());
    const Matrix jz = tensor({a.z, il, identity(2)}) + tensor({il, a.z, identity(2)}) +
                      tensor({il, il, h.z});
    for (std::size_t q = 0; q < d.size(); ++q) {
      const auto& s = d.sectors[q];
      Matrix ladder = Matrix::Zero(static_cast<Eigen::Index>(s.decohered_dim),
                                   static_cast<Eigen::Index>(s.decohered_dim));
      for (std::size_t k = 0; k < s.decohered_dim; ++k)
        ladder(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = s.total_j.m_at(k);
      EXPECT_LT(max_abs_diff(d.isometries[q] * jz * d.isometries[q].adjoint(),
                             tensor(ladder, identity(s.multiplicity_dim))),
                1e-10);
    }
  }
}

TEST(QrfSystem, RotationsActTriviallyOnProtectedFactor) {
  Rng rng(11);
  for (int t : {1, 2, 3, 4}) {
    const SpinJ L(t);
    const SectorDecomposition& d = qrf_system_decomposition(L);
    for (int trial = 0; trial < 20; ++trial) {
      const Quaternion q = haar_quaternion(rng);
      const Matrix u = tensor({su2_representation(L, q), su2_representation(L, q),
                               su2_representation(SPIN_HALF, q)});
      for (std::size_t s = 0; s < d.size(); ++s) {
        const auto& lab = d.sectors[s];
        const Matrix x = d.isometries[s] * u * d.isometries[s].adjoint();
        const Matrix m = partial_trace(x, {lab.decohered_dim, lab.multiplicity_dim}, {0}) /
                         static_cast<double>(lab.multiplicity_dim);
        EXPECT_LT(max_abs_diff(x, tensor(m, identity(lab.multiplicity_dim))), 1e-10);
      }
    }
  }
}

TEST(QrfSystem, RejectsSpinZero) {
  EXPECT_THROW(qrf_system_decomposition(SpinJ(0)), InputError);
}

TEST(SectorProbabilities, StretchedState) {
  const SpinJ L(5);
  const auto p = two_spin_sector_probabilities(L, basis_ket(36, 0));
  EXPECT_EQ(p.back().total_j, SpinJ(10));
  EXPECT_NEAR(p.back().probability, 1.0, 1e-14);
}

TEST(SectorProbabilities, OrthogonalHalfSpins) {
  const Ket psi = tensor(Ket(basis_ket(2, 0)), coherent_state(SPIN_HALF, std::numbers::pi / 2));
  const auto p = two_spin_sector_probabilities(SPIN_HALF, psi);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0].probability, 0.25, 1e-14);  // J = 0
  EXPECT_NEAR(p[1].probability, 0.75, 1e-14);  // J = 1
  // Oracle: direct 4x4 projection onto the singlet.
  Ket s = Ket::Zero(4);
  s(1) = 1 / std::sqrt(2.0);
  s(2) = -1 / std::sqrt(2.0);
  EXPECT_NEAR(std::norm(s.dot(psi)), p[0].probability, 1e-15);
}

TEST(SectorProbabilities, SumToOneAndDimensionCheck) {
  Rng rng(12);
  for (int t : {1, 4, 9, 20, 50}) {
    const SpinJ L(t);
    const auto p = two_spin_sector_probabilities(L, random_pure_state(L.dim() * L.dim(), rng));
    double sum = 0;
    for (const auto& x : p) sum += x.probability;
    EXPECT_NEAR(sum, 1.0, 1e-12) << t;
  }
  EXPECT_THROW(two_spin_sector_probabilities(SpinJ(2), Ket::Zero(8)), DimensionError);
}
