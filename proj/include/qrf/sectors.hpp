// sectors.hpp
// Total-angular-momentum sector decompositions H = (+)_q M_q (x) N_q, where
// rotations act irreducibly on the decohered factor M_q and trivially on the
// protected factor N_q.

#pragma once

#include "qrf/spin.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace qrf {

struct SectorLabel {
  SpinJ total_j;
  std::size_t multiplicity_dim = 1;  // dim N_q (protected)
  std::size_t decohered_dim = 1;     // dim M_q = 2J + 1

  std::size_t dim() const { return multiplicity_dim * decohered_dim; }
  bool protects() const { return multiplicity_dim > 1; }
  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
};

/// Sector isometries V_q map the physical space onto M_q (x) N_q with the
/// decohered index most significant: row = s * dim N_q + p.
struct SectorDecomposition {
  Dims space_dims;
  std::vector<SectorLabel> sectors;
  std::vector<Matrix> isometries;

  std::size_t dimension() const { return product(space_dims); }
  std::size_t size() const { return sectors.size(); }

  /// Pi_q = V_q^dagger V_q.
  Matrix projector(std::size_t q) const {
    return isometries.at(q).adjoint() * isometries.at(q);
  }

  /// All isometries stacked: the unitary from the physical basis to the
  /// virtual basis |q, s, p>.
  Matrix virtual_unitary() const {
    const auto d = static_cast<Eigen::Index>(dimension());
    Matrix u(d, d);
    Eigen::Index row = 0;
    for (const auto& v : isometries) {
      u.middleRows(row, v.rows()) = v;
      row += v.rows();
    }
    return u;
  }
};

/// The explicit three-qubit basis: J = 3/2 (M dim 4, N dim 1) and J = 1/2
/// (M dim 2, N dim 2). Vector |1/2, s, p> is row 2s + p of the second
/// isometry, so the protected qubit is the second virtual factor.
inline SectorDecomposition three_qubit_decomposition() {
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  auto ket = [](std::initializer_list<std::pair<int, double>> terms) {
    Ket k = Ket::Zero(8);
    for (auto [bits, amp] : terms) k(bits) = amp;
    return k;
  };
  // Computational index: spin 1 is the most significant bit, |0> = up.
  const std::vector<Ket> quartet{
      ket({{0b000, 1.0}}),
      ket({{0b001, 1 / r3}, {0b010, 1 / r3}, {0b100, 1 / r3}}),
      ket({{0b110, 1 / r3}, {0b101, 1 / r3}, {0b011, 1 / r3}}),
      ket({{0b111, 1.0}}),
  };
  const std::vector<Ket> doublets{
      ket({{0b010, 1 / r2}, {0b100, -1 / r2}}),
      ket({{0b001, 2 / r6}, {0b010, -1 / r6}, {0b100, -1 / r6}}),
      ket({{0b011, 1 / r2}, {0b101, -1 / r2}}),
      ket({{0b110, -2 / r6}, {0b101, 1 / r6}, {0b011, 1 / r6}}),
  };
  SectorDecomposition d;
  d.space_dims = {2, 2, 2};
  d.sectors = {{SpinJ(3), 1, 4}, {SpinJ(1), 2, 2}};
  Matrix v1(4, 8), v2(4, 8);
  for (int r = 0; r < 4; ++r) {
    v1.row(r) = quartet[r].adjoint();
    v2.row(r) = doublets[r].adjoint();
  }
  d.isometries = {v1, v2};
  return d;
}

namespace detail {

// H_L (x) H_L (x) H_1/2 coupled as ((L (x) L) -> J') (x) 1/2 -> J. The
// protected index p enumerates the allowed J' in the order J - 1/2, J + 1/2.
inline SectorDecomposition build_qrf_system_decomposition(SpinJ L) {
  const CgTable& pair = clebsch_gordan(L, L);
  const auto dl = static_cast<Eigen::Index>(L.dim());
  const Eigen::Index dqrf = dl * dl;

  SectorDecomposition d;
  d.space_dims = {L.dim(), L.dim(), 2};
  const int two_jp_max = 2 * L.two_j();
  for (int two_J = two_jp_max + 1; two_J >= 1; two_J -= 2) {
    const SpinJ J(two_J);
    std::vector<SpinJ> parents;
    for (int t : {two_J - 1, two_J + 1})
      if (t >= 0 && t <= two_jp_max) parents.emplace_back(t);
    const auto mult = static_cast<Eigen::Index>(parents.size());
    const auto dim_m = static_cast<Eigen::Index>(J.dim());

    RealMatrix v = RealMatrix::Zero(dim_m * mult, dqrf * 2);
    for (Eigen::Index p = 0; p < mult; ++p) {
      const SpinJ jp = parents[static_cast<std::size_t>(p)];
      // |J', M'> rows in the (m1, m2) product basis.
      const RealMatrix parent_rows = pair.block_rows(jp);
      const RealMatrix couple = clebsch_gordan(jp, SPIN_HALF).block_rows(J);
      // couple: (2J+1) x ((2J'+1) * 2); column index mp * 2 + s.
      for (Eigen::Index mi = 0; mi < dim_m; ++mi) {
        Eigen::Index row = mi * mult + p;
        for (Eigen::Index mp = 0; mp < parent_rows.rows(); ++mp)
          for (Eigen::Index s = 0; s < 2; ++s) {
            const double c = couple(mi, mp * 2 + s);
            if (c == 0.0) continue;
            for (Eigen::Index x = 0; x < dqrf; ++x) {
              const double a = parent_rows(mp, x);
              if (a != 0.0) v(row, x * 2 + s) += c * a;
            }
          }
      }
    }
    d.sectors.push_back({J, static_cast<std::size_t>(mult),
                         static_cast<std::size_t>(dim_m)});
    d.isometries.push_back(v.cast<cplx>());
  }
  return d;
}

class DecompositionCache {
 public:
  std::shared_ptr<const SectorDecomposition> get(SpinJ L) {
    {
      std::shared_lock lock(mu_);
      auto it = cache_.find(L.two_j());
      if (it != cache_.end()) return it->second;
    }
    auto built = std::make_shared<const SectorDecomposition>(
        build_qrf_system_decomposition(L));
    std::unique_lock lock(mu_);
    return cache_.try_emplace(L.two_j(), std::move(built)).first->second;
  }

 private:
  std::shared_mutex mu_;
  std::map<int, std::shared_ptr<const SectorDecomposition>> cache_;
};

inline DecompositionCache& decomposition_cache() {
  static DecompositionCache cache;
  return cache;
}

}  // namespace detail

/// Decomposition of H_L (x) H_L (x) H_1/2 (memoized per L): one sector at
/// J = 2L + 1/2 without protected factor and 2L sectors J = 2L - 1/2, ..., 1/2
/// each carrying a protected qubit.
inline const SectorDecomposition& qrf_system_decomposition(SpinJ L) {
  if (L.two_j() < 1) throw InputError("qrf_system_decomposition: L < 1/2");
  return *detail::decomposition_cache().get(L);
}

struct SectorProbability {
  SpinJ total_j;
  double probability;
};

/// p_J = ||Pi_J psi||^2 for psi on H_L (x) H_L, J ascending from 0 (or 1/2)
/// to 2L.
inline std::vector<SectorProbability> two_spin_sector_probabilities(
    SpinJ L, const Ket& psi) {
  const std::size_t d = L.dim();
  if (static_cast<std::size_t>(psi.size()) != d * d)
    throw DimensionError("two_spin_sector_probabilities: ket dimension");
  const CgTable& cg = clebsch_gordan(L, L);
  std::vector<SectorProbability> out;
  for (int two_J = cg.two_j_min(); two_J <= cg.two_j_max(); two_J += 2) {
    const SpinJ J(two_J);
    const RealMatrix& c = cg.block(J);
    double p = 0.0;
    for (Eigen::Index mi = 0; mi < c.rows(); ++mi) {
      const double M = J.value() - static_cast<double>(mi);
      cplx amp = 0.0;
      for (Eigen::Index a = 0; a < c.cols(); ++a) {
        const double m2 = M - L.m_at(static_cast<std::size_t>(a));
        if (std::abs(m2) > L.value() + 1e-9) continue;
        const auto b = static_cast<Eigen::Index>(std::lround(L.value() - m2));
        amp += c(mi, a) * psi(a * static_cast<Eigen::Index>(d) + b);
      }
      p += std::norm(amp);
    }
    out.push_back({J, p});
  }
  return out;
}

}  // namespace qrf
