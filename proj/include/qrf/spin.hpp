// spin.hpp
// Spin-j representations: angular momentum operators, rotations, coherent
// states and Clebsch-Gordan coupling.
//
// Basis order is descending m everywhere: index k holds |j, m = j - k>, so
// for spin 1/2 index 0 is |Jz = +1/2> = |0>. Phases follow Condon-Shortley.

#pragma once

#include "qrf/linalg.hpp"

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <utility>

namespace qrf {

/// Spin magnitude stored as twice its value so half-integers are exact.
class SpinJ {
 public:
  constexpr SpinJ() = default;
  constexpr explicit SpinJ(int two_j) : two_j_(two_j) {
    if (two_j < 0) throw InputError("SpinJ: negative spin");
  }

  /// From a (half-)integer value such as 0.5 or 3.
  static SpinJ from_value(double j) {
    const double twice = 2.0 * j;
    const double r = std::round(twice);
    if (std::abs(twice - r) > 1e-9 || r < 0)
      throw InputError("SpinJ: value is not a nonnegative half-integer");
    return SpinJ(static_cast<int>(r));
  }

  constexpr int two_j() const { return two_j_; }
  constexpr double value() const { return 0.5 * two_j_; }
  constexpr std::size_t dim() const {
    return static_cast<std::size_t>(two_j_) + 1;
  }
  /// m value at basis index k (descending order).
  constexpr double m_at(std::size_t k) const {
    return value() - static_cast<double>(k);
  }
  constexpr bool is_half_integer() const { return (two_j_ % 2) == 1; }

  friend constexpr auto operator<=>(SpinJ, SpinJ) = default;

  std::string str() const {
    return is_half_integer() ? std::to_string(two_j_) + "/2"
                             : std::to_string(two_j_ / 2);
  }

 private:
  int two_j_ = 0;
};

inline constexpr SpinJ SPIN_HALF{1};

struct AngularMomentum {
  Matrix x, y, z;

  Matrix along(const Vec3& n) const { return n(0) * x + n(1) * y + n(2) * z; }
  Matrix casimir() const { return x * x + y * y + z * z; }
};

/// J+ in the descending-m basis: J+|m> = sqrt(j(j+1) - m(m+1)) |m+1>.
inline RealMatrix raising_operator(SpinJ j) {
  const auto d = static_cast<Eigen::Index>(j.dim());
  const double jj = j.value() * (j.value() + 1.0);
  RealMatrix jp = RealMatrix::Zero(d, d);
  for (Eigen::Index k = 1; k < d; ++k) {
    const double m = j.m_at(static_cast<std::size_t>(k));
    jp(k - 1, k) = std::sqrt(jj - m * (m + 1.0));
  }
  return jp;
}

inline AngularMomentum angular_momentum_ops(SpinJ j) {
  const Matrix jp = raising_operator(j).cast<cplx>();
  const Matrix jm = jp.adjoint();
  Matrix jz = Matrix::Zero(jp.rows(), jp.cols());
  for (Eigen::Index k = 0; k < jz.rows(); ++k)
    jz(k, k) = j.m_at(static_cast<std::size_t>(k));
  return {0.5 * (jp + jm), (jp - jm) / (2.0 * I_UNIT), jz};
}

inline void require_unit_axis(const Vec3& axis) {
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    throw InputError("rotation axis must be a unit vector");
}

/// exp(-i angle n.J) for a unit axis n.
inline Matrix rotation_matrix(SpinJ j, const Vec3& axis, double angle) {
  require_unit_axis(axis);
  if (j.two_j() == 1) {
    const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
    Matrix u(2, 2);
    u << cplx(c, -s * axis(2)), cplx(-s * axis(1), -s * axis(0)),
        cplx(s * axis(1), -s * axis(0)), cplx(c, s * axis(2));
    return u;
  }
  const auto es = eigh(angular_momentum_ops(j).along(axis));
  Ket phases(es.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(-I_UNIT * angle * es.values(k));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

inline Ket rotate_ket(SpinJ j, const Vec3& axis, double angle, const Ket& psi) {
  if (static_cast<std::size_t>(psi.size()) != j.dim())
    throw DimensionError("rotate_ket: ket dimension does not match spin");
  return rotation_matrix(j, axis, angle) * psi;
}

namespace detail {
inline double log_factorial(double n) { return std::lgamma(n + 1.0); }
}  // namespace detail

/// |Jz = L> rotated about y by beta: amplitudes d^L_{m,L}(beta), which are
/// sqrt(binom(2L, L-m)) cos(beta/2)^(L+m) sin(beta/2)^(L-m).
inline Ket coherent_state(SpinJ L, double beta) {
  if (beta < -1e-12 || beta > std::numbers::pi + 1e-12)
    throw InputError("coherent_state: beta outside [0, pi]");
  const double lv = L.value();
  const double c = std::cos(beta / 2.0), s = std::sin(beta / 2.0);
  Ket v = Ket::Zero(static_cast<Eigen::Index>(L.dim()));
  for (std::size_t k = 0; k < L.dim(); ++k) {
    const double m = L.m_at(k);
    const double log_binom = 0.5 * (detail::log_factorial(2 * lv) -
                                    detail::log_factorial(lv + m) -
                                    detail::log_factorial(lv - m));
    v(static_cast<Eigen::Index>(k)) = std::exp(log_binom) *
                                      std::pow(c, lv + m) * std::pow(s, lv - m);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Clebsch-Gordan coefficients

/// <j1 j2; m1 m2 | J M> for one (j1, j2) pair. Stored per J block as a real
/// matrix with rows M = J, J-1, ..., -J and columns m1 = j1, ..., -j1;
/// m2 = M - m1 is implied and entries with |m2| > j2 are zero.
class CgTable {
 public:
  CgTable() = default;
  CgTable(SpinJ j1, SpinJ j2) : j1_(j1), j2_(j2) {}

  SpinJ j1() const { return j1_; }
  SpinJ j2() const { return j2_; }

  int two_j_max() const { return j1_.two_j() + j2_.two_j(); }
  int two_j_min() const { return std::abs(j1_.two_j() - j2_.two_j()); }

  /// Total spins, descending.
  std::vector<SpinJ> totals() const {
    std::vector<SpinJ> out;
    for (int t = two_j_max(); t >= two_j_min(); t -= 2) out.emplace_back(t);
    return out;
  }

  bool has_block(SpinJ J) const { return blocks_.count(J.two_j()) != 0; }

  const RealMatrix& block(SpinJ J) const {
    auto it = blocks_.find(J.two_j());
    if (it == blocks_.end()) throw InputError("CgTable: total spin not coupled");
    return it->second;
  }
  RealMatrix& block(SpinJ J) { return blocks_[J.two_j()]; }

  /// Coefficient with every spin label given as twice its value.
  double operator()(int two_J, int two_M, int two_m1, int two_m2) const {
    if (two_m1 + two_m2 != two_M) return 0.0;
    if (std::abs(two_m1) > j1_.two_j() || std::abs(two_m2) > j2_.two_j() ||
        std::abs(two_M) > two_J)
      return 0.0;
    if ((j1_.two_j() - two_m1) % 2 != 0 || (two_J - two_M) % 2 != 0) return 0.0;
    auto it = blocks_.find(two_J);
    if (it == blocks_.end()) return 0.0;
    return it->second((two_J - two_M) / 2, (j1_.two_j() - two_m1) / 2);
  }

  /// Rows of the coupling isometry for block J: (2J+1) x (d1 d2), product
  /// index a * d2 + b.
  RealMatrix block_rows(SpinJ J) const {
    const RealMatrix& c = block(J);
    const auto d2 = static_cast<Eigen::Index>(j2_.dim());
    RealMatrix rows = RealMatrix::Zero(c.rows(), c.cols() * d2);
    for (Eigen::Index mi = 0; mi < c.rows(); ++mi) {
      const double M = J.value() - static_cast<double>(mi);
      for (Eigen::Index a = 0; a < c.cols(); ++a) {
        const double m2 = M - j1_.m_at(static_cast<std::size_t>(a));
        if (std::abs(m2) > j2_.value() + 1e-9) continue;
        const auto b = static_cast<Eigen::Index>(std::lround(j2_.value() - m2));
        rows(mi, a * d2 + b) = c(mi, a);
      }
    }
    return rows;
  }

 private:
  SpinJ j1_{}, j2_{};
  std::map<int, RealMatrix> blocks_;
};

namespace detail {

// One lowering step J-|J, M+1> restricted to the m1 grid of row M, unnormalized.
inline RealVector lowered_row(const RealVector& prev, double M, SpinJ j1,
                              SpinJ j2) {
  const double a1 = j1.value() * (j1.value() + 1.0);
  const double a2 = j2.value() * (j2.value() + 1.0);
  RealVector low = RealVector::Zero(prev.size());
  for (Eigen::Index a = 0; a < prev.size(); ++a) {
    const double m1 = j1.m_at(static_cast<std::size_t>(a));
    const double m2 = M - m1;
    if (std::abs(m2) > j2.value() + 1e-9) continue;
    double v = 0.0;
    if (a >= 1) v += prev(a - 1) * std::sqrt(a1 - (m1 + 1.0) * m1);
    if (std::abs(m2 + 1.0) <= j2.value() + 1e-9)
      v += prev(a) * std::sqrt(a2 - (m2 + 1.0) * m2);
    low(a) = v;
  }
  return low;
}

// Build the table by diagonalizing J^2 inside each fixed-M subspace (a real
// symmetric tridiagonal matrix in the m1 basis). Eigenvalues J(J+1) are
// distinct there, so each eigenvector is a CG column up to sign. Signs:
// M = J rows have a positive m1 = j1 coefficient; lower rows agree in sign
// with one lowering step of the row above.
inline CgTable build_cg_table(SpinJ j1, SpinJ j2) {
  CgTable table(j1, j2);
  const auto d1 = static_cast<Eigen::Index>(j1.dim());
  for (SpinJ J : table.totals())
    table.block(J) = RealMatrix::Zero(static_cast<Eigen::Index>(J.dim()), d1);

  const double c1 = j1.value() * (j1.value() + 1.0);
  const double c2 = j2.value() * (j2.value() + 1.0);
  const int tmax = table.two_j_max();
  for (int two_M = tmax; two_M >= -tmax; two_M -= 2) {
    const double M = 0.5 * two_M;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index a = 0; a < d1; ++a)
      if (std::abs(M - j1.m_at(static_cast<std::size_t>(a))) <= j2.value() + 1e-9)
        idx.push_back(a);
    const auto n = static_cast<Eigen::Index>(idx.size());
    RealMatrix h = RealMatrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double m1 = j1.m_at(static_cast<std::size_t>(idx[r]));
      const double m2 = M - m1;
      h(r, r) = c1 + c2 + 2.0 * m1 * m2;
      if (r + 1 < n) {
        // <m1-1, m2+1| J1- J2+ |m1, m2>
        const double off = std::sqrt(c1 - m1 * (m1 - 1.0)) *
                           std::sqrt(c2 - m2 * (m2 + 1.0));
        h(r, r + 1) = off;
        h(r + 1, r) = off;
      }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double jv = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * es.eigenvalues()(k)));
      const SpinJ J(static_cast<int>(std::lround(2.0 * jv)));
      RealVector vec = RealVector::Zero(d1);
      for (Eigen::Index r = 0; r < n; ++r) vec(idx[r]) = es.eigenvectors()(r, k);
      RealMatrix& blk = table.block(J);
      const Eigen::Index mi = (J.two_j() - two_M) / 2;
      double sign;
      if (mi == 0) {
        sign = vec(0) > 0.0 ? 1.0 : -1.0;
      } else {
        const RealVector low =
            lowered_row(blk.row(mi - 1).transpose(), M, j1, j2);
        sign = low.dot(vec) > 0.0 ? 1.0 : -1.0;
      }
      blk.row(mi) = sign * vec.transpose();
    }
  }
  return table;
}

class CgCache {
 public:
  std::shared_ptr<const CgTable> get(SpinJ j1, SpinJ j2) {
    const auto key = std::make_pair(j1.two_j(), j2.two_j());
    {
      std::shared_lock lock(mu_);
      auto it = tables_.find(key);
      if (it != tables_.end()) return it->second;
    }
    auto built = std::make_shared<const CgTable>(build_cg_table(j1, j2));
    std::unique_lock lock(mu_);
    return tables_.try_emplace(key, std::move(built)).first->second;
  }

 private:
  std::shared_mutex mu_;
  std::map<std::pair<int, int>, std::shared_ptr<const CgTable>> tables_;
};

inline CgCache& cg_cache() {
  static CgCache cache;
  return cache;
}

}  // namespace detail

/// Condon-Shortley Clebsch-Gordan table for j1 (x) j2 (memoized).
inline const CgTable& clebsch_gordan(SpinJ j1, SpinJ j2) {
  // Cache entries are never evicted, so the reference stays valid.
  return *detail::cg_cache().get(j1, j2);
}

/// Orthogonal change of basis from |m1> (x) |m2> to coupled |J, M>, rows
/// ordered by descending J then descending M.
inline RealMatrix coupling_isometry_real(const CgTable& cg) {
  const auto d = static_cast<Eigen::Index>(cg.j1().dim() * cg.j2().dim());
  RealMatrix u(d, d);
  Eigen::Index row = 0;
  for (SpinJ J : cg.totals()) {
    const RealMatrix rows = cg.block_rows(J);
    u.middleRows(row, rows.rows()) = rows;
    row += rows.rows();
  }
  return u;
}

inline Matrix coupling_isometry(SpinJ j1, SpinJ j2) {
  return coupling_isometry_real(clebsch_gordan(j1, j2)).cast<cplx>();
}

}  // namespace qrf
