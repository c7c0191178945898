// linalg.hpp
// Dense complex linear algebra over finite spin Hilbert spaces.
//
// Index convention: subsystem 0 is the leftmost (most significant) tensor
// factor. Every other header in qrf/ inherits it.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qrf {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Dims = std::vector<std::size_t>;

inline constexpr cplx I_UNIT{0.0, 1.0};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::size_t product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>{});
}

/// Largest entrywise modulus of a - b.
inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("max_abs_diff: shape mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix identity(std::size_t d) { return Matrix::Identity(d, d); }

inline Matrix projector(const Ket& psi) { return psi * psi.adjoint(); }

inline Ket basis_ket(std::size_t dim, std::size_t index) {
  Ket k = Ket::Zero(static_cast<Eigen::Index>(dim));
  k(static_cast<Eigen::Index>(index)) = 1.0;
  return k;
}

/// Kronecker product; `a` is the left (most significant) factor.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Ket tensor(const Ket& a, const Ket& b) {
  Ket out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Matrix tensor(std::initializer_list<Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

namespace detail {

inline void check_square_dims(const Matrix& rho, const Dims& dims,
                              const char* who) {
  if (rho.rows() != rho.cols())
    throw DimensionError(std::string(who) + ": matrix is not square");
  if (dims.empty() || product(dims) != static_cast<std::size_t>(rho.rows()))
    throw DimensionError(std::string(who) +
                         ": product of dims does not match matrix dimension");
}

// Row-major strides for the factors in `dims`.
inline Dims strides(const Dims& dims) {
  Dims s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

// Offsets into the full index for every multi-index over `subset` (in
// ascending factor order), enumerated row-major.
inline std::vector<std::size_t> subset_offsets(const Dims& dims,
                                               const std::vector<bool>& in) {
  const Dims st = strides(dims);
  std::vector<std::size_t> offs{0};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (!in[k]) continue;
    std::vector<std::size_t> next;
    next.reserve(offs.size() * dims[k]);
    for (std::size_t base : offs)
      for (std::size_t d = 0; d < dims[k]; ++d) next.push_back(base + d * st[k]);
    offs = std::move(next);
  }
  return offs;
}

inline std::vector<bool> membership(const Dims& dims, const Dims& subset,
                                    const char* who) {
  std::vector<bool> in(dims.size(), false);
  for (std::size_t k : subset) {
    if (k >= dims.size())
      throw DimensionError(std::string(who) + ": subsystem index out of range");
    if (in[k])
      throw DimensionError(std::string(who) + ": repeated subsystem index");
    in[k] = true;
  }
  return in;
}

}  // namespace detail

/// Reduced density operator on the factors listed in `keep` (kept in
/// ascending factor order).
inline Matrix partial_trace(const Matrix& rho, const Dims& dims,
                            const Dims& keep) {
  detail::check_square_dims(rho, dims, "partial_trace");
  std::vector<bool> kept = detail::membership(dims, keep, "partial_trace");
  std::vector<bool> traced(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) traced[k] = !kept[k];

  const auto koff = detail::subset_offsets(dims, kept);
  const auto toff = detail::subset_offsets(dims, traced);
  const auto n = static_cast<Eigen::Index>(koff.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      cplx acc = 0.0;
      for (std::size_t t : toff)
        acc += rho(static_cast<Eigen::Index>(koff[r] + t),
                   static_cast<Eigen::Index>(koff[c] + t));
      out(r, c) = acc;
    }
  return out;
}

/// Transpose on the indices of the listed factors only.
inline Matrix partial_transpose(const Matrix& rho, const Dims& dims,
                                const Dims& subsystems) {
  detail::check_square_dims(rho, dims, "partial_transpose");
  std::vector<bool> sel =
      detail::membership(dims, subsystems, "partial_transpose");
  std::vector<bool> rest(sel.size());
  for (std::size_t k = 0; k < sel.size(); ++k) rest[k] = !sel[k];

  const auto soff = detail::subset_offsets(dims, sel);
  const auto roff = detail::subset_offsets(dims, rest);
  Matrix out(rho.rows(), rho.cols());
  for (std::size_t r1 : roff)
    for (std::size_t s1 : soff)
      for (std::size_t r2 : roff)
        for (std::size_t s2 : soff)
          out(static_cast<Eigen::Index>(r1 + s2),
              static_cast<Eigen::Index>(r2 + s1)) =
              rho(static_cast<Eigen::Index>(r1 + s1),
                  static_cast<Eigen::Index>(r2 + s2));
  return out;
}

inline Matrix partial_transpose(const Matrix& rho, const Dims& dims,
                                std::size_t subsystem) {
  return partial_transpose(rho, dims, Dims{subsystem});
}

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

/// Hermitian eigendecomposition. Throws ShapeError when `m` is not
/// Hermitian within 1e-10.
inline EigenDecomposition eigh(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("eigh: matrix is not square");
  if (hermiticity_residual(m) > 1e-10)
    throw ShapeError("eigh: matrix is not Hermitian");
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw ShapeError("eigh: no convergence");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline RealVector eigvalsh(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("eigvalsh: matrix is not square");
  if (hermiticity_residual(m) > 1e-10)
    throw ShapeError("eigvalsh: matrix is not Hermitian");
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Sum of singular values.
inline double trace_norm(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("trace_norm: matrix is not square");
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_residual(m) <= 1e-12 * scale)
    return eigvalsh(m).cwiseAbs().sum();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

// ---------------------------------------------------------------------------
// Seeded randomness

/// Seeded 64-bit Mersenne twister. Same seed, same stream.
class Rng {
 public:
  static constexpr std::string_view algorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

  /// Seed for an independent child stream (splitmix64 of seed and index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Matrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      g(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
  return g;
}

/// Haar-distributed unitary: QR of a Ginibre sample with the phases of R's
/// diagonal absorbed into Q.
inline Matrix haar_unitary(std::size_t dim, Rng& rng) {
  const Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const cplx d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

inline Ket random_pure_state(std::size_t dim, Rng& rng) {
  Ket k = ginibre(dim, 1, rng).col(0);
  return k / k.norm();
}

/// Random full-rank density matrix (Hilbert-Schmidt measure).
inline Matrix random_density(std::size_t dim, Rng& rng) {
  const Matrix g = ginibre(dim, dim, rng);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline Matrix random_hermitian(std::size_t dim, Rng& rng) {
  const Matrix g = ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace qrf
