// virtual_obs.hpp
// Relational observables on three spin-1/2 particles: the sector observable S
// and the protected-qubit observables N_x, N_y, N_z, plus the operator
// identities behind them.

#pragma once

#include "qrf/sectors.hpp"

#include <array>
#include <string>

namespace qrf {

using SpinVector = std::array<Matrix, 3>;

/// J_a on spin `a` of three qubits.
inline SpinVector qubit_spin(std::size_t a) {
  const AngularMomentum j = angular_momentum_ops(SPIN_HALF);
  const Matrix id2 = identity(2);
  SpinVector out;
  const Matrix* comps[3] = {&j.x, &j.y, &j.z};
  for (int i = 0; i < 3; ++i) {
    Matrix f[3] = {id2, id2, id2};
    f[a] = *comps[i];
    out[i] = tensor({f[0], f[1], f[2]});
  }
  return out;
}

inline Matrix dot(const SpinVector& a, const SpinVector& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline SpinVector cross(const SpinVector& a, const SpinVector& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline SpinVector operator-(const SpinVector& a, const SpinVector& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Unitary that permutes tensor factors: factor k of the output is factor
/// perm[k] of the input.
inline Matrix permutation_operator(const Dims& dims, const std::vector<std::size_t>& perm) {
  if (perm.size() != dims.size())
    throw DimensionError("permutation_operator: rank mismatch");
  Dims out_dims(dims.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out_dims[k] = dims.at(perm[k]);
  const Dims in_st = detail::strides(dims), out_st = detail::strides(out_dims);
  const auto d = static_cast<Eigen::Index>(product(dims));
  Matrix p = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      const std::size_t digit = (i / in_st[perm[k]]) % dims[perm[k]];
      target += digit * out_st[k];
    }
    p(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return p;
}

struct ObservableSet {
  Matrix S, Nx, Ny, Nz;

  const Matrix& n(int i) const { return i == 0 ? Nx : (i == 1 ? Ny : Nz); }
};

inline ObservableSet build_observables() {
  const SpinVector j1 = qubit_spin(0), j2 = qubit_spin(1), j3 = qubit_spin(2);
  const double r3 = std::sqrt(3.0);
  ObservableSet o;
  o.S = (dot(j1, j2) + dot(j2, j3) + dot(j1, j3)) / 3.0;
  o.Nx = dot(j2 - j1, j3) / r3;
  o.Ny = (2.0 / r3) * dot(cross(j1, j2), j3);
  o.Nz = (dot(j2, j3) + dot(j1, j3) - 2.0 * dot(j1, j2)) / 3.0;
  return o;
}

inline const ObservableSet& observables() {
  static const ObservableSet o = build_observables();
  return o;
}

struct IdentityCheck {
  std::string name;
  double residual;
  double tolerance;
  bool asserted = true;  // false: reported only
  bool passed() const { return residual <= tolerance; }
};

/// Conjugation of (N_x, N_y, N_z) by the cyclic relabelling 1 -> 2 -> 3 -> 1
/// expressed as a 3x3 matrix: P N_i P^dagger = sum_j R(i, j) N_j.
inline Mat3 cyclic_virtual_rotation(const ObservableSet& o) {
  const Matrix p = permutation_operator({2, 2, 2}, {2, 0, 1});
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    const Matrix moved = p * o.n(i) * p.adjoint();
    for (int k = 0; k < 3; ++k)
      r(i, k) = (moved * o.n(k)).trace().real() / (o.n(k) * o.n(k)).trace().real();
  }
  return r;
}

inline std::vector<IdentityCheck> verify_identities(std::uint64_t seed = 7) {
  const ObservableSet& o = observables();
  const SpinVector a = qubit_spin(0), b = qubit_spin(1), c = qubit_spin(2);
  const SectorDecomposition decomp = three_qubit_decomposition();
  const Matrix pi1 = decomp.projector(0), pi2 = decomp.projector(1);
  std::vector<IdentityCheck> out;

  const Matrix twotwo =
      commutator(dot(a, c), dot(b, c)) - I_UNIT * dot(cross(a, b), c);
  out.push_back({"order 2 with order 2", twotwo.cwiseAbs().maxCoeff(), 1e-12});

  const Matrix fifth = commutator(dot(b, c), dot(cross(a, b), c)) -
                       (I_UNIT / 2.0) * dot(a, c - b);
  out.push_back({"order 2 with order 3", fifth.cwiseAbs().maxCoeff(), 1e-12});

  const char* axes = "xyz";
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const Matrix r = commutator(o.n(i), o.n(j)) - I_UNIT * o.n(k);
    out.push_back({std::string("[N") + axes[i] + ", N" + axes[j] + "] = i N" + axes[k],
                   r.cwiseAbs().maxCoeff(), 1e-12});
  }
  for (int i = 0; i < 3; ++i)
    out.push_back({std::string("N") + axes[i] + "^2 = Pi2",
                   max_abs_diff(o.n(i) * o.n(i), pi2), 1e-12, false});
  for (int i = 0; i < 3; ++i)
    out.push_back({std::string("N") + axes[i] + "^2 = Pi2 / 4",
                   max_abs_diff(o.n(i) * o.n(i), pi2 / 4.0), 1e-12});

  // S = +1/4 on J = 3/2, -1/4 on J = 1/2.
  out.push_back({"S = (Pi1 - Pi2) / 4", max_abs_diff(o.S, (pi1 - pi2) / 4.0), 1e-12});
  {
    const RealVector ev = eigvalsh(o.S);
    double r = 0.0;
    for (Eigen::Index k = 0; k < 8; ++k)
      r = std::max(r, std::abs(ev(k) - (k < 4 ? -0.25 : 0.25)));
    out.push_back({"S spectrum {-1/4 x4, +1/4 x4}", r, 1e-12});
  }

  double annihilate = 0.0, herm = 0.0;
  for (int i = 0; i < 3; ++i) {
    annihilate = std::max(annihilate, (o.n(i) * pi1).cwiseAbs().maxCoeff());
    herm = std::max(herm, hermiticity_residual(o.n(i)));
  }
  herm = std::max(herm, hermiticity_residual(o.S));
  out.push_back({"N_i Pi1 = 0", annihilate, 1e-12});
  out.push_back({"Hermiticity", herm, 1e-12});

  {
    const Mat3 r = cyclic_virtual_rotation(o);
    const Matrix p = permutation_operator({2, 2, 2}, {2, 0, 1});
    double resid = 0.0;
    for (int i = 0; i < 3; ++i) {
      Matrix expect = Matrix::Zero(8, 8);
      for (int k = 0; k < 3; ++k) expect += r(i, k) * o.n(k);
      resid = std::max(resid, max_abs_diff(p * o.n(i) * p.adjoint(), expect));
    }
    resid = std::max(resid, (r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff());
    resid = std::max(resid, std::abs(r.determinant() - 1.0));
    // rotation angle from the trace: 1 + 2 cos(120 deg) = 0
    resid = std::max(resid, std::abs(r.trace()));
    out.push_back({"cyclic permutation = 120 deg virtual rotation", resid, 1e-10});
  }

  {
    // Permutation invariance of S, and at least one transposition moving Nx.
    double s_resid = 0.0, nx_moved = 0.0;
    const std::vector<std::vector<std::size_t>> perms{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& pm : perms) {
      const Matrix p = permutation_operator({2, 2, 2}, pm);
      s_resid = std::max(s_resid, max_abs_diff(p * o.S * p.adjoint(), o.S));
      nx_moved = std::max(nx_moved, max_abs_diff(p * o.Nx * p.adjoint(), o.Nx));
    }
    out.push_back({"S permutation invariant", s_resid, 1e-12});
    out.push_back({"Nx not permutation invariant", nx_moved > 0.1 ? 0.0 : 1.0, 0.0});
  }

  {
    Rng rng(seed);
    double r = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Matrix u1 = haar_unitary(2, rng);
      const Matrix u = tensor({u1, u1, u1});
      for (int i = 0; i < 4; ++i) {
        const Matrix& m = i == 3 ? o.S : o.n(i);
        r = std::max(r, max_abs_diff(u * m * u.adjoint(), m));
      }
    }
    out.push_back({"rotational invariance", r, 1e-10});
  }
  return out;
}

}  // namespace qrf
