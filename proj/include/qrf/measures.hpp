// measures.hpp
// Figures of merit: negativity, entropy of entanglement, and the Bloch-ball
// image of a single spin stored in the protected qubit of a primitive frame.

#pragma once

#include "qrf/twirl.hpp"

namespace qrf {

/// (||rho^{T_cut}||_1 - Tr rho) / 2; equals the usual negativity for unit
/// trace input (1/2 for a two-qubit maximally entangled state). Values
/// within 1e-12 of zero are reported as 0.
inline double negativity(const Matrix& rho, const Dims& dims, const Dims& cut) {
  const Matrix pt = partial_transpose(rho, dims, cut);
  const double n = 0.5 * (trace_norm(pt) - rho.trace().real());
  return std::abs(n) <= 1e-12 ? 0.0 : n;
}

/// Negativity scaled so a maximally entangled qubit pair scores 1. This is
/// the scale on which preserved-entanglement fractions are quoted.
inline double normalized_negativity(double n) { return 2.0 * n; }

/// sum_k p_k N[sigma^k], valid because the sector flags are orthogonal.
inline double block_negativity(const TwirlOutcome& outcome) {
  double total = 0.0;
  for (const auto& e : outcome.entries) {
    if (e.probability == 0.0) continue;
    Dims cut{e.dims.size() - 1};
    total += e.probability * negativity(e.sigma, e.dims, cut);
  }
  return total;
}

/// sum_k p_k |k><k| (x) sigma^k with each sigma^k zero-padded to the largest
/// factor dimensions seen; factors are {flag, local..., B}.
inline std::pair<Matrix, Dims> assemble_flag_state(const TwirlOutcome& outcome) {
  if (outcome.entries.empty()) throw InputError("assemble_flag_state: empty");
  const std::size_t nf = outcome.entries.front().dims.size();
  Dims pad(nf, 1);
  for (const auto& e : outcome.entries) {
    if (e.dims.size() != nf) throw DimensionError("assemble_flag_state: ranks");
    for (std::size_t k = 0; k < nf; ++k) pad[k] = std::max(pad[k], e.dims[k]);
  }
  const std::size_t block = product(pad);
  const std::size_t n = outcome.entries.size();
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(n * block),
                            static_cast<Eigen::Index>(n * block));
  const Dims pst = detail::strides(pad);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = outcome.entries[k];
    const Dims est = detail::strides(e.dims);
    const std::size_t de = product(e.dims);
    // Map each index of sigma's own factor grid into the padded grid.
    std::vector<std::size_t> map(de);
    for (std::size_t i = 0; i < de; ++i) {
      std::size_t rem = i, target = 0;
      for (std::size_t f = 0; f < nf; ++f) {
        target += (rem / est[f]) * pst[f];
        rem %= est[f];
      }
      map[i] = target;
    }
    const std::size_t off = k * block;
    for (std::size_t i = 0; i < de; ++i)
      for (std::size_t j = 0; j < de; ++j)
        rho(static_cast<Eigen::Index>(off + map[i]),
            static_cast<Eigen::Index>(off + map[j])) =
            e.probability *
            e.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  Dims dims{n};
  dims.insert(dims.end(), pad.begin(), pad.end());
  return {rho, dims};
}

/// Shannon entropy (bits) of the reduced state of a bipartite pure state.
inline double entropy_of_entanglement(const Ket& psi,
                                      std::pair<std::size_t, std::size_t> dims) {
  if (static_cast<std::size_t>(psi.size()) != dims.first * dims.second)
    throw InputError("entropy_of_entanglement: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw InputError("entropy_of_entanglement: state is not normalized");
  const Matrix reduced =
      partial_trace(projector(psi), {dims.first, dims.second}, {0});
  double h = 0.0;
  for (double p : eigvalsh(reduced))
    if (p > 1e-15) h -= p * std::log2(p);
  return h;
}

// ---------------------------------------------------------------------------
// Single-spin preservation (primitive frames only)

/// Protected-qubit state Tr_M[Pi_2 (frame (x) rho_in) Pi_2], not renormalized.
inline Matrix protected_state(const QrfParams& params, const Matrix& rho_in) {
  if (params.L.two_j() != 1)
    throw InputError("protected_state: only primitive (L = 1/2) frames");
  if (rho_in.rows() != 2 || rho_in.cols() != 2)
    throw DimensionError("protected_state: input must be a qubit state");
  static const SectorDecomposition decomp = three_qubit_decomposition();
  const Matrix& v = decomp.isometries[1];
  const Matrix rho = tensor(projector(canonical_qrf_state(params)), rho_in);
  return partial_trace(v * rho * v.adjoint(), {2, 2}, {1});
}

/// Pauli components Tr(rho sigma_i). Along the protected qubit these are the
/// expectations of 2 N_x, 2 N_y, 2 N_z.
inline Vec3 pauli_vector(const Matrix& rho) {
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
          (rho(0, 0) - rho(1, 1)).real()};
}

/// |theta, phi> = cos theta |0> + e^{i phi} sin theta |1>.
inline Ket spin_state(double theta, double phi) {
  Ket k(2);
  k << std::cos(theta), std::exp(I_UNIT * phi) * std::sin(theta);
  return k;
}

/// Bloch vector of the unnormalized protected state for input |theta, phi>.
/// Its length is bounded by the J = 1/2 sector weight.
inline Vec3 bloch_image(const QrfParams& params, double theta, double phi) {
  return pauli_vector(protected_state(params, projector(spin_state(theta, phi))));
}

/// Bloch vector of the renormalized protected state (zero when the sector
/// weight vanishes).
inline Vec3 bloch_image_normalized(const QrfParams& params, double theta,
                                   double phi) {
  const Matrix s = protected_state(params, projector(spin_state(theta, phi)));
  const double p = s.trace().real();
  return p > 1e-15 ? Vec3(pauli_vector(s) / p) : Vec3::Zero();
}

/// R = linear * s + translation, where s = <sigma>/2 is the input spin
/// vector (|s| <= 1/2) and R the protected Bloch vector from bloch_image.
/// On this scale a product frame has det = (2/9) sin^2 beta.
struct AffineMap {
  Mat3 linear = Mat3::Zero();
  Vec3 translation = Vec3::Zero();

  double det() const { return linear.determinant(); }
  Vec3 apply(const Vec3& spin_vector) const {
    return linear * spin_vector + translation;
  }
};

inline AffineMap affine_map(const QrfParams& params) {
  const Matrix id2 = identity(2);
  Matrix pauli[3] = {Matrix(2, 2), Matrix(2, 2), Matrix(2, 2)};
  pauli[0] << 0, 1, 1, 0;
  pauli[1] << 0, -I_UNIT, I_UNIT, 0;
  pauli[2] << 1, 0, 0, -1;
  AffineMap map;
  map.translation = pauli_vector(protected_state(params, id2 / 2.0));
  for (int i = 0; i < 3; ++i) {
    const Vec3 image = pauli_vector(protected_state(params, (id2 + pauli[i]) / 2.0));
    // Unit Bloch step along axis i is a spin-vector step of 1/2.
    map.linear.col(i) = 2.0 * (image - map.translation);
  }
  return map;
}

/// Reference curve |sin b sin 2g| / (3 sqrt 2), on the normalized scale.
inline double approx_negativity(double beta, double gamma) {
  return std::abs(std::sin(beta) * std::sin(2.0 * gamma)) / (3.0 * std::sqrt(2.0));
}

struct MeritReport {
  double negativity = 0.0;  // twirl-A of cos g|01> - sin g|10>, standard scale
  double det_a = 0.0;
  double volume_factor = 0.0;
  double radius = 0.0;
  double entropy = 0.0;  // bits, of the frame state
};

inline MeritReport merit_report(const QrfParams& params,
                                double gamma = std::numbers::pi / 4,
                                KrausModel model = KrausModel::exact) {
  MeritReport r;
  r.negativity = block_negativity(twirl_alice(params, entangled_pair(gamma), model));
  const std::size_t d = params.L.dim();
  r.entropy = entropy_of_entanglement(canonical_qrf_state(params), {d, d});
  if (params.L.two_j() == 1) {
    r.det_a = affine_map(params).det();
    r.volume_factor = std::abs(r.det_a);
    r.radius = std::cbrt(r.volume_factor);
  }
  return r;
}

}  // namespace qrf
