// twirl.hpp
// G-twirling over SU(2): the exact sector formula, a Monte-Carlo Haar
// average, and the selective operations a twirled reference frame induces on
// one spin-1/2.

#pragma once

#include "qrf/sectors.hpp"

#include <numbers>
#include <thread>

namespace qrf {

/// Reference-frame parameters. For L = 1/2 the frame is the Schmidt form
///   cos a |0>(cos b/2 |0> + e^{id} sin b/2 |1>)
///     + sin a |1>(sin b/2 |0> - e^{-id} cos b/2 |1>);
/// for L > 1/2 it is |Jz = L> (x) (coherent state at polar angle b) and
/// alpha, delta are ignored.
struct QrfParams {
  double alpha = 0.0;
  double beta = std::numbers::pi / 2;
  double delta = 0.0;
  SpinJ L = SPIN_HALF;
  bool product_only = false;

  double effective_alpha() const { return product_only ? 0.0 : alpha; }

  void validate() const {
    if (beta < -1e-12 || beta > std::numbers::pi + 1e-12)
      throw InputError("QrfParams: beta outside [0, pi]");
    if (L.two_j() < 1) throw InputError("QrfParams: L < 1/2");
  }
};

inline Ket canonical_qrf_state(const QrfParams& params) {
  params.validate();
  if (params.L.two_j() == 1) {
    const double a = params.effective_alpha();
    const double cb = std::cos(params.beta / 2), sb = std::sin(params.beta / 2);
    const cplx e = std::exp(I_UNIT * params.delta);
    Ket k(4);
    k << std::cos(a) * cb, std::cos(a) * e * sb, std::sin(a) * sb,
        -std::sin(a) * std::conj(e) * cb;
    return k;
  }
  return tensor(Ket(basis_ket(params.L.dim(), 0)),
                coherent_state(params.L, params.beta));
}

/// Decomposition of (frame) (x) (one spin-1/2) matching the frame's L.
inline const SectorDecomposition& frame_decomposition(SpinJ L) {
  static const SectorDecomposition three = three_qubit_decomposition();
  return L.two_j() == 1 ? three : qrf_system_decomposition(L);
}

/// cos g |01> - sin g |10>; g = pi/4 is the singlet.
inline Ket entangled_pair(double gamma) {
  Ket k = Ket::Zero(4);
  k(1) = std::cos(gamma);
  k(2) = -std::sin(gamma);
  return k;
}

inline Ket singlet() { return entangled_pair(std::numbers::pi / 4); }

// ---------------------------------------------------------------------------
// Exact twirl

/// Sector formula: project onto each sector, fully decohere M_q and keep N_q.
/// `untouched_dim` trailing factors are carried along unchanged.
inline Matrix gtwirl_exact(const Matrix& rho, const SectorDecomposition& decomp,
                           std::size_t untouched_dim = 1) {
  const std::size_t d = decomp.dimension();
  if (rho.rows() != rho.cols() ||
      static_cast<std::size_t>(rho.rows()) != d * untouched_dim)
    throw DimensionError("gtwirl_exact: state does not match decomposition");
  const Matrix id_u = identity(untouched_dim);
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (std::size_t q = 0; q < decomp.size(); ++q) {
    const auto& label = decomp.sectors[q];
    const Matrix w = tensor(decomp.isometries[q], id_u);
    const Matrix x = w * rho * w.adjoint();
    const std::size_t rest = label.multiplicity_dim * untouched_dim;
    const Matrix kept = partial_trace(x, {label.decohered_dim, rest}, {1});
    const Matrix twirled =
        tensor(identity(label.decohered_dim) /
                   static_cast<double>(label.decohered_dim),
               kept);
    out += w.adjoint() * twirled * w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo twirl

struct Quaternion {
  double w, x, y, z;
};

/// Uniform point on S^3, i.e. a Haar-random SU(2) element.
inline Quaternion haar_quaternion(Rng& rng) {
  Quaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

/// Spin-j representation of the SU(2) element w - i (x, y, z).sigma.
inline Matrix su2_representation(SpinJ j, const Quaternion& q) {
  if (j.two_j() == 1) {
    Matrix u(2, 2);
    u << cplx(q.w, -q.z), cplx(-q.y, -q.x), cplx(q.y, -q.x), cplx(q.w, q.z);
    return u;
  }
  const double s = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  if (s < 1e-15) {
    // +-identity; the sign is (+1)^(2j) for w > 0 and (-1)^(2j) otherwise.
    const double sign = (q.w < 0 && j.is_half_integer()) ? -1.0 : 1.0;
    return sign * identity(j.dim());
  }
  const double angle = 2.0 * std::atan2(s, q.w);
  return rotation_matrix(j, Vec3(q.x / s, q.y / s, q.z / s), angle);
}

/// Average of U rho U^dagger over `samples` Haar-random rotations applied
/// rigidly to every listed spin; `untouched_dim` trailing factors get the
/// identity. The budget is cut into fixed chunks, chunk c drawing from
/// Rng::derive(seed, c); `workers` threads share the chunks and partial sums
/// are combined in chunk order, so the result does not depend on `workers`.
inline Matrix gtwirl_montecarlo(const Matrix& rho, const std::vector<SpinJ>& spins,
                                std::size_t samples, Rng& rng,
                                std::size_t untouched_dim = 1,
                                std::size_t workers = 1) {
  if (samples == 0) throw InputError("gtwirl_montecarlo: samples must be >= 1");
  std::size_t d = untouched_dim;
  for (SpinJ s : spins) d *= s.dim();
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != d)
    throw DimensionError("gtwirl_montecarlo: state dimension");
  constexpr std::size_t kChunks = 64;
  const std::size_t chunks = std::min(kChunks, samples);
  workers = std::max<std::size_t>(1, std::min(workers, chunks));

  const std::uint64_t base_seed = rng.next_u64();
  std::vector<Matrix> partial(chunks, Matrix::Zero(rho.rows(), rho.cols()));
  auto run_chunk = [&](std::size_t c) {
    Rng local(Rng::derive(base_seed, c));
    const std::size_t begin = samples * c / chunks;
    const std::size_t end = samples * (c + 1) / chunks;
    const Matrix id_u = identity(untouched_dim);
    for (std::size_t k = begin; k < end; ++k) {
      const Quaternion q = haar_quaternion(local);
      Matrix u = Matrix::Identity(1, 1);
      for (SpinJ s : spins) u = tensor(u, su2_representation(s, q));
      if (untouched_dim > 1) u = tensor(u, id_u);
      partial[c].noalias() += u * rho * u.adjoint();
    }
  };
  auto run = [&](std::size_t w) {
    for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  Matrix total = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& p : partial) total += p;
  return total / static_cast<double>(samples);
}

// ---------------------------------------------------------------------------
// Induced selective operations

enum class KrausModel {
  /// Contract the frame through each sector isometry and trace out M_q.
  exact,
  /// The printed closed-form pair for the J = 1/2 sector of a primitive
  /// frame. Its M2 lacks the sqrt(2/3) sin(a) cos(b/2) e^{-id} entry in
  /// row 1, column 0, so it agrees with `exact` only at alpha = 0.
  closed_form,
};

inline const char* to_string(KrausModel m) {
  return m == KrausModel::exact ? "exact" : "closed-form";
}

struct SectorKraus {
  SectorLabel label;
  std::vector<Matrix> operators;  // each multiplicity_dim x 2
};

struct KrausSet {
  std::vector<SectorKraus> sectors;

  /// Sum of M^dagger M over every sector's operators.
  Matrix completeness() const {
    Matrix s = Matrix::Zero(2, 2);
    for (const auto& sk : sectors)
      for (const auto& m : sk.operators) s += m.adjoint() * m;
    return s;
  }
};

/// The closed-form J = 1/2 operators of a primitive frame.
inline std::vector<Matrix> closed_form_kraus(const QrfParams& params) {
  const double a = params.effective_alpha();
  const double sb = std::sin(params.beta / 2), cb = std::cos(params.beta / 2);
  const cplx e = std::exp(I_UNIT * params.delta);
  const cplx minus = (e * std::cos(a) - std::sin(a)) * sb;
  const cplx plus = (e * std::cos(a) + std::sin(a)) * sb;
  const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
  Matrix m1(2, 2), m2(2, 2);
  m1 << minus / r2, 0.0, -plus / r6, std::sqrt(2.0 / 3.0) * std::cos(a) * cb;
  m2 << 0.0, minus / r2, 0.0, plus / r6;
  return {m1, m2};
}

inline KrausSet induced_kraus(const QrfParams& params,
                              KrausModel model = KrausModel::exact) {
  params.validate();
  if (model == KrausModel::closed_form && params.L.two_j() != 1)
    throw InputError("induced_kraus: closed form exists only for L = 1/2");
  const SectorDecomposition& decomp = frame_decomposition(params.L);
  const Ket frame = canonical_qrf_state(params);
  // Frame (x) identity on the system spin: (2 dim_frame) x 2.
  Matrix embed = Matrix::Zero(frame.size() * 2, 2);
  for (Eigen::Index k = 0; k < frame.size(); ++k) {
    embed(2 * k, 0) = frame(k);
    embed(2 * k + 1, 1) = frame(k);
  }
  KrausSet set;
  for (std::size_t q = 0; q < decomp.size(); ++q) {
    const auto& label = decomp.sectors[q];
    SectorKraus sk{label, {}};
    if (model == KrausModel::closed_form && label.protects()) {
      sk.operators = closed_form_kraus(params);
    } else {
      const Matrix k = decomp.isometries[q] * embed;
      const auto mult = static_cast<Eigen::Index>(label.multiplicity_dim);
      for (std::size_t s = 0; s < label.decohered_dim; ++s)
        sk.operators.push_back(
            k.middleRows(static_cast<Eigen::Index>(s) * mult, mult));
    }
    set.sectors.push_back(std::move(sk));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Twirled two-party outcomes

struct TwirlEntry {
  std::vector<SectorLabel> sectors;  // one label per twirled party
  double probability = 0.0;
  Matrix sigma;  // conditional state on (protected factors) (x) (rest)
  Dims dims;     // tensor factors of sigma; the last one is the B side
};

struct TwirlOutcome {
  std::vector<TwirlEntry> entries;

  double total_probability() const {
    double p = 0.0;
    for (const auto& e : entries) p += e.probability;
    return p;
  }
};

namespace detail {

inline void require_two_qubit_state(const Ket& phi) {
  if (phi.size() != 4) throw InputError("twirl: phi must be a two-qubit state");
  if (std::abs(phi.norm() - 1.0) > 1e-10)
    throw InputError("twirl: phi is not normalized");
}

inline TwirlEntry make_entry(std::vector<SectorLabel> labels, Matrix weighted,
                             Dims dims) {
  const double p = weighted.trace().real();
  TwirlEntry e{std::move(labels), p, {}, std::move(dims)};
  if (p > 1e-300) {
    e.sigma = weighted / p;
  } else {
    const auto d = static_cast<Eigen::Index>(product(e.dims));
    e.sigma = Matrix::Identity(d, d) / static_cast<double>(d);
    e.probability = 0.0;
  }
  return e;
}

}  // namespace detail

/// Twirl Alice's side of phi (A first) with her frame appended: each sector
/// yields p_k sigma^k = sum_i (M_i (x) 1) phi phi^dagger (M_i (x) 1)^dagger.
inline TwirlOutcome twirl_alice(const QrfParams& params, const Ket& phi,
                                KrausModel model = KrausModel::exact) {
  detail::require_two_qubit_state(phi);
  const KrausSet kraus = induced_kraus(params, model);
  const Matrix rho = projector(phi);
  const Matrix id2 = identity(2);
  TwirlOutcome out;
  for (const auto& sk : kraus.sectors) {
    const auto mult = sk.label.multiplicity_dim;
    Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(mult * 2),
                              static_cast<Eigen::Index>(mult * 2));
    for (const auto& m : sk.operators) {
      const Matrix op = tensor(m, id2);
      acc += op * rho * op.adjoint();
    }
    out.entries.push_back(detail::make_entry({sk.label}, std::move(acc), {mult, 2}));
  }
  return out;
}

/// Independent twirls at both ends: entry (j, k) holds
/// p sigma = sum (M^A_i (x) M^B_l) phi phi^dagger (...)^dagger.
inline TwirlOutcome twirl_both(const QrfParams& params_a,
                               const QrfParams& params_b, const Ket& phi,
                               KrausModel model = KrausModel::exact) {
  detail::require_two_qubit_state(phi);
  const KrausSet ka = induced_kraus(params_a, model);
  const KrausSet kb = induced_kraus(params_b, model);
  const Matrix rho = projector(phi);
  TwirlOutcome out;
  for (const auto& sa : ka.sectors)
    for (const auto& sb : kb.sectors) {
      const auto ma = sa.label.multiplicity_dim, mb = sb.label.multiplicity_dim;
      Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(ma * mb),
                                static_cast<Eigen::Index>(ma * mb));
      for (const auto& a : sa.operators)
        for (const auto& b : sb.operators) {
          const Matrix op = tensor(a, b);
          acc += op * rho * op.adjoint();
        }
      out.entries.push_back(
          detail::make_entry({sa.label, sb.label}, std::move(acc), {ma, mb}));
    }
  return out;
}

}  // namespace qrf
