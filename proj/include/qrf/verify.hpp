// verify.hpp
// Self-check suite behind `qrf verify`: module invariants plus the
// Monte-Carlo vs exact twirl cross-check. Output text depends only on the
// level, seed and injected fault.

#pragma once

#include "qrf/optimize.hpp"
#include "qrf/virtual_obs.hpp"

#include <cstdio>
#include <sstream>

namespace qrf {

enum class VerifyLevel { fast, full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::fast;
  std::uint64_t seed = 20240601;
  std::string fault;  // "" or "cg-sign"
  std::size_t threads = 1;
};

struct CheckResult {
  std::string module;
  std::string invariant;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(
        checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
  }

  std::string text() const {
    std::ostringstream os;
    char buf[320];
    for (const auto& c : checks) {
      std::snprintf(buf, sizeof buf, "%-4s %-12s %-52s residual=%.3e tol=%.1e\n",
                    c.passed ? "ok" : "FAIL", c.module.c_str(), c.invariant.c_str(),
                    c.residual, c.tolerance);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%zu checks, %zu failed\n", checks.size(), failures());
    os << buf;
    return os.str();
  }
};

/// Closed-form (Racah) Clebsch-Gordan coefficient; spins given doubled.
inline double racah_cg(int tj1, int tj2, int tJ, int tm1, int tm2, int tM) {
  if (tm1 + tm2 != tM) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0.0;
  auto lf = [](int twice) { return std::lgamma(0.5 * twice + 1.0); };
  const double pre =
      0.5 * (std::log(tJ + 1.0) + lf(tJ + tj1 - tj2) + lf(tJ - tj1 + tj2) +
             lf(tj1 + tj2 - tJ) - lf(tj1 + tj2 + tJ + 2) + lf(tJ + tM) + lf(tJ - tM) +
             lf(tj1 - tm1) + lf(tj1 + tm1) + lf(tj2 - tm2) + lf(tj2 + tm2));
  double sum = 0.0;
  for (int k = 0;; ++k) {
    const int a = tj1 + tj2 - tJ - 2 * k, b = tj1 - tm1 - 2 * k, c = tj2 + tm2 - 2 * k;
    const int d = tJ - tj2 + tm1 + 2 * k, e = tJ - tj1 - tm2 + 2 * k;
    if (a < 0 || b < 0 || c < 0) break;
    if (d < 0 || e < 0) continue;
    const double t = std::exp(pre - (lf(2 * k) + lf(a) + lf(b) + lf(c) + lf(d) + lf(e)));
    sum += (k % 2 == 0) ? t : -t;
  }
  return sum;
}

namespace detail {

class Checks {
 public:
  explicit Checks(VerificationReport& r) : r_(r) {}
  void add(const char* module, std::string name, double residual, double tol) {
    r_.checks.push_back({module, std::move(name), residual, tol,
                         std::isfinite(residual) && residual <= tol});
  }

 private:
  VerificationReport& r_;
};

/// |X| = sqrt(X^dagger X) for Hermitian X.
inline Matrix hermitian_abs(const Matrix& x) {
  const auto es = eigh(x);
  return es.vectors * es.values.cwiseAbs().cast<cplx>().asDiagonal() *
         es.vectors.adjoint();
}

inline Matrix bloch_density(const Vec3& r) {
  Matrix m(2, 2);
  m << 1.0 + r(2), cplx(r(0), -r(1)), cplx(r(0), r(1)), 1.0 - r(2);
  return m / 2.0;
}

inline Vec3 random_unit(Rng& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  return v / v.norm();
}

inline QrfParams random_primitive(Rng& rng) {
  QrfParams p;
  p.alpha = (rng.uniform() - 0.5) * std::numbers::pi;
  p.beta = rng.uniform() * std::numbers::pi;
  p.delta = (rng.uniform() - 0.5) * 2.0 * std::numbers::pi;
  return p;
}

inline void verify_linalg(Checks& ck, Rng& rng, bool full) {
  {
    const Matrix rho = projector(random_pure_state(8, rng));
    double r = std::abs(partial_trace(rho, {2, 2, 2}, {0, 2}).trace().real() - 1.0);
    const Matrix pt = partial_transpose(rho, {2, 2, 2}, 1);
    r = std::max(r, max_abs_diff(partial_trace(pt, {2, 2, 2}, {0}),
                                 partial_trace(rho, {2, 2, 2}, {0})));
    r = std::max(r, max_abs_diff(partial_transpose(pt, {2, 2, 2}, 1), rho));
    ck.add("linalg", "partial trace/transpose consistency", r, 1e-12);
  }
  {
    const std::size_t d = full ? 512 : 64;
    const Matrix h = random_hermitian(d, rng);
    const auto es = eigh(h);
    const Matrix back = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
    double r = max_abs_diff(back, h);
    r = std::max(r, max_abs_diff(es.vectors.adjoint() * es.vectors, identity(d)));
    ck.add("linalg", "eigh reconstruction + orthonormality", r, 1e-10);
  }
  {
    double r = 0.0;
    for (int t = 0; t < 5; ++t) {
      const Matrix m = ginibre(16, 16, rng);
      const Matrix u = haar_unitary(16, rng), v = haar_unitary(16, rng);
      r = std::max(r, std::abs(trace_norm(u * m * v) - trace_norm(m)));
    }
    ck.add("linalg", "trace norm unitary invariance", r, 1e-9);
  }
  {
    const Matrix pt = partial_transpose(projector(singlet()), {2, 2}, 1);
    const RealVector ev = eigvalsh(pt);
    double r = std::abs(ev(0) + 0.5);
    for (int k = 1; k < 4; ++k) r = std::max(r, std::abs(ev(k) - 0.5));
    ck.add("linalg", "singlet partial transpose spectrum", r, 1e-12);
  }
}

inline void verify_spin(Checks& ck, Rng& rng, bool full, bool cg_fault) {
  {
    const int max_two = full ? 50 : 25;
    double r = 0.0;
    for (int t = 1; t <= max_two; ++t) {
      const SpinJ j(t);
      const AngularMomentum a = angular_momentum_ops(j);
      r = std::max(r, max_abs_diff(commutator(a.x, a.y), I_UNIT * a.z));
      r = std::max(r, max_abs_diff(a.casimir(),
                                   j.value() * (j.value() + 1.0) * identity(j.dim())));
    }
    ck.add("spin", "[Jx,Jy] = iJz and Casimir", r, 1e-10);
  }
  {
    const int max_two = full ? 12 : 6;
    double r = 0.0;
    for (int a = 1; a <= max_two; ++a)
      for (int b = 1; b <= max_two; ++b) {
        CgTable tab = clebsch_gordan(SpinJ(a), SpinJ(b));
        if (cg_fault && a == 2 && b == 2) tab.block(SpinJ(2))(1, 0) *= -1.0;
        for (int tJ = std::abs(a - b); tJ <= a + b; tJ += 2)
          for (int tM = -tJ; tM <= tJ; tM += 2)
            for (int tm1 = -a; tm1 <= a; tm1 += 2) {
              const int tm2 = tM - tm1;
              if (std::abs(tm2) > b) continue;
              r = std::max(r, std::abs(tab(tJ, tM, tm1, tm2) -
                                       racah_cg(a, b, tJ, tm1, tm2, tM)));
            }
      }
    ck.add("spin", "Clebsch-Gordan vs Racah formula", r, 1e-12);
  }
  {
    const int max_two = full ? 50 : 16;
    double r = 0.0;
    for (int t = 1; t <= max_two; ++t) {
      const RealMatrix u = coupling_isometry_real(clebsch_gordan(SpinJ(t), SpinJ(t)));
      r = std::max(r, (u * u.transpose() - RealMatrix::Identity(u.rows(), u.cols()))
                          .cwiseAbs().maxCoeff());
    }
    ck.add("spin", "coupling isometry orthonormality", r, 1e-11);
  }
  {
    double r = 0.0;
    for (int t = 1; t <= 16; ++t) {
      const SpinJ L(t);
      const double beta = rng.uniform() * std::numbers::pi;
      const Ket k = coherent_state(L, beta);
      const AngularMomentum a = angular_momentum_ops(L);
      const Vec3 expect(k.dot(a.x * k).real(), k.dot(a.y * k).real(), k.dot(a.z * k).real());
      r = std::max(r, (expect - L.value() * Vec3(std::sin(beta), 0, std::cos(beta)))
                          .cwiseAbs().maxCoeff());
      const Ket rot = rotate_ket(L, Vec3::UnitY(), beta, basis_ket(L.dim(), 0));
      r = std::max(r, (rot - k).cwiseAbs().maxCoeff());
    }
    ck.add("spin", "coherent state <J> = L n(beta)", r, 1e-10);
  }
}

inline void verify_sectors(Checks& ck, Rng& rng, bool full) {
  const int max_two = full ? 8 : 4;
  double comp = 0.0, iso = 0.0, jz = 0.0, rot = 0.0;
  for (int t = 1; t <= max_two; ++t) {
    const SpinJ L(t);
    const SectorDecomposition& d = qrf_system_decomposition(L);
    const std::size_t n = d.dimension();
    const Matrix u = d.virtual_unitary();
    comp = std::max(comp, max_abs_diff(u.adjoint() * u, identity(n)));
    for (const auto& v : d.isometries)
      iso = std::max(iso, max_abs_diff(v * v.adjoint(), identity(static_cast<std::size_t>(v.rows()))));
    const AngularMomentum aL = angular_momentum_ops(L), ah = angular_momentum_ops(SPIN_HALF);
    const Matrix jz_tot = tensor({aL.z, identity(L.dim()), identity(2)}) +
                          tensor({identity(L.dim()), aL.z, identity(2)}) +
                          tensor({identity(L.dim()), identity(L.dim()), ah.z});
    for (int trial = 0; trial < (t <= 4 ? 3 : 1); ++trial) {
      const Quaternion q = haar_quaternion(rng);
      const Matrix ur = tensor({su2_representation(L, q), su2_representation(L, q),
                                su2_representation(SPIN_HALF, q)});
      for (std::size_t s = 0; s < d.size(); ++s) {
        const auto& lab = d.sectors[s];
        const Matrix& v = d.isometries[s];
        const Matrix x = v * ur * v.adjoint();
        const Matrix a = partial_trace(x, {lab.decohered_dim, lab.multiplicity_dim}, {0}) /
                         static_cast<double>(lab.multiplicity_dim);
        rot = std::max(rot, max_abs_diff(x, tensor(a, identity(lab.multiplicity_dim))));
        if (trial == 0) {
          Matrix ladder = Matrix::Zero(static_cast<Eigen::Index>(lab.decohered_dim),
                                       static_cast<Eigen::Index>(lab.decohered_dim));
          for (std::size_t k = 0; k < lab.decohered_dim; ++k)
            ladder(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
                lab.total_j.m_at(k);
          jz = std::max(jz, max_abs_diff(v * jz_tot * v.adjoint(),
                                         tensor(ladder, identity(lab.multiplicity_dim))));
        }
      }
    }
  }
  ck.add("sectors", "sum of projectors = I", comp, 1e-12);
  ck.add("sectors", "V V^dagger = I per sector", iso, 1e-12);
  ck.add("sectors", "total Jz = ladder (x) I_mult", jz, 1e-10);
  ck.add("sectors", "rotations act trivially on protected factor", rot, 1e-10);

  const SectorDecomposition three = three_qubit_decomposition();
  const SectorDecomposition& gen = qrf_system_decomposition(SPIN_HALF);
  double r = 0.0;
  for (std::size_t q = 0; q < 2; ++q)
    r = std::max(r, max_abs_diff(three.projector(q), gen.projector(q)));
  ck.add("sectors", "general L=1/2 projectors = explicit basis", r, 1e-12);
}

inline void verify_twirl(Checks& ck, Rng& rng, bool full, std::size_t threads) {
  {
    const std::size_t samples = full ? 100000 : 20000;
    const int states = full ? 10 : 3;
    const SectorDecomposition three = three_qubit_decomposition();
    const std::vector<SpinJ> spins(3, SPIN_HALF);
    double worst = 0.0;
    for (int s = 0; s < states; ++s) {
      const Matrix rho = projector(random_pure_state(8, rng));
      Rng mc(Rng::derive(rng.next_u64(), static_cast<std::uint64_t>(s)));
      worst = std::max(worst, max_abs_diff(gtwirl_exact(rho, three),
                                           gtwirl_montecarlo(rho, spins, samples, mc, 1, threads)));
    }
    ck.add("twirl", "Monte-Carlo vs exact (" + std::to_string(samples) + " samples)", worst,
           5.0 / std::sqrt(static_cast<double>(samples)));
  }
  {
    double comp = 0.0;
    for (int t = 0; t < 10; ++t)
      comp = std::max(comp, max_abs_diff(induced_kraus(random_primitive(rng)).completeness(),
                                         identity(2)));
    for (int t = 2; t <= (full ? 8 : 4); ++t) {
      QrfParams p;
      p.L = SpinJ(t);
      p.beta = rng.uniform() * std::numbers::pi;
      comp = std::max(comp, max_abs_diff(induced_kraus(p).completeness(), identity(2)));
    }
    ck.add("twirl", "Kraus completeness", comp, 1e-10);
  }
  {
    // Sector-wise: Tr_M[(V (x) 1) G[frame (x) phi] (V (x) 1)^dagger] = p sigma.
    double r = 0.0;
    for (int t : {1, 2, 3}) {
      QrfParams p = t == 1 ? random_primitive(rng) : QrfParams{};
      p.L = SpinJ(t);
      if (t != 1) p.beta = rng.uniform() * std::numbers::pi;
      const Ket phi = random_pure_state(4, rng);
      const SectorDecomposition& d = frame_decomposition(p.L);
      const Matrix rho = projector(tensor(canonical_qrf_state(p), phi));
      const Matrix g = gtwirl_exact(rho, d, 2);
      const TwirlOutcome out = twirl_alice(p, phi);
      for (std::size_t q = 0; q < d.size(); ++q) {
        const auto& lab = d.sectors[q];
        const Matrix w = tensor(d.isometries[q], identity(2));
        const Matrix red = partial_trace(w * g * w.adjoint(),
                                         {lab.decohered_dim, lab.multiplicity_dim * 2}, {1});
        const auto& e = out.entries[q];
        r = std::max(r, max_abs_diff(red, e.probability * e.sigma));
      }
    }
    ck.add("twirl", "Kraus outcome = exact twirl per sector", r, 1e-10);
  }
  {
    double tp = 0.0, pos = 0.0, idem = 0.0;
    const SectorDecomposition three = three_qubit_decomposition();
    for (int t = 0; t < 5; ++t) {
      const Matrix rho = random_density(8, rng);
      const Matrix g = gtwirl_exact(rho, three);
      tp = std::max(tp, std::abs(g.trace().real() - 1.0));
      pos = std::max(pos, -eigvalsh(g).minCoeff());
      idem = std::max(idem, max_abs_diff(gtwirl_exact(g, three), g));
    }
    ck.add("twirl", "exact twirl trace preserving", tp, 1e-12);
    ck.add("twirl", "exact twirl positive", std::max(pos, 0.0), 1e-10);
    ck.add("twirl", "exact twirl idempotent", idem, 1e-12);
  }
  {
    // Rotating the frame equals counter-rotating the system.
    double r = 0.0;
    const SectorDecomposition three = three_qubit_decomposition();
    for (int t = 0; t < 20; ++t) {
      const Matrix rho = projector(random_pure_state(8, rng));
      const Matrix u = su2_representation(SPIN_HALF, haar_quaternion(rng));
      const Matrix active = tensor({u, u, identity(2)});
      const Matrix passive = tensor({identity(2), identity(2), Matrix(u.adjoint())});
      r = std::max(r, max_abs_diff(gtwirl_exact(active * rho * active.adjoint(), three),
                                   gtwirl_exact(passive * rho * passive.adjoint(), three)));
    }
    ck.add("twirl", "passive/active equivalence", r, 1e-10);
  }
  {
    double r = 0.0;
    const QrfParams p = random_primitive(rng);
    const double ref = block_negativity(twirl_alice(p, singlet()));
    for (int t = 0; t < 20; ++t) {
      const Ket phi = tensor(identity(2), haar_unitary(2, rng)) * singlet();
      r = std::max(r, std::abs(block_negativity(twirl_alice(p, phi)) - ref));
    }
    ck.add("twirl", "maximally entangled inputs lose equally", r, 1e-10);
  }
}

inline void verify_measures(Checks& ck, Rng& rng, bool full) {
  {
    double r = 0.0;
    const int n = full ? 20 : 5;
    for (int t = 0; t < n; ++t) {
      const Ket phi = random_pure_state(4, rng);
      const TwirlOutcome out =
          t % 2 == 0 ? twirl_alice(random_primitive(rng), phi)
                     : twirl_both(random_primitive(rng), random_primitive(rng), phi);
      const auto [rho, dims] = assemble_flag_state(out);
      r = std::max(r, std::abs(block_negativity(out) -
                               negativity(rho, dims, Dims{dims.size() - 1})));
    }
    ck.add("measures", "block negativity = assembled negativity", r, 1e-10);
  }
  {
    // |sum A_i (x) B_i| = sum |A_i| (x) |B_i| for orthogonal supports.
    double r = 0.0;
    for (int t = 0; t < 5; ++t) {
      const Matrix u = haar_unitary(6, rng);
      Matrix lhs = Matrix::Zero(18, 18), rhs = Matrix::Zero(18, 18);
      for (int i = 0; i < 3; ++i) {
        const Matrix basis = u.middleCols(2 * i, 2);
        const Matrix a = basis * random_hermitian(2, rng) * basis.adjoint();
        const Matrix b = random_hermitian(3, rng);
        lhs += tensor(a, b);
        rhs += tensor(hermitian_abs(a), hermitian_abs(b));
      }
      r = std::max(r, max_abs_diff(hermitian_abs(lhs), rhs));
    }
    ck.add("measures", "orthogonal-support absolute value splits", r, 1e-9);
  }
  {
    double lin = 0.0, contr = 0.0;
    for (int t = 0; t < 100; ++t) {
      const QrfParams p = random_primitive(rng);
      const Vec3 x = random_unit(rng) * rng.uniform(), y = random_unit(rng) * rng.uniform();
      const Vec3 mid = pauli_vector(protected_state(p, bloch_density((x + y) / 2)));
      const Vec3 avg = 0.5 * (pauli_vector(protected_state(p, bloch_density(x))) +
                              pauli_vector(protected_state(p, bloch_density(y))));
      lin = std::max(lin, (mid - avg).cwiseAbs().maxCoeff());
      const AffineMap m = affine_map(p);
      lin = std::max(lin, (m.apply(x / 2) - pauli_vector(protected_state(p, bloch_density(x))))
                              .cwiseAbs().maxCoeff());
      for (int k = 0; k < 10; ++k)
        contr = std::max(contr, m.apply(random_unit(rng) / 2).norm() - 1.0);
    }
    ck.add("measures", "Bloch map affine", lin, 1e-10);
    ck.add("measures", "Bloch image inside unit ball", std::max(contr, 0.0), 1e-9);
  }
  {
    double r = 0.0;
    for (int t = 0; t < 10; ++t) {
      const Ket phi = random_pure_state(4, rng);
      const Matrix rho = projector(phi);
      const Matrix loc = tensor(haar_unitary(2, rng), haar_unitary(2, rng));
      r = std::max(r, std::abs(negativity(rho, {2, 2}, Dims{1}) -
                               negativity(loc * rho * loc.adjoint(), {2, 2}, Dims{1})));
    }
    ck.add("measures", "negativity local-unitary invariance", r, 1e-10);
  }
}

inline void verify_virtual(Checks& ck, Rng& rng) {
  for (const auto& c : verify_identities(rng.next_u64()))
    if (c.asserted) ck.add("virtual-obs", c.name, c.residual, c.tolerance);
  const ObservableSet& o = observables();
  const Matrix pi2 = three_qubit_decomposition().projector(1);
  double r = 0.0;
  for (int t = 0; t < 20; ++t) {
    const QrfParams p = random_primitive(rng);
    const double th = rng.uniform() * std::numbers::pi, ph = rng.uniform() * 2 * std::numbers::pi;
    const Ket psi = tensor(canonical_qrf_state(p), spin_state(th, ph));
    const double w = psi.dot(pi2 * psi).real();
    if (w < 1e-6) continue;
    const Vec3 n(psi.dot(o.Nx * psi).real(), psi.dot(o.Ny * psi).real(),
                 psi.dot(o.Nz * psi).real());
    r = std::max(r, (2.0 * n / w - bloch_image_normalized(p, th, ph)).cwiseAbs().maxCoeff());
  }
  ck.add("virtual-obs", "2<N>/<Pi2> = normalized Bloch image", r, 1e-10);
}

inline void verify_optimize(Checks& ck, std::size_t threads) {
  SweepConfig cfg;
  cfg.objective = Objective::negativity_a;
  cfg.product_only = true;
  cfg.axes[kBeta] = Axis{0.0, std::numbers::pi, 37};
  cfg.threads = threads;
  const OptimumReport a = optimize(cfg), b = optimize(cfg);
  double diff = std::abs(a.best_value - b.best_value) +
                std::abs(a.best_params.beta - b.best_params.beta);
  for (std::size_t i = 0; i < a.grid_trace.size(); ++i)
    diff += std::abs(a.grid_trace[i].value - b.grid_trace[i].value);
  ck.add("optimize", "sweep determinism", diff, 0.0);
  ck.add("optimize", "refined >= coarse", std::max(0.0, a.coarse_best - a.best_value), 0.0);
  double sym = 0.0;
  for (double beta : {0.4, 1.3, 2.2})
    for (double delta : {0.3, 1.1, 2.9}) {
      Point x = cfg.fixed, y = cfg.fixed;
      x[kBeta] = y[kBeta] = beta;
      x[kDelta] = delta;
      y[kDelta] = -delta;
      sym = std::max(sym, std::abs(evaluate(cfg, x) - evaluate(cfg, y)));
    }
  ck.add("optimize", "delta -> -delta symmetry (product frame)", sym, 1e-10);
}

}  // namespace detail

inline VerificationReport run_verification(const VerifyOptions& opt) {
  if (!opt.fault.empty() && opt.fault != "cg-sign")
    throw InputError("run_verification: unknown fault '" + opt.fault + "'");
  const bool full = opt.level == VerifyLevel::full;
  VerificationReport rep;
  detail::Checks ck(rep);
  Rng rng(opt.seed);
  detail::verify_linalg(ck, rng, full);
  detail::verify_spin(ck, rng, full, opt.fault == "cg-sign");
  detail::verify_sectors(ck, rng, full);
  detail::verify_twirl(ck, rng, full, opt.threads);
  detail::verify_measures(ck, rng, full);
  detail::verify_virtual(ck, rng);
  detail::verify_optimize(ck, opt.threads);
  return rep;
}

}  // namespace qrf
