// optimize.hpp
// Parameter sweeps: exhaustive grid, then coordinate-wise golden-section
// refinement. Grid points are evaluated in parallel and reduced in grid
// order, so a given configuration always yields the same report.

#pragma once

#include "qrf/measures.hpp"

#include <array>
#include <chrono>
#include <optional>

namespace qrf {

enum class Objective { volume, negativity_a, negativity_ab };

inline const char* to_string(Objective o) {
  switch (o) {
    case Objective::volume: return "volume";
    case Objective::negativity_a: return "negativity_a";
    case Objective::negativity_ab: return "negativity_ab";
  }
  return "?";
}

struct Axis {
  double min = 0.0;
  double max = 0.0;
  std::size_t steps = 2;

  double at(std::size_t k) const {
    return steps == 1 ? min
                      : min + (max - min) * static_cast<double>(k) /
                                  static_cast<double>(steps - 1);
  }
  double spacing() const {
    return steps > 1 ? (max - min) / static_cast<double>(steps - 1) : 0.0;
  }
};

/// Coordinates a sweep can move, in nesting order (last varies fastest).
enum Coord : std::size_t { kAlpha, kBeta, kDelta, kGamma, kBetaB, kCoords };

inline constexpr std::array<const char*, kCoords> kCoordNames{
    "alpha", "beta", "delta", "gamma", "beta_b"};

using Point = std::array<double, kCoords>;

struct SweepConfig {
  Objective objective = Objective::volume;
  std::array<std::optional<Axis>, kCoords> axes{};
  /// Values of coordinates that are not swept (beta_b < 0 means "= beta").
  Point fixed{0.0, std::numbers::pi / 2, 0.0, std::numbers::pi / 4, -1.0};
  SpinJ L = SPIN_HALF;
  bool product_only = false;
  bool identical_frames = true;  // twirl-both: B's frame copies A's
  KrausModel kraus = KrausModel::exact;
  bool refine = true;
  double refine_tolerance = 1e-4;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool keep_trace = true;

  void validate() const {
    for (std::size_t c = 0; c < kCoords; ++c)
      if (axes[c] && (axes[c]->steps < 2 || !(axes[c]->max >= axes[c]->min)))
        throw InputError(std::string("SweepConfig: bad axis ") + kCoordNames[c]);
    if (!(refine_tolerance > 0.0)) throw InputError("SweepConfig: tolerance <= 0");
    if (objective == Objective::volume && L.two_j() != 1)
      throw InputError("SweepConfig: volume objective needs L = 1/2");
  }
};

struct TracePoint {
  Point point;
  double value;
};

struct OptimumReport {
  QrfParams best_params;
  QrfParams best_params_b;  // differs from best_params only when unconstrained
  double gamma = std::numbers::pi / 4;
  Point best_point{};
  double best_value = 0.0;
  double coarse_best = 0.0;
  std::vector<TracePoint> grid_trace;
  std::size_t evaluations = 0;
  double wall_time = 0.0;  // seconds
};

inline QrfParams params_at(const SweepConfig& cfg, const Point& x) {
  QrfParams p;
  p.alpha = x[kAlpha];
  p.beta = x[kBeta];
  p.delta = x[kDelta];
  p.L = cfg.L;
  p.product_only = cfg.product_only;
  return p;
}

inline QrfParams params_b_at(const SweepConfig& cfg, const Point& x) {
  QrfParams p = params_at(cfg, x);
  if (!cfg.identical_frames && x[kBetaB] >= 0.0) p.beta = x[kBetaB];
  return p;
}

/// Objective value: |det A| for volume, otherwise negativity on the
/// normalized scale (maximally entangled pair = 1).
inline double evaluate(const SweepConfig& cfg, const Point& x) {
  const QrfParams p = params_at(cfg, x);
  switch (cfg.objective) {
    case Objective::volume:
      return std::abs(affine_map(p).det());
    case Objective::negativity_a:
      return normalized_negativity(
          block_negativity(twirl_alice(p, entangled_pair(x[kGamma]), cfg.kraus)));
    case Objective::negativity_ab:
      return normalized_negativity(block_negativity(
          twirl_both(p, params_b_at(cfg, x), entangled_pair(x[kGamma]), cfg.kraus)));
  }
  return 0.0;
}

namespace detail {

/// argmax of f on [a, b] by golden-section search down to width `tol`.
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace detail

/// Values closer than this (relative) count as ties; ties keep the point met
/// first in grid order. Symmetric twins of an optimum (for instance the
/// (alpha, delta) -> (-alpha, delta + pi) pair, related by a rigid rotation)
/// therefore resolve to a fixed representative.
inline constexpr double kTieTolerance = 1e-12;

inline bool improves(double candidate, double incumbent) {
  return candidate > incumbent + kTieTolerance * std::max(1.0, std::abs(incumbent));
}

inline OptimumReport optimize(const SweepConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::size_t> swept;
  std::size_t total = 1;
  for (std::size_t c = 0; c < kCoords; ++c)
    if (cfg.axes[c]) {
      swept.push_back(c);
      total *= cfg.axes[c]->steps;
    }

  auto point_at = [&](std::size_t index) {
    Point x = cfg.fixed;
    for (auto it = swept.rbegin(); it != swept.rend(); ++it) {
      const Axis& ax = *cfg.axes[*it];
      x[*it] = ax.at(index % ax.steps);
      index /= ax.steps;
    }
    return x;
  };

  std::vector<double> values(total);
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, total));
  auto run = [&](std::size_t w) {
    for (std::size_t i = total * w / workers; i < total * (w + 1) / workers; ++i)
      values[i] = evaluate(cfg, point_at(i));
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  OptimumReport rep;
  std::size_t best = 0;
  for (std::size_t i = 0; i < total; ++i)
    if (improves(values[i], values[best])) best = i;
  if (cfg.keep_trace) {
    rep.grid_trace.reserve(total);
    for (std::size_t i = 0; i < total; ++i) rep.grid_trace.push_back({point_at(i), values[i]});
  }
  rep.evaluations = total;
  rep.coarse_best = values[best];
  Point x = point_at(best);
  double fx = values[best];

  if (cfg.refine && !swept.empty()) {
    // Each coordinate is re-bracketed to one grid step either side.
    std::array<double, kCoords> radius{};
    for (std::size_t c : swept) radius[c] = cfg.axes[c]->spacing();
    for (int round = 0; round < 50; ++round) {
      const Point before = x;
      for (std::size_t c : swept) {
        const Axis& ax = *cfg.axes[c];
        const double a = std::max(ax.min, x[c] - radius[c]);
        const double b = std::min(ax.max, x[c] + radius[c]);
        if (b - a <= cfg.refine_tolerance) continue;
        auto f = [&](double v) {
          Point y = x;
          y[c] = v;
          ++rep.evaluations;
          return evaluate(cfg, y);
        };
        auto [xc, fc] = detail::golden_max(f, a, b, cfg.refine_tolerance);
        if (improves(fc, fx)) {
          x[c] = xc;
          fx = fc;
        }
      }
      double moved = 0.0;
      for (std::size_t c : swept) {
        moved = std::max(moved, std::abs(x[c] - before[c]));
        radius[c] = std::max(4.0 * cfg.refine_tolerance,
                             std::min(radius[c], 2.0 * std::abs(x[c] - before[c]) +
                                                     4.0 * cfg.refine_tolerance));
      }
      if (moved < cfg.refine_tolerance) break;
    }
  }

  rep.best_point = x;
  rep.best_value = fx;
  rep.best_params = params_at(cfg, x);
  rep.best_params_b = params_b_at(cfg, x);
  rep.gamma = x[kGamma];
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Preset sweeps

inline Axis default_axis(Coord c) {
  constexpr double pi = std::numbers::pi;
  switch (c) {
    case kAlpha: return {-pi / 4, pi / 4, 41};
    case kBeta: return {0.0, pi, 181};
    case kDelta: return {-pi, pi, 25};
    case kGamma: return {0.0, pi / 2, 25};
    case kBetaB: return {0.0, pi, 181};
    default: break;
  }
  return {};
}

inline SweepConfig volume_config(bool product_only = false) {
  SweepConfig cfg;
  cfg.objective = Objective::volume;
  cfg.product_only = product_only;
  cfg.axes[kBeta] = default_axis(kBeta);
  if (!product_only) cfg.axes[kAlpha] = default_axis(kAlpha);
  return cfg;
}

inline OptimumReport optimize_volume(SweepConfig cfg) {
  cfg.objective = Objective::volume;
  return optimize(cfg);
}

inline OptimumReport optimize_negativity(const SweepConfig& cfg) {
  if (cfg.objective == Objective::volume)
    throw InputError("optimize_negativity: objective must be a negativity");
  return optimize(cfg);
}

// ---------------------------------------------------------------------------
// Classical limit

struct ClassicalPoint {
  SpinJ L;
  double beta_opt;  // radians
  double n_max;     // standard scale (singlet = 1/2)
};

/// For each L: singlet on A:B, coherent-state frame at A, beta swept over
/// `beta_axis` and refined; negativity summed over the 2L protected sectors.
inline std::vector<ClassicalPoint> classical_limit_study(
    const std::vector<SpinJ>& L_values, Axis beta_axis = {0.0, std::numbers::pi, 181},
    double tolerance = 1e-4, std::size_t threads = 1, int max_two_l = 16) {
  std::vector<ClassicalPoint> out;
  for (SpinJ L : L_values) {
    if (L.two_j() < 1) throw InputError("classical_limit_study: L < 1/2");
    if (L.two_j() > max_two_l)
      throw InputError("classical_limit_study: L above the configured limit " +
                       SpinJ(max_two_l).str());
    SweepConfig cfg;
    cfg.objective = Objective::negativity_a;
    cfg.L = L;
    cfg.product_only = true;
    cfg.axes[kBeta] = beta_axis;
    cfg.refine_tolerance = tolerance;
    cfg.threads = threads;
    cfg.keep_trace = false;
    const OptimumReport r = optimize(cfg);
    out.push_back({L, r.best_params.beta, r.best_value / 2.0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two orthogonal coherent spins over total-J sectors

struct SectorWeight {
  SpinJ J;
  double j_over_l;
  double p;
};

inline std::vector<SectorWeight> pythagoras_distribution(SpinJ L) {
  if (L.two_j() < 1) throw InputError("pythagoras_distribution: L < 1/2");
  const Ket psi = tensor(Ket(basis_ket(L.dim(), 0)),
                         coherent_state(L, std::numbers::pi / 2));
  std::vector<SectorWeight> out;
  for (const auto& sp : two_spin_sector_probabilities(L, psi))
    out.push_back({sp.total_j, sp.total_j.value() / L.value(), sp.probability});
  return out;
}

inline const SectorWeight& peak(const std::vector<SectorWeight>& dist) {
  if (dist.empty()) throw InputError("peak: empty distribution");
  return *std::max_element(dist.begin(), dist.end(),
                           [](const auto& a, const auto& b) { return a.p < b.p; });
}

}  // namespace qrf
