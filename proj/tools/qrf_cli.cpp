// qrf: command-line front end. Angles are given in degrees on the command
// line and converted to radians internally.

#include <CLI11.hpp>

#include "qrf/qrf.hpp"
#include "run_io.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

using qrf::io::Json;
namespace fs = std::filesystem;

constexpr double kDeg = std::numbers::pi / 180.0;

struct Globals {
  std::size_t threads = 0;
  std::string out;
  std::uint64_t seed = 20240601;
};

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QRF_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw qrf::InputError("QRF_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

fs::path output_dir(const Globals& g, const qrf::io::RunManifest& m) {
  return qrf::io::prepare_dir(g.out.empty() ? fs::path("runs") / m.config_hash
                                            : fs::path(g.out));
}

qrf::KrausModel parse_kraus(const std::string& s) {
  if (s == "exact") return qrf::KrausModel::exact;
  if (s == "closed-form") return qrf::KrausModel::closed_form;
  throw qrf::InputError("--kraus must be exact or closed-form");
}

qrf::QrfParams primitive(double alpha_deg, double beta_deg, double delta_deg) {
  qrf::QrfParams p;
  p.alpha = alpha_deg * kDeg;
  p.beta = beta_deg * kDeg;
  p.delta = delta_deg * kDeg;
  p.validate();
  return p;
}

Json vec_json(const qrf::Vec3& v) { return Json::array({v(0), v(1), v(2)}); }

// ---------------------------------------------------------------------------

struct BlochArgs {
  double alpha = 0, beta = 90, delta = 0;
  std::size_t grid = 50;
};

int cmd_bloch(const Globals& g, const BlochArgs& a) {
  const qrf::QrfParams p = primitive(a.alpha, a.beta, a.delta);
  if (a.grid < 1) throw qrf::InputError("--grid must be >= 1");
  qrf::io::RunManifest m("bloch",
                         {{"alpha_deg", a.alpha}, {"beta_deg", a.beta},
                          {"delta_deg", a.delta}, {"grid", a.grid}},
                         g.seed);
  const fs::path dir = output_dir(g, m);

  const qrf::AffineMap map = qrf::affine_map(p);
  Json lin = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) lin.push_back(map.linear(r, c));
  const double det = map.det();
  qrf::io::write_json(dir / "affine.json",
                      {{"A", lin}, {"b", vec_json(map.translation)}, {"det_a", det},
                       {"volume_factor", std::abs(det)},
                       {"radius", std::cbrt(std::abs(det))},
                       {"convention", "R = A s + b, s = <sigma>/2, R unnormalized"}});

  qrf::io::CsvWriter csv({"theta_deg", "phi_deg", "Rx", "Ry", "Rz"});
  for (std::size_t i = 0; i < a.grid; ++i) {
    const double th = a.grid == 1 ? 0.0 : 90.0 * static_cast<double>(i) / static_cast<double>(a.grid - 1);
    for (std::size_t j = 0; j < a.grid; ++j) {
      const double ph = 360.0 * static_cast<double>(j) / static_cast<double>(a.grid);
      const qrf::Vec3 r = qrf::bloch_image(p, th * kDeg, ph * kDeg);
      csv.row({th, ph, r(0), r(1), r(2)});
    }
  }
  csv.save(dir / "image.csv");
  qrf::io::write_manifest(dir, m);
  std::printf("det A = %.10f   radius = %.6f\n", det, std::cbrt(std::abs(det)));
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------

struct NegArgs {
  double alpha = 0, beta = 90, delta = 0, gamma = 45;
  bool both = false;
  std::string kraus = "exact";
  double L = 0.5;
};

int cmd_neg(const Globals& g, const NegArgs& a) {
  qrf::QrfParams p = primitive(a.alpha, a.beta, a.delta);
  p.L = qrf::SpinJ::from_value(a.L);
  const qrf::KrausModel model = parse_kraus(a.kraus);
  qrf::io::RunManifest m("neg",
                         {{"alpha_deg", a.alpha}, {"beta_deg", a.beta},
                          {"delta_deg", a.delta}, {"gamma_deg", a.gamma},
                          {"both", a.both}, {"kraus", a.kraus}, {"L", a.L}},
                         g.seed);
  const fs::path dir = output_dir(g, m);
  const qrf::Ket phi = qrf::entangled_pair(a.gamma * kDeg);
  const qrf::TwirlOutcome out =
      a.both ? qrf::twirl_both(p, p, phi, model) : qrf::twirl_alice(p, phi, model);

  Json rows = Json::array();
  std::printf("%-14s %12s %12s %12s\n", "sector", "p", "N(sigma)", "p*N");
  for (const auto& e : out.entries) {
    std::string label;
    for (const auto& s : e.sectors) label += (label.empty() ? "J=" : ",") + s.total_j.str();
    const double n = e.probability > 0 ? qrf::negativity(e.sigma, e.dims, {e.dims.size() - 1}) : 0.0;
    std::printf("%-14s %12.8f %12.8f %12.8f\n", label.c_str(), e.probability, n,
                e.probability * n);
    rows.push_back({{"sectors", label}, {"p", e.probability}, {"negativity", n}});
  }
  const double total = qrf::block_negativity(out);
  std::printf("total negativity %.8f   normalized (singlet = 1) %.8f\n", total,
              qrf::normalized_negativity(total));
  qrf::io::write_json(dir / "neg.json",
                      {{"sectors", rows}, {"total_negativity", total},
                       {"total_normalized", qrf::normalized_negativity(total)},
                       {"kraus", a.kraus}});
  qrf::io::write_manifest(dir, m);
  return 0;
}

// ---------------------------------------------------------------------------

struct OptArgs {
  std::string objective;
  bool product_only = false, both = false, gamma_free = false, sweep_delta = false;
  bool no_refine = false, unconstrained = false;
  std::string kraus = "exact";
  double tolerance = 1e-4;
  std::size_t beta_steps = 181, alpha_steps = 41, delta_steps = 25, gamma_steps = 25;
};

int cmd_opt(const Globals& g, const OptArgs& a, std::size_t threads) {
  qrf::SweepConfig cfg;
  cfg.kraus = parse_kraus(a.kraus);
  cfg.refine = !a.no_refine;
  cfg.refine_tolerance = a.tolerance;
  cfg.threads = threads;
  cfg.seed = g.seed;
  const double pi = std::numbers::pi;
  cfg.axes[qrf::kBeta] = qrf::Axis{0.0, pi, a.beta_steps};
  if (a.objective == "volume") {
    cfg.objective = qrf::Objective::volume;
    cfg.product_only = a.product_only;
    if (!a.product_only) cfg.axes[qrf::kAlpha] = qrf::Axis{-pi / 4, pi / 4, a.alpha_steps};
  } else if (a.objective == "neg") {
    cfg.objective = a.both ? qrf::Objective::negativity_ab : qrf::Objective::negativity_a;
    cfg.product_only = a.product_only || a.both;
    cfg.identical_frames = !a.unconstrained;
    if (a.both && a.unconstrained) cfg.axes[qrf::kBetaB] = qrf::Axis{0.0, pi, a.beta_steps};
    if (!cfg.product_only) {
      cfg.axes[qrf::kAlpha] = qrf::Axis{-pi / 4, pi / 4, a.alpha_steps};
      if (!a.gamma_free || a.sweep_delta) cfg.axes[qrf::kDelta] = qrf::Axis{-pi, pi, a.delta_steps};
    } else if (a.sweep_delta) {
      cfg.axes[qrf::kDelta] = qrf::Axis{-pi, pi, a.delta_steps};
    }
    if (a.gamma_free) cfg.axes[qrf::kGamma] = qrf::Axis{0.0, pi / 2, a.gamma_steps};
  } else {
    throw qrf::InputError("objective must be volume or neg");
  }

  Json axes = Json::object();
  for (std::size_t c = 0; c < qrf::kCoords; ++c)
    if (cfg.axes[c])
      axes[qrf::kCoordNames[c]] = {{"min", cfg.axes[c]->min},
                                   {"max", cfg.axes[c]->max},
                                   {"steps", cfg.axes[c]->steps}};
  qrf::io::RunManifest m("opt",
                         {{"objective", qrf::to_string(cfg.objective)},
                          {"axes_rad", axes},
                          {"product_only", cfg.product_only},
                          {"identical_frames", cfg.identical_frames},
                          {"kraus", a.kraus},
                          {"refine", cfg.refine},
                          {"refine_tolerance", cfg.refine_tolerance}},
                         g.seed);
  const fs::path dir = output_dir(g, m);
  const qrf::OptimumReport r = qrf::optimize(cfg);

  const auto& bp = r.best_params;
  Json best = {{"alpha_deg", bp.effective_alpha() / kDeg}, {"beta_deg", bp.beta / kDeg},
               {"delta_deg", bp.delta / kDeg},             {"gamma_deg", r.gamma / kDeg},
               {"alpha_rad", bp.effective_alpha()}};
  if (cfg.objective == qrf::Objective::negativity_ab && !cfg.identical_frames)
    best["beta_b_deg"] = r.best_params_b.beta / kDeg;
  Json report = {{"objective", qrf::to_string(cfg.objective)},
                 {"best", best},
                 {"best_value", r.best_value},
                 {"coarse_best", r.coarse_best},
                 {"evaluations", r.evaluations}};
  if (cfg.objective == qrf::Objective::volume) {
    report["radius"] = std::cbrt(r.best_value);
    report["entropy_bits"] = qrf::entropy_of_entanglement(qrf::canonical_qrf_state(bp), {2, 2});
  } else {
    report["value_scale"] = "normalized negativity (maximally entangled pair = 1)";
    if (!cfg.product_only)
      report["entropy_bits"] = qrf::entropy_of_entanglement(qrf::canonical_qrf_state(bp), {2, 2});
  }
  qrf::io::write_json(dir / "opt.json", report);

  qrf::io::CsvWriter csv({"alpha_deg", "beta_deg", "delta_deg", "gamma_deg", "beta_b_deg", "value"});
  for (const auto& t : r.grid_trace) {
    const double alpha = cfg.product_only ? 0.0 : t.point[qrf::kAlpha];
    const double beta_b = t.point[qrf::kBetaB] < 0 ? t.point[qrf::kBeta] : t.point[qrf::kBetaB];
    csv.row({alpha / kDeg, t.point[qrf::kBeta] / kDeg, t.point[qrf::kDelta] / kDeg,
             t.point[qrf::kGamma] / kDeg, beta_b / kDeg, t.value});
  }
  csv.save(dir / "trace.csv");
  m.extra["wall_time_s"] = r.wall_time;
  m.extra["threads"] = threads;
  qrf::io::write_manifest(dir, m);

  std::printf("objective %s   best %.8f (grid %.8f)\n", qrf::to_string(cfg.objective),
              r.best_value, r.coarse_best);
  std::printf("alpha %.4f rad   beta %.4f deg   delta %.4f deg   gamma %.4f deg\n",
              bp.effective_alpha(), bp.beta / kDeg, bp.delta / kDeg, r.gamma / kDeg);
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------

struct ClassicalArgs {
  double lmax = 8;
  std::size_t steps = 181;
  double tolerance = 1e-4;
  double max_l = 8;
};

int cmd_classical(const Globals& g, const ClassicalArgs& a, std::size_t threads) {
  const qrf::SpinJ top = qrf::SpinJ::from_value(a.lmax);
  qrf::io::RunManifest m("classical",
                         {{"lmax", a.lmax}, {"steps", a.steps}, {"tolerance", a.tolerance}},
                         g.seed);
  const fs::path dir = output_dir(g, m);
  std::vector<qrf::SpinJ> ls;
  for (int t = 1; t <= top.two_j(); ++t) ls.emplace_back(t);
  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = qrf::classical_limit_study(ls, {0.0, std::numbers::pi, a.steps},
                                              a.tolerance, threads,
                                              qrf::SpinJ::from_value(a.max_l).two_j());
  qrf::io::CsvWriter csv({"L", "beta_opt_deg", "n_max"});
  std::printf("%6s %14s %12s\n", "L", "beta_opt_deg", "n_max");
  for (const auto& p : pts) {
    csv.row({p.L.value(), p.beta_opt / kDeg, p.n_max});
    std::printf("%6.1f %14.6f %12.8f\n", p.L.value(), p.beta_opt / kDeg, p.n_max);
  }
  csv.save(dir / "classical.csv");
  m.extra["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  qrf::io::write_manifest(dir, m);
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int cmd_pythagoras(const Globals& g, double L) {
  const qrf::SpinJ spin = qrf::SpinJ::from_value(L);
  qrf::io::RunManifest m("pythagoras", {{"L", L}}, g.seed);
  const fs::path dir = output_dir(g, m);
  const auto dist = qrf::pythagoras_distribution(spin);
  qrf::io::CsvWriter csv({"J", "J_over_L", "p"});
  for (const auto& w : dist) csv.row({w.J.value(), w.j_over_l, w.p});
  csv.save(dir / "pythagoras.csv");
  qrf::io::write_manifest(dir, m);
  const auto& pk = qrf::peak(dist);
  std::printf("peak J = %s   J/L = %.6f   p = %.6f\n", pk.J.str().c_str(), pk.j_over_l, pk.p);
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int cmd_verify(const Globals& g, const std::string& level, const std::string& fault,
               std::size_t threads) {
  qrf::VerifyOptions opt;
  if (level == "fast") opt.level = qrf::VerifyLevel::fast;
  else if (level == "full") opt.level = qrf::VerifyLevel::full;
  else throw qrf::InputError("--level must be fast or full");
  opt.seed = g.seed;
  opt.fault = fault;
  opt.threads = threads;
  qrf::io::RunManifest m("verify", {{"level", level}, {"fault", fault}}, g.seed);
  const fs::path dir = output_dir(g, m);
  const qrf::VerificationReport rep = qrf::run_verification(opt);
  const std::string text = rep.text();
  std::fputs(text.c_str(), stdout);
  qrf::io::write_text(dir / "verify.txt", text);
  m.extra["passed"] = rep.passed();
  qrf::io::write_manifest(dir, m);
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite directional reference frames: twirling, preservation measures, optima"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (default: QRF_THREADS or all cores)");
  app.add_option("--out", g.out, "output directory (default: runs/<config-hash>/)");
  app.add_option("--seed", g.seed, "random seed");

  BlochArgs ba;
  auto* bloch = app.add_subcommand("bloch", "Bloch image and affine map of a primitive frame");
  bloch->add_option("--alpha", ba.alpha, "degrees");
  bloch->add_option("--beta", ba.beta, "degrees");
  bloch->add_option("--delta", ba.delta, "degrees");
  bloch->add_option("--grid", ba.grid, "theta/phi lattice size");

  NegArgs na;
  auto* neg = app.add_subcommand("neg", "negativity preserved after twirling");
  neg->add_option("--alpha", na.alpha, "degrees");
  neg->add_option("--beta", na.beta, "degrees");
  neg->add_option("--delta", na.delta, "degrees");
  neg->add_option("--gamma", na.gamma, "input state angle, degrees");
  neg->add_flag("--both", na.both, "twirl both ends with identical frames");
  neg->add_option("--kraus", na.kraus, "exact | closed-form");
  neg->add_option("--L", na.L, "frame spin (coherent-state frames for L > 1/2)");

  OptArgs oa;
  auto* opt = app.add_subcommand("opt", "optimize frame parameters");
  opt->add_option("objective", oa.objective, "volume | neg")->required();
  opt->add_flag("--product-only", oa.product_only);
  opt->add_flag("--both", oa.both, "identical frames at both ends");
  opt->add_flag("--unconstrained", oa.unconstrained, "with --both: sweep B's beta separately");
  opt->add_flag("--gamma-free", oa.gamma_free, "also sweep the input-state angle");
  opt->add_flag("--sweep-delta", oa.sweep_delta, "sweep delta in the free-gamma search too");
  opt->add_flag("--no-refine", oa.no_refine);
  opt->add_option("--kraus", oa.kraus, "exact | closed-form");
  opt->add_option("--tolerance", oa.tolerance, "refinement tolerance, radians");
  opt->add_option("--beta-steps", oa.beta_steps);
  opt->add_option("--alpha-steps", oa.alpha_steps);
  opt->add_option("--delta-steps", oa.delta_steps);
  opt->add_option("--gamma-steps", oa.gamma_steps);

  ClassicalArgs ca;
  auto* classical = app.add_subcommand("classical", "beta_opt and N_max for L = 1/2 .. lmax");
  classical->add_option("--lmax", ca.lmax);
  classical->add_option("--steps", ca.steps, "beta grid points");
  classical->add_option("--tolerance", ca.tolerance, "radians");
  classical->add_option("--max-l", ca.max_l, "runtime guard on L");

  double pyth_l = 17;
  auto* pyth = app.add_subcommand("pythagoras", "sector distribution of two orthogonal spins");
  pyth->add_option("--L", pyth_l);

  std::string level = "fast", fault;
  auto* verify = app.add_subcommand("verify", "run invariant checks");
  verify->add_option("--level", level, "fast | full");
  verify->add_option("--inject-fault", fault, "cg-sign");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const std::size_t threads = resolve_threads(g.threads);
    if (*bloch) return cmd_bloch(g, ba);
    if (*neg) return cmd_neg(g, na);
    if (*opt) return cmd_opt(g, oa, threads);
    if (*classical) return cmd_classical(g, ca, threads);
    if (*pyth) return cmd_pythagoras(g, pyth_l);
    if (*verify) return cmd_verify(g, level, fault, threads);
  } catch (const qrf::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
