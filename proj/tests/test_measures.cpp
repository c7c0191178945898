#include <gtest/gtest.h>

#include "qrf/measures.hpp"

using namespace qrf;

namespace {

constexpr double kPi = std::numbers::pi;

QrfParams frame(double alpha, double beta, double delta) {
  QrfParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.delta = delta;
  return p;
}

// Protected Bloch vector of a product frame, written out componentwise.
Vec3 product_frame_r(double beta, double delta, double theta, double phi) {
  const double r3 = std::sqrt(3.0);
  const double sb2 = std::sin(beta / 2);
  const double c2t = std::cos(2 * theta), s2t = std::sin(2 * theta);
  return {(-2 * c2t * sb2 * sb2 + std::cos(delta - phi) * std::sin(beta) * s2t) / (2 * r3),
          -std::sin(beta) * s2t * std::sin(delta - phi) / (2 * r3),
          (std::cos(beta) * (c2t - 2) + c2t + std::cos(delta - phi) * std::sin(beta) * s2t) / 6};
}

}  // namespace

TEST(Negativity, Singlet) {
  EXPECT_NEAR(negativity(projector(singlet()), {2, 2}, Dims{1}), 0.5, 1e-14);
  EXPECT_NEAR(normalized_negativity(0.5), 1.0, 0.0);
}

TEST(Negativity, ProductAndMaximallyMixed) {
  EXPECT_EQ(negativity(projector(basis_ket(4, 2)), {2, 2}, Dims{1}), 0.0);
  EXPECT_EQ(negativity(identity(4) / 4.0, {2, 2}, Dims{1}), 0.0);
}

TEST(Negativity, WernerThreshold) {
  // p singlet + (1-p) I/4 is entangled iff p > 1/3; N = max(0, (3p - 1)/4).
  for (double p : {0.1, 1.0 / 3, 0.5, 0.8}) {
    const Matrix w = p * projector(singlet()) + (1 - p) * identity(4) / 4.0;
    EXPECT_NEAR(negativity(w, {2, 2}, Dims{1}), std::max(0.0, (3 * p - 1) / 4), 1e-13) << p;
  }
}

TEST(Negativity, PartialSchmidtPair) {
  for (double g : {0.1, 0.4, kPi / 4}) {
    const double n = negativity(projector(entangled_pair(g)), {2, 2}, Dims{1});
    EXPECT_NEAR(n, std::abs(std::sin(g) * std::cos(g)), 1e-14);
  }
}

TEST(Negativity, CutOnEitherSideAgrees) {
  Rng rng(31);
  const Matrix rho = random_density(6, rng);
  EXPECT_NEAR(negativity(rho, {2, 3}, Dims{0}), negativity(rho, {2, 3}, Dims{1}), 1e-12);
}

TEST(BlockNegativity, EqualsAssembledState) {
  Rng rng(32);
  for (int t = 0; t < 10; ++t) {
    const Ket phi = random_pure_state(4, rng);
    const QrfParams a = frame(rng.uniform() - 0.5, rng.uniform() * kPi, rng.uniform() * 6 - 3);
    const QrfParams b = frame(rng.uniform() - 0.5, rng.uniform() * kPi, rng.uniform() * 6 - 3);
    const TwirlOutcome out = t % 2 ? twirl_both(a, b, phi) : twirl_alice(a, phi);
    const auto [rho, dims] = assemble_flag_state(out);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(block_negativity(out), negativity(rho, dims, Dims{dims.size() - 1}), 1e-10);
  }
}

TEST(BlockNegativity, SingletAtRightAngle) {
  const double n = block_negativity(twirl_alice(frame(0, kPi / 2, 0), singlet()));
  EXPECT_NEAR(normalized_negativity(n), 1 / (3 * std::sqrt(2.0)), 1e-12);
}

TEST(BlockNegativity, AssembledFlagDims) {
  QrfParams p;
  p.L = SpinJ(2);
  const auto [rho, dims] = assemble_flag_state(twirl_alice(p, singlet()));
  EXPECT_EQ(dims, (Dims{3, 2, 2}));
  EXPECT_EQ(rho.rows(), 12);
}

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(entropy_of_entanglement(singlet(), {2, 2}), 1.0, 1e-14);
  EXPECT_NEAR(entropy_of_entanglement(basis_ket(4, 1), {2, 2}), 0.0, 1e-14);
  const double c = std::cos(0.3), s = std::sin(0.3);
  const double h = -c * c * std::log2(c * c) - s * s * std::log2(s * s);
  EXPECT_NEAR(entropy_of_entanglement(entangled_pair(0.3), {2, 2}), h, 1e-13);
  EXPECT_THROW(entropy_of_entanglement(singlet(), {2, 3}), InputError);
  EXPECT_THROW(entropy_of_entanglement(Ket::Ones(4), {2, 2}), InputError);
}

TEST(Entropy, ProductFrameIsUnentangled) {
  EXPECT_NEAR(entropy_of_entanglement(canonical_qrf_state(frame(0, 1.2, 0.4)), {2, 2}), 0.0,
              1e-12);
}

TEST(BlochImage, AlignedFrame) {
  for (int i = 0; i <= 10; ++i) {
    const double th = i * kPi / 20;
    const Vec3 r = bloch_image(frame(0, 0, 0), th, 0.7 * i);
    EXPECT_NEAR(r(0), 0.0, 1e-14);
    EXPECT_NEAR(r(1), 0.0, 1e-14);
    EXPECT_NEAR(r(2), -2.0 / 3 * std::sin(th) * std::sin(th), 1e-14);
  }
}

TEST(BlochImage, AntiAlignedFrame) {
  for (int i = 0; i <= 10; ++i) {
    const double th = i * kPi / 20;
    const Vec3 r = bloch_image(frame(0, kPi, 0), th, 0.3 * i);
    EXPECT_NEAR(r(0), -std::cos(2 * th) / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(r(1), 0.0, 1e-14);
    EXPECT_NEAR(r(2), 1.0 / 3, 1e-14);
  }
}

TEST(BlochImage, ProductFrameGeneralFormula) {
  Rng rng(33);
  for (int t = 0; t < 50; ++t) {
    const double b = rng.uniform() * kPi, d = rng.uniform() * 6 - 3;
    const double th = rng.uniform() * kPi / 2, ph = rng.uniform() * 2 * kPi;
    EXPECT_LT((bloch_image(frame(0, b, d), th, ph) - product_frame_r(b, d, th, ph)).norm(), 1e-13);
  }
}

TEST(BlochImage, RightAngleDisplayedComponents) {
  // x and z of the beta = pi/2 closed form.
  for (double th : {0.1, 0.5, 1.2})
    for (double ph : {0.0, 1.0, 4.0}) {
      const Vec3 r = bloch_image(frame(0, kPi / 2, 0), th, ph);
      const double r3 = std::sqrt(3.0);
      EXPECT_NEAR(r(0), (std::cos(ph) * std::sin(2 * th) - std::cos(2 * th)) / (2 * r3), 1e-14);
      EXPECT_NEAR(r(2), (std::cos(2 * th) + std::cos(ph) * std::sin(2 * th)) / 6, 1e-14);
    }
}

TEST(BlochImage, NormalizedVectorIsInsideBall) {
  Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    const QrfParams p = frame(rng.uniform() - 0.5, rng.uniform() * kPi, rng.uniform());
    const Vec3 r = bloch_image_normalized(p, rng.uniform() * kPi, rng.uniform() * 6);
    EXPECT_LE(r.norm(), 1.0 + 1e-12);
  }
  EXPECT_EQ(bloch_image_normalized(frame(0, 0, 0), 0.0, 0.0), Vec3::Zero());
}

TEST(BlochImage, OnlyPrimitiveFrames) {
  QrfParams p;
  p.L = SpinJ(2);
  EXPECT_THROW(protected_state(p, identity(2) / 2.0), InputError);
  EXPECT_THROW(protected_state(frame(0, 1, 0), identity(3)), DimensionError);
}

TEST(AffineMap, ProductFrameDeterminant) {
  for (int i = 0; i <= 180; i += 5) {
    const double b = i * kPi / 180;
    const double s = std::sin(b);
    EXPECT_NEAR(affine_map(frame(0, b, 0.3)).det(), 2.0 / 9 * s * s, 1e-12) << i;
  }
}

TEST(AffineMap, ReproducesImages) {
  Rng rng(35);
  const QrfParams p = frame(-0.2, 1.3, 0.6);
  const AffineMap m = affine_map(p);
  for (int t = 0; t < 20; ++t) {
    const double th = rng.uniform() * kPi / 2, ph = rng.uniform() * 2 * kPi;
    const Vec3 s(std::sin(2 * th) * std::cos(ph) / 2, std::sin(2 * th) * std::sin(ph) / 2,
                 std::cos(2 * th) / 2);
    EXPECT_LT((m.apply(s) - bloch_image(p, th, ph)).norm(), 1e-13);
  }
}

TEST(AffineMap, VolumeOptimumValue) {
  const double a = std::atan(2 * std::sqrt(2.0) - 3);
  EXPECT_NEAR(std::abs(affine_map(frame(a, kPi / 2, 0)).det()), 64.0 / 243, 1e-12);
}

TEST(Merit, ReportFields) {
  const MeritReport r = merit_report(frame(0, kPi / 2, 0));
  EXPECT_NEAR(normalized_negativity(r.negativity), 1 / (3 * std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(r.det_a, 2.0 / 9, 1e-12);
  EXPECT_NEAR(r.radius, std::cbrt(2.0 / 9), 1e-12);
  EXPECT_NEAR(r.entropy, 0.0, 1e-12);
  QrfParams big;
  big.L = SpinJ(3);
  EXPECT_EQ(merit_report(big).det_a, 0.0);
}

TEST(Merit, ApproximateCurveIsClose) {
  for (int i = 10; i <= 170; i += 20) {
    const double b = i * kPi / 180;
    const double exact = normalized_negativity(block_negativity(twirl_alice(frame(0, b, 0), singlet())));
    EXPECT_NEAR(exact, approx_negativity(b, kPi / 4), 0.02) << i;
  }
  EXPECT_NEAR(approx_negativity(kPi / 2, kPi / 4), 1 / (3 * std::sqrt(2.0)), 1e-15);
}
