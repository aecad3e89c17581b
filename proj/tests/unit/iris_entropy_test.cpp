#include "irisvigil/iris_entropy.hpp"
#include "irisvigil/synth.hpp"

#include "support.hpp"

#include <algorithm>
#include <numeric>

namespace irisvigil {
namespace {

using testing::throws_code;

TEST(CircleSamples, ConstantImage) {
  const auto s = circle_samples(GrayImage::Constant(40, 40, 0.37), {20.0, 20.0}, 10.0, 64);
  ASSERT_EQ(s.size(), 64u);
  for (double v : s) EXPECT_DOUBLE_EQ(v, 0.37);
}

TEST(CircleSamples, PaintedCosineIsRecovered) {
  const Eigen::Index size = 512;
  const Point c{255.5, 255.5};
  GrayImage img(size, size);
  for (Eigen::Index r = 0; r < size; ++r)
    for (Eigen::Index k = 0; k < size; ++k) img(r, k) = std::cos(4.0 * std::atan2(r - c.y, k - c.x));
  const auto s = circle_samples(img, c, 200.0, 64);
  for (std::size_t k = 0; k < s.size(); ++k)
    EXPECT_NEAR(s[k], std::cos(4.0 * 2.0 * std::numbers::pi * static_cast<double>(k) / 64.0), 1e-3) << k;
}

TEST(CircleSamples, OutOfBounds) {
  EXPECT_TRUE(throws_code(ErrorCode::CircleOutOfBounds,
                          [] { circle_samples(GrayImage::Zero(32, 32), {16.0, 16.0}, 20.0, 64); }));
}

TEST(CircleSamples, RequiresPowerOfTwoCount) {
  EXPECT_TRUE(throws_code(ErrorCode::InvalidParameter,
                          [] { circle_samples(GrayImage::Zero(32, 32), {16.0, 16.0}, 5.0, 48); }));
}

TEST(RippleEntropy, SingleCoefficientHasZeroEntropy) {
  const RippleEntropy e = ripple_entropy(std::vector<double>(16, 0.8));
  EXPECT_EQ(e.h, 0.0);
  EXPECT_FALSE(e.all_zero);
  EXPECT_DOUBLE_EQ(e.nfc[0], 1.0);
  for (std::size_t k = 1; k < e.nfc.size(); ++k) EXPECT_NEAR(e.nfc[k], 0.0, 1e-15);
}

TEST(RippleEntropy, EqualMagnitudesGiveClosedForm) {
  // An impulse has a flat spectrum: four coefficients of magnitude 1.
  const RippleEntropy e = ripple_entropy({1.0, 0.0, 0.0, 0.0});
  for (double v : e.nfc) EXPECT_NEAR(v, 0.5, 1e-12);
  EXPECT_NEAR(e.h, -std::log(4.0), 1e-9);

  const RippleEntropy e16 = ripple_entropy({0, 0, 0, 0, 0, 2.5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_NEAR(e16.h, -(std::sqrt(16.0) / 2.0) * std::log(16.0), 1e-9);
}

TEST(RippleEntropy, AllZeroSamples) {
  const RippleEntropy e = ripple_entropy(std::vector<double>(8, 0.0));
  EXPECT_TRUE(e.all_zero);
  EXPECT_EQ(e.h, 0.0);
}

TEST(RippleEntropy, NormalizedAndNonPositive) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(64);
    for (double& v : s) v = g(rng);
    const RippleEntropy e = ripple_entropy(s);
    const double sq = std::inner_product(e.nfc.begin(), e.nfc.end(), e.nfc.begin(), 0.0);
    EXPECT_NEAR(sq, 1.0, 1e-9);
    EXPECT_LE(e.h, 0.0);
  }
}

TEST(RippleEntropy, InvariantUnderCyclicShift) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(32);
  for (double& v : s) v = u(rng);
  const double h = ripple_entropy(s).h;
  for (int shift : {1, 7, 16}) {
    std::vector<double> r = s;
    std::rotate(r.begin(), r.begin() + shift, r.end());
    EXPECT_NEAR(ripple_entropy(r).h, h, 1e-12);
  }
}

TEST(SegmentEntropy, FindsIrisBoundary) {
  synth::EyeSpec spec;
  spec.iris_radius = 40.0;
  spec.texture.radial = std::numbers::pi / (2.0 * spec.iris_radius);
  const auto eye = synth::render(spec);
  const PupilEstimate pupil{spec.center.x, spec.center.y, spec.pupil_radius, true, spec.center.x, spec.center.y};
  const IrisAnnulus a = segment_entropy(eye.image, pupil);
  EXPECT_TRUE(a.converged);
  EXPECT_NEAR(a.outer_radius, 40.0, 2.0);
  EXPECT_EQ(a.inner_radius, spec.pupil_radius);
  EXPECT_EQ(a.trace.front().e, 0.0);
  EXPECT_EQ(a.trace.back().radius, a.outer_radius);
}

TEST(SegmentEntropy, UniformImageDoesNotConverge) {
  const PupilEstimate pupil{32.0, 32.0, 5.0, true, 32.0, 32.0};
  const IrisAnnulus a = segment_entropy(GrayImage::Constant(64, 64, 0.5), pupil);
  EXPECT_FALSE(a.converged);
  EXPECT_FALSE(a.trace.empty());
  EXPECT_EQ(a.outer_radius, a.trace.back().radius);
}

TEST(SegmentEntropy, ZeroThresholdStopsAtFirstDifference) {
  const auto eye = synth::render(synth::make_suite(1, false, 12).front());
  const auto& t = eye.truth;
  EntropyOptions opts;
  opts.e_max = 0.0;
  const IrisAnnulus a = segment_entropy(eye.image, {t.center.x, t.center.y, t.pupil_radius, true, 0, 0}, opts);
  EXPECT_TRUE(a.converged);
  EXPECT_EQ(a.trace.size(), 2u);
}

TEST(SegmentEntropy, NoRippleFits) {
  const PupilEstimate pupil{5.0, 5.0, 4.0, true, 5.0, 5.0};
  EXPECT_TRUE(throws_code(ErrorCode::NoConvergence,
                          [&] { segment_entropy(GrayImage::Constant(12, 12, 0.5), pupil); }));
}

}  // namespace
}  // namespace irisvigil
