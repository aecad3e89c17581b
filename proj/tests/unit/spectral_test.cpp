#include "irisvigil/fourier.hpp"
#include "irisvigil/spectral.hpp"
#include "irisvigil/synth.hpp"

#include "support.hpp"

namespace irisvigil {
namespace {

using testing::throws_code;

TEST(ForwardDft, ConstantImageHasOnlyDc) {
  const double c = 0.3;
  const Spectrum s = forward_dft(GrayImage::Constant(4, 4, c));
  for (Eigen::Index r = 0; r < 4; ++r)
    for (Eigen::Index k = 0; k < 4; ++k) {
      const double expected = (r == 2 && k == 2) ? 16.0 * c : 0.0;
      EXPECT_NEAR(std::abs(s.coeffs(r, k)), expected, 1e-12);
    }
}

TEST(ForwardDft, ImpulseHasFlatSpectrum) {
  GrayImage img = GrayImage::Zero(4, 4);
  img(0, 0) = 1.0;
  const Spectrum s = forward_dft(img);
  EXPECT_TRUE(((s.coeffs.abs() - 1.0).abs() < 1e-12).all());
}

TEST(ForwardDft, MatchesTextbookSumOnOddAndEvenSizes) {
  std::mt19937_64 rng(11);
  for (auto [rows, cols] : {std::pair{8, 8}, std::pair{5, 7}, std::pair{6, 9}}) {
    const GrayImage img = testing::random_image(rows, cols, rng);
    const ComplexImage expected = fourier::fftshift(testing::naive_dft2(img.cast<std::complex<double>>(), false));
    EXPECT_LT((forward_dft(img).coeffs - expected).abs().maxCoeff(), 1e-10) << rows << "x" << cols;
  }
}

TEST(InverseDft, RoundTripsRandomImage) {
  std::mt19937_64 rng(1);
  const GrayImage img = testing::random_image(8, 8, rng);
  EXPECT_LT((inverse_dft(forward_dft(img)) - img).abs().maxCoeff(), 1e-6);
}

TEST(InverseDft, DcOnlySpectrumGivesConstant) {
  Spectrum s{ComplexImage::Zero(4, 4), true, true};
  s.coeffs(2, 2) = 16.0 * 0.7;
  EXPECT_LT((inverse_dft(s) - 0.7).abs().maxCoeff(), 1e-12);
}

TEST(InverseDft, ZeroSpectrumGivesZeroImage) {
  const Spectrum s{ComplexImage::Zero(6, 5), true, true};
  EXPECT_EQ(inverse_dft(s).abs().maxCoeff(), 0.0);
}

TEST(InverseDft, RampRoundTrip) {
  GrayImage ramp(12, 10);
  for (Eigen::Index r = 0; r < 12; ++r)
    for (Eigen::Index c = 0; c < 10; ++c) ramp(r, c) = 0.01 * r + 0.05 * c;
  EXPECT_LT((inverse_dft(forward_dft(ramp)) - ramp).abs().maxCoeff(), 1e-6);
}

TEST(InverseDft, RejectsImaginaryResidueOnHermitianClaim) {
  Spectrum s{ComplexImage::Zero(4, 4), true, true};
  s.coeffs(2, 3) = 1.0;  // lone off-center coefficient, no conjugate partner
  EXPECT_TRUE(throws_code(ErrorCode::ImaginaryResidue, [&] { inverse_dft(s); }));
  s.hermitian = false;
  EXPECT_NO_THROW(inverse_dft(s));
}

TEST(BandPass, ClosedFormValues) {
  const double d0 = 5.0;
  EXPECT_DOUBLE_EQ(band_pass_gain(0.0, d0, 1.0), -2.0);
  EXPECT_DOUBLE_EQ(band_pass_gain(0.0, d0, 2.0), -0.5);
  EXPECT_NEAR(band_pass_gain(std::sqrt(2.0) * d0, d0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(band_pass_gain(2.0 * d0, d0, 1.0), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(band_pass_gain(2.0 * d0, d0, 1.0), 0.2707, 1e-4);
}

TEST(BandPass, GridIsCenteredAndRadiallySymmetric) {
  const BandPassFilter f = make_band_pass(32, 32, 4.0, 1.0);
  EXPECT_DOUBLE_EQ(f.gains(16, 16), -2.0);
  for (Eigen::Index r = 1; r < 32; ++r)
    for (Eigen::Index c = 1; c < 32; ++c) {
      EXPECT_EQ(f.gains(r, c), f.gains(32 - r, 32 - c));
      EXPECT_EQ(f.gains(r, c), f.gains(c, r));
    }
}

TEST(BandPass, DefaultCutoffIsEighthOfShortSide) {
  EXPECT_DOUBLE_EQ(default_cutoff(128, 96), 12.0);
}

TEST(BandPass, RejectsBadParameters) {
  EXPECT_TRUE(throws_code(ErrorCode::InvalidParameter, [] { make_band_pass(8, 8, 0.0); }));
  EXPECT_TRUE(throws_code(ErrorCode::InvalidParameter, [] { make_band_pass(8, 8, 2.0, -1.0); }));
  EXPECT_TRUE(throws_code(ErrorCode::InvalidParameter, [] { make_band_pass(0, 8, 2.0); }));
}

TEST(ApplyFilter, ConstantImageMapsToHalf) {
  const GrayImage out = apply_filter(GrayImage::Constant(16, 16, 0.4), make_band_pass(16, 16, 2.0));
  EXPECT_TRUE((out == 0.5).all());
}

TEST(ApplyFilter, OutputSpansUnitRange) {
  std::mt19937_64 rng(3);
  const GrayImage out = apply_filter(testing::random_image(20, 24, rng), make_band_pass(20, 24, 3.0));
  EXPECT_TRUE(is_unit_range(out));
  EXPECT_DOUBLE_EQ(out.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(out.maxCoeff(), 1.0);
}

TEST(ApplyFilter, RejectsMismatchedGrid) {
  EXPECT_TRUE(throws_code(ErrorCode::DimensionMismatch,
                          [] { filter_response(GrayImage::Zero(8, 8), make_band_pass(8, 9, 2.0)); }));
}

TEST(ApplyFilter, DarkDiskPeaksInsideDisk) {
  synth::EyeSpec spec;
  spec.texture.amplitude = 0.0;
  const auto eye = synth::render(spec);
  const GrayImage out = apply_filter(eye.image, make_band_pass(128, 128, default_cutoff(128, 128)));
  Eigen::Index r = 0, c = 0;
  out.maxCoeff(&r, &c);
  EXPECT_LE(std::hypot(c - spec.center.x, r - spec.center.y), spec.pupil_radius);
}

// Spatial-domain oracle: impulse response by textbook inverse DFT of the
// gains, then direct circular convolution.
GrayImage brute_force_filter(const GrayImage& img, const BandPassFilter& f) {
  const Eigen::Index R = img.rows(), C = img.cols();
  const ComplexImage h = testing::naive_dft2(fourier::ifftshift(f.gains).cast<std::complex<double>>(), true);
  GrayImage out = GrayImage::Zero(R, C);
  for (Eigen::Index y = 0; y < R; ++y)
    for (Eigen::Index x = 0; x < C; ++x)
      for (Eigen::Index m = 0; m < R; ++m)
        for (Eigen::Index n = 0; n < C; ++n) out(y, x) += img(m, n) * h(((y - m) % R + R) % R, ((x - n) % C + C) % C).real();
  return rescale_unit(out);
}

TEST(ApplyFilter, EqualsCircularConvolution) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const GrayImage img = testing::random_image(16, 16, rng);
    const BandPassFilter f = make_band_pass(16, 16, 1.5 + trial, 1.0 + 0.25 * trial);
    EXPECT_LT((apply_filter(img, f) - brute_force_filter(img, f)).abs().maxCoeff(), 1e-5);
  }
}

TEST(ApplyFilter, ResponseIsLinear) {
  std::mt19937_64 rng(9);
  const GrayImage a = testing::random_image(16, 12, rng);
  const GrayImage b = testing::random_image(16, 12, rng);
  const BandPassFilter f = make_band_pass(16, 12, 2.0);
  const GrayImage lhs = filter_response(2.0 * a + 3.0 * b, f);
  const GrayImage rhs = 2.0 * filter_response(a, f) + 3.0 * filter_response(b, f);
  EXPECT_LT((lhs - rhs).abs().maxCoeff(), 1e-10);
}

TEST(Fourier, PowerOfTwoHelpers) {
  EXPECT_TRUE(fourier::is_power_of_two(64));
  EXPECT_FALSE(fourier::is_power_of_two(48));
  EXPECT_EQ(fourier::next_power_of_two(48), 64);
  EXPECT_EQ(fourier::next_power_of_two(64), 64);
}

TEST(Fourier, ShiftsAreInverse) {
  std::mt19937_64 rng(2);
  const GrayImage img = testing::random_image(7, 6, rng);
  EXPECT_TRUE((fourier::ifftshift(fourier::fftshift(img)) == img).all());
}

}  // namespace
}  // namespace irisvigil
