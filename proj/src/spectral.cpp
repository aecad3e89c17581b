#include "irisvigil/spectral.hpp"

#include "irisvigil/error.hpp"
#include "irisvigil/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irisvigil {

Spectrum forward_dft(const GrayImage& img) {
  if (img.size() == 0) throw Error(ErrorCode::InvalidParameter, "empty image");
  const ComplexImage raw = fourier::transform2d(img.cast<std::complex<double>>(), false);
  return Spectrum{fourier::fftshift(raw), true, true};
}

GrayImage inverse_dft(const Spectrum& spec, double residue_tolerance) {
  if (spec.coeffs.size() == 0) throw Error(ErrorCode::InvalidParameter, "empty spectrum");
  const ComplexImage origin = spec.centered ? fourier::ifftshift(spec.coeffs) : spec.coeffs;
  const ComplexImage spatial = fourier::transform2d(origin, true);
  if (spec.hermitian) {
    const double residue = spatial.imag().abs().maxCoeff();
    if (residue > residue_tolerance)
      throw Error(ErrorCode::ImaginaryResidue,
                  "imaginary residue " + std::to_string(residue) + " on a hermitian spectrum");
  }
  return spatial.real();
}

double band_pass_gain(double distance, double d0, double sigma) {
  const double ratio = distance * distance / (d0 * d0);
  return (1.0 / (sigma * sigma)) * (ratio - 2.0) * std::exp(-ratio / 2.0);
}

double default_cutoff(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::min(rows, cols)) / 8.0;
}

BandPassFilter make_band_pass(Eigen::Index rows, Eigen::Index cols, double d0, double sigma) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidParameter, "filter grid must be non-empty");
  if (!(d0 > 0.0) || !std::isfinite(d0)) throw Error(ErrorCode::InvalidParameter, "d0 must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorCode::InvalidParameter, "sigma must be positive");

  BandPassFilter filter{d0, sigma, GrayImage(rows, cols)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto u = static_cast<double>(r - rows / 2);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto v = static_cast<double>(c - cols / 2);
      filter.gains(r, c) = band_pass_gain(std::sqrt(u * u + v * v), d0, sigma);
    }
  }
  return filter;
}

GrayImage filter_response(const GrayImage& img, const BandPassFilter& filter) {
  if (img.rows() != filter.rows() || img.cols() != filter.cols())
    throw Error(ErrorCode::DimensionMismatch, "filter grid does not match image extents");
  Spectrum spec = forward_dft(img);
  spec.coeffs *= filter.gains.cast<std::complex<double>>();
  return inverse_dft(spec);
}

GrayImage rescale_unit(const GrayImage& img) {
  const double lo = img.minCoeff();
  const double hi = img.maxCoeff();
  // Round-off from the transforms leaves ~1e-16 ripple on constant inputs;
  // treat that as zero dynamic range.
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (hi - lo <= 1e-10 * scale) return GrayImage::Constant(img.rows(), img.cols(), 0.5);
  return (img - lo) / (hi - lo);
}

GrayImage apply_filter(const GrayImage& img, const BandPassFilter& filter) {
  return rescale_unit(filter_response(img, filter));
}

}  // namespace irisvigil
