#pragma once

#include "irisvigil/types.hpp"

namespace irisvigil {

/// Centered frequency rectangle of an image. coeffs(rows/2, cols/2) is DC when
/// centered is set. Forward transforms are unnormalized.
struct Spectrum {
  ComplexImage coeffs;
  bool centered = true;
  /// Claimed conjugate symmetry (true for spectra of real images and for
  /// products with real, radially symmetric gains).
  bool hermitian = true;

  Eigen::Index rows() const { return coeffs.rows(); }
  Eigen::Index cols() const { return coeffs.cols(); }
};

/// Second-derivative-of-Gaussian band-pass gains on a centered grid:
///   H = (1/sigma^2) * (D^2/d0^2 - 2) * exp(-D^2 / (2 d0^2))
/// with D the bin distance from the centered DC bin. H(0) = -2/sigma^2 and
/// the zero crossing sits on the circle D = sqrt(2) * d0.
struct BandPassFilter {
  double d0 = 0.0;
  double sigma = 1.0;
  GrayImage gains;

  Eigen::Index rows() const { return gains.rows(); }
  Eigen::Index cols() const { return gains.cols(); }
};

Spectrum forward_dft(const GrayImage& img);

/// Real part of the inverse transform. Throws ImaginaryResidue when the
/// spectrum claims conjugate symmetry but the imaginary residue exceeds
/// residue_tolerance. The result is not clamped.
GrayImage inverse_dft(const Spectrum& spec, double residue_tolerance = 1e-6);

/// Closed-form gain at bin distance D.
double band_pass_gain(double distance, double d0, double sigma);

/// min(rows, cols) / 8.
double default_cutoff(Eigen::Index rows, Eigen::Index cols);

BandPassFilter make_band_pass(Eigen::Index rows, Eigen::Index cols, double d0, double sigma = 1.0);

/// inverse_dft(forward_dft(img) * gains) without rescaling. Circular, no
/// padding: callers wanting linear convolution must pad first.
GrayImage filter_response(const GrayImage& img, const BandPassFilter& filter);

/// Affine map of img onto [0, 1] (min -> 0, max -> 1). Zero dynamic range (up to
/// transform round-off) maps every sample to 0.5.
GrayImage rescale_unit(const GrayImage& img);

/// rescale_unit(filter_response(img, filter)). Pupil pixels of a dark pupil come
/// out as the brightest plateau.
GrayImage apply_filter(const GrayImage& img, const BandPassFilter& filter);

}  // namespace irisvigil
