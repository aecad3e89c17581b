#pragma once

#include "irisvigil/pupil.hpp"
#include "irisvigil/types.hpp"

#include <vector>

namespace irisvigil {

/// Normalized Fourier coefficients of one ripple and their entropy
/// h = sum NFC * log(NFC) (natural log, 0 log 0 = 0, so h <= 0).
struct RippleEntropy {
  std::vector<double> nfc;
  double h = 0.0;
  /// Every coefficient was zero; nfc is all zero and h is 0 by convention.
  bool all_zero = false;
};

struct RippleProfile {
  double radius = 0.0;
  std::vector<double> samples;
  RippleEntropy entropy;
};

struct TraceStep {
  double radius = 0.0;
  double h = 0.0;
  /// h_i - h_{i-1}; zero for the first ripple.
  double e = 0.0;
};

struct IrisAnnulus {
  Point center;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  std::vector<TraceStep> trace;
  /// False when the ripple reached the image border without an entropy jump;
  /// outer_radius is then the last ripple that fit.
  bool converged = false;
};

struct EntropyOptions {
  double e_max = 0.15;
  Eigen::Index samples = 256;
  /// First ripple radius is pupil radius + start_offset.
  double start_offset = 3.0;
};

/// n bilinear samples on the circle at angles 2*pi*k/n. Throws
/// CircleOutOfBounds if any sample leaves the pixel grid and
/// InvalidParameter unless n is a power of two.
std::vector<double> circle_samples(const GrayImage& img, Point center, double radius, Eigen::Index n);

RippleEntropy ripple_entropy(const std::vector<double>& samples);

/// Grows ripples outward one pixel at a time and stops at the first ripple
/// whose |h_{i+1} - h_i| exceeds e_max; that ripple is the outer boundary.
IrisAnnulus segment_entropy(const GrayImage& img, const PupilEstimate& pupil, const EntropyOptions& options = {});

}  // namespace irisvigil
