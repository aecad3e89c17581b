#pragma once

#include "irisvigil/error.hpp"
#include "irisvigil/pupil.hpp"
#include "irisvigil/types.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <vector>

namespace irisvigil {

constexpr int kGaborWavelengths = 4;
constexpr int kGaborOrientations = 4;
constexpr int kGaborLayers = kGaborWavelengths * kGaborOrientations;
/// 16 Gabor magnitudes followed by the X and Y pixel coordinates.
constexpr int kFeatureDepth = kGaborLayers + 2;

struct GaborParams {
  /// Spatial aspect ratio of the envelope (y' axis is 1/gamma times longer).
  double gamma = 0.5;
  /// Half-magnitude bandwidth in octaves.
  double bandwidth = 1.0;
};

/// Geometric progression from 2/sqrt(3) to sqrt(rows^2 + cols^2), both ends
/// included.
std::array<double, kGaborWavelengths> wavelength_schedule(Eigen::Index rows, Eigen::Index cols);

/// 0, 45, 90 and 135 degrees, in radians.
std::array<double, kGaborOrientations> orientation_schedule();

/// Envelope standard deviation along x' for a given wavelength and octave
/// bandwidth.
double gabor_sigma(double wavelength, double bandwidth);

/// Half-width of the kernel grid: 3 envelope standard deviations along the
/// longer envelope axis, optionally clipped.
Eigen::Index gabor_half_width(double wavelength, const GaborParams& params, Eigen::Index max_half = -1);

/// exp(-(x'^2 + gamma^2 y'^2) / (2 sigma^2)) * exp(i 2 pi x' / wavelength) on a
/// square (2h+1) grid centered on the origin, x' and y' rotated by orientation.
ComplexImage gabor_kernel(double wavelength, double orientation, const GaborParams& params = {},
                          Eigen::Index max_half = -1);

struct GaborKernel {
  double wavelength = 0.0;
  double orientation = 0.0;
  ComplexImage taps;
};

/// kernels[w * kGaborOrientations + o], each clipped to the image extents.
struct GaborBank {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::array<double, kGaborWavelengths> wavelengths{};
  std::array<double, kGaborOrientations> orientations{};
  std::vector<GaborKernel> kernels;
};

GaborBank make_gabor_bank(Eigen::Index rows, Eigen::Index cols, const GaborParams& params = {});

/// Per-pixel feature vectors, one pixel per row (index r * cols + c), one
/// feature layer per column.
struct FeatureStack {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::MatrixXd values;
  bool normalized = false;

  static constexpr int depth = kFeatureDepth;

  /// One feature layer reshaped back onto the image grid.
  GrayImage layer(int index) const;
};

/// Magnitude of the zero-padded "same" convolution with every kernel of the
/// bank, then the X (column) and Y (row) coordinate layers.
FeatureStack gabor_features(const GrayImage& img, const GaborBank& bank);

/// Zero-mean, unit-variance (population) columns; zero-variance columns become
/// all zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> standardize_columns(
    const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(samples.rows(), samples.cols());
  const auto n = static_cast<Scalar>(samples.rows());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const Scalar mean = samples.col(j).sum() / n;
    const auto centered = (samples.col(j).array() - mean).matrix().eval();
    const Scalar sd = std::sqrt(centered.squaredNorm() / n);
    // Relative cutoff: round-off on a constant layer must not be amplified.
    const Scalar scale = std::max<Scalar>(Scalar(1), samples.col(j).cwiseAbs().maxCoeff());
    if (sd <= Scalar(1e-12) * scale)
      out.col(j).setZero();
    else
      out.col(j) = centered / sd;
  }
  return out;
}

FeatureStack normalize(const FeatureStack& stack);

/// Principal components of a sample matrix (rows are observations). Columns of
/// coefficients are unit eigenvectors of the population covariance, ordered by
/// descending variance, each signed so its largest-magnitude entry is positive.
template <typename Scalar>
struct PcaModel {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coefficients;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> component_variances;
};

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> covariance(
    const Eigen::MatrixBase<Derived>& samples) {
  const auto centered = (samples.rowwise() - samples.colwise().mean()).eval();
  return (centered.transpose() * centered) / static_cast<typename Derived::Scalar>(samples.rows());
}

template <typename Derived>
PcaModel<typename Derived::Scalar> fit_pca(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (samples.rows() < samples.cols())
    throw Error(ErrorCode::InvalidParameter, "PCA needs at least as many samples as features");

  const Matrix cov = covariance(samples);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::DegenerateCovariance, "eigensolver failed");
  if (solver.eigenvalues().maxCoeff() <= Scalar(0))
    throw Error(ErrorCode::DegenerateCovariance, "covariance has rank 0");

  // Eigen returns ascending eigenvalues.
  const Eigen::Index d = cov.rows();
  PcaModel<Scalar> model{Matrix(d, d), Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(d)};
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = d - 1 - k;
    auto column = solver.eigenvectors().col(src).eval();
    Eigen::Index peak = 0;
    column.cwiseAbs().maxCoeff(&peak);
    if (column(peak) < Scalar(0)) column = -column;
    model.coefficients.col(k) = column;
    model.component_variances(k) = std::max(Scalar(0), solver.eigenvalues()(src));
  }
  return model;
}

PcaModel<double> fit_pca(const FeatureStack& stack);

/// Scores of every pixel on the first `components` principal components.
Eigen::MatrixXd project(const FeatureStack& stack, const PcaModel<double>& model, Eigen::Index components);

struct ClassifyOptions {
  Eigen::Index components = 3;
  /// Seed ring just outside the pupil: pupil radius + (ring_inner, ring_outer].
  double ring_inner = 1.0;
  double ring_outer = 4.0;
  /// Width of the image border band used as the non-iris seed.
  Eigen::Index border = 4;
  int max_iterations = 100;
};

/// 2-means in PCA score space, seeded with the mean scores of the ring just
/// outside the pupil and of the image border band. The cluster holding most of
/// the ring is the iris; the pupil disk is removed from the mask.
Mask classify_iris(const FeatureStack& stack, const PcaModel<double>& model, const PupilEstimate& pupil,
                   const ClassifyOptions& options = {});

/// Intersection over union of two masks of equal extents.
double mask_iou(const Mask& a, const Mask& b);

}  // namespace irisvigil
