#pragma once

#include "irisvigil/error.hpp"
#include "irisvigil/spectral.hpp"
#include "irisvigil/types.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace irisvigil {

struct PupilEstimate {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  bool corrected = false;
  double raw_cx = 0.0;
  double raw_cy = 0.0;
};

/// Largest usable odd template no bigger than `requested` and the image.
inline Eigen::Index clip_template(Eigen::Index requested, Eigen::Index rows, Eigen::Index cols) {
  Eigen::Index limit = std::min(rows, cols);
  if (limit % 2 == 0) --limit;
  return std::min(requested, limit);
}

/// Windowed sum over a `window` x `window` square centered on each pixel.
/// Samples outside the image contribute zero, so the output keeps the input
/// extents. Uses a summed-area table.
template <typename Derived>
Image<typename Derived::Scalar> accumulate(const Eigen::DenseBase<Derived>& img, Eigen::Index window) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = img.rows();
  const Eigen::Index cols = img.cols();
  if (window < 1 || window % 2 == 0)
    throw Error(ErrorCode::InvalidTemplate, "template size must be odd, got " + std::to_string(window));
  if (window > std::min(rows, cols))
    throw Error(ErrorCode::InvalidTemplate, "template " + std::to_string(window) + " exceeds image");

  Image<Scalar> table = Image<Scalar>::Zero(rows + 1, cols + 1);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      table(r + 1, c + 1) = img(r, c) + table(r, c + 1) + table(r + 1, c) - table(r, c);

  const Eigen::Index half = window / 2;
  Image<Scalar> out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index r0 = std::max<Eigen::Index>(0, r - half);
    const Eigen::Index r1 = std::min(rows, r + half + 1);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index c0 = std::max<Eigen::Index>(0, c - half);
      const Eigen::Index c1 = std::min(cols, c + half + 1);
      out(r, c) = table(r1, c1) - table(r0, c1) - table(r1, c0) + table(r0, c0);
    }
  }
  return out;
}

/// Position of the maximum; ties go to the lowest row, then the lowest column.
template <typename Derived>
Pixel find_summit(const Eigen::DenseBase<Derived>& acc) {
  if (acc.size() == 0) throw Error(ErrorCode::InvalidParameter, "empty accumulation map");
  Pixel best{0, 0};
  auto best_value = acc(0, 0);
  for (Eigen::Index r = 0; r < acc.rows(); ++r)
    for (Eigen::Index c = 0; c < acc.cols(); ++c)
      if (acc(r, c) > best_value) {
        best_value = acc(r, c);
        best = {c, r};
      }
  return best;
}

/// How the filtered image is binarized into a pupil mask.
struct MaskRule {
  enum class Kind {
    /// Otsu split of the filtered values inside a window around the seed.
    LocalOtsu,
    /// Global intensity percentile of the filtered image.
    Percentile,
  };
  Kind kind = Kind::LocalOtsu;
  double percentile = 90.0;
  Eigen::Index window = 31;
};

/// Threshold used by the rule, exposed for diagnostics.
double pupil_threshold(const GrayImage& filtered, Pixel seed, const MaskRule& rule);

/// Binarized pupil mask with enclosed holes filled. Throws NoPupilMask when the
/// region around the seed has no dynamic range.
Mask binarize_pupil(const GrayImage& filtered, Pixel seed, const MaskRule& rule);

/// Median length of 8 rays (axes and diagonals) cast from seed through the mask.
double estimate_radius(const Mask& mask, Pixel seed);
double estimate_radius(const GrayImage& filtered, Pixel seed, const MaskRule& rule = {});

/// Boundary hits of the horizontal and vertical chords through a seed.
struct ChordHits {
  double left = 0.0;
  double right = 0.0;
  double up = 0.0;
  double down = 0.0;
};

/// x_c = left + (right - left) / 2, y_c = up + (down - up) / 2.
Point chord_midpoint(const ChordHits& hits);

/// Last in-mask pixel along each axis direction from seed. Throws NoPupilMask
/// if the seed is outside the mask and DegenerateChord if a chord leaves the
/// image before leaving the mask.
ChordHits cast_chords(const Mask& mask, Pixel seed);

/// Moves the center to the chord midpoints. The seed is the rounded center.
PupilEstimate correct_center(const Mask& mask, Point center, double radius);

struct PupilOptions {
  Eigen::Index template_size = 31;
  MaskRule mask;
  bool correct = true;
};

struct PupilDetection {
  PupilEstimate estimate;
  GrayImage filtered;
  Mask mask;
  /// Set when the radius or correction stage failed; estimate then holds the
  /// raw summit only.
  std::optional<ErrorCode> error;
  std::string message;

  bool ok() const { return !error.has_value(); }
};

/// apply_filter -> accumulate -> find_summit -> estimate_radius -> correct_center.
PupilDetection detect_pupil(const GrayImage& img, const BandPassFilter& filter,
                            const PupilOptions& options = {});

}  // namespace irisvigil
