#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace irisvigil {

/// Row-major 2D sample grid. Index as (row, col), i.e. (y, x).
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Grayscale intensities in [0, 1]. Intermediate results (filter output before
/// rescaling, accumulation maps) reuse the same container without the range.
using GrayImage = Image<double>;

using ComplexImage = Image<std::complex<double>>;

/// Binary mask; nonzero means "inside".
using Mask = Image<std::uint8_t>;

/// Pixel-space point. x is the column (rightward), y is the row (downward).
template <typename Scalar>
struct BasicPoint {
  Scalar x{};
  Scalar y{};

  friend bool operator==(const BasicPoint&, const BasicPoint&) = default;
};

using Point = BasicPoint<double>;
using Pixel = BasicPoint<Eigen::Index>;

/// True when every sample is finite and lies in [0, 1].
template <typename Derived>
bool is_unit_range(const Eigen::DenseBase<Derived>& img) {
  return img.size() > 0 && img.allFinite() && img.minCoeff() >= 0.0 && img.maxCoeff() <= 1.0;
}

}  // namespace irisvigil
