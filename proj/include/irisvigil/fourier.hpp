#pragma once

#include "irisvigil/types.hpp"

#include <complex>
#include <span>
#include <vector>

// Discrete Fourier transforms shared by the spectral, ripple-entropy and Gabor
// code. Forward transforms are unnormalized; inverse transforms carry the
// 1/N factor. Power-of-two lengths use an iterative radix-2 FFT, every other
// length falls back to a dense DFT matrix product.
namespace irisvigil::fourier {

bool is_power_of_two(Eigen::Index n);
Eigen::Index next_power_of_two(Eigen::Index n);

/// In-place 1D transform of arbitrary length.
void transform(std::span<std::complex<double>> data, bool inverse);

std::vector<std::complex<double>> dft(std::span<const double> samples);

/// 2D transform along both axes. inverse applies 1/(rows*cols).
ComplexImage transform2d(const ComplexImage& data, bool inverse);

/// Move the DC bin from (0, 0) to (rows/2, cols/2) and back.
template <typename Scalar>
Image<Scalar> fftshift(const Image<Scalar>& in) {
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();
  Image<Scalar> out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      out((r + rows / 2) % rows, (c + cols / 2) % cols) = in(r, c);
  return out;
}

template <typename Scalar>
Image<Scalar> ifftshift(const Image<Scalar>& in) {
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();
  Image<Scalar> out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      out(r, c) = in((r + rows / 2) % rows, (c + cols / 2) % cols);
  return out;
}

}  // namespace irisvigil::fourier
