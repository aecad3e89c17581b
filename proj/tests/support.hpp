#pragma once

#include "irisvigil/error.hpp"
#include "irisvigil/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace irisvigil::testing {

/// Runs fn and reports whether it threw an Error carrying `code`.
template <typename Fn>
::testing::AssertionResult throws_code(ErrorCode code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == code) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << to_string(e.code()) << " instead of " << to_string(code);
  }
  return ::testing::AssertionFailure() << "did not throw " << to_string(code);
}

inline GrayImage random_image(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(rows, cols);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = u(rng);
  return img;
}

/// Samples that are multiples of 1/256, so sums stay exact in double.
inline GrayImage dyadic_image(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, 255);
  GrayImage img(rows, cols);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = u(rng) / 256.0;
  return img;
}

/// Textbook O(N^2) 2D DFT, uncentered.
inline ComplexImage naive_dft2(const ComplexImage& in, bool inverse) {
  const Eigen::Index R = in.rows();
  const Eigen::Index C = in.cols();
  const double sign = inverse ? 1.0 : -1.0;
  ComplexImage out(R, C);
  for (Eigen::Index u = 0; u < R; ++u)
    for (Eigen::Index v = 0; v < C; ++v) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index y = 0; y < R; ++y)
        for (Eigen::Index x = 0; x < C; ++x) {
          const double phase = sign * 2.0 * std::numbers::pi *
                                (static_cast<double>(u * y) / R + static_cast<double>(v * x) / C);
          acc += in(y, x) * std::polar(1.0, phase);
        }
      out(u, v) = inverse ? acc / static_cast<double>(R * C) : acc;
    }
  return out;
}

/// Filled disk of `level` on `background`.
inline GrayImage disk_image(Eigen::Index rows, Eigen::Index cols, Point center, double radius, double level,
                            double background) {
  GrayImage img(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      img(r, c) = std::hypot(c - center.x, r - center.y) <= radius ? level : background;
  return img;
}

inline Mask disk_mask(Eigen::Index rows, Eigen::Index cols, Point center, double radius) {
  Mask m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = std::hypot(c - center.x, r - center.y) <= radius;
  return m;
}

}  // namespace irisvigil::testing
