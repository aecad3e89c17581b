#include "irisvigil/iris_entropy.hpp"

#include "irisvigil/error.hpp"
#include "irisvigil/fourier.hpp"

#include <cmath>
#include <numbers>

namespace irisvigil {

namespace {

bool circle_fits(const GrayImage& img, Point center, double radius) {
  return center.x - radius >= 0.0 && center.y - radius >= 0.0 &&
         center.x + radius <= static_cast<double>(img.cols() - 1) &&
         center.y + radius <= static_cast<double>(img.rows() - 1);
}

double bilinear(const GrayImage& img, double x, double y) {
  const auto x0 = std::min(static_cast<Eigen::Index>(std::floor(x)), img.cols() - 1);
  const auto y0 = std::min(static_cast<Eigen::Index>(std::floor(y)), img.rows() - 1);
  const Eigen::Index x1 = std::min(x0 + 1, img.cols() - 1);
  const Eigen::Index y1 = std::min(y0 + 1, img.rows() - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  return img(y0, x0) * (1 - fx) * (1 - fy) + img(y0, x1) * fx * (1 - fy) + img(y1, x0) * (1 - fx) * fy +
         img(y1, x1) * fx * fy;
}

}  // namespace

std::vector<double> circle_samples(const GrayImage& img, Point center, double radius, Eigen::Index n) {
  if (!fourier::is_power_of_two(n)) throw Error(ErrorCode::InvalidParameter, "sample count must be a power of two");
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidParameter, "negative radius");

  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    const double x = center.x + radius * std::cos(angle);
    const double y = center.y + radius * std::sin(angle);
    // Tolerate round-off right at the last row/column.
    if (x < -1e-9 || y < -1e-9 || x > static_cast<double>(img.cols() - 1) + 1e-9 ||
        y > static_cast<double>(img.rows() - 1) + 1e-9)
      throw Error(ErrorCode::CircleOutOfBounds, "ripple of radius " + std::to_string(radius) + " leaves the image");
    out[static_cast<std::size_t>(k)] = bilinear(img, std::max(0.0, x), std::max(0.0, y));
  }
  return out;
}

RippleEntropy ripple_entropy(const std::vector<double>& samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidParameter, "empty ripple");

  const auto spectrum = fourier::dft(samples);
  RippleEntropy out;
  out.nfc.resize(spectrum.size());
  double energy = 0.0;
  for (const auto& f : spectrum) energy += std::norm(f);
  if (energy == 0.0) {
    out.all_zero = true;
    return out;
  }

  const double norm = std::sqrt(energy);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double v = std::abs(spectrum[k]) / norm;
    out.nfc[k] = v;
    if (v > 0.0) out.h += v * std::log(v);
  }
  return out;
}

IrisAnnulus segment_entropy(const GrayImage& img, const PupilEstimate& pupil, const EntropyOptions& options) {
  if (!(options.e_max >= 0.0)) throw Error(ErrorCode::InvalidParameter, "e_max must be non-negative");
  if (pupil.cx < 0 || pupil.cy < 0 || pupil.cx >= static_cast<double>(img.cols()) ||
      pupil.cy >= static_cast<double>(img.rows()))
    throw Error(ErrorCode::InvalidParameter, "pupil center outside image");

  IrisAnnulus out;
  out.center = {pupil.cx, pupil.cy};
  out.inner_radius = pupil.radius;

  // Strictly sequential: the stopping decision for ripple i depends on i-1.
  double radius = pupil.radius + options.start_offset;
  while (circle_fits(img, out.center, radius)) {
    const double h = ripple_entropy(circle_samples(img, out.center, radius, options.samples)).h;
    const double e = out.trace.empty() ? 0.0 : h - out.trace.back().h;
    out.trace.push_back({radius, h, e});
    if (std::abs(e) > options.e_max) {
      out.outer_radius = radius;
      out.converged = true;
      return out;
    }
    radius += 1.0;
  }

  if (out.trace.empty())
    throw Error(ErrorCode::NoConvergence, "no ripple fits between the pupil and the image border");
  out.outer_radius = out.trace.back().radius;
  return out;
}

}  // namespace irisvigil
