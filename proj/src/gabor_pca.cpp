#include "irisvigil/gabor_pca.hpp"

#include "irisvigil/fourier.hpp"

#include <cmath>
#include <numbers>

namespace irisvigil {

std::array<double, kGaborWavelengths> wavelength_schedule(Eigen::Index rows, Eigen::Index cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidParameter, "image extents must be positive");
  const double lo = 2.0 / std::sqrt(3.0);
  const double hi = std::hypot(static_cast<double>(rows), static_cast<double>(cols));
  std::array<double, kGaborWavelengths> out{};
  for (int k = 0; k < kGaborWavelengths; ++k)
    out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (kGaborWavelengths - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::array<double, kGaborOrientations> orientation_schedule() {
  std::array<double, kGaborOrientations> out{};
  for (int k = 0; k < kGaborOrientations; ++k) out[k] = k * std::numbers::pi / 4.0;
  return out;
}

double gabor_sigma(double wavelength, double bandwidth) {
  const double octave = std::pow(2.0, bandwidth);
  return wavelength / std::numbers::pi * std::sqrt(std::log(2.0) / 2.0) * (octave + 1.0) / (octave - 1.0);
}

Eigen::Index gabor_half_width(double wavelength, const GaborParams& params, Eigen::Index max_half) {
  const double sigma = gabor_sigma(wavelength, params.bandwidth);
  // Along y' the envelope standard deviation is sigma / gamma.
  const double reach = 3.0 * sigma / std::min(1.0, params.gamma);
  auto half = static_cast<Eigen::Index>(std::ceil(reach));
  if (max_half >= 0) half = std::min(half, max_half);
  return half;
}

ComplexImage gabor_kernel(double wavelength, double orientation, const GaborParams& params, Eigen::Index max_half) {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw Error(ErrorCode::InvalidParameter, "wavelength must be positive");
  if (!(params.gamma > 0.0) || !(params.bandwidth > 0.0))
    throw Error(ErrorCode::InvalidParameter, "gamma and bandwidth must be positive");

  const double sigma = gabor_sigma(wavelength, params.bandwidth);
  const Eigen::Index half = gabor_half_width(wavelength, params, max_half);
  const double cs = std::cos(orientation);
  const double sn = std::sin(orientation);
  const double g2 = params.gamma * params.gamma;

  ComplexImage k(2 * half + 1, 2 * half + 1);
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    const auto y = static_cast<double>(r - half);
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
      const auto x = static_cast<double>(c - half);
      const double xr = x * cs + y * sn;
      const double yr = -x * sn + y * cs;
      const double envelope = std::exp(-(xr * xr + g2 * yr * yr) / (2.0 * sigma * sigma));
      k(r, c) = std::polar(envelope, 2.0 * std::numbers::pi * xr / wavelength);
    }
  }
  return k;
}

GaborBank make_gabor_bank(Eigen::Index rows, Eigen::Index cols, const GaborParams& params) {
  GaborBank bank;
  bank.rows = rows;
  bank.cols = cols;
  bank.wavelengths = wavelength_schedule(rows, cols);
  bank.orientations = orientation_schedule();
  // Long wavelengths reach far past the image; clip to an odd size that fits.
  const Eigen::Index max_half = (std::min(rows, cols) - 1) / 2;
  for (double w : bank.wavelengths)
    for (double o : bank.orientations) bank.kernels.push_back({w, o, gabor_kernel(w, o, params, max_half)});
  return bank;
}

GrayImage FeatureStack::layer(int index) const {
  GrayImage out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = values(r * cols + c, index);
  return out;
}

FeatureStack gabor_features(const GrayImage& img, const GaborBank& bank) {
  const Eigen::Index rows = img.rows();
  const Eigen::Index cols = img.cols();
  if (rows == 0 || cols == 0) throw Error(ErrorCode::InvalidParameter, "empty image");
  if (bank.kernels.size() != static_cast<std::size_t>(kGaborLayers))
    throw Error(ErrorCode::InvalidParameter, "bank must hold 16 kernels");

  Eigen::Index widest = 1;
  for (const auto& k : bank.kernels) {
    if (k.taps.rows() > rows || k.taps.cols() > cols)
      throw Error(ErrorCode::KernelLargerThanImage, "kernel of " + std::to_string(k.taps.rows()) +
                                                        " taps exceeds the image; rebuild the bank for this size");
    widest = std::max(widest, k.taps.rows());
  }

  // Zero padding wide enough that the circular product is a linear convolution.
  const Eigen::Index pr = fourier::next_power_of_two(rows + widest - 1);
  const Eigen::Index pc = fourier::next_power_of_two(cols + widest - 1);
  ComplexImage padded = ComplexImage::Zero(pr, pc);
  padded.topLeftCorner(rows, cols) = img.cast<std::complex<double>>();
  const ComplexImage image_spectrum = fourier::transform2d(padded, false);

  FeatureStack stack{rows, cols, Eigen::MatrixXd(rows * cols, kFeatureDepth), false};
  for (int layer = 0; layer < kGaborLayers; ++layer) {
    const ComplexImage& taps = bank.kernels[static_cast<std::size_t>(layer)].taps;
    const Eigen::Index half = taps.rows() / 2;
    ComplexImage kernel_padded = ComplexImage::Zero(pr, pc);
    kernel_padded.topLeftCorner(taps.rows(), taps.cols()) = taps;
    const ComplexImage full =
        fourier::transform2d(fourier::transform2d(kernel_padded, false) * image_spectrum, true);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) stack.values(r * cols + c, layer) = std::abs(full(r + half, c + half));
  }
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      stack.values(r * cols + c, kGaborLayers) = static_cast<double>(c);
      stack.values(r * cols + c, kGaborLayers + 1) = static_cast<double>(r);
    }
  return stack;
}

FeatureStack normalize(const FeatureStack& stack) {
  return FeatureStack{stack.rows, stack.cols, standardize_columns(stack.values), true};
}

PcaModel<double> fit_pca(const FeatureStack& stack) {
  if (!stack.normalized) throw Error(ErrorCode::InvalidParameter, "fit_pca expects a normalized stack");
  return fit_pca(stack.values);
}

Eigen::MatrixXd project(const FeatureStack& stack, const PcaModel<double>& model, Eigen::Index components) {
  if (components < 1 || components > model.coefficients.cols())
    throw Error(ErrorCode::InvalidParameter, "component count out of range");
  return stack.values * model.coefficients.leftCols(components);
}

Mask classify_iris(const FeatureStack& stack, const PcaModel<double>& model, const PupilEstimate& pupil,
                   const ClassifyOptions& options) {
  const Eigen::Index rows = stack.rows;
  const Eigen::Index cols = stack.cols;
  if (pupil.cx < 0 || pupil.cy < 0 || pupil.cx >= static_cast<double>(cols) || pupil.cy >= static_cast<double>(rows))
    throw Error(ErrorCode::InvalidParameter, "pupil center outside image");

  const Eigen::MatrixXd scores = project(stack, model, options.components);
  const Eigen::Index n = scores.rows();

  std::vector<double> distance(static_cast<std::size_t>(n));
  Eigen::Array<bool, Eigen::Dynamic, 1> ring(n);
  Eigen::Array<bool, Eigen::Dynamic, 1> border(n);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index i = r * cols + c;
      const double d = std::hypot(static_cast<double>(c) - pupil.cx, static_cast<double>(r) - pupil.cy);
      distance[static_cast<std::size_t>(i)] = d;
      ring(i) = d > pupil.radius + options.ring_inner && d <= pupil.radius + options.ring_outer;
      border(i) = r < options.border || c < options.border || r >= rows - options.border || c >= cols - options.border;
    }

  auto mean_of = [&](const Eigen::Array<bool, Eigen::Dynamic, 1>& select) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(scores.cols());
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (select(i)) {
        sum += scores.row(i);
        ++count;
      }
    if (count == 0) throw Error(ErrorCode::EmptyCluster, "empty cluster");
    return Eigen::RowVectorXd(sum / static_cast<double>(count));
  };

  Eigen::RowVectorXd iris_center = mean_of(ring);
  Eigen::RowVectorXd other_center = mean_of(border);
  Eigen::Array<bool, Eigen::Dynamic, 1> is_iris(n);
  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::Array<bool, Eigen::Dynamic, 1> next(n);
    for (Eigen::Index i = 0; i < n; ++i)
      next(i) = (scores.row(i) - iris_center).squaredNorm() <= (scores.row(i) - other_center).squaredNorm();
    const bool stable = it > 0 && (next == is_iris).all();
    is_iris = next;
    if (stable) break;
    iris_center = mean_of(is_iris);
    other_center = mean_of(!is_iris);
  }

  // The iris label goes to whichever cluster holds most of the seed ring.
  Eigen::Index ring_total = 0;
  Eigen::Index ring_iris = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (ring(i)) {
      ++ring_total;
      ring_iris += is_iris(i) ? 1 : 0;
    }
  const bool flip = 2 * ring_iris < ring_total;

  Mask mask(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index i = r * cols + c;
      const bool iris = is_iris(i) != flip && distance[static_cast<std::size_t>(i)] > pupil.radius;
      mask(r, c) = iris ? 1 : 0;
    }
  return mask;
}

double mask_iou(const Mask& a, const Mask& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "mask extents differ");
  const auto ia = (a != 0);
  const auto ib = (b != 0);
  const auto inter = (ia && ib).count();
  const auto uni = (ia || ib).count();
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace irisvigil
