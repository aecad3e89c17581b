#include "irisvigil/fourier.hpp"

#include "irisvigil/error.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace irisvigil::fourier {

namespace {

using cd = std::complex<double>;

void radix2(std::span<cd> a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles evaluated directly; accumulating them by repeated
      // multiplication drifts past 1e-12 for long transforms.
      const cd w = std::polar(1.0, angle * static_cast<double>(k));
      for (std::size_t i = k; i < n; i += len) {
        const cd u = a[i];
        const cd v = a[i + half] * w;
        a[i] = u + v;
        a[i + half] = u - v;
      }
    }
  }
}

Eigen::MatrixXcd dft_matrix(Eigen::Index n, bool inverse) {
  const double sign = inverse ? 1.0 : -1.0;
  Eigen::MatrixXcd w(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      // Reduce j*k mod n first so the angle stays small and exact.
      const auto jk = static_cast<double>((j * k) % n);
      w(j, k) = std::polar(1.0, sign * 2.0 * std::numbers::pi * jk / static_cast<double>(n));
    }
  return w;
}

}  // namespace

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::Index next_power_of_two(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform(std::span<cd> data, bool inverse) {
  const auto n = static_cast<Eigen::Index>(data.size());
  if (n <= 1) return;
  if (is_power_of_two(n)) {
    radix2(data, inverse);
  } else {
    Eigen::Map<Eigen::VectorXcd> v(data.data(), n);
    const Eigen::VectorXcd out = dft_matrix(n, inverse) * v;
    v = out;
  }
  if (inverse) {
    for (auto& x : data) x /= static_cast<double>(n);
  }
}

std::vector<cd> dft(std::span<const double> samples) {
  std::vector<cd> out(samples.begin(), samples.end());
  transform(out, false);
  return out;
}

ComplexImage transform2d(const ComplexImage& data, bool inverse) {
  const Eigen::Index rows = data.rows();
  const Eigen::Index cols = data.cols();
  if (rows == 0 || cols == 0) throw Error(ErrorCode::InvalidParameter, "empty transform input");

  // Column-major working copy: rows are then strided, columns contiguous.
  Eigen::MatrixXcd work = data.matrix();

  if (is_power_of_two(cols)) {
    Eigen::VectorXcd row(cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      row = work.row(r).transpose();
      radix2({row.data(), static_cast<std::size_t>(cols)}, inverse);
      work.row(r) = row.transpose();
    }
  } else {
    work = work * dft_matrix(cols, inverse);  // symmetric, no transpose needed
  }

  if (is_power_of_two(rows)) {
    for (Eigen::Index c = 0; c < cols; ++c)
      radix2({work.col(c).data(), static_cast<std::size_t>(rows)}, inverse);
  } else {
    work = dft_matrix(rows, inverse) * work;
  }

  if (inverse) work /= static_cast<double>(rows * cols);
  return work.array();
}

}  // namespace irisvigil::fourier
