#include "irisvigil/pupil.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <vector>

namespace irisvigil {

namespace {

bool inside(const Mask& mask, Eigen::Index x, Eigen::Index y) {
  return x >= 0 && y >= 0 && x < mask.cols() && y < mask.rows() && mask(y, x) != 0;
}

// Otsu split over the exact sorted values; returns the midpoint between the
// two samples that bound the best split.
double otsu_threshold(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double total = 0.0;
  for (double v : values) total += v;

  double best_score = -1.0;
  double best = values.front();
  double below = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    below += values[i];
    if (values[i] == values[i + 1]) continue;
    const double w0 = static_cast<double>(i + 1);
    const double w1 = n - w0;
    const double m0 = below / w0;
    const double m1 = (total - below) / w1;
    const double score = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (score > best_score) {
      best_score = score;
      best = 0.5 * (values[i] + values[i + 1]);
    }
  }
  return best;
}

void fill_holes(Mask& mask) {
  const Eigen::Index rows = mask.rows();
  const Eigen::Index cols = mask.cols();
  Mask reached = Mask::Zero(rows, cols);
  std::deque<Pixel> queue;
  auto seed = [&](Eigen::Index x, Eigen::Index y) {
    if (mask(y, x) == 0 && reached(y, x) == 0) {
      reached(y, x) = 1;
      queue.push_back({x, y});
    }
  };
  for (Eigen::Index x = 0; x < cols; ++x) {
    seed(x, 0);
    seed(x, rows - 1);
  }
  for (Eigen::Index y = 0; y < rows; ++y) {
    seed(0, y);
    seed(cols - 1, y);
  }
  constexpr std::array<std::array<int, 2>, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  while (!queue.empty()) {
    const Pixel p = queue.front();
    queue.pop_front();
    for (const auto& [dx, dy] : steps) {
      const Eigen::Index x = p.x + dx;
      const Eigen::Index y = p.y + dy;
      if (x >= 0 && y >= 0 && x < cols && y < rows) seed(x, y);
    }
  }
  mask = (mask != 0 || reached == 0).cast<std::uint8_t>();
}

}  // namespace

double pupil_threshold(const GrayImage& filtered, Pixel seed, const MaskRule& rule) {
  if (filtered.size() == 0) throw Error(ErrorCode::InvalidParameter, "empty image");
  if (seed.x < 0 || seed.y < 0 || seed.x >= filtered.cols() || seed.y >= filtered.rows())
    throw Error(ErrorCode::InvalidParameter, "seed outside image");

  std::vector<double> values;
  if (rule.kind == MaskRule::Kind::Percentile) {
    if (!(rule.percentile >= 0.0 && rule.percentile <= 100.0))
      throw Error(ErrorCode::InvalidParameter, "percentile must lie in [0, 100]");
    values.assign(filtered.data(), filtered.data() + filtered.size());
  } else {
    if (rule.window < 1) throw Error(ErrorCode::InvalidParameter, "mask window must be positive");
    const Eigen::Index half = rule.window / 2;
    const Eigen::Index r0 = std::max<Eigen::Index>(0, seed.y - half);
    const Eigen::Index r1 = std::min(filtered.rows(), seed.y + half + 1);
    const Eigen::Index c0 = std::max<Eigen::Index>(0, seed.x - half);
    const Eigen::Index c1 = std::min(filtered.cols(), seed.x + half + 1);
    for (Eigen::Index r = r0; r < r1; ++r)
      for (Eigen::Index c = c0; c < c1; ++c) values.push_back(filtered(r, c));
  }

  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo <= 1e-12) throw Error(ErrorCode::NoPupilMask, "no dynamic range around the seed");

  if (rule.kind == MaskRule::Kind::Percentile) {
    std::sort(values.begin(), values.end());
    const double pos = rule.percentile / 100.0 * static_cast<double>(values.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, values.size() - 1);
    return values[i] + (pos - static_cast<double>(i)) * (values[j] - values[i]);
  }
  return otsu_threshold(std::move(values));
}

Mask binarize_pupil(const GrayImage& filtered, Pixel seed, const MaskRule& rule) {
  const double threshold = pupil_threshold(filtered, seed, rule);
  Mask mask = (filtered >= threshold).cast<std::uint8_t>();
  fill_holes(mask);
  return mask;
}

double estimate_radius(const Mask& mask, Pixel seed) {
  if (!inside(mask, seed.x, seed.y)) throw Error(ErrorCode::NoPupilMask, "seed is not inside the pupil mask");

  constexpr std::array<std::array<int, 2>, 8> directions{
      {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  std::array<double, 8> lengths{};
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const auto [dx, dy] = directions[i];
    Eigen::Index steps = 0;
    while (inside(mask, seed.x + dx * (steps + 1), seed.y + dy * (steps + 1))) ++steps;
    // The boundary lies half a step past the last in-mask pixel.
    lengths[i] = (static_cast<double>(steps) + 0.5) * std::hypot(dx, dy);
  }
  std::sort(lengths.begin(), lengths.end());
  return 0.5 * (lengths[3] + lengths[4]);
}

double estimate_radius(const GrayImage& filtered, Pixel seed, const MaskRule& rule) {
  return estimate_radius(binarize_pupil(filtered, seed, rule), seed);
}

Point chord_midpoint(const ChordHits& hits) {
  return {hits.left + (hits.right - hits.left) / 2.0, hits.up + (hits.down - hits.up) / 2.0};
}

ChordHits cast_chords(const Mask& mask, Pixel seed) {
  if (!inside(mask, seed.x, seed.y)) throw Error(ErrorCode::NoPupilMask, "seed is not inside the pupil mask");

  auto walk = [&](int dx, int dy) {
    Pixel p = seed;
    while (inside(mask, p.x + dx, p.y + dy)) {
      p.x += dx;
      p.y += dy;
    }
    const Eigen::Index nx = p.x + dx;
    const Eigen::Index ny = p.y + dy;
    if (nx < 0 || ny < 0 || nx >= mask.cols() || ny >= mask.rows())
      throw Error(ErrorCode::DegenerateChord, "chord reaches the image border inside the mask");
    return p;
  };
  return ChordHits{static_cast<double>(walk(-1, 0).x), static_cast<double>(walk(1, 0).x),
                   static_cast<double>(walk(0, -1).y), static_cast<double>(walk(0, 1).y)};
}

PupilEstimate correct_center(const Mask& mask, Point center, double radius) {
  const Pixel seed{static_cast<Eigen::Index>(std::lround(center.x)),
                   static_cast<Eigen::Index>(std::lround(center.y))};
  const Point c = chord_midpoint(cast_chords(mask, seed));
  return PupilEstimate{c.x, c.y, radius, true, center.x, center.y};
}

PupilDetection detect_pupil(const GrayImage& img, const BandPassFilter& filter, const PupilOptions& options) {
  PupilDetection out;
  out.filtered = apply_filter(img, filter);
  const GrayImage acc = accumulate(out.filtered, clip_template(options.template_size, img.rows(), img.cols()));
  const Pixel summit = find_summit(acc);

  const auto sx = static_cast<double>(summit.x);
  const auto sy = static_cast<double>(summit.y);
  out.estimate = PupilEstimate{sx, sy, 0.0, false, sx, sy};

  try {
    out.mask = binarize_pupil(out.filtered, summit, options.mask);
    const double radius = estimate_radius(out.mask, summit);
    out.estimate.radius = radius;
    if (options.correct) out.estimate = correct_center(out.mask, {sx, sy}, radius);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPupilMask && e.code() != ErrorCode::DegenerateChord) throw;
    out.error = e.code();
    out.message = e.what();
  }
  return out;
}

}  // namespace irisvigil
