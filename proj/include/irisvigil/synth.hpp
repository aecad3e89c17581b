#pragma once

#include "irisvigil/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irisvigil::synth {

/// Engine behind every random draw, recorded next to seeds in manifests.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

struct IrisTexture {
  double amplitude = 0.2;
  /// Cycles per turn.
  double angular = 12.0;
  /// Radians per pixel of radius.
  double radial = 0.04;
};

struct FlashSpot {
  Point center;
  double radius = 3.0;
  double level = 1.0;
};

struct Corruption {
  std::optional<FlashSpot> flash;
  /// Uniform noise amplitude on the ring just outside the pupil.
  double rim_noise = 0.0;
  double rim_width = 3.0;
};

/// Pupil disk, textured iris annulus (iris_level + a sin(k_t theta) sin(k_r r))
/// and flat sclera. Corruptions are applied last, then values are clipped to
/// [0, 1].
struct EyeSpec {
  std::string id;
  Eigen::Index rows = 128;
  Eigen::Index cols = 128;
  Point center{64.0, 64.0};
  double pupil_radius = 12.0;
  double iris_radius = 40.0;
  double pupil_level = 0.1;
  double iris_level = 0.5;
  double sclera_level = 0.85;
  IrisTexture texture;
  Corruption corruption;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  Point center;
  double pupil_radius = 0.0;
  double iris_radius = 0.0;
};

struct RenderedEye {
  GrayImage image;
  GroundTruth truth;
};

/// Throws InvalidSpec unless pupil_radius < iris_radius < distance from the
/// center to the nearest border and every level lies in [0, 1].
void validate(const EyeSpec& spec);

RenderedEye render(const EyeSpec& spec);

/// Pixels with distance <= pupil_radius.
Mask pupil_mask(const GroundTruth& truth, Eigen::Index rows, Eigen::Index cols);
/// Pixels with pupil_radius < distance <= iris_radius.
Mask iris_mask(const GroundTruth& truth, Eigen::Index rows, Eigen::Index cols);

/// Deterministic batch of 128x128 eyes with randomized geometry. Corrupted
/// eyes get a flash spot on the iris next to the pupil and rim noise.
std::vector<EyeSpec> make_suite(std::size_t count, bool corrupted, std::uint64_t seed, std::string_view prefix = "eye");

/// One spec per line as space-separated key=value pairs; `#` starts a comment.
std::vector<EyeSpec> parse_manifest(std::istream& in);
std::vector<EyeSpec> load_manifest(const std::string& path);
std::string format_spec(const EyeSpec& spec);
void write_manifest(std::ostream& out, const std::vector<EyeSpec>& specs);

/// Ground truth as a JSON object (sidecar next to rendered PGMs).
std::string truth_json(const EyeSpec& spec, const GroundTruth& truth);

}  // namespace irisvigil::synth
