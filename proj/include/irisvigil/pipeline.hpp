#pragma once

#include "irisvigil/gabor_pca.hpp"
#include "irisvigil/iris_entropy.hpp"
#include "irisvigil/pupil.hpp"
#include "irisvigil/synth.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irisvigil {

/// Every under-determined parameter of the pipeline, each with a default.
struct PipelineConfig {
  /// Band-pass cutoff; unset means min(rows, cols) / 8.
  std::optional<double> d0;
  double sigma = 1.0;
  PupilOptions pupil;
  EntropyOptions entropy;
  GaborParams gabor;
  ClassifyOptions classify;
  std::string fuzzy_config;
  double blink_window = 60.0;

  BandPassFilter filter_for(Eigen::Index rows, Eigen::Index cols) const;
};

/// `section.key = value` lines, `#` comments. Unknown keys are errors.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::string& path);
void write_config(std::ostream& out, const PipelineConfig& config);

struct GaborSegmentation {
  Mask mask;
  PcaModel<double> model;
};

GaborSegmentation segment_gabor(const GrayImage& img, const PupilEstimate& pupil, const PipelineConfig& config);

/// Annulus between the two radii around center, as a mask.
Mask annulus_mask(Eigen::Index rows, Eigen::Index cols, Point center, double inner, double outer);

/// Success thresholds for the synthetic evaluation.
inline constexpr double kCenterTolerance = 2.0;
inline constexpr double kRadiusTolerance = 2.0;
inline constexpr double kIouThreshold = 0.85;

struct EyeEvaluation {
  std::string id;
  synth::GroundTruth truth;
  PupilEstimate pupil;
  std::optional<std::string> pupil_error;
  double raw_error = 0.0;
  double center_error = 0.0;
  std::optional<double> entropy_outer;
  bool entropy_converged = false;
  std::optional<std::string> entropy_error;
  std::optional<double> gabor_iou;
  std::optional<std::string> gabor_error;

  bool center_ok() const { return !pupil_error && center_error <= kCenterTolerance; }
  bool entropy_ok() const;
  bool gabor_ok() const;
};

EyeEvaluation evaluate_eye(const synth::EyeSpec& spec, const PipelineConfig& config);

struct EvaluationSummary {
  std::size_t count = 0;
  std::size_t pupil_success = 0;
  std::size_t entropy_success = 0;
  std::size_t gabor_success = 0;

  double pupil_rate() const { return count ? static_cast<double>(pupil_success) / count : 0.0; }
  double entropy_rate() const { return count ? static_cast<double>(entropy_success) / count : 0.0; }
  double gabor_rate() const { return count ? static_cast<double>(gabor_success) / count : 0.0; }
};

/// Results come back in manifest order regardless of the worker count.
std::vector<EyeEvaluation> evaluate_all(const std::vector<synth::EyeSpec>& specs, const PipelineConfig& config,
                                        unsigned jobs = 0);
EvaluationSummary summarize(const std::vector<EyeEvaluation>& results);
void write_evaluation_csv(std::ostream& out, const std::vector<EyeEvaluation>& results);

}  // namespace irisvigil
