#include "irisvigil/pipeline.hpp"

#include "irisvigil/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

namespace irisvigil {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out))
    throw Error(ErrorCode::ParseError, key + ": expected a number, got '" + v + "'");
  return out;
}

Eigen::Index to_index(const std::string& key, const std::string& v) {
  const double x = to_real(key, v);
  if (x != std::floor(x) || x < 0) throw Error(ErrorCode::ParseError, key + ": expected a non-negative integer");
  return static_cast<Eigen::Index>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::ParseError, key + ": expected true or false");
}

std::string csv_field(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::string csv_field(double v) { return csv_field(std::optional<double>(v)); }

}  // namespace

BandPassFilter PipelineConfig::filter_for(Eigen::Index rows, Eigen::Index cols) const {
  return make_band_pass(rows, cols, d0.value_or(default_cutoff(rows, cols)), sigma);
}

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig c;
  bool window_set = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, "config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));

    if (key == "filter.d0") {
      if (v == "auto") c.d0.reset();
      else c.d0 = to_real(key, v);
    } else if (key == "filter.sigma") {
      c.sigma = to_real(key, v);
    } else if (key == "pupil.template") {
      c.pupil.template_size = to_index(key, v);
    } else if (key == "pupil.binarize") {
      if (v == "otsu") c.pupil.mask.kind = MaskRule::Kind::LocalOtsu;
      else if (v == "percentile") c.pupil.mask.kind = MaskRule::Kind::Percentile;
      else throw Error(ErrorCode::ParseError, key + ": expected otsu or percentile");
    } else if (key == "pupil.percentile") {
      c.pupil.mask.percentile = to_real(key, v);
    } else if (key == "pupil.window") {
      c.pupil.mask.window = to_index(key, v);
      window_set = true;
    } else if (key == "pupil.correct") {
      c.pupil.correct = to_bool(key, v);
    } else if (key == "entropy.e_max") {
      c.entropy.e_max = to_real(key, v);
    } else if (key == "entropy.samples") {
      c.entropy.samples = to_index(key, v);
    } else if (key == "entropy.start_offset") {
      c.entropy.start_offset = to_real(key, v);
    } else if (key == "gabor.gamma") {
      c.gabor.gamma = to_real(key, v);
    } else if (key == "gabor.bandwidth") {
      c.gabor.bandwidth = to_real(key, v);
    } else if (key == "gabor.components") {
      c.classify.components = to_index(key, v);
    } else if (key == "gabor.ring_inner") {
      c.classify.ring_inner = to_real(key, v);
    } else if (key == "gabor.ring_outer") {
      c.classify.ring_outer = to_real(key, v);
    } else if (key == "gabor.border") {
      c.classify.border = to_index(key, v);
    } else if (key == "fuzzy.config") {
      c.fuzzy_config = v;
    } else if (key == "fuzzy.window") {
      c.blink_window = to_real(key, v);
    } else {
      throw Error(ErrorCode::ParseError, "config line " + std::to_string(line_no) + ": unknown key " + key);
    }
  }
  if (!window_set) c.pupil.mask.window = c.pupil.template_size;
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  return parse_config(in);
}

void write_config(std::ostream& out, const PipelineConfig& c) {
  out << "filter.d0 = " << (c.d0 ? std::to_string(*c.d0) : std::string("auto")) << '\n'
      << "filter.sigma = " << c.sigma << '\n'
      << "pupil.template = " << c.pupil.template_size << '\n'
      << "pupil.binarize = " << (c.pupil.mask.kind == MaskRule::Kind::LocalOtsu ? "otsu" : "percentile") << '\n'
      << "pupil.percentile = " << c.pupil.mask.percentile << '\n'
      << "pupil.window = " << c.pupil.mask.window << '\n'
      << "pupil.correct = " << (c.pupil.correct ? "true" : "false") << '\n'
      << "entropy.e_max = " << c.entropy.e_max << '\n'
      << "entropy.samples = " << c.entropy.samples << '\n'
      << "entropy.start_offset = " << c.entropy.start_offset << '\n'
      << "gabor.gamma = " << c.gabor.gamma << '\n'
      << "gabor.bandwidth = " << c.gabor.bandwidth << '\n'
      << "gabor.components = " << c.classify.components << '\n'
      << "gabor.ring_inner = " << c.classify.ring_inner << '\n'
      << "gabor.ring_outer = " << c.classify.ring_outer << '\n'
      << "gabor.border = " << c.classify.border << '\n'
      << "fuzzy.config = " << c.fuzzy_config << '\n'
      << "fuzzy.window = " << c.blink_window << '\n';
}

GaborSegmentation segment_gabor(const GrayImage& img, const PupilEstimate& pupil, const PipelineConfig& config) {
  const GaborBank bank = make_gabor_bank(img.rows(), img.cols(), config.gabor);
  const FeatureStack stack = normalize(gabor_features(img, bank));
  GaborSegmentation out{Mask(), fit_pca(stack)};
  out.mask = classify_iris(stack, out.model, pupil, config.classify);
  return out;
}

Mask annulus_mask(Eigen::Index rows, Eigen::Index cols, Point center, double inner, double outer) {
  Mask m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double d = std::hypot(static_cast<double>(c) - center.x, static_cast<double>(r) - center.y);
      m(r, c) = d > inner && d <= outer;
    }
  return m;
}

bool EyeEvaluation::entropy_ok() const {
  return center_ok() && entropy_converged && entropy_outer &&
         std::abs(*entropy_outer - truth.iris_radius) <= kRadiusTolerance;
}

bool EyeEvaluation::gabor_ok() const { return !pupil_error && gabor_iou && *gabor_iou >= kIouThreshold; }

EyeEvaluation evaluate_eye(const synth::EyeSpec& spec, const PipelineConfig& config) {
  const synth::RenderedEye eye = synth::render(spec);
  EyeEvaluation out;
  out.id = spec.id;
  out.truth = eye.truth;

  PupilDetection det;
  try {
    det = detect_pupil(eye.image, config.filter_for(spec.rows, spec.cols), config.pupil);
  } catch (const Error& e) {
    out.pupil_error = e.what();
    return out;
  }
  out.pupil = det.estimate;
  out.raw_error = std::hypot(det.estimate.raw_cx - eye.truth.center.x, det.estimate.raw_cy - eye.truth.center.y);
  out.center_error = std::hypot(det.estimate.cx - eye.truth.center.x, det.estimate.cy - eye.truth.center.y);
  if (!det.ok()) {
    out.pupil_error = det.message;
    return out;
  }

  try {
    const IrisAnnulus annulus = segment_entropy(eye.image, det.estimate, config.entropy);
    out.entropy_outer = annulus.outer_radius;
    out.entropy_converged = annulus.converged;
  } catch (const Error& e) {
    out.entropy_error = e.what();
  }

  try {
    const GaborSegmentation seg = segment_gabor(eye.image, det.estimate, config);
    out.gabor_iou = mask_iou(seg.mask, synth::iris_mask(eye.truth, spec.rows, spec.cols));
  } catch (const Error& e) {
    out.gabor_error = e.what();
  }
  return out;
}

std::vector<EyeEvaluation> evaluate_all(const std::vector<synth::EyeSpec>& specs, const PipelineConfig& config,
                                        unsigned jobs) {
  std::vector<EyeEvaluation> results(specs.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, specs.size())));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) results[i] = evaluate_eye(specs[i], config);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return results;
}

EvaluationSummary summarize(const std::vector<EyeEvaluation>& results) {
  EvaluationSummary s;
  s.count = results.size();
  for (const auto& r : results) {
    s.pupil_success += r.center_ok() ? 1 : 0;
    s.entropy_success += r.entropy_ok() ? 1 : 0;
    s.gabor_success += r.gabor_ok() ? 1 : 0;
  }
  return s;
}

void write_evaluation_csv(std::ostream& out, const std::vector<EyeEvaluation>& results) {
  out << "id,gt_cx,gt_cy,gt_pupil_radius,gt_iris_radius,raw_cx,raw_cy,cx,cy,radius,raw_error,center_error,"
         "center_ok,entropy_outer,entropy_converged,entropy_ok,gabor_iou,gabor_ok,error\n";
  for (const auto& r : results) {
    std::string error = r.pupil_error.value_or(r.entropy_error.value_or(r.gabor_error.value_or("")));
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << r.id << ',' << csv_field(r.truth.center.x) << ',' << csv_field(r.truth.center.y) << ','
        << csv_field(r.truth.pupil_radius) << ',' << csv_field(r.truth.iris_radius) << ','
        << csv_field(r.pupil.raw_cx) << ',' << csv_field(r.pupil.raw_cy) << ',' << csv_field(r.pupil.cx) << ','
        << csv_field(r.pupil.cy) << ',' << csv_field(r.pupil.radius) << ',' << csv_field(r.raw_error) << ','
        << csv_field(r.center_error) << ',' << (r.center_ok() ? 1 : 0) << ',' << csv_field(r.entropy_outer) << ','
        << (r.entropy_converged ? 1 : 0) << ',' << (r.entropy_ok() ? 1 : 0) << ',' << csv_field(r.gabor_iou) << ','
        << (r.gabor_ok() ? 1 : 0) << ',' << error << '\n';
  }
}

}  // namespace irisvigil
