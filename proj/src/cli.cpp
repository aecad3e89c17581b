#include "irisvigil/cli.hpp"

#include "irisvigil/error.hpp"
#include "irisvigil/fuzzy.hpp"
#include "irisvigil/image_io.hpp"
#include "irisvigil/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace irisvigil::cli {

namespace {

using nlohmann::json;

/// Algorithmic failures map to exit 3, everything else to exit 2.
bool algorithmic(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoPupilMask:
    case ErrorCode::DegenerateChord:
    case ErrorCode::CircleOutOfBounds:
    case ErrorCode::NoConvergence:
    case ErrorCode::DegenerateCovariance:
    case ErrorCode::EmptyCluster:
    case ErrorCode::ImaginaryResidue:
      return true;
    default:
      return false;
  }
}

struct Common {
  std::string config_path;
  std::optional<double> d0;
  std::optional<double> sigma;
  std::optional<long> template_size;

  PipelineConfig load() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (d0) c.d0 = *d0;
    if (sigma) c.sigma = *sigma;
    if (template_size) {
      c.pupil.template_size = *template_size;
      c.pupil.mask.window = *template_size;
    }
    return c;
  }
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "Pipeline config (key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--d0", common.d0, "Band-pass cutoff in frequency bins (default min(rows, cols) / 8)");
  cmd->add_option("--sigma", common.sigma, "Band-pass Gaussian sigma");
  cmd->add_option("--template", common.template_size, "Odd accumulation template size");
}

json pupil_json(const PupilEstimate& p) {
  return json{{"cx", p.cx},           {"cy", p.cy},         {"radius", p.radius},
              {"corrected", p.corrected}, {"raw_cx", p.raw_cx}, {"raw_cy", p.raw_cy}};
}

json reading_json(const fuzzy::VigilanceReading& r) {
  return json{{"f", r.f}, {"T", r.t}, {"level", r.level}, {"label", std::string(fuzzy::to_string(r.label))},
              {"alert", r.alert}};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  return f;
}

fuzzy::FuzzySets fuzzy_sets(const std::string& explicit_path, const PipelineConfig& config) {
  const std::string path = explicit_path.empty() ? config.fuzzy_config : explicit_path;
  return path.empty() ? fuzzy::default_sets() : fuzzy::load_sets(path);
}

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidParameter, "grid needs at least one step");
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidParameter, "grid minimum exceeds maximum");
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  return v;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pupil/iris segmentation and fuzzy driver-vigilance tool", "irisvigil"};
  app.require_subcommand(1);
  Common common;

  // filter
  std::string filter_in;
  std::string filter_out;
  auto* filter_cmd = app.add_subcommand("filter", "Band-pass filter an image, rescaled to [0, 255]");
  filter_cmd->add_option("image", filter_in, "Input PGM or PNG")->required();
  filter_cmd->add_option("-o,--out", filter_out, "Output PGM")->required();
  add_common(filter_cmd, common);

  // pupil
  std::string pupil_in;
  bool no_correct = false;
  auto* pupil_cmd = app.add_subcommand("pupil", "Locate the pupil and print it as JSON");
  pupil_cmd->add_option("image", pupil_in, "Input PGM or PNG")->required();
  pupil_cmd->add_flag("--no-correct", no_correct, "Report the raw summit without chord correction");
  add_common(pupil_cmd, common);

  // iris
  std::string iris_in;
  std::string method = "gabor";
  std::string mask_out;
  std::string trace_out;
  std::string pca_out;
  auto* iris_cmd = app.add_subcommand("iris", "Segment the iris (entropy ripples or Gabor + PCA)");
  iris_cmd->add_option("image", iris_in, "Input PGM or PNG")->required();
  iris_cmd->add_option("-m,--method", method, "entropy or gabor")->check(CLI::IsMember({"entropy", "gabor"}));
  iris_cmd->add_option("--mask", mask_out, "Write the iris mask as PGM (0/255)");
  iris_cmd->add_option("--trace", trace_out, "Entropy method: write the ripple trace CSV (radius,h,e)");
  iris_cmd->add_option("--pca", pca_out, "Gabor method: write the 18x18 PCA coefficients CSV");
  add_common(iris_cmd, common);

  // eval
  std::string manifest_path;
  std::string eval_out;
  unsigned jobs = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Run both methods over a synthetic manifest");
  eval_cmd->add_option("manifest", manifest_path, "Manifest, one eye spec per line")->required();
  eval_cmd->add_option("-o,--out", eval_out, "Per-image CSV (default: stdout JSON only)");
  eval_cmd->add_option("-j,--jobs", jobs, "Worker threads (0 = all cores)");
  add_common(eval_cmd, common);

  // vigilance
  std::optional<double> vig_f;
  std::optional<double> vig_t;
  std::string stream_path;
  std::string fuzzy_path;
  std::optional<double> window;
  auto* vig_cmd = app.add_subcommand("vigilance", "Fuzzy vigilance level from (f, T) or a blink stream");
  auto* f_opt = vig_cmd->add_option("--f", vig_f, "Glance frequency, glances per minute");
  auto* t_opt = vig_cmd->add_option("--t", vig_t, "Closed-eye interval, seconds");
  auto* s_opt = vig_cmd->add_option("--stream", stream_path, "Blink stream: `timestamp flag` per line");
  f_opt->needs(t_opt);
  t_opt->needs(f_opt);
  s_opt->excludes(f_opt)->excludes(t_opt);
  vig_cmd->add_option("--fuzzy", fuzzy_path, "Fuzzy set config");
  vig_cmd->add_option("--window", window, "Blink counting window in seconds (default 60)");
  vig_cmd->add_option("--config", common.config_path, "Pipeline config")->check(CLI::ExistingFile);

  // surface
  std::string surface_out;
  double f_min = 0.0, f_max = 60.0, t_min = 0.0, t_max = 10.0;
  int f_steps = 31, t_steps = 51;
  auto* surf_cmd = app.add_subcommand("surface", "Sample the control surface over an (f, T) grid as CSV");
  surf_cmd->add_option("--fuzzy", fuzzy_path, "Fuzzy set config");
  surf_cmd->add_option("--config", common.config_path, "Pipeline config")->check(CLI::ExistingFile);
  surf_cmd->add_option("--f-min", f_min);
  surf_cmd->add_option("--f-max", f_max);
  surf_cmd->add_option("--f-steps", f_steps);
  surf_cmd->add_option("--t-min", t_min);
  surf_cmd->add_option("--t-max", t_max);
  surf_cmd->add_option("--t-steps", t_steps);
  surf_cmd->add_option("-o,--out", surface_out, "Output CSV (default stdout)");

  // synth
  std::string synth_manifest;
  std::string synth_dir;
  auto* synth_cmd = app.add_subcommand("synth", "Render a manifest to PGM images with JSON ground truth");
  synth_cmd->add_option("manifest", synth_manifest)->required();
  synth_cmd->add_option("-o,--out-dir", synth_dir)->required();

  // manifest
  std::size_t count = 100;
  bool corrupted = false;
  std::uint64_t seed = 2024;
  std::string manifest_out;
  auto* man_cmd = app.add_subcommand("manifest", "Generate a deterministic synthetic manifest");
  man_cmd->add_option("-n,--count", count);
  man_cmd->add_flag("--corrupted", corrupted, "Add flash spots and rim noise");
  man_cmd->add_option("--seed", seed);
  man_cmd->add_option("-o,--out", manifest_out, "Output path (default stdout)");

  auto* defaults_cmd = app.add_subcommand("defaults", "Print the default pipeline and fuzzy configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitInput;
  }

  try {
    if (*filter_cmd) {
      const PipelineConfig config = common.load();
      const GrayImage img = io::read_image(filter_in);
      io::write_pgm(filter_out, apply_filter(img, config.filter_for(img.rows(), img.cols())));
      return kExitOk;
    }

    if (*pupil_cmd) {
      PipelineConfig config = common.load();
      if (no_correct) config.pupil.correct = false;
      const GrayImage img = io::read_image(pupil_in);
      const PupilDetection det = detect_pupil(img, config.filter_for(img.rows(), img.cols()), config.pupil);
      json j = pupil_json(det.estimate);
      if (!det.ok()) j["error"] = det.message;
      out << j.dump(2) << '\n';
      return det.ok() ? kExitOk : kExitAlgorithm;
    }

    if (*iris_cmd) {
      const PipelineConfig config = common.load();
      const GrayImage img = io::read_image(iris_in);
      const PupilDetection det = detect_pupil(img, config.filter_for(img.rows(), img.cols()), config.pupil);
      json j{{"method", method}, {"pupil", pupil_json(det.estimate)}};
      if (!det.ok()) {
        j["error"] = det.message;
        out << j.dump(2) << '\n';
        return kExitAlgorithm;
      }

      Mask mask;
      bool failed = false;
      if (method == "entropy") {
        const IrisAnnulus annulus = segment_entropy(img, det.estimate, config.entropy);
        j["inner_radius"] = annulus.inner_radius;
        j["outer_radius"] = annulus.outer_radius;
        j["converged"] = annulus.converged;
        if (!annulus.converged) {
          j["error"] = "NoConvergence: ripples reached the image border without an entropy jump";
          failed = true;
        }
        if (!trace_out.empty()) {
          auto f = open_out(trace_out);
          f << "radius,h,e\n";
          f.precision(10);
          for (const auto& s : annulus.trace) f << s.radius << ',' << s.h << ',' << s.e << '\n';
        }
        mask = annulus_mask(img.rows(), img.cols(), annulus.center, annulus.inner_radius, annulus.outer_radius);
      } else {
        const GaborSegmentation seg = segment_gabor(img, det.estimate, config);
        mask = seg.mask;
        j["inner_radius"] = det.estimate.radius;
        j["components"] = config.classify.components;
        std::vector<double> variances(seg.model.component_variances.data(),
                                      seg.model.component_variances.data() + seg.model.component_variances.size());
        j["component_variances"] = variances;
        if (!pca_out.empty()) {
          auto f = open_out(pca_out);
          f.precision(12);
          const auto& m = seg.model.coefficients;
          for (Eigen::Index c = 0; c < m.cols(); ++c) f << (c ? "," : "") << "pc" << (c + 1);
          f << '\n';
          for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) f << (c ? "," : "") << m(r, c);
            f << '\n';
          }
        }
      }
      const auto pixels = (mask != 0).count();
      j["mask_pixels"] = pixels;
      // A mask swallowing (nearly) nothing or everything is not a segmentation.
      if (pixels == 0 || pixels >= img.size() - 1) {
        j["error"] = "degenerate iris mask";
        failed = true;
      }
      if (!mask_out.empty()) io::write_mask_pgm(mask_out, mask);
      out << j.dump(2) << '\n';
      return failed ? kExitAlgorithm : kExitOk;
    }

    if (*eval_cmd) {
      const PipelineConfig config = common.load();
      const auto specs = synth::load_manifest(manifest_path);
      if (specs.empty()) throw Error(ErrorCode::ParseError, "manifest " + manifest_path + " lists no eyes");
      const auto results = evaluate_all(specs, config, jobs);
      if (!eval_out.empty()) {
        auto f = open_out(eval_out);
        write_evaluation_csv(f, results);
      }
      const EvaluationSummary s = summarize(results);
      out << json{{"count", s.count},
                  {"pupil_success_rate", s.pupil_rate()},
                  {"entropy_success_rate", s.entropy_rate()},
                  {"gabor_success_rate", s.gabor_rate()}}
                 .dump(2)
          << '\n';
      return kExitOk;
    }

    if (*vig_cmd) {
      const PipelineConfig config = common.config_path.empty() ? PipelineConfig{} : load_config(common.config_path);
      const auto sets = fuzzy_sets(fuzzy_path, config);
      double f = 0.0;
      double t = 0.0;
      if (!stream_path.empty()) {
        std::ifstream in(stream_path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open stream " + stream_path);
        const auto events = fuzzy::parse_blink_stream(in);
        const std::vector<fuzzy::BlinkEvent> flat(events.begin(), events.end());
        const auto stats = fuzzy::measure_blink_stream(flat, window.value_or(config.blink_window));
        f = stats.f;
        t = stats.t;
      } else if (vig_f && vig_t) {
        f = *vig_f;
        t = *vig_t;
      } else {
        err << "vigilance: give either --f and --t, or --stream\n";
        return kExitInput;
      }
      out << reading_json(fuzzy::infer(f, t, fuzzy::default_rules(), sets)).dump(2) << '\n';
      return kExitOk;
    }

    if (*surf_cmd) {
      const PipelineConfig config = common.config_path.empty() ? PipelineConfig{} : load_config(common.config_path);
      const auto sets = fuzzy_sets(fuzzy_path, config);
      const auto fs = linspace(f_min, f_max, f_steps);
      const auto ts = linspace(t_min, t_max, t_steps);
      const Eigen::MatrixXd surface = fuzzy::control_surface(fuzzy::default_rules(), sets, fs, ts);
      std::ofstream file;
      if (!surface_out.empty()) file = open_out(surface_out);
      std::ostream& dst = surface_out.empty() ? out : file;
      dst.precision(10);
      dst << "f,T,level\n";
      for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t k = 0; k < ts.size(); ++k)
          dst << fs[i] << ',' << ts[k] << ',' << surface(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))
              << '\n';
      return kExitOk;
    }

    if (*synth_cmd) {
      const auto specs = synth::load_manifest(synth_manifest);
      std::filesystem::create_directories(synth_dir);
      for (const auto& spec : specs) {
        const auto eye = synth::render(spec);
        const auto base = std::filesystem::path(synth_dir) / spec.id;
        io::write_pgm(base.string() + ".pgm", eye.image);
        auto f = open_out(base.string() + ".json");
        f << synth::truth_json(spec, eye.truth) << '\n';
      }
      out << json{{"rendered", specs.size()}, {"directory", synth_dir}}.dump(2) << '\n';
      return kExitOk;
    }

    if (*man_cmd) {
      const auto specs = synth::make_suite(count, corrupted, seed, corrupted ? "noisy" : "eye");
      if (manifest_out.empty()) {
        synth::write_manifest(out, specs);
      } else {
        auto f = open_out(manifest_out);
        synth::write_manifest(f, specs);
      }
      return kExitOk;
    }

    if (*defaults_cmd) {
      write_config(out, PipelineConfig{});
      out << '\n';
      fuzzy::write_sets(out, fuzzy::default_sets());
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "irisvigil: " << e.what() << '\n';
    return algorithmic(e.code()) ? kExitAlgorithm : kExitInput;
  } catch (const std::exception& e) {
    err << "irisvigil: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace irisvigil::cli
