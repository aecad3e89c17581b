#include "irisvigil/synth.hpp"

#include "irisvigil/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <type_traits>

namespace irisvigil::synth {

namespace {

bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate(const EyeSpec& s) {
  if (s.rows < 1 || s.cols < 1) throw Error(ErrorCode::InvalidSpec, s.id + ": image extents must be positive");
  if (!(s.pupil_radius > 0.0)) throw Error(ErrorCode::InvalidSpec, s.id + ": pupil radius must be positive");
  if (!(s.pupil_radius < s.iris_radius)) throw Error(ErrorCode::InvalidSpec, s.id + ": pupil must be inside the iris");
  const double margin = std::min({s.center.x, s.center.y, static_cast<double>(s.cols - 1) - s.center.x,
                                  static_cast<double>(s.rows - 1) - s.center.y});
  if (!(s.iris_radius < margin)) throw Error(ErrorCode::InvalidSpec, s.id + ": iris touches the image border");
  if (!unit(s.pupil_level) || !unit(s.iris_level) || !unit(s.sclera_level))
    throw Error(ErrorCode::InvalidSpec, s.id + ": levels must lie in [0, 1]");
  if (!std::isfinite(s.texture.amplitude) || !std::isfinite(s.texture.angular) || !std::isfinite(s.texture.radial))
    throw Error(ErrorCode::InvalidSpec, s.id + ": texture parameters must be finite");
  if (s.corruption.rim_noise < 0.0 || s.corruption.rim_width < 0.0)
    throw Error(ErrorCode::InvalidSpec, s.id + ": rim noise must be non-negative");
  if (s.corruption.flash && (!(s.corruption.flash->radius >= 0.0) || !unit(s.corruption.flash->level)))
    throw Error(ErrorCode::InvalidSpec, s.id + ": invalid flash spot");
}

RenderedEye render(const EyeSpec& spec) {
  validate(spec);
  RenderedEye out{GrayImage(spec.rows, spec.cols), {spec.center, spec.pupil_radius, spec.iris_radius}};
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  const auto& tex = spec.texture;
  const auto& bad = spec.corruption;

  for (Eigen::Index r = 0; r < spec.rows; ++r)
    for (Eigen::Index c = 0; c < spec.cols; ++c) {
      const double dx = static_cast<double>(c) - spec.center.x;
      const double dy = static_cast<double>(r) - spec.center.y;
      const double d = std::hypot(dx, dy);
      double v = spec.sclera_level;
      if (d <= spec.pupil_radius) {
        v = spec.pupil_level;
      } else if (d <= spec.iris_radius) {
        v = spec.iris_level + tex.amplitude * std::sin(tex.angular * std::atan2(dy, dx)) * std::sin(tex.radial * d);
      }
      if (bad.rim_noise > 0.0 && d > spec.pupil_radius && d <= spec.pupil_radius + bad.rim_width)
        v += bad.rim_noise * noise(rng);
      if (bad.flash &&
          std::hypot(static_cast<double>(c) - bad.flash->center.x, static_cast<double>(r) - bad.flash->center.y) <=
              bad.flash->radius)
        v = bad.flash->level;
      out.image(r, c) = std::clamp(v, 0.0, 1.0);
    }
  return out;
}

Mask pupil_mask(const GroundTruth& truth, Eigen::Index rows, Eigen::Index cols) {
  Mask m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = std::hypot(static_cast<double>(c) - truth.center.x, static_cast<double>(r) - truth.center.y) <=
                truth.pupil_radius;
  return m;
}

Mask iris_mask(const GroundTruth& truth, Eigen::Index rows, Eigen::Index cols) {
  Mask m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double d = std::hypot(static_cast<double>(c) - truth.center.x, static_cast<double>(r) - truth.center.y);
      m(r, c) = d > truth.pupil_radius && d <= truth.iris_radius;
    }
  return m;
}

std::vector<EyeSpec> make_suite(std::size_t count, bool corrupted, std::uint64_t seed, std::string_view prefix) {
  std::vector<EyeSpec> specs;
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  for (std::size_t i = 0; i < count; ++i) {
    EyeSpec s;
    char id[64];
    std::snprintf(id, sizeof id, "%.*s%03zu", static_cast<int>(prefix.size()), prefix.data(), i);
    s.id = id;
    s.center = {64.0 + uniform(-6.0, 6.0), 64.0 + uniform(-6.0, 6.0)};
    s.pupil_radius = uniform(9.0, 16.0);
    s.iris_radius = uniform(34.0, 46.0);
    // A quarter radial period across the iris keeps the texture energy
    // monotone in r, so the only entropy jump is at the iris edge.
    s.texture.radial = std::numbers::pi / (2.0 * s.iris_radius);
    s.seed = rng();
    if (corrupted) {
      const double angle = uniform(0.0, 2.0 * std::numbers::pi);
      const double reach = s.pupil_radius + uniform(3.0, 7.0);
      s.corruption.flash = FlashSpot{{s.center.x + reach * std::cos(angle), s.center.y + reach * std::sin(angle)}, 3.0, 1.0};
      s.corruption.rim_noise = 0.3;
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

std::string format_spec(const EyeSpec& s) {
  std::ostringstream out;
  out << "id=" << s.id << " rows=" << s.rows << " cols=" << s.cols << " cx=" << num(s.center.x)
      << " cy=" << num(s.center.y) << " pupil_radius=" << num(s.pupil_radius) << " iris_radius=" << num(s.iris_radius)
      << " pupil_level=" << num(s.pupil_level) << " iris_level=" << num(s.iris_level)
      << " sclera_level=" << num(s.sclera_level) << " texture_amplitude=" << num(s.texture.amplitude)
      << " texture_angular=" << num(s.texture.angular) << " texture_radial=" << num(s.texture.radial);
  if (s.corruption.flash) {
    const auto& f = *s.corruption.flash;
    out << " flash_x=" << num(f.center.x) << " flash_y=" << num(f.center.y) << " flash_radius=" << num(f.radius)
        << " flash_level=" << num(f.level);
  }
  if (s.corruption.rim_noise > 0.0)
    out << " rim_noise=" << num(s.corruption.rim_noise) << " rim_width=" << num(s.corruption.rim_width);
  out << " seed=" << s.seed << " rng=" << kRngAlgorithm;
  return out.str();
}

void write_manifest(std::ostream& out, const std::vector<EyeSpec>& specs) {
  for (const auto& s : specs) out << format_spec(s) << '\n';
}

std::vector<EyeSpec> parse_manifest(std::istream& in) {
  std::vector<EyeSpec> specs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::map<std::string, std::string> kv;
    for (std::string tok; fields >> tok;) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key=value, got " + tok);
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (kv.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    auto take = [&](const std::string& key) -> std::optional<std::string> {
      const auto it = kv.find(key);
      if (it == kv.end()) return std::nullopt;
      std::string v = it->second;
      kv.erase(it);
      return v;
    };
    auto real = [&](const std::string& key, double& dst) {
      if (const auto v = take(key)) {
        std::size_t used = 0;
        try {
          dst = std::stod(*v, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != v->size()) throw Error(ErrorCode::ParseError, where + "bad number for " + key);
      }
    };
    auto integer = [&](const std::string& key, auto& dst) {
      if (const auto v = take(key)) {
        std::size_t used = 0;
        unsigned long long parsed = 0;
        try {
          parsed = std::stoull(*v, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != v->size()) throw Error(ErrorCode::ParseError, where + "bad integer for " + key);
        dst = static_cast<std::remove_reference_t<decltype(dst)>>(parsed);
      }
    };

    EyeSpec s;
    s.id = take("id").value_or("eye" + std::to_string(specs.size()));
    integer("rows", s.rows);
    integer("cols", s.cols);
    s.center = {static_cast<double>(s.cols) / 2.0, static_cast<double>(s.rows) / 2.0};
    real("cx", s.center.x);
    real("cy", s.center.y);
    real("pupil_radius", s.pupil_radius);
    real("iris_radius", s.iris_radius);
    real("pupil_level", s.pupil_level);
    real("iris_level", s.iris_level);
    real("sclera_level", s.sclera_level);
    real("texture_amplitude", s.texture.amplitude);
    real("texture_angular", s.texture.angular);
    real("texture_radial", s.texture.radial);
    if (kv.count("flash_x") || kv.count("flash_y")) {
      FlashSpot f;
      real("flash_x", f.center.x);
      real("flash_y", f.center.y);
      real("flash_radius", f.radius);
      real("flash_level", f.level);
      s.corruption.flash = f;
    }
    real("rim_noise", s.corruption.rim_noise);
    real("rim_width", s.corruption.rim_width);
    integer("seed", s.seed);
    if (const auto rng = take("rng"); rng && *rng != kRngAlgorithm)
      throw Error(ErrorCode::ParseError, where + "unsupported rng " + *rng);
    if (!kv.empty()) throw Error(ErrorCode::ParseError, where + "unknown key " + kv.begin()->first);
    try {
      validate(s);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + e.what());
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

std::vector<EyeSpec> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path);
  return parse_manifest(in);
}

std::string truth_json(const EyeSpec& spec, const GroundTruth& truth) {
  nlohmann::json j;
  j["id"] = spec.id;
  j["rows"] = spec.rows;
  j["cols"] = spec.cols;
  j["cx"] = truth.center.x;
  j["cy"] = truth.center.y;
  j["pupil_radius"] = truth.pupil_radius;
  j["iris_radius"] = truth.iris_radius;
  j["seed"] = spec.seed;
  j["rng"] = kRngAlgorithm;
  return j.dump(2);
}

}  // namespace irisvigil::synth
