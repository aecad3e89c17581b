#include "irisvigil/fuzzy.hpp"

#include "irisvigil/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace irisvigil::fuzzy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDefuzzSamples = 1001;

bool plateau(const TrapezoidalSet& set, double x) { return x >= set.b && x <= set.c; }

void validate(const TrapezoidalSet& s) {
  if (std::isnan(s.a) || std::isnan(s.b) || std::isnan(s.c) || std::isnan(s.d) || !(s.a <= s.b) ||
      !(s.b <= s.c) || !(s.c <= s.d))
    throw Error(ErrorCode::ParseError, "set " + s.label + " needs a <= b <= c <= d");
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

double parse_number(const std::string& token) {
  const std::string t = lower(token);
  if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
  if (t == "-inf") return -kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "not a number: " + token);
  }
  if (used != token.size()) throw Error(ErrorCode::ParseError, "not a number: " + token);
  return v;
}

template <std::size_t N, typename Enum>
bool assign(std::array<TrapezoidalSet, N>& sets, const std::string& label, const TrapezoidalSet& value) {
  for (std::size_t i = 0; i < N; ++i) {
    if (lower(std::string(to_string(static_cast<Enum>(i)))) == lower(label)) {
      sets[i] = value;
      sets[i].label = std::string(to_string(static_cast<Enum>(i)));
      return true;
    }
  }
  return false;
}

}  // namespace

double membership(const TrapezoidalSet& set, double x) {
  if (plateau(set, x)) return 1.0;
  if (x <= set.a || x >= set.d) return 0.0;
  if (x < set.b) return (x - set.a) / (set.b - set.a);
  return (set.d - x) / (set.d - set.c);
}

std::string_view to_string(Glance g) {
  switch (g) {
    case Glance::Normal: return "Normal";
    case Glance::High: return "High";
  }
  return "?";
}

std::string_view to_string(Closure c) {
  switch (c) {
    case Closure::VeryShort: return "VeryShort";
    case Closure::Short: return "Short";
    case Closure::Long: return "Long";
    case Closure::VeryLong: return "VeryLong";
  }
  return "?";
}

std::string_view to_string(Vigilance v) {
  switch (v) {
    case Vigilance::Vigilant: return "Vigilant";
    case Vigilance::RatherSleepy: return "RatherSleepy";
    case Vigilance::Sleepy: return "Sleepy";
    case Vigilance::RatherUnconscious: return "RatherUnconscious";
    case Vigilance::Unconscious: return "Unconscious";
  }
  return "?";
}

FuzzySets default_sets() {
  FuzzySets s;
  s.glance = {{{"Normal", 0, 0, 20, 30}, {"High", 20, 30, 120, 120}}};
  s.closure = {{{"VeryShort", 0, 0, 0.3, 0.5},
                {"Short", 0.3, 0.5, 1.5, 2.5},
                {"Long", 1.5, 2.5, 5, 7},
                {"VeryLong", 5, 7, kInf, kInf}}};
  // Evenly spaced over [0, 100]: centers 0, 25, 50, 75, 100.
  s.level = {{{"Vigilant", 0, 0, 5, 20},
              {"RatherSleepy", 5, 20, 30, 45},
              {"Sleepy", 30, 45, 55, 70},
              {"RatherUnconscious", 55, 70, 80, 95},
              {"Unconscious", 80, 95, 100, 100}}};
  return s;
}

RuleBase default_rules() {
  using G = Glance;
  using C = Closure;
  using V = Vigilance;
  return RuleBase{{{{G::Normal, C::VeryShort, V::Vigilant},
                    {G::Normal, C::Short, V::RatherSleepy},
                    {G::Normal, C::Long, V::Sleepy},
                    {G::High, C::VeryShort, V::RatherSleepy},
                    {G::High, C::Short, V::Sleepy},
                    {G::High, C::Long, V::RatherUnconscious}}}};
}

VigilanceReading infer(double f, double t, const RuleBase& rules, const FuzzySets& sets) {
  if (!std::isfinite(f) || !std::isfinite(t) || f < 0.0 || t < 0.0)
    throw Error(ErrorCode::InvalidInput, "f and T must be finite and non-negative");

  VigilanceReading out{f, t, 0.0, Vigilance::Vigilant, false};
  if (f == 0.0 || membership(sets[rules.override_closure], t) == 1.0) {
    out.level = sets.level_max;
    out.label = rules.override_output;
    out.alert = true;
    return out;
  }

  std::array<double, 5> activation{};
  for (const Rule& rule : rules.rules) {
    const double a = std::min(membership(sets[rule.glance], f), membership(sets[rule.closure], t));
    auto& slot = activation[static_cast<std::size_t>(rule.output)];
    slot = std::max(slot, a);
  }

  double weighted = 0.0;
  double mass = 0.0;
  const double step = (sets.level_max - sets.level_min) / (kDefuzzSamples - 1);
  for (int i = 0; i < kDefuzzSamples; ++i) {
    const double y = sets.level_min + step * i;
    double mu = 0.0;
    for (std::size_t k = 0; k < activation.size(); ++k)
      mu = std::max(mu, std::min(activation[k], membership(sets.level[k], y)));
    const double w = (i == 0 || i == kDefuzzSamples - 1) ? 0.5 : 1.0;  // trapezoid rule
    weighted += w * mu * y;
    mass += w * mu;
  }

  if (mass > 0.0) {
    out.level = std::clamp(weighted / mass, sets.level_min, sets.level_max);
    // Strongest label wins; ties go to the more severe label.
    std::size_t best = 0;
    for (std::size_t k = 1; k < activation.size(); ++k)
      if (activation[k] >= activation[best]) best = k;
    out.label = static_cast<Vigilance>(best);
  } else {
    // Nothing fired (f beyond every glance set): report the middle of the
    // output range and the label that covers it best.
    out.level = 0.5 * (sets.level_min + sets.level_max);
    std::size_t best = 0;
    for (std::size_t k = 1; k < sets.level.size(); ++k)
      if (membership(sets.level[k], out.level) > membership(sets.level[best], out.level)) best = k;
    out.label = static_cast<Vigilance>(best);
  }
  return out;
}

Eigen::MatrixXd control_surface(const RuleBase& rules, const FuzzySets& sets, std::span<const double> f_grid,
                                std::span<const double> t_grid) {
  if (f_grid.empty() || t_grid.empty()) throw Error(ErrorCode::InvalidParameter, "empty grid");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(f_grid.size()), static_cast<Eigen::Index>(t_grid.size()));
  for (std::size_t i = 0; i < f_grid.size(); ++i)
    for (std::size_t j = 0; j < t_grid.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = infer(f_grid[i], t_grid[j], rules, sets).level;
  return out;
}

FuzzySets parse_sets(std::istream& in, FuzzySets base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 6)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected `variable label a b c d`");

    TrapezoidalSet set{tokens[1], parse_number(tokens[2]), parse_number(tokens[3]), parse_number(tokens[4]),
                       parse_number(tokens[5])};
    validate(set);
    const std::string variable = lower(tokens[0]);
    bool known = false;
    if (variable == "f")
      known = assign<2, Glance>(base.glance, tokens[1], set);
    else if (variable == "t")
      known = assign<4, Closure>(base.closure, tokens[1], set);
    else if (variable == "level")
      known = assign<5, Vigilance>(base.level, tokens[1], set);
    if (!known)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": unknown set " + tokens[0] + " " + tokens[1]);
  }
  return base;
}

FuzzySets load_sets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open fuzzy config " + path);
  return parse_sets(in);
}

void write_sets(std::ostream& out, const FuzzySets& sets) {
  auto emit = [&](std::string_view variable, const TrapezoidalSet& s) {
    out << variable << ' ' << s.label << ' ' << s.a << ' ' << s.b << ' ' << s.c << ' ' << s.d << '\n';
  };
  for (const auto& s : sets.glance) emit("f", s);
  for (const auto& s : sets.closure) emit("T", s);
  for (const auto& s : sets.level) emit("level", s);
}

BlinkStats measure_blink_stream(std::span<const BlinkEvent> events, double window_seconds) {
  BlinkMeter meter(window_seconds);
  for (const auto& e : events) meter.push(e);
  return meter.stats();
}

BlinkMeter::BlinkMeter(double window_seconds) : window_(window_seconds) {
  if (!(window_seconds > 0.0)) throw Error(ErrorCode::InvalidParameter, "window must be positive");
}

void BlinkMeter::push(const BlinkEvent& event) {
  if (!std::isfinite(event.timestamp)) throw Error(ErrorCode::InvalidInput, "non-finite timestamp");
  if (last_ && !(event.timestamp > last_->timestamp))
    throw Error(ErrorCode::NonMonotonicTimestamps, "timestamps must strictly increase");

  if (event.eye_open) {
    if (last_ && !last_->eye_open) openings_.push_back(event.timestamp);
    closed_since_.reset();
  } else if (!closed_since_) {
    closed_since_ = event.timestamp;
  }
  last_ = event;
  while (!openings_.empty() && openings_.front() <= event.timestamp - window_) openings_.pop_front();
}

BlinkStats BlinkMeter::stats() const {
  if (!last_) return {};
  BlinkStats out;
  out.f = static_cast<double>(openings_.size()) * 60.0 / window_;
  out.t = closed_since_ ? last_->timestamp - *closed_since_ : 0.0;
  return out;
}

std::deque<BlinkEvent> parse_blink_stream(std::istream& in) {
  std::deque<BlinkEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string ts;
    std::string flag;
    if (!(fields >> ts)) continue;
    std::string extra;
    if (!(fields >> flag) || (fields >> extra))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected `timestamp flag`");
    if (flag != "0" && flag != "1")
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": flag must be 0 or 1");
    events.push_back({parse_number(ts), flag == "1"});
  }
  return events;
}

}  // namespace irisvigil::fuzzy
