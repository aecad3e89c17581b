#pragma once

#include <Eigen/Dense>

#include <array>
#include <deque>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace irisvigil::fuzzy {

/// Trapezoid with breakpoints a <= b <= c <= d: 0 outside [a, d], 1 on [b, c],
/// linear in between. c and d may be +infinity for a right shoulder.
struct TrapezoidalSet {
  std::string label;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

double membership(const TrapezoidalSet& set, double x);

/// Glance frequency f, glances per minute.
enum class Glance { Normal, High };
/// Closed-eye interval T, seconds.
enum class Closure { VeryShort, Short, Long, VeryLong };
/// Output labels in increasing severity.
enum class Vigilance { Vigilant, RatherSleepy, Sleepy, RatherUnconscious, Unconscious };

std::string_view to_string(Glance g);
std::string_view to_string(Closure c);
std::string_view to_string(Vigilance v);

struct FuzzySets {
  std::array<TrapezoidalSet, 2> glance;
  std::array<TrapezoidalSet, 4> closure;
  std::array<TrapezoidalSet, 5> level;
  double level_min = 0.0;
  double level_max = 100.0;

  const TrapezoidalSet& operator[](Glance g) const { return glance[static_cast<std::size_t>(g)]; }
  const TrapezoidalSet& operator[](Closure c) const { return closure[static_cast<std::size_t>(c)]; }
  const TrapezoidalSet& operator[](Vigilance v) const { return level[static_cast<std::size_t>(v)]; }
};

/// Engineering defaults; all of them can be overridden from a config file.
FuzzySets default_sets();

struct Rule {
  Glance glance;
  Closure closure;
  Vigilance output;
};

/// The six-cell glance x closure table plus the override that declares the
/// driver unconscious when T is fully VeryLong or f is zero.
struct RuleBase {
  std::array<Rule, 6> rules;
  Closure override_closure = Closure::VeryLong;
  Vigilance override_output = Vigilance::Unconscious;
};

RuleBase default_rules();

struct VigilanceReading {
  double f = 0.0;
  double t = 0.0;
  double level = 0.0;
  Vigilance label = Vigilance::Vigilant;
  bool alert = false;
};

/// Mamdani inference: min for AND, clip each consequent at its activation,
/// aggregate by max, centroid over [level_min, level_max]. The override rule
/// short-circuits to level_max. Throws InvalidInput on negative or non-finite
/// inputs.
VigilanceReading infer(double f, double t, const RuleBase& rules = default_rules(),
                       const FuzzySets& sets = default_sets());

/// Levels at every (f_grid[i], t_grid[j]).
Eigen::MatrixXd control_surface(const RuleBase& rules, const FuzzySets& sets, std::span<const double> f_grid,
                                std::span<const double> t_grid);

/// Key-value text, one set per line: `variable label a b c d` with variable
/// one of f, T, level; commas or whitespace separate fields, `inf` is
/// accepted, `#` starts a comment. Unlisted sets keep their defaults.
FuzzySets parse_sets(std::istream& in, FuzzySets base = default_sets());
FuzzySets load_sets(const std::string& path);
void write_sets(std::ostream& out, const FuzzySets& sets);

struct BlinkEvent {
  double timestamp = 0.0;
  bool eye_open = true;
};

struct BlinkStats {
  double f = 0.0;
  double t = 0.0;
};

/// f: closed->open transitions inside the trailing window, scaled to per
/// minute by the window length. t: length of the current closed run, 0 when
/// the eye is open. Throws NonMonotonicTimestamps.
BlinkStats measure_blink_stream(std::span<const BlinkEvent> events, double window_seconds = 60.0);

/// Incremental form of measure_blink_stream for a live stream. Single writer.
class BlinkMeter {
 public:
  explicit BlinkMeter(double window_seconds = 60.0);

  void push(const BlinkEvent& event);
  BlinkStats stats() const;

 private:
  double window_;
  std::optional<BlinkEvent> last_;
  std::optional<double> closed_since_;
  std::deque<double> openings_;
};

/// One `timestamp flag` pair per line (flag 1 = open, 0 = closed).
std::deque<BlinkEvent> parse_blink_stream(std::istream& in);

}  // namespace irisvigil::fuzzy
