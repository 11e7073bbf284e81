// Colored-tile grid MDP: the dynamics model demonstrations are drawn from.

#pragma once

#include "intent/pltl.hpp"
#include "intent/random.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intent {

enum class Color : std::uint8_t { Red, Yellow, Blue, Brown, White };
inline constexpr std::size_t color_count = 5;

std::string_view color_name(Color c);

/// The proposition alphabet of every grid world: one atom per color.
const Alphabet &grid_alphabet();

enum class Action : std::uint8_t { North, South, East, West };
inline constexpr std::array<Action, 4> all_actions = {Action::North, Action::South,
                                                      Action::East, Action::West};

char action_letter(Action a);
Action action_from_letter(char c);

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(Cell, Cell) = default;
};

class GridWorld {
public:
  GridWorld(int width, int height, std::vector<Color> tiles, Cell start,
            double p_slip = 0.0, std::size_t max_len = 64);

  int width() const { return width_; }
  int height() const { return height_; }
  Cell start() const { return start_; }
  double p_slip() const { return p_slip_; }
  std::size_t max_len() const { return max_len_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  Color color(Cell c) const;
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y * width_ + c.x); }
  Cell cell(std::size_t index) const {
    return Cell{static_cast<int>(index) % width_, static_cast<int>(index) / width_};
  }
  std::size_t cell_count() const { return tiles_.size(); }

  bool has_color(Color c) const;

  GridWorld with_slip(double p_slip) const;
  GridWorld with_max_len(std::size_t max_len) const;

  /// Grid text in the world-file format.
  std::string to_text() const;

private:
  int width_;
  int height_;
  std::vector<Color> tiles_;
  Cell start_;
  double p_slip_;
  std::size_t max_len_;
};

/// Parses a world file: one row per line, `r y b n .` for colors and `A` for
/// the start (a white tile). Throws std::invalid_argument on malformed input.
GridWorld load_world(std::string_view text);
GridWorld load_world_file(const std::string &path);

/// Deterministic move with wall clamping.
Cell move(const GridWorld &world, Cell pos, Action act);

/// Stochastic transition: the intended move with probability 1 - p_slip,
/// otherwise a uniformly chosen perpendicular move.
Cell step(const GridWorld &world, Cell pos, Action act, Rng &rng);

/// Singleton observation {color(pos)}; throws std::out_of_range off-grid.
Observation label(const GridWorld &world, Cell pos);

struct TraceStep {
  Cell pos;
  Observation obs;
  std::optional<Action> action;
  friend bool operator==(const TraceStep &, const TraceStep &) = default;
};

/// A demonstration: positions with their labels and the action taken there.
struct Trace {
  std::vector<TraceStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  std::vector<Observation> observations() const;
  friend bool operator==(const Trace &, const Trace &) = default;
};

/// `length` steps from the start with i.i.d. uniform actions.
Trace rollout_random(const GridWorld &world, std::size_t length, Rng &rng);

/// Builds a trace by executing `actions` on the deterministic kernel; the
/// trace has actions.size() + 1 steps and its final action is empty.
Trace trace_from_actions(const GridWorld &world, const std::vector<Action> &actions);

/// Empty string when `trace` satisfies the trace invariants, otherwise a
/// description of the first violation.
std::string check_trace(const GridWorld &world, const Trace &trace);

bool satisfies(const Formula &phi, const Trace &trace);

// Trace files hold one JSON object per step; a blank line ends a trace.
void write_traces(std::ostream &out, const std::vector<Trace> &traces);
std::vector<Trace> read_traces(std::istream &in);
std::vector<Trace> read_trace_file(const std::string &path);
std::string traces_to_string(const std::vector<Trace> &traces);

} // namespace intent
