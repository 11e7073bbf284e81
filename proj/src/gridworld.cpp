#include "intent/gridworld.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <cstdlib>
#include <stdexcept>

namespace intent {

std::string_view color_name(Color c) {
  switch (c) {
  case Color::Red: return "red";
  case Color::Yellow: return "yellow";
  case Color::Blue: return "blue";
  case Color::Brown: return "brown";
  case Color::White: return "white";
  }
  return "?";
}

const Alphabet &grid_alphabet() {
  static const Alphabet alphabet({"red", "yellow", "blue", "brown", "white"});
  return alphabet;
}

char action_letter(Action a) {
  switch (a) {
  case Action::North: return 'N';
  case Action::South: return 'S';
  case Action::East: return 'E';
  case Action::West: return 'W';
  }
  return '?';
}

Action action_from_letter(char c) {
  switch (c) {
  case 'N': return Action::North;
  case 'S': return Action::South;
  case 'E': return Action::East;
  case 'W': return Action::West;
  default:
    throw std::invalid_argument(std::string("unknown action '") + c + "'");
  }
}

GridWorld::GridWorld(int width, int height, std::vector<Color> tiles, Cell start,
                     double p_slip, std::size_t max_len)
    : width_(width), height_(height), tiles_(std::move(tiles)), start_(start),
      p_slip_(p_slip), max_len_(max_len) {
  if (width_ <= 0 || height_ <= 0)
    throw std::invalid_argument("world dimensions must be positive");
  if (tiles_.size() != static_cast<std::size_t>(width_) * height_)
    throw std::invalid_argument("tile count does not match dimensions");
  if (!in_bounds(start_))
    throw std::invalid_argument("start cell out of bounds");
  if (!(p_slip_ >= 0.0 && p_slip_ < 1.0))
    throw std::invalid_argument("p_slip must lie in [0, 1)");
  if (max_len_ == 0)
    throw std::invalid_argument("max_len must be positive");
}

Color GridWorld::color(Cell c) const {
  if (!in_bounds(c))
    throw std::out_of_range("cell (" + std::to_string(c.x) + "," +
                            std::to_string(c.y) + ") out of bounds");
  return tiles_[index(c)];
}

bool GridWorld::has_color(Color c) const {
  for (Color t : tiles_)
    if (t == c)
      return true;
  return false;
}

GridWorld GridWorld::with_slip(double p_slip) const {
  return GridWorld(width_, height_, tiles_, start_, p_slip, max_len_);
}

GridWorld GridWorld::with_max_len(std::size_t max_len) const {
  return GridWorld(width_, height_, tiles_, start_, p_slip_, max_len);
}

std::string GridWorld::to_text() const {
  std::string out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      Cell c{x, y};
      if (c == start_) {
        out += 'A';
        continue;
      }
      switch (color(c)) {
      case Color::Red: out += 'r'; break;
      case Color::Yellow: out += 'y'; break;
      case Color::Blue: out += 'b'; break;
      case Color::Brown: out += 'n'; break;
      case Color::White: out += '.'; break;
      }
    }
    out += '\n';
  }
  return out;
}

GridWorld load_world(std::string_view text) {
  std::vector<std::string> rows;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    rows.push_back(line);
  }
  if (rows.empty())
    throw std::invalid_argument("world file has no rows");

  const int width = static_cast<int>(rows[0].size());
  const int height = static_cast<int>(rows.size());
  std::vector<Color> tiles;
  tiles.reserve(static_cast<std::size_t>(width) * height);
  std::optional<Cell> start;
  for (int y = 0; y < height; ++y) {
    if (static_cast<int>(rows[y].size()) != width)
      throw std::invalid_argument("ragged row " + std::to_string(y + 1) +
                                  ": expected " + std::to_string(width) +
                                  " columns, got " +
                                  std::to_string(rows[y].size()));
    for (int x = 0; x < width; ++x) {
      switch (rows[y][x]) {
      case 'r': tiles.push_back(Color::Red); break;
      case 'y': tiles.push_back(Color::Yellow); break;
      case 'b': tiles.push_back(Color::Blue); break;
      case 'n': tiles.push_back(Color::Brown); break;
      case '.': tiles.push_back(Color::White); break;
      case 'A':
        if (start)
          throw std::invalid_argument("multiple start cells");
        start = Cell{x, y};
        tiles.push_back(Color::White);
        break;
      default:
        throw std::invalid_argument(std::string("unknown tile character '") +
                                    rows[y][x] + "' at row " +
                                    std::to_string(y + 1));
      }
    }
  }
  if (!start)
    throw std::invalid_argument("no start cell 'A'");
  return GridWorld(width, height, std::move(tiles), *start);
}

GridWorld load_world_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open world file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_world(buf.str());
}

namespace {

Cell offset(Cell pos, Action act) {
  switch (act) {
  case Action::North: return {pos.x, pos.y - 1};
  case Action::South: return {pos.x, pos.y + 1};
  case Action::East: return {pos.x + 1, pos.y};
  case Action::West: return {pos.x - 1, pos.y};
  }
  return pos;
}

std::array<Action, 2> perpendicular(Action act) {
  if (act == Action::North || act == Action::South)
    return {Action::East, Action::West};
  return {Action::North, Action::South};
}

} // namespace

Cell move(const GridWorld &world, Cell pos, Action act) {
  Cell next = offset(pos, act);
  return world.in_bounds(next) ? next : pos;
}

Cell step(const GridWorld &world, Cell pos, Action act, Rng &rng) {
  if (world.p_slip() > 0.0 && uniform_unit(rng) < world.p_slip())
    act = perpendicular(act)[uniform_index(rng, 2)];
  return move(world, pos, act);
}

Observation label(const GridWorld &world, Cell pos) {
  Color c = world.color(pos);
  return Observation{std::uint64_t{1} << static_cast<unsigned>(c)};
}

std::vector<Observation> Trace::observations() const {
  std::vector<Observation> out;
  out.reserve(steps.size());
  for (const auto &s : steps)
    out.push_back(s.obs);
  return out;
}

Trace rollout_random(const GridWorld &world, std::size_t length, Rng &rng) {
  if (length == 0)
    throw std::invalid_argument("rollout length must be positive");
  if (length > world.max_len())
    throw std::invalid_argument("rollout length exceeds the episode bound");
  Trace trace;
  trace.steps.reserve(length);
  Cell pos = world.start();
  for (std::size_t t = 0; t < length; ++t) {
    Action act = all_actions[uniform_index(rng, all_actions.size())];
    trace.steps.push_back({pos, label(world, pos), act});
    if (t + 1 < length)
      pos = step(world, pos, act, rng);
  }
  return trace;
}

Trace trace_from_actions(const GridWorld &world, const std::vector<Action> &actions) {
  Trace trace;
  Cell pos = world.start();
  for (Action a : actions) {
    trace.steps.push_back({pos, label(world, pos), a});
    pos = move(world, pos, a);
  }
  trace.steps.push_back({pos, label(world, pos), std::nullopt});
  return trace;
}

std::string check_trace(const GridWorld &world, const Trace &trace) {
  if (trace.empty())
    return "empty trace";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto &s = trace.steps[i];
    if (!world.in_bounds(s.pos))
      return "step " + std::to_string(i) + " out of bounds";
    if (s.obs != label(world, s.pos))
      return "step " + std::to_string(i) + " label does not match tile";
    if (i > 0) {
      Cell prev = trace.steps[i - 1].pos;
      int d = std::abs(prev.x - s.pos.x) + std::abs(prev.y - s.pos.y);
      if (d > 1)
        return "step " + std::to_string(i) + " is not adjacent to its predecessor";
      if (!trace.steps[i - 1].action)
        return "step " + std::to_string(i - 1) + " lacks an action";
    }
  }
  return {};
}

bool satisfies(const Formula &phi, const Trace &trace) {
  auto obs = trace.observations();
  return evaluate(phi, obs, grid_alphabet());
}

void write_traces(std::ostream &out, const std::vector<Trace> &traces) {
  for (std::size_t t = 0; t < traces.size(); ++t) {
    if (t > 0)
      out << '\n';
    for (const auto &s : traces[t].steps) {
      nlohmann::ordered_json j;
      j["pos"] = {s.pos.x, s.pos.y};
      j["props"] = observation_names(grid_alphabet(), s.obs);
      if (s.action)
        j["action"] = std::string(1, action_letter(*s.action));
      else
        j["action"] = nullptr;
      out << j.dump() << '\n';
    }
  }
}

std::vector<Trace> read_traces(std::istream &in) {
  std::vector<Trace> out;
  Trace cur;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!cur.empty())
      out.push_back(std::move(cur));
    cur = Trace{};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    try {
      auto j = nlohmann::json::parse(line);
      TraceStep s;
      s.pos = Cell{j.at("pos").at(0).get<int>(), j.at("pos").at(1).get<int>()};
      s.obs = make_observation(grid_alphabet(),
                               j.at("props").get<std::vector<std::string>>());
      const auto &a = j.at("action");
      if (!a.is_null()) {
        auto txt = a.get<std::string>();
        if (txt.size() != 1)
          throw std::invalid_argument("action must be one of N, S, E, W");
        s.action = action_from_letter(txt[0]);
      }
      cur.steps.push_back(s);
    } catch (const std::exception &e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  flush();
  return out;
}

std::vector<Trace> read_trace_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open trace file " + path);
  return read_traces(in);
}

std::string traces_to_string(const std::vector<Trace> &traces) {
  std::ostringstream out;
  write_traces(out, traces);
  return out.str();
}

} // namespace intent
