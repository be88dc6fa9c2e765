#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rewardlab/envs/environment.hpp"
#include "rewardlab/envs/specs.hpp"
#include "rewardlab/rng.hpp"

namespace rewardlab::envs {

// Symbolic encodings follow MiniGrid's IDX tables.
enum class CellType : std::uint8_t {
  Unseen = 0, Empty = 1, Wall = 2, Floor = 3, Door = 4, Key = 5, Ball = 6, Box = 7, Goal = 8, Lava = 9, Agent = 10
};
enum class Color : std::uint8_t { Red = 0, Green = 1, Blue = 2, Purple = 3, Yellow = 4, Grey = 5 };
enum class DoorState : std::uint8_t { Open = 0, Closed = 1, Locked = 2 };

inline const char* color_name(Color c) {
  static constexpr std::array<const char*, 6> names = {"red", "green", "blue", "purple", "yellow", "grey"};
  return names[static_cast<std::size_t>(c)];
}

inline const char* type_name(CellType t) {
  switch (t) {
    case CellType::Key: return "key";
    case CellType::Ball: return "ball";
    case CellType::Box: return "box";
    case CellType::Door: return "door";
    case CellType::Goal: return "goal";
    case CellType::Lava: return "lava";
    case CellType::Wall: return "wall";
    default: return "empty";
  }
}

struct Cell {
  CellType type = CellType::Empty;
  Color color = Color::Red;
  DoorState state = DoorState::Open;

  bool empty() const { return type == CellType::Empty; }
  bool can_overlap() const {
    return type == CellType::Empty || type == CellType::Goal || type == CellType::Lava ||
           (type == CellType::Door && state == DoorState::Open);
  }
  bool can_pickup() const { return type == CellType::Key || type == CellType::Ball; }
  bool see_behind() const {
    if (type == CellType::Wall) return false;
    if (type == CellType::Door) return state == DoorState::Open;
    return true;
  }
  std::string describe() const { return std::string(color_name(color)) + " " + type_name(type); }
};

struct Pos {
  int x = 0;
  int y = 0;
  bool operator==(const Pos&) const = default;
};

// Direction 0 = right, 1 = down, 2 = left, 3 = up (MiniGrid convention).
inline constexpr std::array<Pos, 4> kDirVec = {Pos{1, 0}, Pos{0, 1}, Pos{-1, 0}, Pos{0, -1}};

class Grid {
 public:
  Grid() = default;
  Grid(int width, int height) : width_(width), height_(height), cells_(width * height) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Pos p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }

  // Out-of-bounds reads as wall.
  Cell get(Pos p) const { return in_bounds(p) ? cells_[p.y * width_ + p.x] : Cell{CellType::Wall}; }
  void set(Pos p, Cell c) { cells_[p.y * width_ + p.x] = c; }

  void wall_rect(int x0, int y0, int w, int h) {
    for (int x = x0; x < x0 + w; ++x) {
      set({x, y0}, {CellType::Wall});
      set({x, y0 + h - 1}, {CellType::Wall});
    }
    for (int y = y0; y < y0 + h; ++y) {
      set({x0, y}, {CellType::Wall});
      set({x0 + w - 1, y}, {CellType::Wall});
    }
  }
  void vertical_wall(int x, int y0, int length, CellType type = CellType::Wall) {
    for (int y = y0; y < y0 + length; ++y) set({x, y}, {type});
  }
  void horizontal_wall(int x0, int y, int length) {
    for (int x = x0; x < x0 + length; ++x) set({x, y}, {CellType::Wall});
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;
};

// Minimal MiniGrid re-implementation: egocentric partial view with occlusion,
// seven discrete actions, one carried object, keys unlock same-colored doors.
class GridWorld : public Environment {
 public:
  explicit GridWorld(EnvId id) : spec_(env_spec(id)) {
    require(is_grid(id), "GridWorld needs a grid env id");
  }

  const EnvSpec& spec() const override { return spec_; }

  std::pair<Observation, InfoRecord> reset(std::uint64_t seed) override {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(spec_.id) + 1));
    carrying_.reset();
    target_ = Cell{};
    step_count_ = 0;
    done_ = false;
    switch (spec_.id) {
      case EnvId::DoorKey5: generate_door_key(5, rng); break;
      case EnvId::DoorKey8: generate_door_key(8, rng); break;
      case EnvId::LavaGapS5: generate_lava_gap(5, rng); break;
      case EnvId::KeyCorridorS3R1: generate_key_corridor(rng); break;
      default: throw ConfigError("not a grid env");
    }
    InfoRecord info = make_info("");
    return {observe(), info};
  }

  StepResult step(const Action& action) override {
    require(!done_, "step called after the episode ended; call reset first");
    const int* a = std::get_if<int>(&action);
    require(a != nullptr && *a >= 0 && *a < kNumGridActions, "grid action must be an integer in 0..6");
    ++step_count_;

    StepResult result;
    std::string event;
    const Pos fwd{agent_.x + kDirVec[dir_].x, agent_.y + kDirVec[dir_].y};
    Cell fwd_cell = grid_.get(fwd);

    switch (*a) {
      case kLeft: dir_ = (dir_ + 3) % 4; break;
      case kRight: dir_ = (dir_ + 1) % 4; break;
      case kForward:
        if (fwd_cell.can_overlap()) {
          agent_ = fwd;
          if (fwd_cell.type == CellType::Goal) {
            result.terminated = true;
            result.raw_reward = success_reward(step_count_, spec_.max_steps);
            result.info.success = true;
            event = "reached goal";
          } else if (fwd_cell.type == CellType::Lava) {
            result.terminated = true;
            event = "stepped in lava";
          }
        }
        break;
      case kPickup:
        if (fwd_cell.can_pickup() && !carrying_) {
          carrying_ = fwd_cell;
          grid_.set(fwd, Cell{});
          event = "picked up " + fwd_cell.describe();
          if (target_.type != CellType::Empty && fwd_cell.type == target_.type && fwd_cell.color == target_.color) {
            result.terminated = true;
            result.raw_reward = success_reward(step_count_, spec_.max_steps);
            result.info.success = true;
          }
        }
        break;
      case kDrop:
        if (carrying_ && fwd_cell.empty() && grid_.in_bounds(fwd)) {
          grid_.set(fwd, *carrying_);
          event = "dropped " + carrying_->describe();
          carrying_.reset();
        }
        break;
      case kToggle:
        if (fwd_cell.type == CellType::Door) {
          if (fwd_cell.state == DoorState::Locked) {
            if (carrying_ && carrying_->type == CellType::Key && carrying_->color == fwd_cell.color) {
              fwd_cell.state = DoorState::Open;
              event = "opened door";
            }
          } else if (fwd_cell.state == DoorState::Closed) {
            fwd_cell.state = DoorState::Open;
            event = "opened door";
          } else {
            fwd_cell.state = DoorState::Closed;
          }
          grid_.set(fwd, fwd_cell);
        }
        break;
      case kDone: break;
    }

    // Terminal success wins a tie with the step limit.
    if (!result.terminated && step_count_ >= spec_.max_steps) result.truncated = true;
    done_ = result.terminated || result.truncated;

    const bool success = result.info.success;
    result.info = make_info(event);
    result.info.success = success;
    result.observation = observe();
    return result;
  }

  // Test hooks.
  const Grid& grid() const { return grid_; }
  Pos agent_pos() const { return agent_; }
  int agent_dir() const { return dir_; }
  void place_agent_for_test(Pos p, int dir) {
    agent_ = p;
    dir_ = dir;
  }

 private:
  InfoRecord make_info(std::string event) const {
    InfoRecord info;
    info.agent_pos = {static_cast<double>(agent_.x), static_cast<double>(agent_.y)};
    info.carrying = carrying_ ? carrying_->describe() : "nothing";
    info.event_text = std::move(event);
    info.step_count = step_count_;
    info.max_steps = spec_.max_steps;
    return info;
  }

  Pos random_empty(Rng& rng, int x0, int y0, int w, int h) const {
    for (;;) {
      const Pos p{rng.uniform_int(x0, x0 + w), rng.uniform_int(y0, y0 + h)};
      if (grid_.get(p).empty() && !(p == agent_ && agent_placed_)) return p;
    }
  }

  void place_agent(Rng& rng, int x0, int y0, int w, int h) {
    agent_placed_ = false;
    agent_ = random_empty(rng, x0, y0, w, h);
    agent_placed_ = true;
    dir_ = rng.uniform_int(0, 4);
  }

  void generate_door_key(int size, Rng& rng) {
    grid_ = Grid(size, size);
    grid_.wall_rect(0, 0, size, size);
    grid_.set({size - 2, size - 2}, {CellType::Goal, Color::Green});
    const int split = rng.uniform_int(2, size - 2);
    grid_.vertical_wall(split, 0, size);
    const int door_y = rng.uniform_int(1, size - 2);
    grid_.set({split, door_y}, {CellType::Door, Color::Yellow, DoorState::Locked});
    place_agent(rng, 0, 0, split, size);
    grid_.set(random_empty(rng, 0, 0, split, size), {CellType::Key, Color::Yellow});
  }

  void generate_lava_gap(int size, Rng& rng) {
    grid_ = Grid(size, size);
    grid_.wall_rect(0, 0, size, size);
    agent_ = {1, 1};
    agent_placed_ = true;
    dir_ = 0;
    grid_.set({size - 2, size - 2}, {CellType::Goal, Color::Green});
    const Pos gap{rng.uniform_int(2, size - 2), rng.uniform_int(1, size - 1)};
    grid_.vertical_wall(gap.x, 1, size - 2, CellType::Lava);
    grid_.set(gap, Cell{});
  }

  // 7x7: corridor on row 3, side rooms on rows 1 and 5.
  void generate_key_corridor(Rng& rng) {
    constexpr int size = 7;
    grid_ = Grid(size, size);
    grid_.wall_rect(0, 0, size, size);
    grid_.horizontal_wall(1, 2, size - 2);
    grid_.horizontal_wall(1, 4, size - 2);
    const bool key_on_top = rng.uniform_int(0, 2) == 0;
    const int key_row = key_on_top ? 1 : 5;
    const int ball_row = key_on_top ? 5 : 1;
    const auto lock_color = static_cast<Color>(rng.uniform_int(0, 6));
    const auto ball_color = static_cast<Color>(rng.uniform_int(0, 6));
    const int key_door_x = rng.uniform_int(1, size - 1);
    const int lock_door_x = rng.uniform_int(1, size - 1);
    grid_.set({key_door_x, key_on_top ? 2 : 4}, {CellType::Door, static_cast<Color>(rng.uniform_int(0, 6)), DoorState::Closed});
    grid_.set({lock_door_x, key_on_top ? 4 : 2}, {CellType::Door, lock_color, DoorState::Locked});
    place_agent(rng, 1, 3, size - 2, 1);
    grid_.set(random_empty(rng, 1, key_row, size - 2, 1), {CellType::Key, lock_color});
    target_ = Cell{CellType::Ball, ball_color};
    grid_.set(random_empty(rng, 1, ball_row, size - 2, 1), target_);
  }

  GridObservation observe() const {
    // View cell (vx, vy); agent sits at (3, 6) facing toward vy = 0.
    const Pos f = kDirVec[dir_];
    const Pos r{-f.y, f.x};
    std::array<std::array<Cell, kViewSize>, kViewSize> view{};
    for (int vx = 0; vx < kViewSize; ++vx)
      for (int vy = 0; vy < kViewSize; ++vy) {
        const int ahead = kViewSize - 1 - vy;
        const int side = vx - kViewSize / 2;
        view[vx][vy] = grid_.get({agent_.x + f.x * ahead + r.x * side, agent_.y + f.y * ahead + r.y * side});
      }

    // Occlusion sweep (MiniGrid process_vis).
    std::array<std::array<bool, kViewSize>, kViewSize> mask{};
    mask[kViewSize / 2][kViewSize - 1] = true;
    for (int j = kViewSize - 1; j >= 0; --j) {
      for (int i = 0; i < kViewSize - 1; ++i) {
        if (!mask[i][j] || !view[i][j].see_behind()) continue;
        mask[i + 1][j] = true;
        if (j > 0) {
          mask[i + 1][j - 1] = true;
          mask[i][j - 1] = true;
        }
      }
      for (int i = kViewSize - 1; i > 0; --i) {
        if (!mask[i][j] || !view[i][j].see_behind()) continue;
        mask[i - 1][j] = true;
        if (j > 0) {
          mask[i - 1][j - 1] = true;
          mask[i][j - 1] = true;
        }
      }
    }

    view[kViewSize / 2][kViewSize - 1] = carrying_ ? *carrying_ : Cell{};
    GridObservation obs;
    for (int vx = 0; vx < kViewSize; ++vx)
      for (int vy = 0; vy < kViewSize; ++vy) {
        if (!mask[vx][vy]) continue;  // unseen stays (0, 0, 0)
        const Cell& c = view[vx][vy];
        obs.at(vx, vy, 0) = static_cast<std::uint8_t>(c.type);
        obs.at(vx, vy, 1) = c.type == CellType::Empty ? 0
                           : c.type == CellType::Wall ? static_cast<std::uint8_t>(Color::Grey)
                                                      : static_cast<std::uint8_t>(c.color);
        obs.at(vx, vy, 2) = c.type == CellType::Door ? static_cast<std::uint8_t>(c.state) : 0;
      }
    return obs;
  }

  EnvSpec spec_;
  Grid grid_;
  Pos agent_;
  bool agent_placed_ = false;
  int dir_ = 0;
  std::optional<Cell> carrying_;
  Cell target_;
  int step_count_ = 0;
  bool done_ = true;
};

}  // namespace rewardlab::envs
