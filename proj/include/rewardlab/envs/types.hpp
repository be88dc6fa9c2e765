#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rewardlab/errors.hpp"

namespace rewardlab::envs {

enum class EnvId { DoorKey5, DoorKey8, LavaGapS5, KeyCorridorS3R1, PointReach, LineRunner };

// Grid tasks, the sparse reaching surrogate, and the dense locomotion surrogate
// expose different info fields; the reward DSL type checks against this.
enum class EnvKind { Grid, Reach, Dense };

inline constexpr std::array<EnvId, 6> kAllEnvIds = {EnvId::DoorKey5,        EnvId::DoorKey8,
                                                    EnvId::LavaGapS5,       EnvId::KeyCorridorS3R1,
                                                    EnvId::PointReach,      EnvId::LineRunner};

inline std::string_view to_string(EnvId id) {
  switch (id) {
    case EnvId::DoorKey5: return "DoorKey5";
    case EnvId::DoorKey8: return "DoorKey8";
    case EnvId::LavaGapS5: return "LavaGapS5";
    case EnvId::KeyCorridorS3R1: return "KeyCorridorS3R1";
    case EnvId::PointReach: return "PointReach";
    case EnvId::LineRunner: return "LineRunner";
  }
  return "?";
}

inline EnvId parse_env_id(std::string_view name) {
  for (auto id : kAllEnvIds)
    if (to_string(id) == name) return id;
  throw ConfigError("unknown env_id '" + std::string(name) + "'");
}

inline EnvKind kind_of(EnvId id) {
  switch (id) {
    case EnvId::PointReach: return EnvKind::Reach;
    case EnvId::LineRunner: return EnvKind::Dense;
    default: return EnvKind::Grid;
  }
}

inline bool is_grid(EnvId id) { return kind_of(id) == EnvKind::Grid; }

// Discrete grid actions.
enum GridAction : int { kLeft = 0, kRight = 1, kForward = 2, kPickup = 3, kDrop = 4, kToggle = 5, kDone = 6 };
inline constexpr int kNumGridActions = 7;

inline constexpr int kViewSize = 7;
inline constexpr int kObsChannels = 3;
inline constexpr int kGridObsSize = kViewSize * kViewSize * kObsChannels;

// Egocentric 7x7x3 symbolic view: (object type, color, state) per cell.
class GridObservation {
 public:
  std::uint8_t at(int col, int row, int channel) const { return cells_[index(col, row, channel)]; }
  std::uint8_t& at(int col, int row, int channel) { return cells_[index(col, row, channel)]; }
  const std::array<std::uint8_t, kGridObsSize>& raw() const { return cells_; }
  bool operator==(const GridObservation&) const = default;

 private:
  static constexpr int index(int col, int row, int channel) {
    return (col * kViewSize + row) * kObsChannels + channel;
  }
  std::array<std::uint8_t, kGridObsSize> cells_{};
};

struct ContinuousObservation {
  std::vector<double> values;
  bool operator==(const ContinuousObservation&) const = default;
};

using Observation = std::variant<GridObservation, ContinuousObservation>;

// Raw (unnormalized) feature vector handed to the learner.
inline std::vector<float> to_features(const Observation& obs) {
  std::vector<float> out;
  if (const auto* grid = std::get_if<GridObservation>(&obs)) {
    out.assign(grid->raw().begin(), grid->raw().end());
  } else {
    const auto& values = std::get<ContinuousObservation>(obs).values;
    out.assign(values.begin(), values.end());
  }
  return out;
}

using Action = std::variant<int, std::vector<double>>;

struct InfoRecord {
  // Integral cell coordinates on grids, continuous position otherwise.
  std::array<double, 2> agent_pos{};
  std::string carrying = "nothing";
  std::string event_text;
  int step_count = 0;
  int max_steps = 1;
  std::optional<double> distance_to_target;
  std::optional<double> velocity;
  bool success = false;
  bool operator==(const InfoRecord&) const = default;
};

struct StepResult {
  Observation observation;
  double raw_reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  InfoRecord info;
  bool operator==(const StepResult&) const = default;
};

struct ActionSpace {
  bool discrete = true;
  int size = kNumGridActions;  // number of choices, or vector dimension
};

struct EnvSpec {
  EnvId id;
  EnvKind kind;
  ActionSpace action_space;
  int max_steps;
  bool has_binary_success;
  int observation_size;
  std::string description_text;
};

// MiniGrid success convention: earlier success earns more.
inline double success_reward(int step_count, int max_steps) {
  return 1.0 - 0.9 * (static_cast<double>(step_count) / static_cast<double>(max_steps));
}

}  // namespace rewardlab::envs
