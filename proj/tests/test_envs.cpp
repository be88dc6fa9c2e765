#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rewardlab/envs/catalog.hpp"

using namespace rewardlab;
using namespace rewardlab::envs;

namespace {

// Breadth-first search over (x, y, dir, carrying, door_open) for an action
// sequence that solves a DoorKey layout.
std::vector<int> solve_door_key(GridWorld& env) {
  const Grid& g = env.grid();
  Pos key{-1, -1}, door{-1, -1};
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      if (g.get({x, y}).type == CellType::Key) key = {x, y};
      if (g.get({x, y}).type == CellType::Door) door = {x, y};
    }
  struct Node {
    Pos p;
    int dir;
    bool has_key;
    bool open;
  };
  auto id = [&](const Node& n) { return ((n.p.y * g.width() + n.p.x) * 4 + n.dir) * 4 + n.has_key * 2 + n.open; };
  std::map<int, std::pair<int, int>> parent;  // state -> (prev state, action)
  std::vector<Node> frontier{{env.agent_pos(), env.agent_dir(), false, false}};
  parent[id(frontier[0])] = {-1, -1};
  std::map<int, Node> nodes{{id(frontier[0]), frontier[0]}};
  while (!frontier.empty()) {
    std::vector<Node> next;
    for (const auto& n : frontier) {
      for (int a : {0, 1, 2, 3, 5}) {
        Node m = n;
        const Pos f{n.p.x + kDirVec[n.dir].x, n.p.y + kDirVec[n.dir].y};
        Cell c = g.get(f);
        if (f == key && n.has_key) c = Cell{};
        if (f == door && n.open) c.state = DoorState::Open;
        if (a == 0) m.dir = (n.dir + 3) % 4;
        if (a == 1) m.dir = (n.dir + 1) % 4;
        if (a == 2) {
          if (!c.can_overlap()) continue;
          m.p = f;
          if (c.type == CellType::Goal) {
            std::vector<int> path{2};
            for (int s = id(n); parent[s].first != -1; s = parent[s].first) path.push_back(parent[s].second);
            return {path.rbegin(), path.rend()};
          }
        }
        if (a == 3) {
          if (!(f == key) || n.has_key) continue;
          m.has_key = true;
        }
        if (a == 5) {
          if (!(f == door) || !n.has_key || n.open) continue;
          m.open = true;
        }
        if (parent.count(id(m))) continue;
        parent[id(m)] = {id(n), a};
        nodes[id(m)] = m;
        next.push_back(m);
      }
    }
    frontier = std::move(next);
  }
  return {};
}

}  // namespace

TEST(Catalog, HasSixEntries) {
  const auto specs = env_catalog();
  ASSERT_EQ(specs.size(), 6u);
  for (const auto& s : specs) {
    EXPECT_FALSE(s.description_text.empty());
    EXPECT_EQ(s.has_binary_success, s.id != EnvId::LineRunner);
  }
}

TEST(Catalog, DoorKey8IsDiscrete) {
  const auto s = env_spec(EnvId::DoorKey8);
  EXPECT_TRUE(s.action_space.discrete);
  EXPECT_EQ(s.action_space.size, 7);
  EXPECT_TRUE(s.has_binary_success);
  EXPECT_EQ(s.max_steps, 640);
}

TEST(Catalog, UnknownIdIsConfigError) {
  EXPECT_THROW(parse_env_id("FourRooms"), ConfigError);
  EXPECT_EQ(parse_env_id("DoorKey5"), EnvId::DoorKey5);
}

TEST(Grid, ResetIsDeterministic) {
  for (auto id : {EnvId::DoorKey5, EnvId::DoorKey8, EnvId::LavaGapS5, EnvId::KeyCorridorS3R1}) {
    auto a = make_env(id);
    auto b = make_env(id);
    auto ra = a->reset(42);
    auto rb = b->reset(42);
    EXPECT_EQ(ra.first, rb.first);
    EXPECT_EQ(ra.second, rb.second);
    EXPECT_EQ(ra.second.carrying, "nothing");
    EXPECT_EQ(ra.second.step_count, 0);
    EXPECT_FALSE(ra.second.distance_to_target.has_value());
  }
}

TEST(Grid, SeedsChangeLayouts) {
  std::set<std::vector<std::uint8_t>> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GridWorld env(EnvId::DoorKey8);
    auto obs = std::get<GridObservation>(env.reset(seed).first);
    seen.insert({obs.raw().begin(), obs.raw().end()});
  }
  EXPECT_GT(seen.size(), 5u);
}

TEST(Grid, ReplayIsBitIdentical) {
  Rng rng(7);
  std::vector<int> actions;
  for (int i = 0; i < 200; ++i) actions.push_back(rng.uniform_int(0, 7));
  auto run = [&] {
    GridWorld env(EnvId::KeyCorridorS3R1);
    env.reset(99);
    std::vector<StepResult> out;
    for (int a : actions) {
      out.push_back(env.step(a));
      if (out.back().terminated || out.back().truncated) break;
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Grid, ObservationEntriesInRange) {
  for (auto id : {EnvId::DoorKey5, EnvId::DoorKey8, EnvId::LavaGapS5, EnvId::KeyCorridorS3R1}) {
    GridWorld env(id);
    Rng rng(3);
    auto obs = std::get<GridObservation>(env.reset(5).first);
    for (int t = 0; t < 50; ++t) {
      for (auto v : obs.raw()) ASSERT_LE(v, 10);
      auto r = env.step(rng.uniform_int(0, 3));
      obs = std::get<GridObservation>(r.observation);
      if (r.terminated || r.truncated) break;
    }
  }
}

TEST(Grid, AgentSeesWallAheadWhenFacingIt) {
  GridWorld env(EnvId::DoorKey5);
  env.reset(1);
  env.place_agent_for_test({1, 1}, 3);  // facing the top wall
  auto r = env.step(0);  // turn left, now facing the left wall
  auto obs = std::get<GridObservation>(r.observation);
  EXPECT_EQ(obs.at(3, 5, 0), static_cast<int>(CellType::Wall));
  EXPECT_EQ(obs.at(3, 5, 1), static_cast<int>(Color::Grey));
}

TEST(Grid, OccludedCellsAreUnseen) {
  GridWorld env(EnvId::DoorKey5);
  env.reset(1);
  env.place_agent_for_test({1, 1}, 2);  // facing the left wall, view beyond it is hidden
  auto r = env.step(6);
  auto obs = std::get<GridObservation>(r.observation);
  EXPECT_EQ(obs.at(3, 5, 0), static_cast<int>(CellType::Wall));
  EXPECT_EQ(obs.at(3, 0, 0), static_cast<int>(CellType::Unseen));
}

TEST(Grid, ForwardIntoWallLeavesPosition) {
  GridWorld env(EnvId::DoorKey5);
  env.reset(3);
  env.place_agent_for_test({1, 1}, 3);
  auto r = env.step(2);
  EXPECT_EQ(r.info.agent_pos[0], 1);
  EXPECT_EQ(r.info.agent_pos[1], 1);
  EXPECT_EQ(r.raw_reward, 0.0);
  EXPECT_TRUE(r.info.event_text.empty());
}

TEST(Grid, SolvingDoorKeyEmitsEventsAndSuccessReward) {
  for (std::uint64_t seed : {42ull, 7ull, 1234ull}) {
    GridWorld env(EnvId::DoorKey5);
    env.reset(seed);
    auto plan = solve_door_key(env);
    ASSERT_FALSE(plan.empty());
    std::vector<std::string> events;
    StepResult last;
    std::string carrying_before = "nothing";
    for (int a : plan) {
      last = env.step(a);
      if (!last.info.event_text.empty()) events.push_back(last.info.event_text);
      if (last.info.event_text.find("picked up") != std::string::npos) {
        EXPECT_EQ(carrying_before, "nothing");
        EXPECT_EQ(last.info.carrying, "yellow key");
      }
      carrying_before = last.info.carrying;
    }
    ASSERT_EQ(events.size(), 3u);
    EXPECT_EQ(events[0], "picked up yellow key");
    EXPECT_EQ(events[1], "opened door");
    EXPECT_EQ(events[2], "reached goal");
    EXPECT_TRUE(last.terminated);
    EXPECT_FALSE(last.truncated);
    EXPECT_TRUE(last.info.success);
    const int n = static_cast<int>(plan.size());
    EXPECT_DOUBLE_EQ(last.raw_reward, 1.0 - 0.9 * n / 250.0);
    EXPECT_THROW(env.step(0), ContractViolation);
  }
}

TEST(Grid, SuccessRewardArithmetic) { EXPECT_NEAR(success_reward(10, 250), 0.964, 1e-12); }

TEST(Grid, TruncatesAtMaxSteps) {
  GridWorld env(EnvId::LavaGapS5);
  env.reset(0);
  StepResult r;
  for (int i = 0; i < 100; ++i) {
    r = env.step(0);
    EXPECT_EQ(r.raw_reward, 0.0);
  }
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.terminated);
  EXPECT_EQ(r.info.step_count, 100);
}

TEST(Grid, RejectsBadActions) {
  GridWorld env(EnvId::DoorKey5);
  env.reset(0);
  EXPECT_THROW(env.step(7), ContractViolation);
  EXPECT_THROW(env.step(-1), ContractViolation);
  EXPECT_THROW(env.step(std::vector<double>{0.0}), ContractViolation);
}

TEST(Grid, KeyCorridorHasKeyAndTargetBall) {
  GridWorld env(EnvId::KeyCorridorS3R1);
  env.reset(11);
  int keys = 0, balls = 0, locked = 0;
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 7; ++x) {
      const auto c = env.grid().get({x, y});
      keys += c.type == CellType::Key;
      balls += c.type == CellType::Ball;
      locked += c.type == CellType::Door && c.state == DoorState::Locked;
    }
  EXPECT_EQ(keys, 1);
  EXPECT_EQ(balls, 1);
  EXPECT_EQ(locked, 1);
}

TEST(PointReach, TerminatesInsideRadius) {
  PointReach env;
  auto [obs, info] = env.reset(3);
  ASSERT_TRUE(info.distance_to_target.has_value());
  StepResult r;
  for (int i = 0; i < 50; ++i) {
    const auto p = std::get<ContinuousObservation>(i == 0 ? obs : r.observation).values;
    const double dx = p[2] - p[0], dy = p[3] - p[1];
    const double norm = std::max(std::hypot(dx, dy), 1e-9);
    const double scale = std::min(1.0, norm / PointReach::kStepScale);
    r = env.step(std::vector<double>{scale * dx / norm, scale * dy / norm});
    if (r.terminated || r.truncated) break;
  }
  EXPECT_TRUE(r.terminated);
  EXPECT_LT(*r.info.distance_to_target, 0.05);
  EXPECT_EQ(r.info.event_text, "reached target");
  EXPECT_GT(r.raw_reward, 0.0);
  EXPECT_TRUE(r.info.success);
}

TEST(PointReach, RejectsOutOfBoundsAction) {
  PointReach env;
  env.reset(0);
  EXPECT_THROW(env.step(std::vector<double>{1.5, 0.0}), ContractViolation);
  EXPECT_THROW(env.step(2), ContractViolation);
}

TEST(LineRunner, StartsAtRest) {
  LineRunner env;
  auto [obs, info] = env.reset(7);
  ASSERT_TRUE(info.velocity.has_value());
  EXPECT_EQ(*info.velocity, 0.0);
  EXPECT_EQ(std::get<ContinuousObservation>(obs).values, (std::vector<double>{0.0, 0.0}));
}

TEST(LineRunner, RewardIsSumOfComponents) {
  LineRunner env;
  env.reset(0);
  double total = 0.0;
  StepResult r;
  for (int i = 0; i < 200; ++i) {
    const double a = (i % 3) / 2.0 - 0.25;
    r = env.step(std::vector<double>{a});
    const auto& c = env.last_components();
    EXPECT_DOUBLE_EQ(r.raw_reward, c.forward + c.alive - c.control);
    EXPECT_DOUBLE_EQ(c.control, 0.1 * a * a);
    EXPECT_DOUBLE_EQ(c.forward, *r.info.velocity);
    total += r.raw_reward;
  }
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.terminated);
  EXPECT_TRUE(std::isfinite(total));
  EXPECT_FALSE(r.info.success);
}
