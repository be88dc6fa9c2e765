#pragma once

#include <array>
#include <vector>

#include "rewardlab/diagnostics.hpp"

namespace testing_support {

struct DiagnosticCase {
  double mr;
  double sr;
  int episodes;
};

// 5 x 5 x 3 grid straddling every sparse cutoff, boundaries included.
inline std::vector<DiagnosticCase> diagnostic_cases() {
  const std::array<double, 5> mrs = {0.05, 0.1, 0.3, 0.5, 0.6};
  const std::array<double, 5> srs = {0.05, 0.1, 0.2, 0.5, 0.7};
  const std::array<int, 3> eps = {500, 1000, 1001};
  std::vector<DiagnosticCase> out;
  for (double mr : mrs)
    for (double sr : srs)
      for (int e : eps) out.push_back({mr, sr, e});
  return out;
}

// Expected flags written out independently of the library predicates.
// A flat history means zero improvement, so plateau hinges on sr and episodes.
inline std::vector<rewardlab::diagnostics::Flag> expected_flags(const DiagnosticCase& c) {
  using rewardlab::diagnostics::Flag;
  std::vector<Flag> out;
  if (c.mr > 0.5 && c.sr < 0.2) out.push_back(Flag::RewardHacking);
  if (c.mr < 0.1 && c.sr < 0.1) out.push_back(Flag::ShapingWeak);
  if (c.sr > 0.1 && c.sr < 0.7 && c.episodes > 1000) out.push_back(Flag::Plateau);
  return out;
}

inline rewardlab::ppo::ProbeMetrics metrics_for(const DiagnosticCase& c) {
  rewardlab::ppo::ProbeMetrics m;
  m.mean_reward = c.mr;
  m.success_rate = c.sr;
  m.episodes = c.episodes;
  m.sr_history.assign(static_cast<std::size_t>(c.episodes), c.sr);
  return m;
}

}  // namespace testing_support
