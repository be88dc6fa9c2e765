#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rewardlab/errors.hpp"

namespace rewardlab::dsl {

struct PotentialCheck {
  double total_shaping = 0.0;
  double potential_delta = 0.0;
  bool equal = false;
};

// Compares the summed one-time bonuses along a trajectory with the change in
// milestone potential phi(m) = sum_i b_i * m_i (undiscounted).
// `firings` lists the milestone fired at each step that fired one.
inline PotentialCheck check_potential_equivalence(const std::map<std::string, double>& bonuses,
                                                  const std::vector<std::string>& firings) {
  std::set<std::string> reached;
  PotentialCheck out;
  for (const auto& m : firings) {
    auto it = bonuses.find(m);
    require(it != bonuses.end(), "unknown milestone '" + m + "'");
    require(reached.insert(m).second, "milestone '" + m + "' fired more than once");
    out.total_shaping += it->second;
  }
  auto phi = [&](const std::set<std::string>& got) {
    double s = 0.0;
    for (const auto& [name, b] : bonuses) s += got.count(name) ? b : 0.0;
    return s;
  };
  out.potential_delta = phi(reached) - phi({});
  out.equal = std::abs(out.total_shaping - out.potential_delta) <= 1e-12 * (1.0 + std::abs(out.potential_delta));
  return out;
}

}  // namespace rewardlab::dsl
