#pragma once

// Shared helpers for the unit and acceptance tests.

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "flexgrid/domain.hpp"
#include "flexgrid/epos.hpp"
#include "flexgrid/rng.hpp"

namespace flexgrid::test {

// Fresh empty directory under the system temp dir; removed and re-created,
// so repeated runs start clean.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("flexgrid_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline Schedule random_valid_schedule(std::mt19937_64& rng) {
  Schedule s;
  s.appliance = kAllAppliances[uniform_below(rng, kAllAppliances.size())];
  s.duration = uniform_int(rng, 1, 300);
  const int max_flex = (kMinutesPerDay - s.duration) / 2;
  s.flexibility = uniform_int(rng, 0, std::min(120, max_flex));
  s.start = uniform_int(rng, s.flexibility,
                        kMinutesPerDay - s.duration - s.flexibility);
  return s;
}

// Agent with integer-valued rectangular-pulse plans. Integer watt values
// keep every aggregate sum exact in double arithmetic, so tests can compare
// with == where the math says equal.
inline AgentPlanSet random_integer_agent(std::mt19937_64& rng, int k,
                                         std::string id, double lambda) {
  AgentPlanSet agent;
  agent.agent_id = std::move(id);
  agent.lambda = lambda;
  agent.plans = Eigen::MatrixXd::Zero(kMinutesPerDay, k);
  agent.discomforts.resize(k);
  for (int c = 0; c < k; ++c) {
    const int pulses = uniform_int(rng, 1, 3);
    for (int p = 0; p < pulses; ++p) {
      const int len = uniform_int(rng, 5, 120);
      const int start = uniform_int(rng, 0, kMinutesPerDay - len);
      const double watts = static_cast<double>(uniform_int(rng, 50, 2000));
      agent.plans.col(c).segment(start, len).array() += watts;
    }
    agent.discomforts(c) = k > 1 ? static_cast<double>(c) / (k - 1) : 0.0;
  }
  agent.preferred_column = 0;
  return agent;
}

// Exhaustive minimum of the aggregate variance over every plan combination.
inline double brute_force_min_variance(std::span<const AgentPlanSet> agents) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> pick(agents.size(), 0);
  while (true) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(kMinutesPerDay);
    for (std::size_t a = 0; a < agents.size(); ++a) {
      sum += agents[a].plans.col(pick[a]);
    }
    best = std::min(best, population_variance(sum));
    std::size_t a = 0;
    for (; a < agents.size(); ++a) {
      if (++pick[a] < agents[a].size()) break;
      pick[a] = 0;
    }
    if (a == agents.size()) break;
  }
  return best;
}

}  // namespace flexgrid::test
