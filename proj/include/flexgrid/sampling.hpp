#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexgrid/plan_generation.hpp"

namespace flexgrid {

// How an agent picks the k candidate plans it will expose to the engine out
// of its (potentially huge) discomfort-ranked plan space.
enum class SamplingMechanism {
  top_ranked,      // k most comfortable
  top_poisson,     // Poisson-weighted ranks near the comfortable end
  uniform,         // evenly spaced ranks across the whole space
  bottom_poisson,  // mirror image of top_poisson
  bottom_ranked,   // k least comfortable
};

inline constexpr std::array<SamplingMechanism, 5> kAllMechanisms = {
    SamplingMechanism::top_ranked, SamplingMechanism::top_poisson,
    SamplingMechanism::uniform, SamplingMechanism::bottom_poisson,
    SamplingMechanism::bottom_ranked,
};

std::string_view to_string(SamplingMechanism m);
std::optional<SamplingMechanism> parse_mechanism(std::string_view name);

struct SamplingPolicy {
  SamplingMechanism mechanism = SamplingMechanism::top_ranked;
  int plans_per_agent = 10;   // k
  double poisson_rate = 2.0;  // rank-weight rate for the Poisson mechanisms
};

// Ranks into a discomfort-ascending plan space; strictly increasing, so the
// resulting candidate list stays discomfort-sorted. Returns all ranks when
// the space has at most k plans.
std::vector<Eigen::Index> sample_indices(Eigen::Index space_size,
                                         const SamplingPolicy& policy,
                                         std::uint64_t seed);

AgentPlanSet sample(const CombinedPlanSpace& space, const SamplingPolicy& policy,
                    std::uint64_t seed, std::string agent_id, double lambda);

}  // namespace flexgrid
