#include "flexgrid/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "flexgrid/rng.hpp"

namespace flexgrid {

std::string_view to_string(SamplingMechanism m) {
  switch (m) {
    case SamplingMechanism::top_ranked: return "top-ranked";
    case SamplingMechanism::top_poisson: return "top-poisson";
    case SamplingMechanism::uniform: return "uniform";
    case SamplingMechanism::bottom_poisson: return "bottom-poisson";
    case SamplingMechanism::bottom_ranked: return "bottom-ranked";
  }
  return "unknown";
}

std::optional<SamplingMechanism> parse_mechanism(std::string_view name) {
  std::string canon(name);
  for (char& c : canon) {
    if (c == '_' || c == ' ') c = '-';
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  for (SamplingMechanism m : kAllMechanisms) {
    if (canon == to_string(m)) return m;
  }
  return std::nullopt;
}

namespace {

void check_policy(const SamplingPolicy& policy) {
  if (policy.plans_per_agent < 1) {
    raise(ErrorCode::validation_error, "plans_per_agent must be >= 1");
  }
  if (!(policy.poisson_rate > 0.0)) {
    raise(ErrorCode::validation_error, "poisson_rate must be positive");
  }
}

// k distinct ranks in [0, n), Poisson(rate)-weighted towards rank 0, drawn
// without replacement. The pmf is truncated to the space and renormalized;
// the renormalization happens implicitly through the prefix-sum walk.
std::vector<Eigen::Index> poisson_ranks(Eigen::Index n, int k, double rate,
                                        std::uint64_t seed) {
  // Weights beyond a few hundred ranks underflow to exactly 0.0, so capping
  // the computed prefix changes nothing; zero-weight ranks are unreachable
  // by the walk and get filled deterministically if k somehow needs them.
  const Eigen::Index support =
      std::min<Eigen::Index>(n, std::max<Eigen::Index>(512, 4 * k));
  std::vector<double> weight(static_cast<std::size_t>(support));
  double w = std::exp(-rate);
  for (Eigen::Index i = 0; i < support; ++i) {
    weight[static_cast<std::size_t>(i)] = w;
    w *= rate / static_cast<double>(i + 1);
  }

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> picked;
  picked.reserve(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double x : weight) total += x;
  for (int draw = 0; draw < k; ++draw) {
    if (total <= 0.0) break;
    double u = uniform01(rng) * total;
    Eigen::Index chosen = -1;
    for (Eigen::Index i = 0; i < support; ++i) {
      const double wi = weight[static_cast<std::size_t>(i)];
      if (wi <= 0.0) continue;
      if (u < wi) {
        chosen = i;
        break;
      }
      u -= wi;
    }
    if (chosen < 0) {  // numeric edge: u landed past the last positive weight
      for (Eigen::Index i = support - 1; i >= 0; --i) {
        if (weight[static_cast<std::size_t>(i)] > 0.0) {
          chosen = i;
          break;
        }
      }
    }
    picked.push_back(chosen);
    total -= weight[static_cast<std::size_t>(chosen)];
    weight[static_cast<std::size_t>(chosen)] = 0.0;
  }
  // If every remaining weight underflowed before k ranks were drawn, fill
  // with the smallest ranks not yet used.
  if (static_cast<int>(picked.size()) < k) {
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index i : picked) used[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index i = 0; i < n && static_cast<int>(picked.size()) < k; ++i) {
      if (!used[static_cast<std::size_t>(i)]) picked.push_back(i);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

std::vector<Eigen::Index> sample_indices(Eigen::Index space_size,
                                         const SamplingPolicy& policy,
                                         std::uint64_t seed) {
  check_policy(policy);
  if (space_size <= 0) {
    raise(ErrorCode::empty_plan_space, "sample: plan space is empty");
  }
  const Eigen::Index n = space_size;
  const int k = policy.plans_per_agent;
  std::vector<Eigen::Index> indices;
  if (n <= k) {
    indices.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;
    return indices;
  }

  switch (policy.mechanism) {
    case SamplingMechanism::top_ranked:
      for (Eigen::Index i = 0; i < k; ++i) indices.push_back(i);
      break;
    case SamplingMechanism::bottom_ranked:
      for (Eigen::Index i = n - k; i < n; ++i) indices.push_back(i);
      break;
    case SamplingMechanism::uniform:
      if (k == 1) {
        indices.push_back(0);
      } else {
        for (int i = 0; i < k; ++i) {
          const double pos = static_cast<double>(i) *
                             static_cast<double>(n - 1) /
                             static_cast<double>(k - 1);
          indices.push_back(static_cast<Eigen::Index>(std::llround(pos)));
        }
      }
      break;
    case SamplingMechanism::top_poisson:
      indices = poisson_ranks(n, k, policy.poisson_rate, seed);
      break;
    case SamplingMechanism::bottom_poisson:
      // Exact mirror of top-poisson: same draws, ranks reflected.
      indices = poisson_ranks(n, k, policy.poisson_rate, seed);
      for (Eigen::Index& i : indices) i = n - 1 - i;
      std::sort(indices.begin(), indices.end());
      break;
  }
  return indices;
}

AgentPlanSet sample(const CombinedPlanSpace& space, const SamplingPolicy& policy,
                    std::uint64_t seed, std::string agent_id, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    raise(ErrorCode::validation_error, "lambda must be in [0, 1]");
  }
  const auto indices = sample_indices(space.size(), policy, seed);
  AgentPlanSet agent;
  agent.agent_id = std::move(agent_id);
  agent.lambda = lambda;
  agent.plans.resize(kMinutesPerDay, static_cast<Eigen::Index>(indices.size()));
  agent.discomforts.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    const Plan p = materialize(space, indices[c]);
    agent.plans.col(static_cast<Eigen::Index>(c)) = p.values;
    agent.discomforts(static_cast<Eigen::Index>(c)) = p.discomfort;
    if (p.discomfort == 0.0 && !agent.preferred_column) {
      agent.preferred_column = static_cast<Eigen::Index>(c);
    }
  }
  return agent;
}

}  // namespace flexgrid
