#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "flexgrid/domain.hpp"
#include "flexgrid/metrics.hpp"

namespace flexgrid {

// Balanced binary tree over the agents. Nodes are heap-indexed (children of
// node i are 2i+1 and 2i+2), and a seeded random permutation decides which
// agent sits at which node.
class TreeTopology {
 public:
  static TreeTopology build(std::size_t agent_count, std::uint64_t seed);

  std::size_t size() const { return agent_at_node_.size(); }
  int agent_at(int node) const { return agent_at_node_[node]; }
  int node_of(int agent) const { return node_of_agent_[agent]; }

  int parent(int node) const { return node == 0 ? -1 : (node - 1) / 2; }
  std::vector<int> children(int node) const;
  bool is_leaf(int node) const;

  static int depth_of_node(int node);
  int depth() const;  // depth of the deepest node; 0 for a single agent

 private:
  std::vector<int> agent_at_node_;
  std::vector<int> node_of_agent_;
};

inline TreeTopology build_topology(std::size_t agent_count, std::uint64_t seed) {
  return TreeTopology::build(agent_count, seed);
}

// One agent's plan choice: minimize
//   (1 - lambda) * variance(base + candidate) + lambda * discomfort(candidate)
// where `base` is the agent's current view of everyone else's demand. Ties go
// to the lowest candidate index, i.e. the more comfortable plan.
Eigen::Index select_plan(const AgentPlanSet& agent,
                         Eigen::Ref<const Eigen::VectorXd> prev_global,
                         Eigen::Ref<const Eigen::VectorXd> prev_subtree,
                         Eigen::Ref<const Eigen::VectorXd> fresh_subtree,
                         Eigen::Ref<const Eigen::VectorXd> prev_own_plan);

double selection_objective(const AgentPlanSet& agent, Eigen::Index candidate,
                           Eigen::Ref<const Eigen::VectorXd> others_demand);

struct EngineOptions {
  int iterations = 50;
  bool record_trace = false;
};

struct IterationTrace {
  std::vector<Eigen::Index> selection;  // per agent
  Eigen::VectorXd global_aggregate;
};

struct RunResult {
  std::vector<Eigen::Index> final_selection;  // per agent
  Eigen::VectorXd final_aggregate;
  Eigen::VectorXd bootstrap_aggregate;  // everyone on their most comfortable plan
  RunMetrics metrics;                   // rows 0..iterations
  // Count of agent steps whose fresh choice scored worse than keeping the
  // previous plan. Structurally zero: the previous plan is in the candidate
  // set, so the argmin can never lose to it. Kept as a run-time check.
  long objective_regressions = 0;
  // How often a subtree rolled back because simultaneous moves in its
  // branches jointly overshot the objective.
  long subtree_reverts = 0;
  std::vector<IterationTrace> trace;  // filled when record_trace

  double final_variance() const { return metrics.variance(metrics.variance.size() - 1); }
};

RunResult run(std::span<const AgentPlanSet> agents, const TreeTopology& topology,
              const EngineOptions& options = {});

}  // namespace flexgrid
