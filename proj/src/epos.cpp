#include "flexgrid/epos.hpp"

#include <cassert>
#include <string>
#include <utility>

#include "flexgrid/rng.hpp"

namespace flexgrid {

TreeTopology TreeTopology::build(std::size_t agent_count, std::uint64_t seed) {
  if (agent_count == 0) {
    raise(ErrorCode::empty_input, "topology needs at least one agent");
  }
  TreeTopology t;
  std::mt19937_64 rng(seed);
  t.agent_at_node_ = random_permutation(static_cast<int>(agent_count), rng);
  t.node_of_agent_.resize(agent_count);
  for (std::size_t node = 0; node < agent_count; ++node) {
    t.node_of_agent_[t.agent_at_node_[node]] = static_cast<int>(node);
  }
  return t;
}

std::vector<int> TreeTopology::children(int node) const {
  std::vector<int> out;
  const int n = static_cast<int>(size());
  if (2 * node + 1 < n) out.push_back(2 * node + 1);
  if (2 * node + 2 < n) out.push_back(2 * node + 2);
  return out;
}

bool TreeTopology::is_leaf(int node) const {
  return 2 * node + 1 >= static_cast<int>(size());
}

int TreeTopology::depth_of_node(int node) {
  int d = 0;
  while (node > 0) {
    node = (node - 1) / 2;
    ++d;
  }
  return d;
}

int TreeTopology::depth() const { return depth_of_node(static_cast<int>(size()) - 1); }

double selection_objective(const AgentPlanSet& agent, Eigen::Index candidate,
                           Eigen::Ref<const Eigen::VectorXd> others_demand) {
  const double lambda = agent.lambda;
  const double discomfort = agent.discomforts(candidate);
  if (lambda == 1.0) return discomfort;  // variance term vanishes exactly
  const double variance =
      population_variance(others_demand + agent.plans.col(candidate));
  return (1.0 - lambda) * variance + lambda * discomfort;
}

Eigen::Index select_plan(const AgentPlanSet& agent,
                         Eigen::Ref<const Eigen::VectorXd> prev_global,
                         Eigen::Ref<const Eigen::VectorXd> prev_subtree,
                         Eigen::Ref<const Eigen::VectorXd> fresh_subtree,
                         Eigen::Ref<const Eigen::VectorXd> prev_own_plan) {
  const Eigen::VectorXd others =
      prev_global - prev_subtree + fresh_subtree - prev_own_plan;
  Eigen::Index best = 0;
  double best_obj = selection_objective(agent, 0, others);
  for (Eigen::Index s = 1; s < agent.size(); ++s) {
    const double obj = selection_objective(agent, s, others);
    if (obj < best_obj) {
      best_obj = obj;
      best = s;
    }
  }
  return best;
}

namespace {

void check_agents(std::span<const AgentPlanSet> agents,
                  const TreeTopology& topology, const EngineOptions& options) {
  if (agents.empty()) {
    raise(ErrorCode::empty_input, "run: no agents");
  }
  if (topology.size() != agents.size()) {
    raise(ErrorCode::dimension_mismatch,
          "run: topology holds " + std::to_string(topology.size()) +
              " agents, got " + std::to_string(agents.size()));
  }
  if (options.iterations < 1) {
    raise(ErrorCode::validation_error, "run: iterations must be >= 1");
  }
  for (const AgentPlanSet& a : agents) {
    if (a.size() == 0) {
      raise(ErrorCode::empty_plan_space,
            "run: agent '" + a.agent_id + "' has no plans");
    }
    if (a.plans.rows() != kMinutesPerDay ||
        a.discomforts.size() != a.size()) {
      raise(ErrorCode::dimension_mismatch,
            "run: agent '" + a.agent_id + "' has malformed plan matrix");
    }
    if (!(a.lambda >= 0.0 && a.lambda <= 1.0)) {
      raise(ErrorCode::validation_error,
            "run: agent '" + a.agent_id + "' lambda outside [0, 1]");
    }
  }
}

}  // namespace

RunResult run(std::span<const AgentPlanSet> agents, const TreeTopology& topology,
              const EngineOptions& options) {
  check_agents(agents, topology, options);
  const int n = static_cast<int>(agents.size());
  const int T = options.iterations;

  auto plan_of = [&](int node, const std::vector<Eigen::Index>& sel) {
    const int agent = topology.agent_at(node);
    return agents[agent].plans.col(sel[agent]);
  };

  // Bootstrap: every agent on its most comfortable plan (column 0).
  std::vector<Eigen::Index> sel_prev(n, 0), sel_next(n, 0);
  // Per node, aggregate demand of its strict descendants.
  std::vector<Eigen::VectorXd> sub_prev(n), sub_next(n);
  for (int node = n - 1; node >= 0; --node) {
    sub_prev[node] = Eigen::VectorXd::Zero(kMinutesPerDay);
    for (int c : topology.children(node)) {
      sub_prev[node] += sub_prev[c] + plan_of(c, sel_prev);
    }
    sub_next[node] = Eigen::VectorXd::Zero(kMinutesPerDay);
  }
  Eigen::VectorXd global = sub_prev[0] + plan_of(0, sel_prev);

  RunResult result;
  result.bootstrap_aggregate = global;
  result.metrics.variance.resize(T + 1);
  result.metrics.avg_discomfort.resize(T + 1);
  result.metrics.unfairness.resize(T + 1);

  Eigen::VectorXd sel_discomforts(n);
  auto record = [&](int row, const std::vector<Eigen::Index>& sel) {
    result.metrics.variance(row) = population_variance(global);
    for (int a = 0; a < n; ++a) {
      sel_discomforts(a) = agents[a].discomforts(sel[a]);
    }
    result.metrics.avg_discomfort(row) = average_discomfort(sel_discomforts);
    result.metrics.unfairness(row) = unfairness(sel_discomforts);
    if (options.record_trace) {
      result.trace.push_back({sel, global});
    }
  };
  record(0, sel_prev);

  // Roll a node's whole subtree back to the previous iteration's selections.
  std::vector<int> stack;
  auto revert_subtree = [&](int root_node) {
    stack.assign(1, root_node);
    while (!stack.empty()) {
      const int m = stack.back();
      stack.pop_back();
      sel_next[topology.agent_at(m)] = sel_prev[topology.agent_at(m)];
      for (int c : topology.children(m)) stack.push_back(c);
    }
    sub_next[root_node] = sub_prev[root_node];
  };

  Eigen::VectorXd others(kMinutesPerDay);
  for (int t = 1; t <= T; ++t) {
    // Bottom-up: children carry higher heap indices than their parent, so a
    // reverse scan visits every child before its parent and the fresh
    // descendant aggregates are ready when the parent selects.
    for (int node = n - 1; node >= 0; --node) {
      const int agent = topology.agent_at(node);
      sub_next[node].setZero();
      for (int c : topology.children(node)) {
        sub_next[node] += sub_next[c] + plan_of(c, sel_next);
      }
      others = global - sub_prev[node] + sub_next[node] -
               agents[agent].plans.col(sel_prev[agent]);
      Eigen::Index best = 0;
      double best_obj = selection_objective(agents[agent], 0, others);
      for (Eigen::Index s = 1; s < agents[agent].size(); ++s) {
        const double obj = selection_objective(agents[agent], s, others);
        if (obj < best_obj) {
          best_obj = obj;
          best = s;
        }
      }
      if (best_obj >
          selection_objective(agents[agent], sel_prev[agent], others)) {
        ++result.objective_regressions;
      }
      sel_next[agent] = best;
      // Subtree acceptance: simultaneous moves in disjoint branches can
      // jointly overshoot, so compare against keeping the whole subtree as it
      // was and roll back when that scores better. At the root this makes the
      // global objective non-increasing for cooperative agents.
      const double keep_obj = selection_objective(
          agents[agent], sel_prev[agent],
          global - agents[agent].plans.col(sel_prev[agent]));
      if (best_obj > keep_obj) {
        revert_subtree(node);
        ++result.subtree_reverts;
      }
    }
    global = sub_next[0] + plan_of(0, sel_next);
    record(t, sel_next);
    sel_prev = sel_next;
    std::swap(sub_prev, sub_next);
  }

  result.final_selection = sel_prev;
  result.final_aggregate = global;
  return result;
}

}  // namespace flexgrid
