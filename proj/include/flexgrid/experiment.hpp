#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexgrid/dataset.hpp"
#include "flexgrid/epos.hpp"
#include "flexgrid/sampling.hpp"

namespace flexgrid {

// Windows of typical kettle activity; the efficient-kettle scenario saves a
// fraction of the kettle draw inside them.
inline constexpr int kKettleMorningStart = 6 * 60 + 30;
inline constexpr int kKettleMorningEnd = 8 * 60 + 30;
inline constexpr int kKettleEveningStart = 19 * 60 + 30;
inline constexpr int kKettleEveningEnd = 21 * 60 + 30;

inline constexpr double kDefaultKettleSavings = 0.2;

// A what-if transformation of the dataset and/or consumer participation.
struct Scenario {
  enum class Kind {
    baseline,             // dataset as collected
    exclude,              // listed appliances lose their flexibility
    efficient_kettle,     // no flexibility anywhere, kettle saves energy
    flexible_kettle,      // only the kettle keeps its flexibility
    reduced_adoption,     // a share of consumers stops cooperating
  };

  Kind kind = Kind::baseline;
  std::vector<Appliance> excluded;  // sorted, unique
  double savings_fraction = kDefaultKettleSavings;
  double reduced_percent = 0.0;  // share of consumers forced to lambda = 1

  bool operator==(const Scenario&) const = default;

  std::string label() const;
};

// Idempotent: excluding an already-excluded appliance changes nothing.
// Excluding every appliance yields the no-flexibility upper bound.
Scenario exclude_appliance(Scenario scenario, Appliance appliance);
Scenario reduced_adoption(Scenario scenario, double percent);
// The two kettle what-ifs: an efficient kettle (technology) and a flexible
// kettle (coordination), both with all other appliances inflexible.
std::pair<Scenario, Scenario> kettle_scenarios(
    double savings_fraction = kDefaultKettleSavings);

// Pure dataset view for one scenario; schedules not targeted by the scenario
// are copied verbatim.
Dataset apply_scenario(const Dataset& dataset, const Scenario& scenario);

// Forces round(percent/100 * n) consumers to lambda = 1, picking the least
// cooperative ones that still participate (lambda < 1); ties broken by id.
void apply_reduced_adoption(std::vector<ResolvedConsumer>& consumers,
                            double percent);

// Scales the kettle components of a materialized plan down by
// `savings_fraction` inside the kettle windows.
void apply_kettle_savings(Plan& plan, const CombinedPlanSpace& space,
                          Eigen::Index row, double savings_fraction);

struct ExperimentConfig {
  std::filesystem::path dataset;
  std::filesystem::path out = "results";
  std::uint64_t seed = 0;
  int iterations = 50;
  int executions = 10;
  SamplingPolicy policy;  // mechanism field unused; per-cell mechanisms below
  std::int64_t combination_cap = kDefaultCombinationCap;
  std::vector<SamplingMechanism> mechanisms = {SamplingMechanism::top_ranked};
  std::vector<LambdaMode> lambdas = {lambda_consumer()};
  std::vector<Scenario> scenarios = {Scenario{}};
  std::filesystem::path reference_households;  // empty -> built-in table
  std::filesystem::path power_config;          // empty -> built-in table
};

ExperimentConfig load_experiment_config(const std::filesystem::path& json_path);

// Candidate plan sets of every consumer active on one day of the (already
// scenario-transformed) dataset. Exposed for the CLI and tests.
std::vector<AgentPlanSet> build_agents(
    const Dataset& viewed, std::span<const ResolvedConsumer> consumers,
    int day, SamplingMechanism mechanism, const ExperimentConfig& config,
    const Scenario& scenario);

struct RunRecord {
  int day = 0;
  int execution = 0;
  RunMetrics metrics;
  Eigen::VectorXd final_aggregate;
  double peak_shift_fraction = 0.0;  // NaN when the window has no baseline demand
  double final_total_energy = 0.0;

  double final_variance() const { return metrics.variance(metrics.variance.size() - 1); }
  double final_avg_discomfort() const { return metrics.avg_discomfort(metrics.avg_discomfort.size() - 1); }
  double final_unfairness() const { return metrics.unfairness(metrics.unfairness.size() - 1); }
};

struct CellResult {
  Scenario scenario;
  SamplingMechanism mechanism;
  LambdaMode lambda;
  std::map<int, Eigen::VectorXd> baseline;  // per day, everyone most comfortable
  std::map<int, int> agent_count;           // per day
  std::vector<RunRecord> runs;              // days ascending, executions inner

  double mean_final_variance() const;
  double mean_final_total_energy() const;
  double mean_peak_shift() const;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// One directory per cell under out_dir, with a manifest, per-day/execution
// iteration series, per-day aggregate demand and a summary table. Output
// bytes depend only on the config (and therefore the seed).
void write_experiment(const ExperimentResult& result,
                      const ExperimentConfig& config,
                      const std::filesystem::path& out_dir);

}  // namespace flexgrid
