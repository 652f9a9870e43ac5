#include "flexgrid/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "flexgrid/csv.hpp"
#include "flexgrid/rng.hpp"

namespace flexgrid {

std::string Scenario::label() const {
  switch (kind) {
    case Kind::baseline:
      return "baseline";
    case Kind::exclude: {
      std::string s = "exclude";
      for (Appliance a : excluded) s += "_" + std::string(to_string(a));
      return s;
    }
    case Kind::efficient_kettle:
      return "efficient_kettle";
    case Kind::flexible_kettle:
      return "flexible_kettle";
    case Kind::reduced_adoption:
      return "reduced_adoption_" + format_double(reduced_percent);
  }
  return "unknown";
}

Scenario exclude_appliance(Scenario scenario, Appliance appliance) {
  if (scenario.kind != Scenario::Kind::baseline &&
      scenario.kind != Scenario::Kind::exclude) {
    raise(ErrorCode::validation_error,
          "exclude_appliance applies to baseline or exclude scenarios");
  }
  scenario.kind = Scenario::Kind::exclude;
  if (std::find(scenario.excluded.begin(), scenario.excluded.end(),
                appliance) == scenario.excluded.end()) {
    scenario.excluded.push_back(appliance);
    std::sort(scenario.excluded.begin(), scenario.excluded.end());
  }
  return scenario;
}

Scenario reduced_adoption(Scenario scenario, double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) {
    raise(ErrorCode::validation_error,
          "reduced_adoption: percent must be in [0, 100]");
  }
  scenario.kind = Scenario::Kind::reduced_adoption;
  scenario.reduced_percent = percent;
  return scenario;
}

std::pair<Scenario, Scenario> kettle_scenarios(double savings_fraction) {
  if (!(savings_fraction >= 0.0 && savings_fraction <= 1.0)) {
    raise(ErrorCode::validation_error,
          "kettle_scenarios: savings fraction must be in [0, 1]");
  }
  Scenario efficient;
  efficient.kind = Scenario::Kind::efficient_kettle;
  efficient.savings_fraction = savings_fraction;
  Scenario flexible;
  flexible.kind = Scenario::Kind::flexible_kettle;
  return {efficient, flexible};
}

Dataset apply_scenario(const Dataset& dataset, const Scenario& scenario) {
  Dataset out = dataset;
  switch (scenario.kind) {
    case Scenario::Kind::baseline:
    case Scenario::Kind::reduced_adoption:
      break;
    case Scenario::Kind::exclude:
      for (auto& row : out.schedules) {
        if (std::find(scenario.excluded.begin(), scenario.excluded.end(),
                      row.schedule.appliance) != scenario.excluded.end()) {
          row.schedule.flexibility = 0;
        }
      }
      break;
    case Scenario::Kind::efficient_kettle:
      for (auto& row : out.schedules) row.schedule.flexibility = 0;
      break;
    case Scenario::Kind::flexible_kettle:
      for (auto& row : out.schedules) {
        if (row.schedule.appliance != Appliance::kettle) {
          row.schedule.flexibility = 0;
        }
      }
      break;
  }
  return out;
}

void apply_reduced_adoption(std::vector<ResolvedConsumer>& consumers,
                            double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) {
    raise(ErrorCode::validation_error,
          "apply_reduced_adoption: percent must be in [0, 100]");
  }
  const long count =
      std::lround(percent / 100.0 * static_cast<double>(consumers.size()));
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < consumers.size(); ++i) {
    if (consumers[i].lambda < 1.0) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (consumers[a].lambda != consumers[b].lambda)
                       return consumers[a].lambda > consumers[b].lambda;
                     return consumers[a].id < consumers[b].id;
                   });
  for (std::size_t i = 0;
       i < candidates.size() && i < static_cast<std::size_t>(count); ++i) {
    consumers[candidates[i]].lambda = 1.0;
  }
}

void apply_kettle_savings(Plan& plan, const CombinedPlanSpace& space,
                          Eigen::Index row, double savings_fraction) {
  constexpr std::pair<int, int> windows[2] = {
      {kKettleMorningStart, kKettleMorningEnd},
      {kKettleEveningStart, kKettleEveningEnd},
  };
  for (Eigen::Index j = 0; j < space.components(); ++j) {
    if (space.schedules[j].appliance != Appliance::kettle) continue;
    const auto [begin, end] = component_interval(space, row, j);
    for (const auto& [w_begin, w_end] : windows) {
      const int lo = std::max(begin, w_begin);
      const int hi = std::min(end, w_end);
      if (lo < hi) {
        plan.values.segment(lo, hi - lo).array() -=
            space.watts[j] * savings_fraction;
      }
    }
  }
}

namespace {

using nlohmann::json;

Scenario parse_scenario(const json& j, const std::string& ctx) {
  if (!j.is_object() || !j.contains("kind")) {
    raise(ErrorCode::parse_error, ctx + ": scenario needs a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  Scenario s;
  if (kind == "baseline") {
    s.kind = Scenario::Kind::baseline;
  } else if (kind == "exclude") {
    s.kind = Scenario::Kind::exclude;
    if (!j.contains("appliances") || !j.at("appliances").is_array() ||
        j.at("appliances").empty()) {
      raise(ErrorCode::parse_error,
            ctx + ": exclude scenario needs an 'appliances' list");
    }
    for (const auto& name : j.at("appliances")) {
      const auto a = parse_appliance(name.get<std::string>());
      if (!a) {
        raise(ErrorCode::unknown_appliance,
              ctx + ": unknown appliance '" + name.get<std::string>() + "'");
      }
      s = exclude_appliance(std::move(s), *a);
    }
  } else if (kind == "efficient_kettle") {
    s.kind = Scenario::Kind::efficient_kettle;
    s.savings_fraction = j.value("savings_fraction", kDefaultKettleSavings);
    if (!(s.savings_fraction >= 0.0 && s.savings_fraction <= 1.0)) {
      raise(ErrorCode::validation_error,
            ctx + ": savings_fraction must be in [0, 1]");
    }
  } else if (kind == "flexible_kettle") {
    s.kind = Scenario::Kind::flexible_kettle;
  } else if (kind == "reduced_adoption") {
    if (!j.contains("percent")) {
      raise(ErrorCode::parse_error,
            ctx + ": reduced_adoption scenario needs 'percent'");
    }
    s = reduced_adoption(std::move(s), j.at("percent").get<double>());
  } else {
    raise(ErrorCode::parse_error, ctx + ": unknown scenario kind '" + kind + "'");
  }
  return s;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& json_path) {
  const std::string text = read_text_file(json_path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::parse_error, json_path.string() + ": " + e.what());
  }
  const std::string ctx = json_path.string();
  if (!j.is_object() || !j.contains("dataset")) {
    raise(ErrorCode::parse_error, ctx + ": config needs a 'dataset' path");
  }

  ExperimentConfig cfg;
  const auto base = json_path.parent_path();
  auto resolve_path = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
  };
  cfg.dataset = resolve_path(j.at("dataset").get<std::string>());
  if (j.contains("out")) cfg.out = resolve_path(j.at("out").get<std::string>());
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.iterations = j.value("iterations", 50);
  cfg.executions = j.value("executions", 10);
  cfg.policy.plans_per_agent = j.value("plans_per_agent", 10);
  cfg.policy.poisson_rate = j.value("poisson_rate", 2.0);
  cfg.combination_cap = j.value("combination_cap", kDefaultCombinationCap);
  if (j.contains("reference_households")) {
    cfg.reference_households =
        resolve_path(j.at("reference_households").get<std::string>());
  }
  if (j.contains("power_config")) {
    cfg.power_config = resolve_path(j.at("power_config").get<std::string>());
  }

  if (j.contains("mechanisms")) {
    cfg.mechanisms.clear();
    for (const auto& name : j.at("mechanisms")) {
      const auto m = parse_mechanism(name.get<std::string>());
      if (!m) {
        raise(ErrorCode::parse_error,
              ctx + ": unknown sampling mechanism '" +
                  name.get<std::string>() + "'");
      }
      cfg.mechanisms.push_back(*m);
    }
  }
  if (j.contains("lambdas")) {
    cfg.lambdas.clear();
    for (const auto& v : j.at("lambdas")) {
      std::optional<LambdaMode> mode;
      if (v.is_number()) {
        const double x = v.get<double>();
        mode = x >= 0.0 && x <= 1.0 ? std::optional(lambda_fixed(x))
                                    : std::nullopt;
      } else {
        mode = parse_lambda_mode(v.get<std::string>());
      }
      if (!mode) {
        raise(ErrorCode::parse_error,
              ctx + ": lambdas entries must be 'consumer' or a number in "
                    "[0, 1]");
      }
      cfg.lambdas.push_back(*mode);
    }
  }
  if (j.contains("scenarios")) {
    cfg.scenarios.clear();
    for (const auto& s : j.at("scenarios")) {
      cfg.scenarios.push_back(parse_scenario(s, ctx));
    }
  }

  if (cfg.mechanisms.empty() || cfg.lambdas.empty() || cfg.scenarios.empty()) {
    raise(ErrorCode::validation_error,
          ctx + ": mechanisms, lambdas and scenarios must be non-empty");
  }
  if (cfg.iterations < 1 || cfg.executions < 1) {
    raise(ErrorCode::validation_error,
          ctx + ": iterations and executions must be >= 1");
  }
  return cfg;
}

std::vector<AgentPlanSet> build_agents(
    const Dataset& viewed, std::span<const ResolvedConsumer> consumers,
    int day, SamplingMechanism mechanism, const ExperimentConfig& config,
    const Scenario& scenario) {
  SamplingPolicy policy = config.policy;
  policy.mechanism = mechanism;

  std::vector<AgentPlanSet> agents;
  for (std::size_t ci = 0; ci < consumers.size(); ++ci) {
    const ResolvedConsumer& consumer = consumers[ci];

    std::vector<GeneratedPlanSpace> spaces;
    for (const auto& row : viewed.schedules) {
      if (row.consumer_id != consumer.id || row.day != day) continue;
      const auto draw = consumer.draw_watts.find(row.schedule.appliance);
      if (draw == consumer.draw_watts.end()) {
        raise(ErrorCode::unknown_appliance,
              "no draw for " + std::string(to_string(row.schedule.appliance)));
      }
      spaces.push_back(generate_plans(row.schedule, draw->second));
    }
    if (spaces.empty()) continue;  // consumer sat this day out

    CombinedPlanSpace combined =
        combine_plans(spaces, config.combination_cap);
    std::vector<Constraint> constraints;
    for (const auto& row : viewed.constraints) {
      if (row.consumer_id == consumer.id) constraints.push_back(row.constraint);
    }
    if (!constraints.empty()) {
      combined = filter_constraints(combined, constraints);
      if (combined.size() == 0) {
        raise(ErrorCode::dataset_error,
              "consumer '" + consumer.id + "', day " + std::to_string(day) +
                  ": constraints eliminate every plan");
      }
    }

    const auto indices = sample_indices(
        combined.size(), policy,
        substream_seed(config.seed, "sampling", ci, static_cast<std::uint64_t>(day)));

    AgentPlanSet agent;
    agent.agent_id = consumer.id;
    agent.lambda = consumer.lambda;
    agent.plans.resize(kMinutesPerDay, static_cast<Eigen::Index>(indices.size()));
    agent.discomforts.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t c = 0; c < indices.size(); ++c) {
      Plan p = materialize(combined, indices[c]);
      if (scenario.kind == Scenario::Kind::efficient_kettle) {
        apply_kettle_savings(p, combined, indices[c], scenario.savings_fraction);
      }
      agent.plans.col(static_cast<Eigen::Index>(c)) = p.values;
      agent.discomforts(static_cast<Eigen::Index>(c)) = p.discomfort;
      if (p.discomfort == 0.0 && !agent.preferred_column) {
        agent.preferred_column = static_cast<Eigen::Index>(c);
      }
    }
    agents.push_back(std::move(agent));
  }
  return agents;
}

double CellResult::mean_final_variance() const {
  double sum = 0.0;
  for (const auto& r : runs) sum += r.final_variance();
  return sum / static_cast<double>(runs.size());
}

double CellResult::mean_final_total_energy() const {
  double sum = 0.0;
  for (const auto& r : runs) sum += r.final_total_energy;
  return sum / static_cast<double>(runs.size());
}

double CellResult::mean_peak_shift() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : runs) {
    if (!std::isnan(r.peak_shift_fraction)) {
      sum += r.peak_shift_fraction;
      ++n;
    }
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.iterations < 1 || config.executions < 1) {
    raise(ErrorCode::validation_error,
          "experiment: iterations and executions must be >= 1");
  }
  if (config.mechanisms.empty() || config.lambdas.empty() ||
      config.scenarios.empty()) {
    raise(ErrorCode::validation_error,
          "experiment: mechanisms, lambdas and scenarios must be non-empty");
  }

  const Dataset pristine = load_dataset(config.dataset);
  const std::vector<ReferenceHousehold> references =
      config.reference_households.empty()
          ? default_reference_households()
          : load_reference_households(config.reference_households);
  const PowerConfig power = config.power_config.empty()
                                ? default_power_config()
                                : load_power_config(config.power_config);
  const std::vector<int> days = pristine.days();
  if (days.empty()) {
    raise(ErrorCode::dataset_error, "experiment: dataset has no schedules");
  }

  ExperimentResult result;
  for (const Scenario& scenario : config.scenarios) {
    const Dataset viewed = apply_scenario(pristine, scenario);

    // Per lambda mode: every consumer's lambda and appliance draws. Draws do
    // not depend on the mode; lambdas do, and reduced adoption acts on them.
    std::vector<std::vector<ResolvedConsumer>> resolved;
    for (const LambdaMode& mode : config.lambdas) {
      auto consumers = resolve_consumers(viewed, mode, references, power);
      if (scenario.kind == Scenario::Kind::reduced_adoption) {
        apply_reduced_adoption(consumers, scenario.reduced_percent);
      }
      resolved.push_back(std::move(consumers));
    }

    for (SamplingMechanism mechanism : config.mechanisms) {
      std::vector<CellResult> cells(config.lambdas.size());
      for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
        cells[li].scenario = scenario;
        cells[li].mechanism = mechanism;
        cells[li].lambda = config.lambdas[li];
      }

      for (int day : days) {
        // Candidate plans are identical across lambda modes; build once.
        std::vector<AgentPlanSet> agents = build_agents(
            viewed, resolved.front(), day, mechanism, config, scenario);
        for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
          for (AgentPlanSet& agent : agents) {
            for (const auto& rc : resolved[li]) {
              if (rc.id == agent.agent_id) {
                agent.lambda = rc.lambda;
                break;
              }
            }
          }

          Eigen::VectorXd baseline = Eigen::VectorXd::Zero(kMinutesPerDay);
          for (const AgentPlanSet& agent : agents) {
            baseline += agent.plans.col(0);
          }
          cells[li].baseline[day] = baseline;
          cells[li].agent_count[day] = static_cast<int>(agents.size());

          for (int r = 0; r < config.executions; ++r) {
            const TreeTopology topology = build_topology(
                agents.size(),
                substream_seed(config.seed, "topology",
                               static_cast<std::uint64_t>(r),
                               static_cast<std::uint64_t>(day)));
            EngineOptions options;
            options.iterations = config.iterations;
            RunResult run_result = run(agents, topology, options);

            RunRecord record;
            record.day = day;
            record.execution = r;
            record.metrics = std::move(run_result.metrics);
            record.final_aggregate = std::move(run_result.final_aggregate);
            record.final_total_energy = record.final_aggregate.sum();
            const double window_base =
                run_result.bootstrap_aggregate
                    .segment(kPeakWindowStart, kPeakWindowEnd - kPeakWindowStart)
                    .sum();
            record.peak_shift_fraction =
                window_base > 0.0
                    ? peak_shift(run_result.bootstrap_aggregate,
                                 record.final_aggregate)
                    : std::numeric_limits<double>::quiet_NaN();
            cells[li].runs.push_back(std::move(record));
          }
        }
      }
      for (auto& cell : cells) result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

namespace {

std::string cell_directory(const CellResult& cell) {
  return cell.scenario.label() + "/" + std::string(to_string(cell.mechanism)) +
         "/lambda_" + to_string(cell.lambda);
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["label"] = s.label();
  switch (s.kind) {
    case Scenario::Kind::baseline: j["kind"] = "baseline"; break;
    case Scenario::Kind::exclude: j["kind"] = "exclude"; break;
    case Scenario::Kind::efficient_kettle:
      j["kind"] = "efficient_kettle";
      j["savings_fraction"] = s.savings_fraction;
      break;
    case Scenario::Kind::flexible_kettle: j["kind"] = "flexible_kettle"; break;
    case Scenario::Kind::reduced_adoption:
      j["kind"] = "reduced_adoption";
      j["percent"] = s.reduced_percent;
      break;
  }
  if (s.kind == Scenario::Kind::exclude) {
    json arr = json::array();
    for (Appliance a : s.excluded) arr.push_back(std::string(to_string(a)));
    j["appliances"] = arr;
  }
  return j;
}

void write_cell(const CellResult& cell, const ExperimentConfig& config,
                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  json manifest;
  manifest["scenario"] = scenario_to_json(cell.scenario);
  manifest["mechanism"] = std::string(to_string(cell.mechanism));
  manifest["lambda"] = to_string(cell.lambda);
  manifest["seed"] = config.seed;
  manifest["iterations"] = config.iterations;
  manifest["executions"] = config.executions;
  manifest["plans_per_agent"] = config.policy.plans_per_agent;
  manifest["poisson_rate"] = config.policy.poisson_rate;
  manifest["combination_cap"] = config.combination_cap;
  manifest["dataset"] = config.dataset.string();
  json agent_counts;
  for (const auto& [day, n] : cell.agent_count) {
    agent_counts[std::to_string(day)] = n;
  }
  manifest["agents_per_day"] = agent_counts;
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  for (const RunRecord& run : cell.runs) {
    std::ostringstream s;
    s << "iteration,variance,avg_discomfort,unfairness\n";
    for (Eigen::Index t = 0; t < run.metrics.variance.size(); ++t) {
      s << t << ',' << format_double(run.metrics.variance(t)) << ','
        << format_double(run.metrics.avg_discomfort(t)) << ','
        << format_double(run.metrics.unfairness(t)) << '\n';
    }
    std::ostringstream name;
    name << "iterations_d" << run.day << "_r" << run.execution << ".csv";
    write_text_file(dir / name.str(), s.str());
  }

  for (const auto& [day, baseline] : cell.baseline) {
    Eigen::VectorXd coordinated = Eigen::VectorXd::Zero(kMinutesPerDay);
    int n = 0;
    for (const RunRecord& run : cell.runs) {
      if (run.day == day) {
        coordinated += run.final_aggregate;
        ++n;
      }
    }
    if (n > 0) coordinated /= static_cast<double>(n);
    std::ostringstream s;
    s << "minute,baseline,coordinated\n";
    for (int minute = 0; minute < kMinutesPerDay; ++minute) {
      s << minute << ',' << format_double(baseline(minute)) << ','
        << format_double(coordinated(minute)) << '\n';
    }
    std::ostringstream name;
    name << "aggregate_demand_d" << day << ".csv";
    write_text_file(dir / name.str(), s.str());
  }

  std::ostringstream s;
  s << "day,executions,variance_mean,variance_std,avg_discomfort_mean,"
       "avg_discomfort_std,unfairness_mean,unfairness_std,peak_shift_mean,"
       "total_energy_mean\n";
  auto row_stats = [&](const std::vector<const RunRecord*>& runs) {
    Eigen::VectorXd variance(runs.size()), discomfort(runs.size()),
        unfair(runs.size());
    double peak_sum = 0.0;
    int peak_n = 0;
    double energy_sum = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      variance(static_cast<Eigen::Index>(i)) = runs[i]->final_variance();
      discomfort(static_cast<Eigen::Index>(i)) = runs[i]->final_avg_discomfort();
      unfair(static_cast<Eigen::Index>(i)) = runs[i]->final_unfairness();
      if (!std::isnan(runs[i]->peak_shift_fraction)) {
        peak_sum += runs[i]->peak_shift_fraction;
        ++peak_n;
      }
      energy_sum += runs[i]->final_total_energy;
    }
    const double peak_mean =
        peak_n > 0 ? peak_sum / peak_n : std::numeric_limits<double>::quiet_NaN();
    s << runs.size() << ',' << format_double(variance.mean()) << ','
      << format_double(std::sqrt(population_variance(variance))) << ','
      << format_double(discomfort.mean()) << ','
      << format_double(std::sqrt(population_variance(discomfort))) << ','
      << format_double(unfair.mean()) << ','
      << format_double(std::sqrt(population_variance(unfair))) << ','
      << format_double(peak_mean) << ','
      << format_double(energy_sum / static_cast<double>(runs.size())) << '\n';
  };
  std::vector<const RunRecord*> all;
  for (const auto& [day, unused] : cell.baseline) {
    std::vector<const RunRecord*> day_runs;
    for (const RunRecord& run : cell.runs) {
      if (run.day == day) day_runs.push_back(&run);
    }
    all.insert(all.end(), day_runs.begin(), day_runs.end());
    s << day << ',';
    row_stats(day_runs);
  }
  s << "overall,";
  row_stats(all);
  write_text_file(dir / "summary.csv", s.str());
}

}  // namespace

void write_experiment(const ExperimentResult& result,
                      const ExperimentConfig& config,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  json top;
  top["seed"] = config.seed;
  top["iterations"] = config.iterations;
  top["executions"] = config.executions;
  top["plans_per_agent"] = config.policy.plans_per_agent;
  top["poisson_rate"] = config.policy.poisson_rate;
  top["combination_cap"] = config.combination_cap;
  top["dataset"] = config.dataset.string();
  json cells = json::array();
  for (const CellResult& cell : result.cells) {
    cells.push_back(cell_directory(cell));
  }
  top["cells"] = cells;
  write_text_file(out_dir / "manifest.json", top.dump(2) + "\n");

  for (const CellResult& cell : result.cells) {
    write_cell(cell, config, out_dir / cell_directory(cell));
  }
}

}  // namespace flexgrid
