// Command-line front end: dataset inspection and synthesis, plan-space
// exploration, single coordination runs, and full experiment sweeps.

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <sstream>

#include "flexgrid/csv.hpp"
#include "flexgrid/experiment.hpp"
#include "flexgrid/rng.hpp"

namespace {

using namespace flexgrid;

struct CommonOptions {
  std::uint64_t seed = 0;
  int iterations = 50;
  int executions = 1;
  int plans_per_agent = 10;
  double poisson_rate = 2.0;
  std::string sampling = "top-ranked";
  std::string lambda = "consumer";
  std::int64_t combination_cap = kDefaultCombinationCap;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_engine) {
  cmd->add_option("--seed", opt.seed, "Master seed");
  cmd->add_option("--plans-per-agent", opt.plans_per_agent,
                  "Candidate plans sampled per agent");
  cmd->add_option("--sampling", opt.sampling,
                  "top-ranked|top-poisson|uniform|bottom-poisson|bottom-ranked");
  cmd->add_option("--poisson-rate", opt.poisson_rate,
                  "Rank weighting rate of the Poisson mechanisms");
  cmd->add_option("--lambda", opt.lambda,
                  "'consumer' or a fixed value in [0,1]");
  cmd->add_option("--combination-cap", opt.combination_cap,
                  "Maximum combined plan-space size per consumer-day");
  if (with_engine) {
    cmd->add_option("--iterations", opt.iterations, "Engine iterations");
    cmd->add_option("--executions", opt.executions,
                    "Independent runs (tree placements) per day");
  }
}

SamplingMechanism mechanism_or_die(const std::string& name) {
  const auto m = parse_mechanism(name);
  if (!m) {
    raise(ErrorCode::validation_error,
          "unknown sampling mechanism '" + name + "'");
  }
  return *m;
}

LambdaMode lambda_or_die(const std::string& text) {
  const auto mode = parse_lambda_mode(text);
  if (!mode) {
    raise(ErrorCode::validation_error,
          "--lambda must be 'consumer' or a number in [0,1], got '" + text +
              "'");
  }
  return *mode;
}

ExperimentConfig single_cell_config(const std::string& dataset,
                                    const CommonOptions& opt) {
  ExperimentConfig cfg;
  cfg.dataset = dataset;
  cfg.seed = opt.seed;
  cfg.iterations = opt.iterations;
  cfg.executions = opt.executions;
  cfg.policy.plans_per_agent = opt.plans_per_agent;
  cfg.policy.poisson_rate = opt.poisson_rate;
  cfg.combination_cap = opt.combination_cap;
  cfg.mechanisms = {mechanism_or_die(opt.sampling)};
  cfg.lambdas = {lambda_or_die(opt.lambda)};
  return cfg;
}

int cmd_validate(const std::string& dataset_path) {
  const Dataset d = load_dataset(dataset_path);
  std::map<Appliance, int> per_appliance;
  for (const auto& row : d.schedules) ++per_appliance[row.schedule.appliance];

  std::cout << "dataset: " << dataset_path << "\n"
            << "consumers: " << d.consumers.size() << "\n"
            << "days:";
  for (int day : d.days()) std::cout << ' ' << day;
  std::cout << "\nschedules: " << d.schedules.size() << "\n"
            << "constraints: " << d.constraints.size() << "\n";
  for (const auto& [a, n] : per_appliance) {
    const double share = 100.0 * n / static_cast<double>(d.schedules.size());
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", share);
    std::cout << "  " << to_string(a) << ": " << n << " (" << buf << "%)\n";
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_synth(const SynthSpec& spec, const std::string& out) {
  const Dataset d = synth_dataset(spec);
  save_dataset(d, out);
  std::cout << "wrote " << d.schedules.size() << " schedules for "
            << d.consumers.size() << " consumers x " << spec.days
            << " days to " << out << "\n";
  return 0;
}

int cmd_plans(const std::string& dataset_path, const std::string& consumer,
              int day, const CommonOptions& opt, const std::string& out) {
  const Dataset d = load_dataset(dataset_path);
  const auto consumers = resolve_consumers(
      d, lambda_fixed(0.0), default_reference_households(),
      default_power_config());

  std::ostringstream report;
  report << "consumer,day,plans,components,min_discomfort,max_discomfort\n";
  for (const auto& rc : consumers) {
    if (!consumer.empty() && rc.id != consumer) continue;
    for (int current_day : d.days()) {
      if (day >= 0 && current_day != day) continue;
      std::vector<GeneratedPlanSpace> spaces;
      for (const auto& row : d.schedules) {
        if (row.consumer_id != rc.id || row.day != current_day) continue;
        spaces.push_back(
            generate_plans(row.schedule, rc.draw_watts.at(row.schedule.appliance)));
      }
      if (spaces.empty()) continue;
      CombinedPlanSpace combined = combine_plans(spaces, opt.combination_cap);
      std::vector<Constraint> constraints;
      for (const auto& row : d.constraints) {
        if (row.consumer_id == rc.id) constraints.push_back(row.constraint);
      }
      if (!constraints.empty()) {
        combined = filter_constraints(combined, constraints);
      }
      report << rc.id << ',' << current_day << ',' << combined.size() << ','
             << combined.components() << ',';
      if (combined.size() > 0) {
        report << format_double(combined.discomforts(0)) << ','
               << format_double(combined.discomforts(combined.size() - 1));
      } else {
        report << ',';
      }
      report << '\n';
    }
  }
  if (out.empty()) {
    std::cout << report.str();
  } else {
    write_text_file(out, report.str());
  }
  return 0;
}

int cmd_sample(const std::string& dataset_path, int day,
               const CommonOptions& opt, const std::string& out) {
  ExperimentConfig cfg = single_cell_config(dataset_path, opt);
  const Dataset d = load_dataset(cfg.dataset);
  const auto consumers =
      resolve_consumers(d, lambda_or_die(opt.lambda),
                        default_reference_households(), default_power_config());
  std::ostringstream report;
  report << "consumer,day,candidate,discomfort,total_energy_wmin\n";
  for (int current_day : d.days()) {
    if (day >= 0 && current_day != day) continue;
    const auto agents =
        build_agents(d, consumers, current_day,
                     mechanism_or_die(opt.sampling), cfg, Scenario{});
    for (const auto& agent : agents) {
      for (Eigen::Index c = 0; c < agent.size(); ++c) {
        report << agent.agent_id << ',' << current_day << ',' << c << ','
               << format_double(agent.discomforts(c)) << ','
               << format_double(agent.plans.col(c).sum()) << '\n';
      }
    }
  }
  if (out.empty()) {
    std::cout << report.str();
  } else {
    write_text_file(out, report.str());
  }
  return 0;
}

int cmd_optimize(const std::string& dataset_path, const CommonOptions& opt,
                 const std::string& out) {
  ExperimentConfig cfg = single_cell_config(dataset_path, opt);
  cfg.out = out;
  const ExperimentResult result = run_experiment(cfg);
  write_experiment(result, cfg, cfg.out);
  for (const auto& cell : result.cells) {
    std::cout << cell.scenario.label() << " " << to_string(cell.mechanism)
              << " lambda=" << to_string(cell.lambda)
              << " mean_final_variance="
              << format_double(cell.mean_final_variance()) << "\n";
  }
  std::cout << "results in " << cfg.out.string() << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (!out.empty()) cfg.out = out;
  const ExperimentResult result = run_experiment(cfg);
  write_experiment(result, cfg, cfg.out);
  std::cout << result.cells.size() << " cells written to " << cfg.out.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Appliance-level flexible scheduling simulator"};
  app.require_subcommand(1);

  std::string dataset_path, out, consumer, config_path;
  int day = -1;
  CommonOptions opt;
  SynthSpec synth;

  auto* validate = app.add_subcommand("validate", "Check a dataset and print a summary");
  validate->add_option("dataset", dataset_path, "Dataset directory or schedules CSV")
      ->required();

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--consumers", synth.consumers, "Number of consumers");
  synth_cmd->add_option("--days", synth.days, "Number of days");
  synth_cmd->add_option("--seed", synth.seed, "Master seed");
  synth_cmd->add_option("--max-schedules-per-day", synth.max_schedules_per_day,
                        "Cap on schedules per consumer-day");
  synth_cmd->add_option("--out", out, "Output dataset directory")->required();

  auto* plans = app.add_subcommand("plans", "Summarize combined plan spaces");
  plans->add_option("dataset", dataset_path)->required();
  plans->add_option("--consumer", consumer, "Restrict to one consumer id");
  plans->add_option("--day", day, "Restrict to one day");
  plans->add_option("--out", out, "Write CSV here instead of stdout");
  add_common(plans, opt, false);

  auto* sample = app.add_subcommand("sample", "Show sampled candidate plans");
  sample->add_option("dataset", dataset_path)->required();
  sample->add_option("--day", day, "Restrict to one day");
  sample->add_option("--out", out, "Write CSV here instead of stdout");
  add_common(sample, opt, false);

  auto* optimize = app.add_subcommand("optimize", "Run the coordination engine");
  optimize->add_option("dataset", dataset_path)->required();
  optimize->add_option("--out", out, "Results directory")->required();
  add_common(optimize, opt, true);

  auto* experiment = app.add_subcommand("experiment", "Run a configured sweep");
  experiment->add_option("--config", config_path, "Experiment JSON config")
      ->required();
  experiment->add_option("--out", out, "Override the config's output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(dataset_path);
    if (synth_cmd->parsed()) return cmd_synth(synth, out);
    if (plans->parsed()) return cmd_plans(dataset_path, consumer, day, opt, out);
    if (sample->parsed()) return cmd_sample(dataset_path, day, opt, out);
    if (optimize->parsed()) return cmd_optimize(dataset_path, opt, out);
    if (experiment->parsed()) return cmd_experiment(config_path, out);
  } catch (const flexgrid::Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
