#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "flexgrid/csv.hpp"
#include "flexgrid/experiment.hpp"
#include "flexgrid/metrics.hpp"
#include "support.hpp"

using namespace flexgrid;
using flexgrid::test::make_temp_dir;

namespace {

Scenario exclude_everything() {
  Scenario s;
  for (Appliance a : kAllAppliances) s = exclude_appliance(std::move(s), a);
  return s;
}

// A small but complete experiment, computed once and shared by the
// end-to-end cases below.
struct Bundle {
  std::filesystem::path dataset_dir;
  Dataset dataset;
  ExperimentConfig config;
  ExperimentResult result;
};

const Bundle& bundle() {
  static const Bundle b = [] {
    Bundle out;
    SynthSpec spec;
    spec.consumers = 8;
    spec.days = 2;
    spec.seed = 125;  // this population uses the kettle inside the peak windows
    out.dataset = synth_dataset(spec);
    out.dataset_dir = make_temp_dir("experiment_ds");
    save_dataset(out.dataset, out.dataset_dir);

    out.config.dataset = out.dataset_dir;
    out.config.seed = 99;
    out.config.iterations = 8;
    out.config.executions = 2;
    out.config.policy.plans_per_agent = 4;
    out.config.mechanisms = {SamplingMechanism::top_ranked};
    out.config.lambdas = {lambda_fixed(0.0), lambda_fixed(1.0)};
    const auto [efficient, flexible] = kettle_scenarios();
    Scenario reduced = reduced_adoption(Scenario{}, 100.0);
    out.config.scenarios = {Scenario{}, exclude_everything(), efficient,
                            flexible, reduced};
    out.result = run_experiment(out.config);
    return out;
  }();
  return b;
}

const CellResult& find_cell(Scenario::Kind kind, double lambda) {
  for (const CellResult& cell : bundle().result.cells) {
    if (cell.scenario.kind == kind && !cell.lambda.per_consumer &&
        cell.lambda.fixed == lambda) {
      return cell;
    }
  }
  FAIL("cell not found");
  static CellResult dummy;
  return dummy;
}

std::map<std::string, std::string> slurp_tree(
    const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[std::filesystem::relative(entry.path(), root).string()] =
        read_text_file(entry.path());
  }
  return files;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("excluding an appliance twice is the same as once") {
  Scenario once = exclude_appliance(Scenario{}, Appliance::kettle);
  Scenario twice = exclude_appliance(once, Appliance::kettle);
  CHECK(once == twice);
  CHECK(once.label() == "exclude_kettle");
  Scenario both = exclude_appliance(once, Appliance::computer);
  CHECK(both.excluded ==
        std::vector<Appliance>{Appliance::computer, Appliance::kettle});
  Scenario efficient = kettle_scenarios().first;
  CHECK_THROWS_AS(exclude_appliance(efficient, Appliance::oven), Error);
}

TEST_CASE("scenario views rewrite only the targeted flexibility") {
  SynthSpec spec;
  spec.consumers = 6;
  spec.days = 2;
  spec.seed = 3;
  const Dataset d = synth_dataset(spec);

  CHECK(apply_scenario(d, Scenario{}) == d);
  CHECK(apply_scenario(d, reduced_adoption(Scenario{}, 40.0)) == d);

  const Dataset no_kettle =
      apply_scenario(d, exclude_appliance(Scenario{}, Appliance::kettle));
  for (std::size_t i = 0; i < d.schedules.size(); ++i) {
    const auto& before = d.schedules[i].schedule;
    const auto& after = no_kettle.schedules[i].schedule;
    if (before.appliance == Appliance::kettle) {
      CHECK(after.flexibility == 0);
    } else {
      CHECK(after == before);
    }
  }

  // excluding every appliance is the no-flexibility upper bound, which is
  // also what the efficient-kettle scenario starts from
  const Dataset frozen = apply_scenario(d, exclude_everything());
  const Dataset efficient = apply_scenario(d, kettle_scenarios().first);
  CHECK(frozen.schedules == efficient.schedules);
  for (const auto& row : frozen.schedules) {
    CHECK(row.schedule.flexibility == 0);
  }

  const Dataset kettle_only = apply_scenario(d, kettle_scenarios().second);
  for (std::size_t i = 0; i < d.schedules.size(); ++i) {
    const auto& before = d.schedules[i].schedule;
    const auto& after = kettle_only.schedules[i].schedule;
    CHECK(after.flexibility ==
          (before.appliance == Appliance::kettle ? before.flexibility : 0));
  }
}

TEST_CASE("reduced adoption silences the least cooperative first") {
  std::vector<ResolvedConsumer> consumers;
  const double lambdas[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) {
    consumers.push_back({"c" + std::to_string(i), lambdas[i], {}});
  }

  auto copy = consumers;
  apply_reduced_adoption(copy, 0.0);
  for (int i = 0; i < 5; ++i) CHECK(copy[i].lambda == lambdas[i]);

  copy = consumers;
  apply_reduced_adoption(copy, 40.0);  // round(0.4 * 5) = 2 consumers
  CHECK(copy[0].lambda == 0.0);
  CHECK(copy[1].lambda == 0.25);
  CHECK(copy[2].lambda == 1.0);  // 0.5 and 0.75 were the least cooperative
  CHECK(copy[3].lambda == 1.0);
  CHECK(copy[4].lambda == 1.0);

  copy = consumers;
  apply_reduced_adoption(copy, 100.0);
  for (const auto& c : copy) CHECK(c.lambda == 1.0);

  CHECK_THROWS_AS(apply_reduced_adoption(copy, 101.0), Error);
  CHECK_THROWS_AS(reduced_adoption(Scenario{}, -1.0), Error);
  CHECK_THROWS_AS(kettle_scenarios(1.5), Error);
}

TEST_CASE("kettle savings shave the draw inside the windows only") {
  const double watts = 1000.0;
  // [380, 400) overlaps the 06:30-08:30 window by 10 minutes
  const Schedule s{Appliance::kettle, 380, 20, 0};
  const std::vector<GeneratedPlanSpace> generated{generate_plans(s, watts)};
  const CombinedPlanSpace space =
      combine_plans(generated, kDefaultCombinationCap);
  REQUIRE(space.size() == 1);

  Plan plan = materialize(space, 0);
  const double before = plan.total_energy();
  apply_kettle_savings(plan, space, 0, 0.2);
  CHECK(plan.values(385) == watts);          // before the window
  CHECK(plan.values(395) == watts * 0.8);    // inside the window
  CHECK(before - plan.total_energy() == doctest::Approx(10 * watts * 0.2));

  // fully outside both windows: untouched
  const Schedule midday{Appliance::kettle, 720, 15, 0};
  const std::vector<GeneratedPlanSpace> generated2{
      generate_plans(midday, watts)};
  const CombinedPlanSpace space2 =
      combine_plans(generated2, kDefaultCombinationCap);
  Plan plan2 = materialize(space2, 0);
  const Plan untouched = plan2;
  apply_kettle_savings(plan2, space2, 0, 0.2);
  CHECK(plan2.values == untouched.values);

  // other appliances are never scaled
  const Schedule oven{Appliance::oven, 400, 30, 0};
  const std::vector<GeneratedPlanSpace> generated3{
      generate_plans(s, watts), generate_plans(oven, 2000.0)};
  const CombinedPlanSpace space3 =
      combine_plans(generated3, kDefaultCombinationCap);
  Plan plan3 = materialize(space3, 0);
  apply_kettle_savings(plan3, space3, 0, 0.2);
  CHECK(plan3.values(425) == 2000.0);  // oven untouched inside the window
}

TEST_CASE("experiment configs load from json with relative paths") {
  const auto dir = make_temp_dir("config");
  write_text_file(dir / "config.json", R"({
    "dataset": "ds",
    "out": "out",
    "seed": 7,
    "iterations": 3,
    "executions": 2,
    "plans_per_agent": 5,
    "mechanisms": ["uniform", "top-ranked"],
    "lambdas": ["consumer", 0.5],
    "scenarios": [
      {"kind": "exclude", "appliances": ["oven", "kettle"]},
      {"kind": "reduced_adoption", "percent": 30}
    ]
  })");
  const ExperimentConfig cfg = load_experiment_config(dir / "config.json");
  CHECK(cfg.dataset == dir / "ds");
  CHECK(cfg.out == dir / "out");
  CHECK(cfg.seed == 7);
  CHECK(cfg.iterations == 3);
  CHECK(cfg.executions == 2);
  CHECK(cfg.policy.plans_per_agent == 5);
  REQUIRE(cfg.mechanisms.size() == 2);
  CHECK(cfg.mechanisms[0] == SamplingMechanism::uniform);
  CHECK(cfg.mechanisms[1] == SamplingMechanism::top_ranked);
  REQUIRE(cfg.lambdas.size() == 2);
  CHECK(cfg.lambdas[0] == lambda_consumer());
  CHECK(cfg.lambdas[1] == lambda_fixed(0.5));
  REQUIRE(cfg.scenarios.size() == 2);
  CHECK(cfg.scenarios[0].kind == Scenario::Kind::exclude);
  CHECK(cfg.scenarios[0].excluded ==
        std::vector<Appliance>{Appliance::kettle, Appliance::oven});
  CHECK(cfg.scenarios[1].kind == Scenario::Kind::reduced_adoption);
  CHECK(cfg.scenarios[1].reduced_percent == 30.0);
}

TEST_CASE("bad experiment configs are rejected") {
  const auto dir = make_temp_dir("badconfig");
  auto expect_throw = [&](const std::string& text) {
    write_text_file(dir / "bad.json", text);
    CHECK_THROWS_AS(load_experiment_config(dir / "bad.json"), Error);
  };
  expect_throw("{}");                                    // no dataset
  expect_throw("{]");                                    // not json
  expect_throw(R"({"dataset":"d","mechanisms":["?"]})"); // unknown mechanism
  expect_throw(R"({"dataset":"d","lambdas":[2.0]})");    // lambda out of range
  expect_throw(R"({"dataset":"d","scenarios":[{"kind":"?"}]})");
  expect_throw(R"({"dataset":"d","scenarios":[{"kind":"exclude"}]})");
  expect_throw(R"({"dataset":"d","executions":0})");
  expect_throw(R"({"dataset":"d","mechanisms":[]})");
}

TEST_CASE("fully selfish runs keep everyone on their preferred plan") {
  const CellResult& cell = find_cell(Scenario::Kind::baseline, 1.0);
  CHECK(cell.runs.size() == 2u * 2u);  // days x executions
  for (const auto& [day, n] : cell.agent_count) CHECK(n == 8);
  for (const RunRecord& run : cell.runs) {
    CHECK(run.final_avg_discomfort() == 0.0);
    CHECK(run.final_unfairness() == 0.0);
    CHECK(run.final_aggregate == cell.baseline.at(run.day));
    CHECK(run.final_variance() ==
          population_variance(cell.baseline.at(run.day)));
  }
}

TEST_CASE("cooperation does not increase demand variance") {
  const CellResult& coop = find_cell(Scenario::Kind::baseline, 0.0);
  const CellResult& selfish = find_cell(Scenario::Kind::baseline, 1.0);
  CHECK(coop.mean_final_variance() <=
        selfish.mean_final_variance() * (1.0 + 1e-12));
}

TEST_CASE("with no flexibility anywhere the series stays flat") {
  for (double lambda : {0.0, 1.0}) {
    const CellResult& cell = find_cell(Scenario::Kind::exclude, lambda);
    for (const RunRecord& run : cell.runs) {
      for (Eigen::Index t = 0; t < run.metrics.variance.size(); ++t) {
        CHECK(run.metrics.variance(t) == run.metrics.variance(0));
      }
      CHECK(run.final_avg_discomfort() == 0.0);
    }
  }
}

TEST_CASE("plan shifting preserves total energy") {
  for (const CellResult& cell : bundle().result.cells) {
    for (const RunRecord& run : cell.runs) {
      const double base = cell.baseline.at(run.day).sum();
      CHECK(run.final_total_energy == doctest::Approx(base).epsilon(1e-9));
    }
  }
}

TEST_CASE("the efficient kettle saves exactly the windowed fraction") {
  const Bundle& b = bundle();
  const auto consumers =
      resolve_consumers(b.dataset, lambda_fixed(0.0),
                        default_reference_households(), default_power_config());
  std::map<std::string, double> kettle_watts;
  for (const auto& c : consumers) {
    kettle_watts[c.id] = c.draw_watts.at(Appliance::kettle);
  }

  std::map<int, double> expected_drop;
  constexpr std::pair<int, int> windows[2] = {
      {kKettleMorningStart, kKettleMorningEnd},
      {kKettleEveningStart, kKettleEveningEnd},
  };
  for (const auto& row : b.dataset.schedules) {
    if (row.schedule.appliance != Appliance::kettle) continue;
    const int begin = row.schedule.start;
    const int end = begin + row.schedule.duration;
    for (const auto& [w_begin, w_end] : windows) {
      const int overlap =
          std::max(0, std::min(end, w_end) - std::max(begin, w_begin));
      expected_drop[row.day] +=
          overlap * kettle_watts.at(row.consumer_id) * kDefaultKettleSavings;
    }
  }

  const CellResult& frozen = find_cell(Scenario::Kind::exclude, 0.0);
  const CellResult& efficient =
      find_cell(Scenario::Kind::efficient_kettle, 0.0);
  REQUIRE(frozen.runs.size() == efficient.runs.size());
  double total_drop = 0.0;
  for (std::size_t i = 0; i < frozen.runs.size(); ++i) {
    REQUIRE(frozen.runs[i].day == efficient.runs[i].day);
    const double drop = frozen.runs[i].final_total_energy -
                        efficient.runs[i].final_total_energy;
    CHECK(drop ==
          doctest::Approx(expected_drop[frozen.runs[i].day]).epsilon(1e-9));
    total_drop += drop;
  }
  CHECK(total_drop > 0.0);  // the synthetic days do use the kettle at peak
}

TEST_CASE("full opt-out behaves exactly like a selfish population") {
  const CellResult& reduced = find_cell(Scenario::Kind::reduced_adoption, 0.0);
  const CellResult& selfish = find_cell(Scenario::Kind::baseline, 1.0);
  REQUIRE(reduced.runs.size() == selfish.runs.size());
  for (std::size_t i = 0; i < reduced.runs.size(); ++i) {
    CHECK(reduced.runs[i].final_aggregate == selfish.runs[i].final_aggregate);
    CHECK(reduced.runs[i].final_variance() == selfish.runs[i].final_variance());
  }
}

TEST_CASE("result directories are reproducible byte for byte") {
  const Bundle& b = bundle();
  const auto out_a = make_temp_dir("out_a");
  const auto out_b = make_temp_dir("out_b");
  write_experiment(b.result, b.config, out_a);
  write_experiment(b.result, b.config, out_b);
  const auto tree_a = slurp_tree(out_a);
  const auto tree_b = slurp_tree(out_b);
  CHECK(tree_a == tree_b);
  CHECK(tree_a.count("manifest.json") == 1);

  const std::string cell_dir = "baseline/top-ranked/lambda_1";
  CHECK(tree_a.count(cell_dir + "/manifest.json") == 1);
  CHECK(tree_a.count(cell_dir + "/iterations_d1_r0.csv") == 1);
  CHECK(tree_a.count(cell_dir + "/iterations_d2_r1.csv") == 1);
  CHECK(tree_a.count(cell_dir + "/aggregate_demand_d1.csv") == 1);

  // summary has one row per day plus the overall row
  const CsvTable summary =
      parse_csv(tree_a.at(cell_dir + "/summary.csv"), "summary.csv");
  CHECK(summary.rows.size() == 3);
  CHECK(summary.rows.back().at(0) == "overall");
  CHECK(summary.column("variance_mean") >= 0);

  // iteration series: rows 0..iterations
  const CsvTable series = parse_csv(
      tree_a.at(cell_dir + "/iterations_d1_r0.csv"), "iterations.csv");
  CHECK(series.rows.size() ==
        static_cast<std::size_t>(b.config.iterations) + 1);
}

TEST_CASE("rerunning the experiment reproduces the same numbers") {
  const Bundle& b = bundle();
  ExperimentResult again = run_experiment(b.config);
  REQUIRE(again.cells.size() == b.result.cells.size());
  for (std::size_t i = 0; i < again.cells.size(); ++i) {
    REQUIRE(again.cells[i].runs.size() == b.result.cells[i].runs.size());
    for (std::size_t r = 0; r < again.cells[i].runs.size(); ++r) {
      CHECK(again.cells[i].runs[r].final_aggregate ==
            b.result.cells[i].runs[r].final_aggregate);
    }
  }
}

}  // TEST_SUITE
