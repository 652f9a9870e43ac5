#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexgrid/domain.hpp"
#include "flexgrid/plan_generation.hpp"
#include "flexgrid/profiles.hpp"

namespace flexgrid {

struct ConsumerInfo {
  std::string id;
  std::optional<int> p7_answer;  // survey cooperation answer, 0..4
  std::optional<HouseholdInfo> household;

  bool operator==(const ConsumerInfo&) const = default;
};

struct ScheduleRow {
  std::string consumer_id;
  int day = 0;
  Schedule schedule;

  bool operator==(const ScheduleRow&) const = default;
};

struct ConstraintRow {
  std::string consumer_id;
  Constraint constraint;

  bool operator==(const ConstraintRow&) const = default;
};

// A multi-day collection of consumer schedules plus optional survey metadata
// and per-consumer constraints. On disk this is a directory with
// schedules.csv and optional consumers.csv / constraints.csv; a bare .csv
// path is treated as schedules-only.
struct Dataset {
  std::vector<ScheduleRow> schedules;
  std::vector<ConsumerInfo> consumers;
  std::vector<ConstraintRow> constraints;

  bool operator==(const Dataset&) const = default;

  std::vector<int> days() const;                 // sorted, unique
  std::vector<std::string> consumer_ids() const; // file/appearance order
  const ConsumerInfo* consumer(const std::string& id) const;
};

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Throws on the first inconsistency (invalid schedule, bad survey answer,
// constraint for an unknown consumer, duplicate consumer rows).
void validate_dataset(const Dataset& dataset);

// Survey cooperation answer 0..4 to the engine's lambda: 0 = fully
// cooperative, 4 = fully selfish.
double lambda_from_p7(int answer);

// How per-agent lambda is chosen for a run.
struct LambdaMode {
  bool per_consumer = true;  // from each consumer's survey answer
  double fixed = 0.0;        // system-wide value otherwise

  bool operator==(const LambdaMode&) const = default;
};

LambdaMode lambda_consumer();
LambdaMode lambda_fixed(double value);
std::optional<LambdaMode> parse_lambda_mode(std::string_view text);
std::string to_string(const LambdaMode& mode);

struct ResolvedConsumer {
  std::string id;
  double lambda = 0.0;
  std::map<Appliance, double> draw_watts;
};

// Per-consumer lambda and appliance draws, computed once per dataset via
// profile matching (or fallback draws for consumers without household info).
std::vector<ResolvedConsumer> resolve_consumers(
    const Dataset& dataset, const LambdaMode& mode,
    std::span<const ReferenceHousehold> references, const PowerConfig& power);

// Synthetic dataset generation, shaped like the field study: per-appliance
// schedule frequencies, durations, flexibilities and time-of-day placement
// follow the collected distribution.
struct ApplianceMix {
  double schedule_share = 0.0;   // fraction of all schedules
  double mean_duration = 0.0;    // minutes
  double mean_flexibility = 0.0; // minutes
  // share of schedules starting in [00:00,09:00), [09:00,17:00), [17:00,24:00)
  std::array<double, 3> segment_share{};
};

std::map<Appliance, ApplianceMix> default_appliance_mix();

struct SynthSpec {
  int consumers = 51;
  int days = 4;
  std::uint64_t seed = 0;
  double schedules_per_day = 2.07;      // Poisson mean per consumer-day
  int max_schedules_per_day = 3;
  // keep each consumer-day's combined plan space comfortably materializable
  std::int64_t combination_cap = kDefaultCombinationCap / 2;
  std::map<Appliance, ApplianceMix> mix = default_appliance_mix();
};

Dataset synth_dataset(const SynthSpec& spec);

}  // namespace flexgrid
