#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexgrid/error.hpp"

namespace flexgrid {

inline constexpr int kSlotMinutes = 1;  // time granularity of the horizon
inline constexpr int kMinutesPerDay = 24 * 60;

enum class Appliance {
  computer,
  dish_washer,
  hob,
  kettle,
  oven,
  tumble_dryer,
  washing_machine,
};

inline constexpr std::array<Appliance, 7> kAllAppliances = {
    Appliance::computer,     Appliance::dish_washer, Appliance::hob,
    Appliance::kettle,       Appliance::oven,        Appliance::tumble_dryer,
    Appliance::washing_machine,
};

std::string_view to_string(Appliance a);
std::optional<Appliance> parse_appliance(std::string_view name);

// One appliance-usage request of a consumer-day: preferred start minute s,
// duration d and flexibility f (maximum shift in either direction), all in
// minutes of the 1440-minute horizon.
struct Schedule {
  Appliance appliance = Appliance::kettle;
  int start = 0;
  int duration = 0;
  int flexibility = 0;

  bool operator==(const Schedule&) const = default;
};

// nullopt when valid, otherwise the first violated rule.
std::optional<ErrorCode> validate_schedule(const Schedule& s);
void ensure_valid(const Schedule& s);  // throws Error

// A concrete 1440-slot consumption vector realizing one or more schedules at
// specific shifts. Slot values are watts drawn during that minute.
struct Plan {
  Eigen::VectorXd values;   // length kMinutesPerDay
  std::vector<int> shifts;  // one entry per component schedule
  double discomfort = 0.0;  // in [0, 1]

  double total_energy() const { return values.sum(); }
  int shift() const;  // single-component convenience; asserts one component
};

// The candidate plans one agent brings to the coordination engine. Columns of
// `plans` are 1440-slot vectors sorted by increasing discomfort.
struct AgentPlanSet {
  std::string agent_id;
  Eigen::MatrixXd plans;        // kMinutesPerDay x k
  Eigen::VectorXd discomforts;  // k, ascending
  double lambda = 0.0;          // 0 = fully cooperative, 1 = fully selfish
  // column holding the zero-shift plan, when it survived sampling
  std::optional<Eigen::Index> preferred_column;

  Eigen::Index size() const { return plans.cols(); }
};

struct Constraint {
  enum class Kind { no_overlap, forbidden_window };

  Kind kind = Kind::no_overlap;
  Appliance appliance_a = Appliance::kettle;
  Appliance appliance_b = Appliance::kettle;  // no_overlap only
  int window_start = 0;                       // forbidden_window only, [start, end)
  int window_end = 0;

  bool operator==(const Constraint&) const = default;
};

Constraint no_overlap(Appliance a, Appliance b);
Constraint forbidden_window(Appliance a, int window_start, int window_end);

enum class HouseType { apartment, detached, semi_detached, mid_terrace, other };

std::string_view to_string(HouseType t);
std::optional<HouseType> parse_house_type(std::string_view name);

struct HouseholdInfo {
  int occupancy = 1;
  int bedrooms = 1;
  HouseType house_type = HouseType::other;
  std::optional<double> year_built;  // midpoint for ranged survey answers

  bool operator==(const HouseholdInfo&) const = default;
};

}  // namespace flexgrid
