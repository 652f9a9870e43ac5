#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flexgrid/domain.hpp"

namespace flexgrid {

// One reference household with metered annual appliance consumption.
// Appliances absent from the metering study are simply missing from the map.
struct ReferenceHousehold {
  int id = 0;
  int occupancy = 0;
  std::optional<double> year_built;  // midpoint of ranged survey answers
  HouseType house_type = HouseType::other;
  int bedrooms = 0;
  std::map<Appliance, double> annual_kwh;

  bool operator==(const ReferenceHousehold&) const = default;
};

// Reference households ranked by similarity, best first; ties broken by id.
struct MatchResult {
  std::vector<std::pair<int, double>> ranking;  // (household id, score)
};

// Conversion knobs from annual kWh to an in-use draw, per appliance.
struct AppliancePower {
  double assumed_annual_hours = 0.0;  // hours the appliance runs per year
  double fallback_watts = 0.0;        // used when no reference has data
};

using PowerConfig = std::map<Appliance, AppliancePower>;

const std::vector<ReferenceHousehold>& default_reference_households();
const PowerConfig& default_power_config();

std::vector<ReferenceHousehold> load_reference_households(
    const std::filesystem::path& csv);
PowerConfig load_power_config(const std::filesystem::path& csv);

// Weighted attribute similarity: occupancy 0.533, size (bedrooms) 0.267,
// house type 0.133, built year 0.067. Occupancy and bedroom differences are
// normalized by the spread observed in `references`; a built year missing on
// either side contributes zero similarity.
double household_similarity(const HouseholdInfo& a, const ReferenceHousehold& b,
                            std::span<const ReferenceHousehold> references);

MatchResult match_household(const HouseholdInfo& household,
                            std::span<const ReferenceHousehold> references);

// Wattage for one appliance: walk the ranking until a reference has metered
// kWh for it, convert via assumed annual usage hours, otherwise fall back to
// the configured default draw.
double appliance_draw(const MatchResult& match, Appliance appliance,
                      std::span<const ReferenceHousehold> references,
                      const PowerConfig& power);

}  // namespace flexgrid
