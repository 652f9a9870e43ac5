#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "flexgrid/domain.hpp"

namespace flexgrid {

// One time-shifted realization of a schedule, kept compact (shift only) until
// materialized into a 1440-slot vector.
struct ShiftPlan {
  int shift = 0;
  double discomfort = 0.0;  // |shift| / flexibility, 0 for inflexible
};

// All 2f+1 admissible plans of one schedule, ordered by increasing
// discomfort; among the two plans of equal discomfort the earlier start
// comes first.
struct GeneratedPlanSpace {
  Schedule schedule;
  double watts = 0.0;  // draw during each active minute
  std::vector<ShiftPlan> plans;

  std::size_t size() const { return plans.size(); }
};

GeneratedPlanSpace generate_plans(const Schedule& s, double watts);

Plan materialize(const GeneratedPlanSpace& space, std::size_t index);

inline constexpr std::int64_t kDefaultCombinationCap = 1'000'000;

// Cartesian product of the per-appliance plan spaces of one consumer-day.
// Row i of `shifts` holds the per-component shifts of combined plan i, and
// discomforts(i) their arithmetic mean. Rows are ordered by increasing
// discomfort, ties broken lexicographically by the shift tuple.
struct CombinedPlanSpace {
  std::vector<Schedule> schedules;  // component order
  std::vector<double> watts;
  Eigen::MatrixXi shifts;      // plans x components
  Eigen::VectorXd discomforts;

  Eigen::Index size() const { return shifts.rows(); }
  Eigen::Index components() const { return shifts.cols(); }
};

CombinedPlanSpace combine_plans(std::span<const GeneratedPlanSpace> spaces,
                                std::int64_t cap = kDefaultCombinationCap);

Plan materialize(const CombinedPlanSpace& space, Eigen::Index row);

// Active interval [start, end) of one component of one combined plan.
std::pair<int, int> component_interval(const CombinedPlanSpace& space,
                                       Eigen::Index row, Eigen::Index component);

// Pure: returns a copy with every combined plan that violates a constraint
// dropped; row order is preserved.
CombinedPlanSpace filter_constraints(const CombinedPlanSpace& space,
                                     std::span<const Constraint> constraints);

}  // namespace flexgrid
