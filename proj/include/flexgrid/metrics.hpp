#pragma once

#include <Eigen/Core>
#include <span>

#include "flexgrid/domain.hpp"

namespace flexgrid {

// Evening peak window [17:00, 21:00) used for peak-shift reporting.
inline constexpr int kPeakWindowStart = 17 * 60;
inline constexpr int kPeakWindowEnd = 21 * 60;

// Population variance (divide by N) of any vector; the quantity the engine
// minimizes when applied to the 1440-slot aggregate.
double population_variance(Eigen::Ref<const Eigen::VectorXd> v);

// Same, but insists on a full-day aggregate.
double global_cost(Eigen::Ref<const Eigen::VectorXd> aggregate_demand);

// Mean of the agents' selected-plan discomforts.
double average_discomfort(Eigen::Ref<const Eigen::VectorXd> discomforts);
double average_discomfort(std::span<const Plan> selected);

// Population standard deviation of the selected-plan discomforts: 0 when the
// burden of shifting is spread evenly.
double unfairness(Eigen::Ref<const Eigen::VectorXd> discomforts);
double unfairness(std::span<const Plan> selected);

// Fractional reduction of demand inside [window_start, window_end):
// (baseline - coordinated) / baseline, computed on window sums.
double peak_shift(Eigen::Ref<const Eigen::VectorXd> baseline,
                  Eigen::Ref<const Eigen::VectorXd> coordinated,
                  int window_start = kPeakWindowStart,
                  int window_end = kPeakWindowEnd);

// Per-iteration series of one engine run; row t describes the state after
// iteration t, row 0 the pre-coordination bootstrap.
struct RunMetrics {
  Eigen::VectorXd variance;
  Eigen::VectorXd avg_discomfort;
  Eigen::VectorXd unfairness;

  Eigen::Index iterations() const { return variance.size() - 1; }
};

}  // namespace flexgrid
