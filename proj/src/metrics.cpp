#include "flexgrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flexgrid {

double population_variance(Eigen::Ref<const Eigen::VectorXd> v) {
  if (v.size() == 0) {
    raise(ErrorCode::empty_input, "variance of an empty vector");
  }
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

double global_cost(Eigen::Ref<const Eigen::VectorXd> aggregate_demand) {
  if (aggregate_demand.size() != kMinutesPerDay) {
    raise(ErrorCode::dimension_mismatch,
          "global_cost: aggregate must have " + std::to_string(kMinutesPerDay) +
              " slots, got " + std::to_string(aggregate_demand.size()));
  }
  return population_variance(aggregate_demand);
}

double average_discomfort(Eigen::Ref<const Eigen::VectorXd> discomforts) {
  if (discomforts.size() == 0) {
    raise(ErrorCode::empty_input, "average_discomfort: no selections");
  }
  return discomforts.mean();
}

double average_discomfort(std::span<const Plan> selected) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(selected.size()));
  for (std::size_t i = 0; i < selected.size(); ++i) {
    d(static_cast<Eigen::Index>(i)) = selected[i].discomfort;
  }
  return average_discomfort(d);
}

double unfairness(Eigen::Ref<const Eigen::VectorXd> discomforts) {
  if (discomforts.size() == 0) {
    raise(ErrorCode::empty_input, "unfairness: no selections");
  }
  const double mean = discomforts.mean();
  const double mean_sq = discomforts.array().square().mean();
  // max() guards the tiny negative residue cancellation can leave behind
  return std::sqrt(std::max(0.0, mean_sq - mean * mean));
}

double unfairness(std::span<const Plan> selected) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(selected.size()));
  for (std::size_t i = 0; i < selected.size(); ++i) {
    d(static_cast<Eigen::Index>(i)) = selected[i].discomfort;
  }
  return unfairness(d);
}

double peak_shift(Eigen::Ref<const Eigen::VectorXd> baseline,
                  Eigen::Ref<const Eigen::VectorXd> coordinated,
                  int window_start, int window_end) {
  if (baseline.size() != coordinated.size()) {
    raise(ErrorCode::dimension_mismatch,
          "peak_shift: baseline and coordinated differ in length");
  }
  if (window_start < 0 || window_end > baseline.size() ||
      window_start >= window_end) {
    raise(ErrorCode::validation_error, "peak_shift: bad window");
  }
  const int len = window_end - window_start;
  const double base = baseline.segment(window_start, len).sum();
  const double coord = coordinated.segment(window_start, len).sum();
  if (base == 0.0) {
    raise(ErrorCode::zero_baseline_peak,
          "peak_shift: no baseline demand inside the window");
  }
  return (base - coord) / base;
}

}  // namespace flexgrid
