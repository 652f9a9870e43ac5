#include "flexgrid/plan_generation.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace flexgrid {

GeneratedPlanSpace generate_plans(const Schedule& s, double watts) {
  ensure_valid(s);
  if (!(watts > 0.0)) {
    raise(ErrorCode::validation_error, "appliance draw must be positive");
  }
  GeneratedPlanSpace space;
  space.schedule = s;
  space.watts = watts;
  space.plans.reserve(2 * static_cast<std::size_t>(s.flexibility) + 1);
  space.plans.push_back({0, 0.0});
  for (int m = 1; m <= s.flexibility; ++m) {
    const double discomfort = static_cast<double>(m) / s.flexibility;
    space.plans.push_back({-m, discomfort});
    space.plans.push_back({+m, discomfort});
  }
  return space;
}

namespace {

void add_interval(Eigen::VectorXd& values, int start, int duration,
                  double watts) {
  values.segment(start, duration).array() += watts;
}

}  // namespace

Plan materialize(const GeneratedPlanSpace& space, std::size_t index) {
  assert(index < space.plans.size());
  const ShiftPlan& sp = space.plans[index];
  Plan p;
  p.values = Eigen::VectorXd::Zero(kMinutesPerDay);
  add_interval(p.values, space.schedule.start + sp.shift,
               space.schedule.duration, space.watts);
  p.shifts = {sp.shift};
  p.discomfort = sp.discomfort;
  return p;
}

CombinedPlanSpace combine_plans(std::span<const GeneratedPlanSpace> spaces,
                                std::int64_t cap) {
  if (spaces.empty()) {
    raise(ErrorCode::empty_input, "combine_plans: no plan spaces given");
  }
  if (cap <= 0) {
    raise(ErrorCode::validation_error, "combine_plans: cap must be positive");
  }
  std::int64_t total = 1;
  for (const auto& s : spaces) {
    if (s.plans.empty()) {
      raise(ErrorCode::empty_input, "combine_plans: empty component space");
    }
    const auto n = static_cast<std::int64_t>(s.plans.size());
    if (total > cap / n) {
      raise(ErrorCode::plan_space_too_large,
            "combined plan count exceeds cap of " + std::to_string(cap));
    }
    total *= n;
  }

  const auto m = static_cast<Eigen::Index>(spaces.size());
  CombinedPlanSpace out;
  out.schedules.reserve(spaces.size());
  out.watts.reserve(spaces.size());
  for (const auto& s : spaces) {
    out.schedules.push_back(s.schedule);
    out.watts.push_back(s.watts);
  }

  Eigen::MatrixXi shifts(total, m);
  Eigen::VectorXd discomforts(total);
  std::vector<std::size_t> odometer(spaces.size(), 0);
  for (std::int64_t row = 0; row < total; ++row) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const ShiftPlan& sp = spaces[j].plans[odometer[j]];
      shifts(row, j) = sp.shift;
      sum += sp.discomfort;
    }
    discomforts(row) = sum / static_cast<double>(m);
    for (Eigen::Index j = m - 1; j >= 0; --j) {
      if (++odometer[j] < spaces[j].plans.size()) break;
      odometer[j] = 0;
    }
  }

  // Order by discomfort; break ties on the shift tuple so the ordering is
  // total and reproducible.
  std::vector<std::int64_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t a, std::int64_t b) {
                     if (discomforts(a) != discomforts(b))
                       return discomforts(a) < discomforts(b);
                     for (Eigen::Index j = 0; j < m; ++j) {
                       if (shifts(a, j) != shifts(b, j))
                         return shifts(a, j) < shifts(b, j);
                     }
                     return false;
                   });

  out.shifts.resize(total, m);
  out.discomforts.resize(total);
  for (std::int64_t row = 0; row < total; ++row) {
    out.shifts.row(row) = shifts.row(order[row]);
    out.discomforts(row) = discomforts(order[row]);
  }
  return out;
}

Plan materialize(const CombinedPlanSpace& space, Eigen::Index row) {
  assert(row >= 0 && row < space.size());
  Plan p;
  p.values = Eigen::VectorXd::Zero(kMinutesPerDay);
  p.shifts.resize(space.schedules.size());
  for (Eigen::Index j = 0; j < space.components(); ++j) {
    const Schedule& s = space.schedules[j];
    const int shift = space.shifts(row, j);
    add_interval(p.values, s.start + shift, s.duration, space.watts[j]);
    p.shifts[j] = shift;
  }
  p.discomfort = space.discomforts(row);
  return p;
}

std::pair<int, int> component_interval(const CombinedPlanSpace& space,
                                       Eigen::Index row,
                                       Eigen::Index component) {
  const Schedule& s = space.schedules[component];
  const int start = s.start + space.shifts(row, component);
  return {start, start + s.duration};
}

namespace {

bool overlaps(std::pair<int, int> a, std::pair<int, int> b) {
  return a.first < b.second && b.first < a.second;
}

bool violates(const CombinedPlanSpace& space, Eigen::Index row,
              const Constraint& c) {
  const Eigen::Index m = space.components();
  if (c.kind == Constraint::Kind::forbidden_window) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (space.schedules[j].appliance != c.appliance_a) continue;
      if (overlaps(component_interval(space, row, j),
                   {c.window_start, c.window_end}))
        return true;
    }
    return false;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (space.schedules[j].appliance != c.appliance_a) continue;
    for (Eigen::Index l = 0; l < m; ++l) {
      if (l == j || space.schedules[l].appliance != c.appliance_b) continue;
      if (overlaps(component_interval(space, row, j),
                   component_interval(space, row, l)))
        return true;
    }
  }
  return false;
}

}  // namespace

CombinedPlanSpace filter_constraints(const CombinedPlanSpace& space,
                                     std::span<const Constraint> constraints) {
  std::vector<Eigen::Index> keep;
  keep.reserve(space.size());
  for (Eigen::Index row = 0; row < space.size(); ++row) {
    bool ok = true;
    for (const Constraint& c : constraints) {
      if (violates(space, row, c)) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(row);
  }

  CombinedPlanSpace out;
  out.schedules = space.schedules;
  out.watts = space.watts;
  out.shifts.resize(static_cast<Eigen::Index>(keep.size()), space.components());
  out.discomforts.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.shifts.row(static_cast<Eigen::Index>(i)) = space.shifts.row(keep[i]);
    out.discomforts(static_cast<Eigen::Index>(i)) = space.discomforts(keep[i]);
  }
  return out;
}

}  // namespace flexgrid
