#include <algorithm>
#include <cmath>

#include "flexgrid/dataset.hpp"
#include "flexgrid/rng.hpp"

namespace flexgrid {

// Shaped after the field study: shares of schedules per appliance, mean
// durations, mean flexibilities (plans per schedule give 2f+1), and the
// morning/mid-day/evening placement of each appliance's usage.
std::map<Appliance, ApplianceMix> default_appliance_mix() {
  using A = Appliance;
  return {
      {A::computer, {0.1476, 300.0, 50.0, {0.258, 0.419, 0.323}}},
      {A::dish_washer, {0.0952, 46.0, 53.0, {0.050, 0.075, 0.875}}},
      {A::hob, {0.1047, 37.0, 74.0, {0.045, 0.409, 0.546}}},
      {A::kettle, {0.1904, 16.0, 36.0, {0.463, 0.225, 0.312}}},
      {A::oven, {0.2309, 52.0, 51.0, {0.278, 0.196, 0.526}}},
      {A::tumble_dryer, {0.0357, 78.0, 72.0, {0.133, 0.667, 0.200}}},
      {A::washing_machine, {0.1952, 101.0, 70.0, {0.146, 0.256, 0.598}}},
  };
}

namespace {

// Day segments used for schedule placement: [00:00, 09:00), [09:00, 17:00),
// [17:00, 24:00).
constexpr int kSegmentBounds[4] = {0, 540, 1020, kMinutesPerDay};

std::size_t pick_weighted(std::mt19937_64& rng, std::span<const double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (u < w[i]) return i;
    u -= w[i];
  }
  return w.size() - 1;
}

int positive_normal(std::mt19937_64& rng, double mean, double sd, int lo,
                    int hi) {
  const double x = mean + sd * normal01(rng);
  return std::clamp(static_cast<int>(std::lround(x)), lo, hi);
}

std::int64_t plan_product(const std::vector<Schedule>& schedules,
                          std::int64_t cap) {
  std::int64_t total = 1;
  for (const auto& s : schedules) {
    const std::int64_t n = 2 * static_cast<std::int64_t>(s.flexibility) + 1;
    if (total > (cap + 1) / n) return cap + 1;  // saturate past the cap
    total *= n;
  }
  return total;
}

std::string consumer_name(int index, int total) {
  int width = 1;
  for (int x = total; x >= 10; x /= 10) ++width;
  std::string digits = std::to_string(index + 1);
  return "c" + std::string(width - static_cast<int>(digits.size()), '0') +
         digits;
}

}  // namespace

Dataset synth_dataset(const SynthSpec& spec) {
  if (spec.consumers < 1 || spec.days < 1) {
    raise(ErrorCode::validation_error,
          "synth: consumers and days must be >= 1");
  }
  if (spec.max_schedules_per_day < 1 || spec.schedules_per_day <= 0.0) {
    raise(ErrorCode::validation_error, "synth: bad schedule frequency");
  }
  if (spec.combination_cap < 1) {
    raise(ErrorCode::validation_error, "synth: bad combination cap");
  }

  std::vector<Appliance> appliances;
  std::vector<double> shares;
  for (const auto& [a, mix] : spec.mix) {
    appliances.push_back(a);
    shares.push_back(mix.schedule_share);
  }
  if (appliances.empty()) {
    raise(ErrorCode::empty_input, "synth: appliance mix is empty");
  }

  const double p7_weights[5] = {0.098, 0.216, 0.275, 0.353, 0.058};
  const double occupancy_weights[6] = {0.15, 0.35, 0.20, 0.20, 0.07, 0.03};
  const double bedroom_weights[5] = {0.10, 0.30, 0.35, 0.20, 0.05};
  const HouseType types[5] = {HouseType::apartment, HouseType::semi_detached,
                              HouseType::detached, HouseType::mid_terrace,
                              HouseType::other};
  const double type_weights[5] = {0.45, 0.20, 0.15, 0.10, 0.10};

  std::mt19937_64 rng(substream_seed(spec.seed, "synth"));
  Dataset d;
  for (int ci = 0; ci < spec.consumers; ++ci) {
    ConsumerInfo info;
    info.id = consumer_name(ci, spec.consumers);
    info.p7_answer = static_cast<int>(pick_weighted(rng, p7_weights));
    HouseholdInfo h;
    h.occupancy = static_cast<int>(pick_weighted(rng, occupancy_weights)) + 1;
    h.bedrooms = static_cast<int>(pick_weighted(rng, bedroom_weights)) + 1;
    h.house_type = types[pick_weighted(rng, type_weights)];
    h.year_built = static_cast<double>(1900 + uniform_int(rng, 0, 110));
    info.household = h;
    d.consumers.push_back(std::move(info));

    for (int day = 1; day <= spec.days; ++day) {
      const int count = std::clamp(poisson_draw(rng, spec.schedules_per_day),
                                   1, spec.max_schedules_per_day);
      std::vector<Schedule> schedules;
      for (int i = 0; i < count; ++i) {
        const Appliance a = appliances[pick_weighted(rng, shares)];
        const ApplianceMix& mix = spec.mix.at(a);
        Schedule s;
        s.appliance = a;
        s.duration = positive_normal(rng, mix.mean_duration,
                                     0.3 * mix.mean_duration, 5, 480);
        const int seg = static_cast<int>(pick_weighted(rng, mix.segment_share));
        const int seg_lo = kSegmentBounds[seg];
        const int seg_hi = kSegmentBounds[seg + 1];
        const int start_hi = std::min(seg_hi, kMinutesPerDay - s.duration) - 1;
        s.start = seg_lo <= start_hi ? uniform_int(rng, seg_lo, start_hi)
                                     : kMinutesPerDay - s.duration;
        const int flex = positive_normal(rng, mix.mean_flexibility,
                                         0.5 * mix.mean_flexibility, 0, 360);
        s.flexibility = std::min(
            {flex, s.start, kMinutesPerDay - s.duration - s.start});
        schedules.push_back(s);
      }
      // Trim the largest flexibility until the day's combined plan space
      // fits under the cap.
      while (plan_product(schedules, spec.combination_cap) >
             spec.combination_cap) {
        auto widest = std::max_element(
            schedules.begin(), schedules.end(),
            [](const Schedule& a, const Schedule& b) {
              return a.flexibility < b.flexibility;
            });
        widest->flexibility /= 2;
      }
      for (const Schedule& s : schedules) {
        d.schedules.push_back({d.consumers.back().id, day, s});
      }
    }
  }
  validate_dataset(d);
  return d;
}

}  // namespace flexgrid
