#include "flexgrid/domain.hpp"

#include <cassert>

namespace flexgrid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::start_underflow: return "start_underflow";
    case ErrorCode::horizon_overflow: return "horizon_overflow";
    case ErrorCode::non_positive_duration: return "non_positive_duration";
    case ErrorCode::negative_flexibility: return "negative_flexibility";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::plan_space_too_large: return "plan_space_too_large";
    case ErrorCode::empty_plan_space: return "empty_plan_space";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::zero_baseline_peak: return "zero_baseline_peak";
    case ErrorCode::unknown_appliance: return "unknown_appliance";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::missing_profile_data: return "missing_profile_data";
    case ErrorCode::dataset_error: return "dataset_error";
  }
  return "unknown_error";
}

std::string_view to_string(Appliance a) {
  switch (a) {
    case Appliance::computer: return "computer";
    case Appliance::dish_washer: return "dish_washer";
    case Appliance::hob: return "hob";
    case Appliance::kettle: return "kettle";
    case Appliance::oven: return "oven";
    case Appliance::tumble_dryer: return "tumble_dryer";
    case Appliance::washing_machine: return "washing_machine";
  }
  return "unknown";
}

std::optional<Appliance> parse_appliance(std::string_view name) {
  std::string canon(name);
  for (char& c : canon) {
    if (c == '-' || c == ' ') c = '_';
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  for (Appliance a : kAllAppliances) {
    if (canon == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<ErrorCode> validate_schedule(const Schedule& s) {
  if (s.duration <= 0) return ErrorCode::non_positive_duration;
  if (s.flexibility < 0) return ErrorCode::negative_flexibility;
  if (s.start - s.flexibility < 0) return ErrorCode::start_underflow;
  if (s.start + s.flexibility + s.duration > kMinutesPerDay)
    return ErrorCode::horizon_overflow;
  return std::nullopt;
}

void ensure_valid(const Schedule& s) {
  if (auto code = validate_schedule(s)) {
    raise(*code, std::string(to_string(*code)) + ": schedule <" +
                     std::string(to_string(s.appliance)) + ", start " +
                     std::to_string(s.start) + ", duration " +
                     std::to_string(s.duration) + ", flexibility " +
                     std::to_string(s.flexibility) + ">");
  }
}

int Plan::shift() const {
  assert(shifts.size() == 1);
  return shifts.front();
}

Constraint no_overlap(Appliance a, Appliance b) {
  Constraint c;
  c.kind = Constraint::Kind::no_overlap;
  c.appliance_a = a;
  c.appliance_b = b;
  return c;
}

Constraint forbidden_window(Appliance a, int window_start, int window_end) {
  if (window_start < 0 || window_end > kMinutesPerDay ||
      window_start >= window_end) {
    raise(ErrorCode::validation_error,
          "forbidden_window: bad window [" + std::to_string(window_start) +
              ", " + std::to_string(window_end) + ")");
  }
  Constraint c;
  c.kind = Constraint::Kind::forbidden_window;
  c.appliance_a = a;
  c.appliance_b = a;
  c.window_start = window_start;
  c.window_end = window_end;
  return c;
}

std::string_view to_string(HouseType t) {
  switch (t) {
    case HouseType::apartment: return "apartment";
    case HouseType::detached: return "detached";
    case HouseType::semi_detached: return "semi_detached";
    case HouseType::mid_terrace: return "mid_terrace";
    case HouseType::other: return "other";
  }
  return "other";
}

std::optional<HouseType> parse_house_type(std::string_view name) {
  std::string canon(name);
  for (char& c : canon) {
    if (c == '-' || c == ' ') c = '_';
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  for (HouseType t : {HouseType::apartment, HouseType::detached,
                      HouseType::semi_detached, HouseType::mid_terrace,
                      HouseType::other}) {
    if (canon == to_string(t)) return t;
  }
  return std::nullopt;
}

}  // namespace flexgrid
