#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flexgrid {

enum class ErrorCode {
  start_underflow,        // schedule can be shifted before minute 0
  horizon_overflow,       // schedule can run past end of day
  non_positive_duration,
  negative_flexibility,
  empty_input,
  plan_space_too_large,   // combination product exceeds the configured cap
  empty_plan_space,
  dimension_mismatch,
  zero_baseline_peak,
  unknown_appliance,
  parse_error,
  validation_error,
  missing_profile_data,
  dataset_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace flexgrid
