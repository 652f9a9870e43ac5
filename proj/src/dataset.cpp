#include "flexgrid/dataset.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "flexgrid/csv.hpp"

namespace flexgrid {

std::vector<int> Dataset::days() const {
  std::set<int> uniq;
  for (const auto& row : schedules) uniq.insert(row.day);
  return {uniq.begin(), uniq.end()};
}

std::vector<std::string> Dataset::consumer_ids() const {
  std::vector<std::string> ids;
  ids.reserve(consumers.size());
  for (const auto& c : consumers) ids.push_back(c.id);
  return ids;
}

const ConsumerInfo* Dataset::consumer(const std::string& id) const {
  for (const auto& c : consumers) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

double lambda_from_p7(int answer) {
  if (answer < 0 || answer > 4) {
    raise(ErrorCode::validation_error,
          "survey cooperation answer must be 0..4, got " +
              std::to_string(answer));
  }
  return static_cast<double>(answer) / 4.0;
}

LambdaMode lambda_consumer() { return LambdaMode{true, 0.0}; }

LambdaMode lambda_fixed(double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    raise(ErrorCode::validation_error, "lambda must be in [0, 1]");
  }
  return LambdaMode{false, value};
}

std::optional<LambdaMode> parse_lambda_mode(std::string_view text) {
  if (text == "consumer") return lambda_consumer();
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size() || !(v >= 0.0 && v <= 1.0)) return std::nullopt;
    return lambda_fixed(v);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string to_string(const LambdaMode& mode) {
  if (mode.per_consumer) return "consumer";
  return format_double(mode.fixed);
}

namespace {

constexpr const char* kSchedulesFile = "schedules.csv";
constexpr const char* kConsumersFile = "consumers.csv";
constexpr const char* kConstraintsFile = "constraints.csv";

std::vector<ScheduleRow> parse_schedules(const CsvTable& table,
                                         const std::string& source) {
  const int c_id = table.column("consumer_id");
  const int c_day = table.column("day");
  const int c_app = table.column("appliance");
  const int c_start = table.column("start_minute");
  const int c_dur = table.column("duration_min");
  const int c_flex = table.column("flexibility_min");
  if (c_id < 0 || c_day < 0 || c_app < 0 || c_start < 0 || c_dur < 0 ||
      c_flex < 0) {
    raise(ErrorCode::parse_error,
          source +
              ": need columns consumer_id,day,appliance,start_minute,"
              "duration_min,flexibility_min");
  }
  std::vector<ScheduleRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::string ctx = source + " row " + std::to_string(i + 1);
    ScheduleRow row;
    row.consumer_id = r[c_id];
    if (row.consumer_id.empty()) {
      raise(ErrorCode::parse_error, ctx + ": empty consumer_id");
    }
    row.day = parse_int_field(r[c_day], ctx);
    const auto app = parse_appliance(r[c_app]);
    if (!app) {
      raise(ErrorCode::parse_error,
            ctx + ": unknown appliance '" + r[c_app] + "'");
    }
    row.schedule.appliance = *app;
    row.schedule.start = parse_int_field(r[c_start], ctx);
    row.schedule.duration = parse_int_field(r[c_dur], ctx);
    row.schedule.flexibility = parse_int_field(r[c_flex], ctx);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ConsumerInfo> parse_consumers(const CsvTable& table,
                                          const std::string& source) {
  const int c_id = table.column("consumer_id");
  if (c_id < 0) {
    raise(ErrorCode::parse_error, source + ": need column consumer_id");
  }
  const int c_p7 = table.column("p7_answer");
  const int c_occ = table.column("occupancy");
  const int c_beds = table.column("bedrooms");
  const int c_type = table.column("house_type");
  const int c_year = table.column("year_built");

  std::vector<ConsumerInfo> consumers;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::string ctx = source + " row " + std::to_string(i + 1);
    ConsumerInfo c;
    c.id = r[c_id];
    if (c.id.empty()) {
      raise(ErrorCode::parse_error, ctx + ": empty consumer_id");
    }
    if (c_p7 >= 0 && !r[c_p7].empty()) {
      c.p7_answer = parse_int_field(r[c_p7], ctx);
    }
    const bool has_household =
        c_occ >= 0 && c_beds >= 0 && c_type >= 0 && !r[c_occ].empty() &&
        !r[c_beds].empty() && !r[c_type].empty();
    if (has_household) {
      HouseholdInfo h;
      h.occupancy = parse_int_field(r[c_occ], ctx);
      h.bedrooms = parse_int_field(r[c_beds], ctx);
      const auto type = parse_house_type(r[c_type]);
      if (!type) {
        raise(ErrorCode::parse_error,
              ctx + ": unknown house type '" + r[c_type] + "'");
      }
      h.house_type = *type;
      if (c_year >= 0 && !r[c_year].empty()) {
        h.year_built = parse_double_field(r[c_year], ctx);
      }
      c.household = h;
    }
    consumers.push_back(std::move(c));
  }
  return consumers;
}

std::vector<ConstraintRow> parse_constraints(const CsvTable& table,
                                             const std::string& source) {
  const int c_id = table.column("consumer_id");
  const int c_kind = table.column("kind");
  const int c_a = table.column("appliance_a");
  const int c_b = table.column("appliance_b");
  const int c_ws = table.column("window_start");
  const int c_we = table.column("window_end");
  if (c_id < 0 || c_kind < 0 || c_a < 0 || c_b < 0 || c_ws < 0 || c_we < 0) {
    raise(ErrorCode::parse_error,
          source +
              ": need columns consumer_id,kind,appliance_a,appliance_b,"
              "window_start,window_end");
  }
  std::vector<ConstraintRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::string ctx = source + " row " + std::to_string(i + 1);
    ConstraintRow row;
    row.consumer_id = r[c_id];
    const auto a = parse_appliance(r[c_a]);
    if (!a) {
      raise(ErrorCode::parse_error,
            ctx + ": unknown appliance '" + r[c_a] + "'");
    }
    if (r[c_kind] == "no_overlap") {
      const auto b = parse_appliance(r[c_b]);
      if (!b) {
        raise(ErrorCode::parse_error,
              ctx + ": unknown appliance '" + r[c_b] + "'");
      }
      row.constraint = no_overlap(*a, *b);
    } else if (r[c_kind] == "forbidden_window") {
      row.constraint = forbidden_window(*a, parse_int_field(r[c_ws], ctx),
                                        parse_int_field(r[c_we], ctx));
    } else {
      raise(ErrorCode::parse_error,
            ctx + ": unknown constraint kind '" + r[c_kind] + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path schedules_path = path;
  fs::path consumers_path, constraints_path;
  if (fs::is_directory(path)) {
    schedules_path = path / kSchedulesFile;
    consumers_path = path / kConsumersFile;
    constraints_path = path / kConstraintsFile;
  }
  if (!fs::exists(schedules_path)) {
    raise(ErrorCode::dataset_error,
          "dataset not found: " + schedules_path.string());
  }

  Dataset d;
  d.schedules = parse_schedules(read_csv(schedules_path),
                                schedules_path.string());
  if (!consumers_path.empty() && fs::exists(consumers_path)) {
    d.consumers = parse_consumers(read_csv(consumers_path),
                                  consumers_path.string());
  }
  if (!constraints_path.empty() && fs::exists(constraints_path)) {
    d.constraints = parse_constraints(read_csv(constraints_path),
                                      constraints_path.string());
  }

  // Consumers that appear only in schedules.csv still get an entry, in
  // order of first appearance, so downstream code has one list to walk.
  std::set<std::string> known;
  for (const auto& c : d.consumers) known.insert(c.id);
  for (const auto& row : d.schedules) {
    if (known.insert(row.consumer_id).second) {
      d.consumers.push_back(ConsumerInfo{row.consumer_id, {}, {}});
    }
  }

  validate_dataset(d);
  return d;
}

void validate_dataset(const Dataset& dataset) {
  for (std::size_t i = 0; i < dataset.schedules.size(); ++i) {
    const auto& row = dataset.schedules[i];
    if (row.day < 0) {
      raise(ErrorCode::validation_error,
            "schedule " + std::to_string(i + 1) + ": negative day");
    }
    if (auto code = validate_schedule(row.schedule)) {
      raise(*code, "schedule " + std::to_string(i + 1) + " (consumer " +
                       row.consumer_id + ", day " + std::to_string(row.day) +
                       "): " + std::string(to_string(*code)));
    }
  }
  std::set<std::string> ids;
  for (const auto& c : dataset.consumers) {
    if (!ids.insert(c.id).second) {
      raise(ErrorCode::validation_error, "duplicate consumer '" + c.id + "'");
    }
    if (c.p7_answer && (*c.p7_answer < 0 || *c.p7_answer > 4)) {
      raise(ErrorCode::validation_error,
            "consumer '" + c.id + "': survey answer outside 0..4");
    }
  }
  for (const auto& row : dataset.schedules) {
    if (!ids.contains(row.consumer_id)) {
      raise(ErrorCode::validation_error,
            "schedule references unknown consumer '" + row.consumer_id + "'");
    }
  }
  for (const auto& row : dataset.constraints) {
    if (!ids.contains(row.consumer_id)) {
      raise(ErrorCode::validation_error,
            "constraint references unknown consumer '" + row.consumer_id +
                "'");
    }
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ostringstream s;
  s << "consumer_id,day,appliance,start_minute,duration_min,flexibility_min\n";
  for (const auto& row : dataset.schedules) {
    s << row.consumer_id << ',' << row.day << ','
      << to_string(row.schedule.appliance) << ',' << row.schedule.start << ','
      << row.schedule.duration << ',' << row.schedule.flexibility << '\n';
  }
  write_text_file(dir / kSchedulesFile, s.str());

  if (!dataset.consumers.empty()) {
    std::ostringstream c;
    c << "consumer_id,p7_answer,occupancy,bedrooms,house_type,year_built\n";
    for (const auto& info : dataset.consumers) {
      c << info.id << ',';
      if (info.p7_answer) c << *info.p7_answer;
      c << ',';
      if (info.household) {
        const auto& h = *info.household;
        c << h.occupancy << ',' << h.bedrooms << ',' << to_string(h.house_type)
          << ',';
        if (h.year_built) c << format_double(*h.year_built);
      } else {
        c << ",,,";
      }
      c << '\n';
    }
    write_text_file(dir / kConsumersFile, c.str());
  }

  if (!dataset.constraints.empty()) {
    std::ostringstream c;
    c << "consumer_id,kind,appliance_a,appliance_b,window_start,window_end\n";
    for (const auto& row : dataset.constraints) {
      const Constraint& con = row.constraint;
      if (con.kind == Constraint::Kind::no_overlap) {
        c << row.consumer_id << ",no_overlap," << to_string(con.appliance_a)
          << ',' << to_string(con.appliance_b) << ",,\n";
      } else {
        c << row.consumer_id << ",forbidden_window,"
          << to_string(con.appliance_a) << ",," << con.window_start << ','
          << con.window_end << '\n';
      }
    }
    write_text_file(dir / kConstraintsFile, c.str());
  }
}

std::vector<ResolvedConsumer> resolve_consumers(
    const Dataset& dataset, const LambdaMode& mode,
    std::span<const ReferenceHousehold> references, const PowerConfig& power) {
  if (!mode.per_consumer) {
    lambda_fixed(mode.fixed);  // range check
  }
  std::vector<ResolvedConsumer> out;
  out.reserve(dataset.consumers.size());
  for (const auto& c : dataset.consumers) {
    ResolvedConsumer r;
    r.id = c.id;
    if (mode.per_consumer) {
      if (!c.p7_answer) {
        raise(ErrorCode::missing_profile_data,
              "consumer '" + c.id +
                  "' has no survey cooperation answer; pass a fixed lambda");
      }
      r.lambda = lambda_from_p7(*c.p7_answer);
    } else {
      r.lambda = mode.fixed;
    }
    MatchResult match;  // empty ranking -> fallback draws
    if (c.household) {
      match = match_household(*c.household, references);
    }
    for (Appliance a : kAllAppliances) {
      r.draw_watts[a] = appliance_draw(match, a, references, power);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace flexgrid
