#pragma once

// Minimal CSV support for the dataset and result files. Plain comma-separated
// values, no quoting; fields therefore must not contain commas or newlines.
// All files written by this project satisfy that.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flexgrid {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // column index by name, or -1
  int column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source_name);
CsvTable read_csv(const std::filesystem::path& path);

// Value parsers with file/row context in the error message.
int parse_int_field(const std::string& value, const std::string& context);
double parse_double_field(const std::string& value, const std::string& context);

std::string format_double(double v);  // shortest round-trip-stable form

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace flexgrid
