#pragma once

#include <string>

#include "json.hpp"

namespace khl_cli {

/// ISO-8601 UTC timestamp.
std::string timestamp_utc();

/// Writes atomically: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

/// RFC-4180 field quoting (only when the field needs it).
std::string csv_quote(const std::string& field);

/// Full-precision formatting for CSV cells.
std::string format_double(double v);

/// Parses a JSON array of numbers, either inline ("[0.5,0.5]") or from a
/// file path.
std::vector<double> read_number_array(const std::string& arg);

}  // namespace khl_cli
