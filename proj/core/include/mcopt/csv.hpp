#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mcopt::csv {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Parses a full field as a double; throws ParseError on trailing garbage.
double parse_number(std::string_view field, std::string_view context);
long long parse_integer(std::string_view field, std::string_view context);

/// Splits an unquoted comma-separated line. Trailing '\r' is dropped.
std::vector<std::string_view> split_fields(std::string_view line);

/// Writes to a sibling temporary file, then renames over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text(const std::filesystem::path& path);

}  // namespace mcopt::csv
