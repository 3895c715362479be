#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the CSV/JSON readers and writers.
namespace tda::text {

/// Shortest decimal string that round-trips to the same double.
/// +inf is written as "inf", -inf as "-inf", NaN as "nan".
std::string format_double(double value);

/// Parses a decimal float, permitting surrounding blanks. Accepts "inf".
std::optional<double> parse_double(std::string_view field);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Reads a whole file; throws IoError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place, so a
/// concurrent reader never observes a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace tda::text
