#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace camwatch {

using CsvRow = std::vector<std::string>;

// RFC 4180 style: quoted fields may contain commas, quotes ("") and newlines.
std::vector<CsvRow> parse_csv(std::string_view text);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);
std::string csv_line(const CsvRow& row);

}  // namespace camwatch
