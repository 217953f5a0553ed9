#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace camwatch {

using Json = nlohmann::json;

struct JsonLine {
  std::size_t line_number = 0;  // 1-based
  std::optional<Json> value;    // empty when the line failed to parse
  std::string parse_error;
};

// Reads a JSON-lines file; blank lines are skipped. Throws IoError if the
// file cannot be opened.
std::vector<JsonLine> read_jsonl(const std::filesystem::path& path);

// Writes one compact JSON document per line. Throws IoError.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);

// The *.jsonl files of a directory in name order, or the path itself when it
// names a file.
std::vector<std::filesystem::path> jsonl_inputs(const std::filesystem::path& path);

}  // namespace camwatch
