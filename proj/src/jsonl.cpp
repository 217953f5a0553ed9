#include "camwatch/jsonl.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "camwatch/error.hpp"

namespace camwatch {

std::vector<JsonLine> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<JsonLine> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    JsonLine line;
    line.line_number = number;
    try {
      line.value = Json::parse(text);
    } catch (const Json::parse_error& e) {
      line.parse_error = e.what();
    }
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError(fmt::format("read failure on '{}'", path.string()));
  return lines;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : records) out << r.dump() << '\n';
  out.flush();
  if (!out) throw IoError(fmt::format("write failure on '{}'", path.string()));
}

std::vector<std::filesystem::path> jsonl_inputs(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(path, ec)) {
    if (!fs::exists(path, ec)) throw IoError(fmt::format("no such file or directory '{}'", path.string()));
    return {path};
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace camwatch
