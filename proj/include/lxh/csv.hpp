#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lxh::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws parse_error when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

Table parse(std::string_view text, std::string_view source = "<memory>");
Table read(const std::filesystem::path& path);
/// Whole file as bytes; throws io_error.
std::string read_text(const std::filesystem::path& path);

double to_double(std::string_view field, std::string_view context);

/// Shortest round-trippable-enough text for a double, stable across runs.
std::string number(double value);

/// Opens a file for writing, creating parent directories; throws io_error.
std::FILE* open_for_write(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace lxh::csv

namespace lxh::timefmt {

/// "YYYY-MM-DDTHH:MM:SSZ" for a UTC epoch second.
std::string format_utc(long long epoch_s);

/// Accepts the format above or a plain number of epoch seconds.
long long parse_utc(std::string_view text);

}  // namespace lxh::timefmt
