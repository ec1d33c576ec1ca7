#include "lxh/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lxh/error.hpp"

namespace lxh::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    auto piece = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    fields.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  fail(Errc::parse_error, "missing CSV column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

Table parse(std::string_view text, std::string_view source) {
  Table table;
  std::size_t pos = 0;
  bool first = true;
  std::size_t line_no = 0;
  // UTF-8 byte order mark
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(Errc::parse_error, std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (first) fail(Errc::parse_error, std::string(source) + ": empty CSV (no header)");
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Table read(const std::filesystem::path& path) { return parse(read_text(path), path.string()); }

double to_double(std::string_view field, std::string_view context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    fail(Errc::parse_error, std::string(context) + ": not a finite number: '" + std::string(field) + "'");
  }
  return value;
}

std::string number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value == 0.0 ? 0.0 : value);
  return buf;
}

std::FILE* open_for_write(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) fail(Errc::io_error, "cannot write '" + path.string() + "'");
  return f;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::FILE* f = open_for_write(path);
  const bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed) fail(Errc::io_error, "short write to '" + path.string() + "'");
}

}  // namespace lxh::csv

namespace lxh::timefmt {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, long long& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

}  // namespace

std::string format_utc(long long epoch_s) {
  long long days = epoch_s / 86400;
  long long secs = epoch_s % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  long long y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d, secs / 3600, (secs / 60) % 60,
                secs % 60);
  return buf;
}

long long parse_utc(std::string_view text) {
  long long y;
  unsigned mo, d, h, mi, s;
  char tail = 0;
  const std::string str(text);
  if (std::sscanf(str.c_str(), "%lld-%u-%uT%u:%u:%u%c", &y, &mo, &d, &h, &mi, &s, &tail) >= 6) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
      fail(Errc::parse_error, "bad timestamp '" + str + "'");
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
  }
  return static_cast<long long>(std::llround(csv::to_double(text, "timestamp")));
}

}  // namespace lxh::timefmt
