/*
 * Copyright 2026 The kernelgen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kernelgen/ingest.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <optional>
#include <vector>

#include "kernelgen/errors.hpp"

namespace kernelgen {

namespace {

[[noreturn]] void fail_at(std::size_t row, const std::string& column, const std::string& what) {
  throw IngestError("row " + std::to_string(row) + ", column '" + column + "': " + what);
}

// RFC 4180 fields: commas split, double quotes group, "" escapes a quote.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [end, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

template <typename Int>
bool digits(const std::string& s, std::size_t pos, std::size_t len, Int& out) {
  if (pos + len > s.size()) return false;
  auto [end, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc() && end == s.data() + pos + len;
}

// Days since 1970-01-01 (fractional), or nullopt if `s` is not an ISO date.
std::optional<double> parse_iso_date(const std::string& s) {
  using namespace std::chrono;
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-' || !digits(s, 0, 4, y) || !digits(s, 5, 2, m) ||
      !digits(s, 8, 2, d))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  double days = sys_days{ymd}.time_since_epoch().count();
  if (s.size() == 10) return days;

  std::string rest = s.substr(10);
  if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
  if (rest.back() == 'Z') rest.pop_back();
  unsigned hh = 0, mm = 0;
  if (rest.size() < 6 || rest[3] != ':' || !digits(rest, 1, 2, hh) || !digits(rest, 4, 2, mm) ||
      hh > 23 || mm > 59)
    return std::nullopt;
  double seconds = 0;
  if (rest.size() > 6) {
    if (rest[6] != ':') return std::nullopt;
    const auto sec = parse_number(rest.substr(7));
    if (!sec || *sec < 0 || *sec >= 61) return std::nullopt;
    seconds = *sec;
  }
  return days + (hh * 3600.0 + mm * 60.0 + seconds) / 86400.0;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw IngestError("row 1: missing column '" + name + "'");
}

}  // namespace

TimeSeriesDataset ingest(std::istream& csv, const RunConfig& config) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(csv, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    header = split_fields(line);
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  }
  if (header.empty()) throw IngestError("input has no header row");
  const std::size_t ti = column_index(header, config.time_column);
  const std::size_t vi = column_index(header, config.value_column);

  std::vector<double> times, values;
  std::optional<bool> dates;
  while (std::getline(csv, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw IngestError("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    const std::string& tcell = fields[ti];
    if (!dates) dates = !parse_number(tcell) && parse_iso_date(tcell);
    const auto t = *dates ? parse_iso_date(tcell) : parse_number(tcell);
    if (!t)
      fail_at(row, config.time_column,
              "cannot parse '" + tcell + "' as " + (*dates ? "an ISO-8601 date" : "a number"));
    const auto v = parse_number(fields[vi]);
    if (!v) fail_at(row, config.value_column, "cannot parse '" + fields[vi] + "' as a number");
    if (!times.empty() && !(*t > times.back()))
      fail_at(row, config.time_column, "times must be strictly increasing");
    times.push_back(*t);
    values.push_back(*v);
  }
  if (times.empty()) throw IngestError("input has no data rows");

  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(times.data(), n);
  if (*dates) t.array() -= times.front();
  const Eigen::Index n_test = config.split.test_rows(n);
  if (n - n_test < 5)
    throw IngestError("need at least 5 training rows, have " + std::to_string(n - n_test));
  return TimeSeriesDataset::with_test_suffix(std::move(t), Eigen::Map<Eigen::VectorXd>(values.data(), n),
                                             n_test);
}

TimeSeriesDataset ingest(const RunConfig& config) {
  std::ifstream in(config.input, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + config.input + "'");
  return ingest(in, config);
}

}  // namespace kernelgen
