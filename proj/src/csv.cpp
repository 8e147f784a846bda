// Copyright 2026 The mecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mecast/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "mecast/errors.hpp"

namespace mecast::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string format(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("csv: cannot format double");
  return std::string(buf.data(), end);
}

std::string format(std::int64_t v) {
  std::array<char, 24> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("csv: cannot format integer");
  return std::string(buf.data(), end);
}

Writer::Writer(std::ostream& out, std::string_view kind,
               const std::vector<std::string>& columns)
    : out_(out), width_(columns.size()) {
  out_ << "# " << kSchemaTag << ' ' << kind << '\n';
  write_cells(columns);
}

void Writer::write_cells(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error("csv: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw Error("csv: missing column " + std::string(name));
}

Table read(std::istream& in) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find(kSchemaTag);
      if (t.kind.empty() && pos != std::string::npos) {
        auto rest = line.substr(pos + kSchemaTag.size());
        const auto first = rest.find_first_not_of(' ');
        t.kind = first == std::string::npos ? "" : rest.substr(first);
      }
      continue;
    }
    auto cells = split(line);
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) throw Error("csv: ragged row: " + line);
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw Error("csv: no header row");
  return t;
}

double to_double(const std::string& cell) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error("csv: not a number: " + cell);
  }
  return v;
}

std::int64_t to_int(const std::string& cell) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error("csv: not an integer: " + cell);
  }
  return v;
}

}  // namespace mecast::csv
