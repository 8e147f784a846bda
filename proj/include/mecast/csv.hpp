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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mecast::csv {

inline constexpr std::string_view kSchemaTag = "mecast-csv v1";

// Shortest round-trip representation.
std::string format(double v);
std::string format(std::int64_t v);
inline std::string format(int v) { return format(static_cast<std::int64_t>(v)); }
inline std::string format(std::size_t v) { return format(static_cast<std::int64_t>(v)); }
inline std::string format(const std::string& s) { return s; }
inline std::string format(const char* s) { return s; }

class Writer {
 public:
  // Emits "# mecast-csv v1 <kind>" followed by the header row.
  Writer(std::ostream& out, std::string_view kind, const std::vector<std::string>& columns);

  template <typename... Ts>
  void row(const Ts&... fields) {
    std::vector<std::string> cells{format(fields)...};
    write_cells(cells);
  }
  void write_cells(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t width_;
};

struct Table {
  std::string kind;  // from the schema comment, empty if absent
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Column position by name; throws mecast::Error if missing.
  std::size_t column(std::string_view name) const;
};

// Parses what Writer emits. Lines starting with '#' are comments; the first
// comment carrying the schema tag sets `kind`.
Table read(std::istream& in);

double to_double(const std::string& cell);
std::int64_t to_int(const std::string& cell);

}  // namespace mecast::csv
