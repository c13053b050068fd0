// src/csv.cpp

// Copyright 2026  srep authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "srep/csv.hpp"

#include "srep/common.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

namespace srep {

namespace {

// Streaming field splitter; quote state survives line breaks so quoted
// fields may contain newlines.
struct LineSplitter {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;

  // Returns true when the record is complete (not inside quotes).
  bool feed(const std::string& line) {
    if (quoted) cur += '\n';  // continuation of a quoted field
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    return !quoted;
  }

  std::vector<std::string> take() {
    fields.push_back(cur);
    cur.clear();
    return std::exchange(fields, {});
  }
};

std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingInputError("CSV not found: " + path);
  }
  std::ifstream is(path);
  if (!is) throw Error("cannot open CSV: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  LineSplitter splitter;
  bool pending = false;
  while (std::getline(is, line)) {
    if (!pending && line.empty() && is.eof()) break;
    if (!splitter.feed(line)) {
      pending = true;  // record continues on the next line
      continue;
    }
    pending = false;
    auto fields = splitter.take();
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (pending) throw Error("unterminated quoted field in CSV: " + path);
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write CSV: " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) os << ',';
    os << escape(table.header[i]);
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << escape(row[i]);
    }
    os << '\n';
  }
  if (!os) throw Error("short write: " + path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace srep
