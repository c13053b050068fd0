// srep/correlation.cpp

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

#include "srep/correlation.hpp"

#include "srep/csv.hpp"
#include "srep/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace srep {

std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error("pearson: length mismatch");
  const std::size_t n = xs.size();
  if (n < 3) return std::nullopt;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    // Positions i..j (0-based) share the average of 1-based ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error("spearman: length mismatch");
  if (xs.size() < 3) return std::nullopt;
  return pearson(average_ranks(xs), average_ranks(ys));
}

std::optional<double> record_field(const DistanceRecord& record, const std::string& name) {
  if (name == "d_sg") return record.d_sg;
  if (name == "mos") return record.mos;
  if (name.rfind("d_fe_", 0) == 0) {
    auto it = record.d_fe.find(name.substr(5));
    if (it != record.d_fe.end()) return it->second;
    return std::nullopt;
  }
  if (name.rfind("d_ol_", 0) == 0) {
    auto it = record.d_ol.find(name.substr(5));
    if (it != record.d_ol.end()) return it->second;
    return std::nullopt;
  }
  auto it = record.metrics.find(name);
  if (it != record.metrics.end()) return it->second;
  return std::nullopt;
}

namespace {

std::vector<std::string> distance_names_in(const std::vector<DistanceRecord>& records) {
  bool any_sg = false;
  std::set<std::string> fe, ol;
  for (const DistanceRecord& r : records) {
    any_sg = any_sg || r.d_sg.has_value();
    for (const auto& [m, v] : r.d_fe) fe.insert(m);
    for (const auto& [m, v] : r.d_ol) ol.insert(m);
  }
  std::vector<std::string> names;
  if (any_sg) names.push_back("d_sg");
  for (const std::string& m : fe) names.push_back("d_fe_" + m);
  for (const std::string& m : ol) names.push_back("d_ol_" + m);
  return names;
}

}  // namespace

CorrelationReport correlation_report(const std::vector<DistanceRecord>& records,
                                     const std::vector<std::string>& targets) {
  if (records.empty()) throw MissingInputError("correlation_report: no records");
  CorrelationReport report;
  report.distance_names = distance_names_in(records);
  report.target_names = targets;
  for (const std::string& dist : report.distance_names) {
    std::vector<CorrelationCell> row;
    for (const std::string& target : targets) {
      std::vector<double> xs, ys;
      for (const DistanceRecord& r : records) {
        const auto x = record_field(r, dist);
        const auto y = record_field(r, target);
        if (x && y) {
          xs.push_back(*x);
          ys.push_back(*y);
        }
      }
      CorrelationCell cell;
      cell.n = static_cast<int>(xs.size());
      cell.spearman = spearman(xs, ys);
      cell.pearson = pearson(xs, ys);
      row.push_back(cell);
    }
    report.cells.push_back(std::move(row));
  }
  return report;
}

void write_correlation_report(const std::string& path_prefix,
                              const CorrelationReport& report) {
  auto grid = [&](const std::string& suffix, auto&& value) {
    CsvTable table;
    table.header.push_back("distance");
    for (const std::string& t : report.target_names) table.header.push_back(t);
    for (std::size_t i = 0; i < report.distance_names.size(); ++i) {
      std::vector<std::string> row{report.distance_names[i]};
      for (const CorrelationCell& cell : report.cells[i]) row.push_back(value(cell));
      table.rows.push_back(std::move(row));
    }
    write_csv(path_prefix + suffix, table);
  };
  grid("_spearman.csv", [](const CorrelationCell& c) {
    return c.spearman ? format_double(*c.spearman) : std::string();
  });
  grid("_pearson.csv", [](const CorrelationCell& c) {
    return c.pearson ? format_double(*c.pearson) : std::string();
  });
  grid("_n.csv", [](const CorrelationCell& c) { return std::to_string(c.n); });
}

void export_scatter(const std::vector<DistanceRecord>& records,
                    const std::string& distance_name, const std::string& target_name,
                    const std::string& path_prefix) {
  std::vector<double> xs, ys;
  CsvTable points;
  points.header = {"utterance_id", distance_name, target_name};
  for (const DistanceRecord& r : records) {
    const auto x = record_field(r, distance_name);
    const auto y = record_field(r, target_name);
    if (x && y) {
      xs.push_back(*x);
      ys.push_back(*y);
      points.rows.push_back({r.utterance_id, format_double(*x), format_double(*y)});
    }
  }
  if (xs.empty()) {
    throw Error("export_scatter: no record has both '" + distance_name + "' and '" +
                target_name + "'");
  }
  write_csv(path_prefix + ".csv", points);

  constexpr int kWidth = 480, kHeight = 360, kMargin = 24;
  GrayImage image(kWidth, kHeight, 255);
  for (int x = kMargin; x < kWidth - kMargin; ++x) {
    image.at(x, kHeight - kMargin) = 0;
  }
  for (int y = kMargin; y < kHeight - kMargin; ++y) {
    image.at(kMargin, y) = 0;
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
  const double xspan = (*xmax_it - *xmin_it) > 0 ? *xmax_it - *xmin_it : 1.0;
  const double yspan = (*ymax_it - *ymin_it) > 0 ? *ymax_it - *ymin_it : 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int px = kMargin + static_cast<int>((xs[i] - *xmin_it) / xspan *
                                              (kWidth - 2 * kMargin - 1));
    const int py = kHeight - kMargin -
                   static_cast<int>((ys[i] - *ymin_it) / yspan * (kHeight - 2 * kMargin - 1));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int qx = px + dx, qy = py + dy;
        if (qx >= 0 && qx < kWidth && qy >= 0 && qy < kHeight) image.at(qx, qy) = 64;
      }
    }
  }
  write_png_gray8(path_prefix + ".png", image);
}

}  // namespace srep
