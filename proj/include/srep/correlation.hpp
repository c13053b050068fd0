// srep/correlation.hpp

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

#ifndef SREP_CORRELATION_HPP_
#define SREP_CORRELATION_HPP_

#include "srep/distances.hpp"

#include <optional>
#include <string>
#include <vector>

namespace srep {

/// Product-moment correlation. Fewer than 3 points or zero variance in
/// either variable -> nullopt (undefined, never NaN).
std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys);

/// Pearson of rank-transformed data; ties get average ranks.
std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys);

/// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& xs);

struct CorrelationCell {
  std::optional<double> spearman;
  std::optional<double> pearson;
  int n = 0;  // records with both fields present
};

/// Grid of distance rows by target columns. Targets name metric fields
/// ("pesq", "stoi", ...) or "mos"; records missing either field drop out of
/// that cell only (pairwise deletion).
struct CorrelationReport {
  std::vector<std::string> distance_names;  // rows
  std::vector<std::string> target_names;    // columns
  std::vector<std::vector<CorrelationCell>> cells;
};

CorrelationReport correlation_report(const std::vector<DistanceRecord>& records,
                                     const std::vector<std::string>& targets);

/// Three CSV grids: spearman, pearson, and n-counts. Undefined cells stay
/// empty. Column labels use full method names, never symbols.
void write_correlation_report(const std::string& path_prefix,
                              const CorrelationReport& report);

/// Scatter export for one (distance, target) pair: points CSV plus a PNG.
/// Errors if no record has both fields.
void export_scatter(const std::vector<DistanceRecord>& records,
                    const std::string& distance_name, const std::string& target_name,
                    const std::string& path_prefix);

/// Field accessor shared by the report and scatter paths: distance_name is
/// d_sg, d_fe_<model>, or d_ol_<model>; target_name a metric name or "mos".
std::optional<double> record_field(const DistanceRecord& record, const std::string& name);

}  // namespace srep

#endif  // SREP_CORRELATION_HPP_
