// srep/metrics.hpp

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

#ifndef SREP_METRICS_HPP_
#define SREP_METRICS_HPP_

#include "srep/wav.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace srep {

/// Per-utterance metric row. Absent adapters leave absent markers; no field
/// is ever silently zero or NaN.
struct EvaluationRow {
  std::string utterance_id;
  std::optional<double> pesq;   // [-0.5, 4.5]
  std::optional<double> stoi;   // [0, 1]
  std::optional<double> csig;   // [1, 5]
  std::optional<double> cbak;
  std::optional<double> covl;
  std::optional<double> si_sdr;  // dB
};

/// Scale-invariant SDR in dB, clamped to [-ceiling_db, +ceiling_db]. A zero
/// residual (est is a scaled ref) hits +ceiling; a zero projection hits
/// -ceiling. Errors on an all-zero reference.
double si_sdr(const TimeSignal& ref, const TimeSignal& est, double ceiling_db = 60.0);

/// External evaluator invoked as `command ref.wav est.wav`; it must print
/// one float (pesq, stoi) or three floats (composite: csig cbak covl) on
/// stdout. Versions are recorded for the run metadata sidecar.
struct MetricAdapter {
  std::string name;     // "pesq" | "stoi" | "composite"
  std::string command;
  std::string version;  // discovered via `command --version` when empty
};

class MetricRegistry {
 public:
  void add(MetricAdapter adapter);
  bool has(const std::string& name) const;
  std::map<std::string, std::string> versions() const;

  /// Absent adapter or failed invocation -> nullopt (with a stderr warning).
  std::optional<double> scalar(const std::string& name, const TimeSignal& ref,
                               const TimeSignal& est) const;
  std::optional<std::array<double, 3>> composite(const TimeSignal& ref,
                                                 const TimeSignal& est) const;

 private:
  std::map<std::string, MetricAdapter> adapters_;
};

std::optional<double> pesq_score(const MetricRegistry& registry, const TimeSignal& ref,
                                 const TimeSignal& est);
std::optional<double> stoi_score(const MetricRegistry& registry, const TimeSignal& ref,
                                 const TimeSignal& est);
std::optional<std::array<double, 3>> composite_scores(const MetricRegistry& registry,
                                                      const TimeSignal& ref,
                                                      const TimeSignal& est);

EvaluationRow evaluate_utterance(const MetricRegistry& registry, const std::string& id,
                                 const TimeSignal& ref, const TimeSignal& est);

void write_evaluation_csv(const std::string& path, const std::vector<EvaluationRow>& rows);

}  // namespace srep

#endif  // SREP_METRICS_HPP_
