// srep/metrics.cpp

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

#include "srep/metrics.hpp"

#include "srep/csv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#ifndef _WIN32
#include <unistd.h>
#endif

namespace srep {

double si_sdr(const TimeSignal& ref, const TimeSignal& est, double ceiling_db) {
  if (ref.length() != est.length()) throw Error("si_sdr: length mismatch");
  if (ref.length() == 0) throw Error("si_sdr: empty signals");
  const double ref_energy = ref.samples.squaredNorm();
  if (ref_energy == 0.0) throw Error("si_sdr: all-zero reference");

  const double alpha = ref.samples.dot(est.samples) / ref_energy;
  const Vec target = alpha * ref.samples;
  const double target_energy = target.squaredNorm();
  const double residual_energy = (est.samples - target).squaredNorm();

  if (target_energy == 0.0) return -ceiling_db;
  if (residual_energy == 0.0) return ceiling_db;
  const double db = 10.0 * std::log10(target_energy / residual_energy);
  return std::clamp(db, -ceiling_db, ceiling_db);
}

namespace {

/// Runs a command line, captures its stdout. Returns false on spawn failure
/// or non-zero exit.
bool run_capture(const std::string& command_line, std::string* out) {
  out->clear();
  FILE* pipe = ::popen((command_line + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return false;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) *out += buf;
  const int rc = ::pclose(pipe);
  return rc == 0;
}

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  q += "'";
  return q;
}

/// Stages ref/est as wav files, runs the adapter, parses `count` floats.
std::optional<std::vector<double>> invoke_adapter(const MetricAdapter& adapter,
                                                  const TimeSignal& ref,
                                                  const TimeSignal& est,
                                                  std::size_t count) {
  namespace fs = std::filesystem;
  static std::atomic<std::uint64_t> serial{0};
  const std::uint64_t tag = serial.fetch_add(1);
  const fs::path dir = fs::temp_directory_path();
  const std::string stem =
      "srep-" + std::to_string(::getpid()) + "-" + std::to_string(tag);
  const fs::path ref_path = dir / (stem + "-ref.wav");
  const fs::path est_path = dir / (stem + "-est.wav");

  std::optional<std::vector<double>> result;
  try {
    save_audio(ref_path.string(), ref);
    save_audio(est_path.string(), est);
    std::string out;
    if (run_capture(adapter.command + " " + shell_quote(ref_path.string()) + " " +
                        shell_quote(est_path.string()),
                    &out)) {
      std::istringstream is(out);
      std::vector<double> values(count);
      bool ok = true;
      for (std::size_t i = 0; i < count; ++i) {
        if (!(is >> values[i]) || !std::isfinite(values[i])) {
          ok = false;
          break;
        }
      }
      if (ok) result = std::move(values);
    }
  } catch (const std::exception&) {
    result.reset();
  }
  std::error_code ec;
  fs::remove(ref_path, ec);
  fs::remove(est_path, ec);
  if (!result) {
    std::cerr << "warning: metric adapter '" << adapter.name << "' failed; value absent\n";
  }
  return result;
}

}  // namespace

void MetricRegistry::add(MetricAdapter adapter) {
  if (adapter.name != "pesq" && adapter.name != "stoi" && adapter.name != "composite") {
    throw ConfigError("metrics: unknown adapter name '" + adapter.name + "'");
  }
  if (adapter.command.empty()) {
    throw ConfigError("metrics: adapter '" + adapter.name + "' has no command");
  }
  if (adapter.version.empty()) {
    std::string out;
    if (run_capture(adapter.command + " --version", &out) && !out.empty()) {
      adapter.version = out.substr(0, out.find('\n'));
    } else {
      adapter.version = "unknown";
    }
  }
  adapters_[adapter.name] = std::move(adapter);
}

bool MetricRegistry::has(const std::string& name) const {
  return adapters_.count(name) > 0;
}

std::map<std::string, std::string> MetricRegistry::versions() const {
  std::map<std::string, std::string> v;
  for (const auto& [name, adapter] : adapters_) v[name] = adapter.version;
  return v;
}

std::optional<double> MetricRegistry::scalar(const std::string& name,
                                             const TimeSignal& ref,
                                             const TimeSignal& est) const {
  auto it = adapters_.find(name);
  if (it == adapters_.end()) return std::nullopt;
  auto values = invoke_adapter(it->second, ref, est, 1);
  if (!values) return std::nullopt;
  return (*values)[0];
}

std::optional<std::array<double, 3>> MetricRegistry::composite(const TimeSignal& ref,
                                                               const TimeSignal& est) const {
  auto it = adapters_.find("composite");
  if (it == adapters_.end()) return std::nullopt;
  auto values = invoke_adapter(it->second, ref, est, 3);
  if (!values) return std::nullopt;
  return std::array<double, 3>{(*values)[0], (*values)[1], (*values)[2]};
}

std::optional<double> pesq_score(const MetricRegistry& registry, const TimeSignal& ref,
                                 const TimeSignal& est) {
  return registry.scalar("pesq", ref, est);
}

std::optional<double> stoi_score(const MetricRegistry& registry, const TimeSignal& ref,
                                 const TimeSignal& est) {
  return registry.scalar("stoi", ref, est);
}

std::optional<std::array<double, 3>> composite_scores(const MetricRegistry& registry,
                                                      const TimeSignal& ref,
                                                      const TimeSignal& est) {
  return registry.composite(ref, est);
}

EvaluationRow evaluate_utterance(const MetricRegistry& registry, const std::string& id,
                                 const TimeSignal& ref, const TimeSignal& est) {
  EvaluationRow row;
  row.utterance_id = id;
  row.si_sdr = si_sdr(ref, est);
  row.pesq = pesq_score(registry, ref, est);
  row.stoi = stoi_score(registry, ref, est);
  if (auto c = composite_scores(registry, ref, est)) {
    row.csig = (*c)[0];
    row.cbak = (*c)[1];
    row.covl = (*c)[2];
  }
  return row;
}

void write_evaluation_csv(const std::string& path, const std::vector<EvaluationRow>& rows) {
  CsvTable table;
  table.header = {"utterance_id", "pesq", "stoi", "csig", "cbak", "covl", "si_sdr"};
  auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const EvaluationRow& r : rows) {
    table.rows.push_back({r.utterance_id, cell(r.pesq), cell(r.stoi), cell(r.csig),
                          cell(r.cbak), cell(r.covl), cell(r.si_sdr)});
  }
  write_csv(path, table);
}

}  // namespace srep
