// src/manifest.cpp

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

#include "srep/manifest.hpp"

#include "srep/csv.hpp"
#include "srep/resample.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace srep {

namespace {

std::map<std::string, std::string> list_wavs(const fs::path& dir) {
  std::map<std::string, std::string> out;  // stem -> path, sorted
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto p = e.path();
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") out[p.stem().string()] = p.string();
  }
  return out;
}

DatasetManifest build_voicebank(const std::string& root, const std::string& split) {
  const fs::path clean_dir = fs::path(root) / "clean";
  const fs::path noisy_dir = fs::path(root) / "noisy";
  if (!fs::is_directory(clean_dir) || !fs::is_directory(noisy_dir)) {
    throw MissingInputError("voicebank layout needs <root>/clean and <root>/noisy: " + root);
  }
  auto clean = list_wavs(clean_dir);
  auto noisy = list_wavs(noisy_dir);

  // Optional per-utterance mixing log: "<id> <noise_label> <snr_db>".
  std::map<std::string, std::pair<std::string, double>> log;
  const fs::path log_path = fs::path(root) / "log.txt";
  if (fs::exists(log_path)) {
    std::ifstream is(log_path);
    std::string id, label;
    double snr;
    while (is >> id >> label >> snr) log[id] = {label, snr};
  }

  DatasetManifest m;
  m.name = fs::path(root).filename().string();
  m.split = split;
  for (const auto& [stem, clean_path] : clean) {
    auto it = noisy.find(stem);
    if (it == noisy.end()) continue;
    PairEntry e;
    e.id = stem;
    e.clean_path = clean_path;
    e.noisy_path = it->second;
    if (auto lit = log.find(stem); lit != log.end()) {
      e.noise_label = lit->second.first;
      e.snr_db = lit->second.second;
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest build_nisqa(const std::string& root, const std::string& split) {
  // The corpus ships one per-file MOS CSV per testset directory.
  std::vector<fs::path> csvs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
  }
  std::sort(csvs.begin(), csvs.end());
  if (csvs.empty()) {
    throw MissingInputError("nisqa layout needs a label CSV under: " + root);
  }

  DatasetManifest m;
  m.name = fs::path(root).filename().string();
  m.split = split;
  for (const auto& csv_path : csvs) {
    CsvTable t = read_csv(csv_path.string());
    int ci_deg = t.column("filename_deg");
    int ci_ref = t.column("filename_ref");
    int ci_mos = t.column("mos");
    if (ci_deg < 0 || ci_ref < 0 || ci_mos < 0) {
      throw Error("label CSV lacks filename_deg/filename_ref/mos columns: " +
                  csv_path.string());
    }
    for (const auto& row : t.rows) {
      PairEntry e;
      fs::path deg = fs::path(root) / row[static_cast<std::size_t>(ci_deg)];
      fs::path ref = fs::path(root) / row[static_cast<std::size_t>(ci_ref)];
      e.id = deg.stem().string();
      e.noisy_path = deg.string();
      e.clean_path = ref.string();
      if (!row[static_cast<std::size_t>(ci_mos)].empty()) {
        e.mos = std::stod(row[static_cast<std::size_t>(ci_mos)]);
      }
      m.entries.push_back(std::move(e));
    }
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const PairEntry& a, const PairEntry& b) { return a.id < b.id; });
  return m;
}

}  // namespace

CorpusLayout parse_layout(const std::string& name) {
  if (name == "voicebank") return CorpusLayout::kVoicebank;
  if (name == "nisqa") return CorpusLayout::kNisqa;
  throw ConfigError("unknown corpus layout: " + name);
}

DatasetManifest build_manifest(const std::string& root, CorpusLayout layout,
                               const std::string& split) {
  if (!fs::is_directory(root)) {
    throw MissingInputError("corpus root not found: " + root);
  }
  DatasetManifest m = layout == CorpusLayout::kVoicebank
                          ? build_voicebank(root, split)
                          : build_nisqa(root, split);
  if (m.entries.empty()) {
    throw MissingInputError("empty result set under: " + root);
  }

  std::set<std::string> ids;
  for (const auto& e : m.entries) {
    if (!ids.insert(e.id).second) throw Error("duplicate manifest id: " + e.id);
    if (!fs::exists(e.clean_path)) throw MissingInputError("missing file: " + e.clean_path);
    if (!fs::exists(e.noisy_path)) throw MissingInputError("missing file: " + e.noisy_path);
  }
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  CsvTable t;
  t.header = {"id", "clean_path", "noisy_path", "snr_db", "noise_label", "mos"};
  for (const auto& e : manifest.entries) {
    t.rows.push_back({e.id, e.clean_path, e.noisy_path,
                      e.snr_db ? format_double(*e.snr_db) : "",
                      e.noise_label.value_or(""),
                      e.mos ? format_double(*e.mos) : ""});
  }
  write_csv(path, t);
}

DatasetManifest read_manifest(const std::string& path) {
  CsvTable t = read_csv(path);
  for (const char* col : {"id", "clean_path", "noisy_path"}) {
    if (!t.has_column(col)) throw Error("manifest CSV lacks column " + std::string(col));
  }
  const auto ci = [&](const char* c) { return static_cast<std::size_t>(t.column(c)); };
  DatasetManifest m;
  m.name = fs::path(path).stem().string();
  for (const auto& row : t.rows) {
    PairEntry e;
    e.id = row[ci("id")];
    e.clean_path = row[ci("clean_path")];
    e.noisy_path = row[ci("noisy_path")];
    if (t.has_column("snr_db") && !row[ci("snr_db")].empty())
      e.snr_db = std::stod(row[ci("snr_db")]);
    if (t.has_column("noise_label") && !row[ci("noise_label")].empty())
      e.noise_label = row[ci("noise_label")];
    if (t.has_column("mos") && !row[ci("mos")].empty())
      e.mos = std::stod(row[ci("mos")]);
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) throw MissingInputError("empty manifest: " + path);
  return m;
}

UtterancePair load_pair(const PairEntry& entry, int target_rate, double max_skew_s) {
  UtterancePair pair;
  pair.id = entry.id;
  pair.clean = load_audio(entry.clean_path);
  pair.noisy = load_audio(entry.noisy_path);
  pair.snr_db = entry.snr_db;
  pair.noise_label = entry.noise_label;
  pair.mos = entry.mos;

  if (pair.clean.sample_rate != pair.noisy.sample_rate) {
    throw Error("pair " + entry.id + ": clean/noisy sample rates differ");
  }
  const int skew = std::abs(pair.clean.length() - pair.noisy.length());
  if (skew > max_skew_s * pair.clean.sample_rate) {
    throw Error("pair " + entry.id + ": length mismatch of " +
                std::to_string(skew) + " samples exceeds tolerance");
  }
  // Codec padding leaves pairs off by a few samples; align to the minimum.
  const int n = std::min(pair.clean.length(), pair.noisy.length());
  pair.clean.samples.conservativeResize(n);
  pair.noisy.samples.conservativeResize(n);

  if (pair.clean.sample_rate != target_rate) {
    pair.clean = resample(pair.clean, target_rate);
    pair.noisy = resample(pair.noisy, target_rate);
  }
  return pair;
}

}  // namespace srep
