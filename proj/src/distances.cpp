// srep/distances.cpp

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

#include "srep/distances.hpp"

#include "srep/csv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace srep {

double mse_distance(const Mat& a, const Mat& b, MseReduction reduction) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("mse_distance: shape mismatch (" + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                std::to_string(b.cols()) + ")");
  }
  if (a.size() == 0) throw Error("mse_distance: empty matrices");
  const double sq = (a - b).squaredNorm();
  return reduction == MseReduction::kMean ? sq / static_cast<double>(a.size()) : sq;
}

double spectrogram_distance(const TimeSignal& s, const TimeSignal& x,
                            MseReduction reduction, const StftParams& params) {
  if (s.length() != x.length()) {
    throw Error("spectrogram_distance: signals differ in length");
  }
  const Spectrogram ss = stft(s, params);
  const Spectrogram xs = stft(x, params);
  return mse_distance(ss.magnitude, xs.magnitude, reduction);
}

namespace {

/// Equal-length inputs give equal T; backends with padding quirks may still
/// disagree by a frame or two, which is tolerated by truncation.
void align_frames(Mat& a, Mat& b) {
  const Eigen::Index gap = std::abs(a.rows() - b.rows());
  if (gap > 2) {
    throw Error("representation_distance: frame counts differ by " +
                std::to_string(gap) + " (> 2)");
  }
  const Eigen::Index t = std::min(a.rows(), b.rows());
  a.conservativeResize(t, Eigen::NoChange);
  b.conservativeResize(t, Eigen::NoChange);
}

}  // namespace

double representation_distance(const SSSRBackend& backend, Layer layer,
                               const TimeSignal& s, const TimeSignal& x,
                               MseReduction reduction) {
  Mat a, b;
  if (layer == Layer::kFE) {
    a = extract_fe(backend, s).values;
    b = extract_fe(backend, x).values;
  } else {
    a = extract_ol(backend, s).values;
    b = extract_ol(backend, x).values;
  }
  align_frames(a, b);
  return mse_distance(a, b, reduction);
}

namespace {

DistanceRecord distance_one(const PairEntry& entry,
                            const std::vector<std::shared_ptr<const SSSRBackend>>& backends,
                            const std::vector<Layer>& layers,
                            const BatchDistanceOptions& options) {
  DistanceRecord rec;
  rec.utterance_id = entry.id;
  rec.mos = entry.mos;
  try {
    const UtterancePair pair = load_pair(entry);
    rec.d_sg = spectrogram_distance(pair.clean, pair.noisy, options.reduction, options.stft);
    for (const auto& backend : backends) {
      const std::string id = to_string(backend->model_id());
      for (Layer layer : layers) {
        const double d =
            representation_distance(*backend, layer, pair.clean, pair.noisy, options.reduction);
        (layer == Layer::kFE ? rec.d_fe : rec.d_ol)[id] = d;
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<DistanceRecord> batch_distances(
    const DatasetManifest& manifest,
    const std::vector<std::shared_ptr<const SSSRBackend>>& backends,
    const std::vector<Layer>& layers, const BatchDistanceOptions& options) {
  if (manifest.entries.empty()) {
    throw MissingInputError("batch_distances: empty manifest");
  }
  std::vector<PairEntry> entries = manifest.entries;
  std::sort(entries.begin(), entries.end(),
            [](const PairEntry& a, const PairEntry& b) { return a.id < b.id; });

  std::vector<DistanceRecord> records(entries.size());
  const int workers = std::max(1, std::min<int>(options.num_threads,
                                                static_cast<int>(entries.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      records[i] = distance_one(entries[i], backends, layers, options);
    }
  } else {
    // Backends are read-only; workers claim indices, results keep manifest
    // order by construction.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < entries.size(); i = next.fetch_add(1)) {
          records[i] = distance_one(entries[i], backends, layers, options);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return records;
}

void write_distance_csv(const std::string& path,
                        const std::vector<DistanceRecord>& records,
                        const std::vector<std::string>& model_ids) {
  CsvTable table;
  table.header = {"utterance_id", "d_sg"};
  for (const std::string& m : model_ids) table.header.push_back("d_fe_" + m);
  for (const std::string& m : model_ids) table.header.push_back("d_ol_" + m);
  table.header.push_back("mos");
  table.header.push_back("error");

  auto cell = [](const std::map<std::string, double>& values, const std::string& key) {
    auto it = values.find(key);
    return it == values.end() ? std::string() : format_double(it->second);
  };
  for (const DistanceRecord& rec : records) {
    std::vector<std::string> row;
    row.push_back(rec.utterance_id);
    row.push_back(rec.d_sg ? format_double(*rec.d_sg) : std::string());
    for (const std::string& m : model_ids) row.push_back(cell(rec.d_fe, m));
    for (const std::string& m : model_ids) row.push_back(cell(rec.d_ol, m));
    row.push_back(rec.mos ? format_double(*rec.mos) : std::string());
    row.push_back(rec.error);
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

}  // namespace srep
