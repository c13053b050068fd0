// srep/distances.hpp

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

#ifndef SREP_DISTANCES_HPP_
#define SREP_DISTANCES_HPP_

#include "srep/manifest.hpp"
#include "srep/sssr.hpp"
#include "srep/stft.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace srep {

/// Reduction over the squared-difference matrix. The equations sum over all
/// bins while naming the quantity an MSE; the mean is the default because it
/// is scale-stable across utterance lengths, the sum stays available for
/// literal reproduction.
enum class MseReduction { kMean, kSum };

struct DistanceRecord {
  std::string utterance_id;
  std::optional<double> d_sg;
  std::map<std::string, double> d_fe;      // model id -> distance
  std::map<std::string, double> d_ol;
  std::map<std::string, double> metrics;   // filled by the metrics module
  std::optional<double> mos;
  std::string error;                       // nonempty if this pair failed
};

double mse_distance(const Mat& a, const Mat& b,
                    MseReduction reduction = MseReduction::kMean);

/// MSE over magnitude spectrograms with the default StftParams.
double spectrogram_distance(const TimeSignal& s, const TimeSignal& x,
                            MseReduction reduction = MseReduction::kMean,
                            const StftParams& params = {});

/// MSE over FE or OL representations. Frame counts may differ by at most two
/// frames (both are truncated to the shorter); larger gaps are an error.
double representation_distance(const SSSRBackend& backend, Layer layer,
                               const TimeSignal& s, const TimeSignal& x,
                               MseReduction reduction = MseReduction::kMean);

struct BatchDistanceOptions {
  MseReduction reduction = MseReduction::kMean;
  StftParams stft;
  int num_threads = 1;   // > 1 processes utterances concurrently
};

/// One record per manifest pair, ordered by id. Per-utterance failures land
/// in DistanceRecord::error; only an empty manifest is fatal.
std::vector<DistanceRecord> batch_distances(
    const DatasetManifest& manifest,
    const std::vector<std::shared_ptr<const SSSRBackend>>& backends,
    const std::vector<Layer>& layers, const BatchDistanceOptions& options = {});

/// Fixed column layout: utterance_id, d_sg, then d_fe_<model>/d_ol_<model>
/// for each backend, then mos and error.
void write_distance_csv(const std::string& path,
                        const std::vector<DistanceRecord>& records,
                        const std::vector<std::string>& model_ids);

}  // namespace srep

#endif  // SREP_DISTANCES_HPP_
