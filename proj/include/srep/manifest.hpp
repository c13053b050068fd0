// srep/manifest.hpp

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

#ifndef SREP_MANIFEST_HPP_
#define SREP_MANIFEST_HPP_

#include "srep/wav.hpp"

#include <optional>
#include <string>
#include <vector>

namespace srep {

/// One clean/noisy utterance pair, referenced by path. Audio is loaded on
/// demand; manifests stay lightweight.
struct PairEntry {
  std::string id;
  std::string clean_path;
  std::string noisy_path;
  std::optional<double> snr_db;
  std::optional<std::string> noise_label;
  std::optional<double> mos;  // [1, 5], NISQA-style corpora only
};

/// A loaded, time-aligned pair at a common sample rate.
struct UtterancePair {
  std::string id;
  TimeSignal clean;
  TimeSignal noisy;
  std::optional<double> snr_db;
  std::optional<std::string> noise_label;
  std::optional<double> mos;
};

enum class CorpusLayout { kVoicebank, kNisqa };

struct DatasetManifest {
  std::string name;
  std::string split;  // train | valid | test
  std::vector<PairEntry> entries;
};

CorpusLayout parse_layout(const std::string& name);

/// Scans `root` following the named corpus convention (see README) and
/// returns all pairs found, ordered by id.
///   voicebank: <root>/clean/*.wav + <root>/noisy/*.wav matched by file name;
///              an optional <root>/log.txt ("<id> <noise> <snr>") fills
///              snr_db / noise_label.
///   nisqa:     a single label CSV at <root> (columns filename_deg,
///              filename_ref, mos) with paths resolved relative to root.
/// Throws MissingInputError on empty result sets or a missing label file.
DatasetManifest build_manifest(const std::string& root, CorpusLayout layout,
                               const std::string& split);

/// CSV round trip. Columns: id, clean_path, noisy_path, snr_db, noise_label,
/// mos. Empty fields mean absent.
void write_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& path);

/// Loads both signals of an entry and resamples to 16 kHz. Length
/// mismatches up to `max_skew_s` seconds are truncated to the minimum;
/// larger mismatches are an error.
UtterancePair load_pair(const PairEntry& entry, int target_rate = 16000,
                        double max_skew_s = 0.1);

}  // namespace srep

#endif  // SREP_MANIFEST_HPP_
