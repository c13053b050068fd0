// srep/wav.hpp

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

#ifndef SREP_WAV_HPP_
#define SREP_WAV_HPP_

#include "srep/common.hpp"

#include <string>

namespace srep {

/// A sampled mono waveform. Samples are floats in [-1, 1]; integer PCM is
/// rescaled on load. All pipeline audio ends up at 16 kHz after
/// preprocessing; ingestion accepts whatever rate the file carries.
struct TimeSignal {
  Vec samples;
  int sample_rate = 0;

  int length() const { return static_cast<int>(samples.size()); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

/// Reads a mono PCM WAV file (16-bit integer or 32-bit IEEE float).
/// Throws MissingInputError if the path does not exist and Error for
/// unsupported encodings, multi-channel files, or zero-length audio.
TimeSignal load_audio(const std::string& path);

/// Writes a mono WAV file. format: 16 = 16-bit PCM, 32 = IEEE float.
/// 16-bit output clamps samples to [-1, 1].
void save_audio(const std::string& path, const TimeSignal& sig,
                int format = 16);

/// Asserts the TimeSignal invariants (finite samples, positive rate);
/// throws Error with the offending detail otherwise.
void validate_signal(const TimeSignal& sig, const std::string& context);

}  // namespace srep

#endif  // SREP_WAV_HPP_
