// srep/synth.hpp

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

#ifndef SREP_SYNTH_HPP_
#define SREP_SYNTH_HPP_

#include "srep/manifest.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srep {

class SplitMix64;

/// Voiced harmonic complex with drifting pitch, syllable-rate amplitude
/// modulation, and a faint noise floor; spectrally structured enough that
/// additive noise changes its spectrogram in an SNR-ordered way.
Vec synth_speech(int length, int sample_rate, SplitMix64& rng);

/// kind: "white" (Gaussian), "pink" (one-pole filtered), or "tonal"
/// (a chord of fixed sinusoids).
Vec synth_noise(const std::string& kind, int length, int sample_rate,
                SplitMix64& rng);

/// clean + noise scaled so that 10*log10(P_clean / P_noise) == snr_db.
/// Errors if either input is silent.
Vec mix_to_snr(const Vec& clean, const Vec& noise, double snr_db);

struct SynthCorpusOptions {
  int sample_rate = 16000;
  double duration_s = 1.0;
  std::vector<double> snrs_db = {0.0, 5.0, 10.0, 15.0};
  std::string noise = "white";
};

/// Writes a voicebank-layout corpus under `root`: clean/<id>.wav,
/// noisy/<id>.wav, and log.txt with per-file noise kind and SNR. Each of the
/// `num_utterances` clean signals appears once per SNR (ids u<i>_snr<k>), so
/// the corpus supports ordering checks across SNR for a fixed utterance.
/// Returns the manifest of everything written. Fully determined by `seed`.
DatasetManifest write_synthetic_corpus(const std::string& root,
                                       int num_utterances,
                                       const SynthCorpusOptions& options,
                                       std::uint64_t seed);

}  // namespace srep

#endif  // SREP_SYNTH_HPP_
