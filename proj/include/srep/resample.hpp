// srep/resample.hpp

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

#ifndef SREP_RESAMPLE_HPP_
#define SREP_RESAMPLE_HPP_

#include "srep/wav.hpp"

namespace srep {

/// Polyphase band-limited resampler: Kaiser-windowed sinc (beta = 8.6,
/// 32 sinc lobes per side at the cutoff), cutoff at 0.97 of the narrower
/// Nyquist. Output length is round(len * target_rate / sample_rate).
/// target_rate == sample_rate returns the input unchanged.
TimeSignal resample(const TimeSignal& sig, int target_rate);

/// Resamples to 16 kHz unless already there.
inline TimeSignal to_16k(const TimeSignal& sig) { return resample(sig, 16000); }

}  // namespace srep

#endif  // SREP_RESAMPLE_HPP_
