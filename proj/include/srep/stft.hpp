// srep/stft.hpp

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

#ifndef SREP_STFT_HPP_
#define SREP_STFT_HPP_

#include "srep/wav.hpp"

namespace srep {

/// Analysis parameters. Defaults: 512-point FFT, 32 ms Hamming window with
/// a 16 ms hop (50% overlap), giving 257 frequency bins at 16 kHz.
struct StftParams {
  int fft_size = 512;
  double window_length_ms = 32.0;
  double hop_ms = 16.0;

  int window_samples(int sample_rate) const;
  int hop_samples(int sample_rate) const;
  int num_bins() const { return fft_size / 2 + 1; }
  int num_frames(int signal_length, int sample_rate) const;
};

/// Complex STFT split into magnitude and phase, both T x F_Hz with time as
/// the row dimension. Frames are centered (reflect padding), so equal-length
/// signals always produce equal T.
struct Spectrogram {
  Mat magnitude;  // >= 0
  Mat phase;      // radians
  StftParams params;
  int sample_rate = 0;
  int origin_length = 0;

  int frames() const { return static_cast<int>(magnitude.rows()); }
  int bins() const { return static_cast<int>(magnitude.cols()); }
};

/// Precomputed window and real-DFT bases shared by the analysis and
/// synthesis paths (and reused verbatim by the differentiable path, so both
/// compute identical values). The window is folded into the forward basis.
struct StftKernel {
  int fft_size = 0;
  int window = 0;
  int hop = 0;
  int offset = 0;  // window start within the FFT buffer (centered)
  Vec window_fn;   // periodic Hamming, length `window`
  Mat fwd_re;      // fft_size x bins, w[n] * cos(2*pi*n*k/N)
  Mat fwd_im;      // fft_size x bins, -w[n] * sin(2*pi*n*k/N)
  Mat inv_re;      // bins x fft_size
  Mat inv_im;      // bins x fft_size

  StftKernel(const StftParams& params, int sample_rate);
  int num_frames(int signal_length) const { return 1 + signal_length / hop; }
};

/// Shared per-process kernel cache; safe for concurrent use.
const StftKernel& stft_kernel(const StftParams& params, int sample_rate);

/// Reflect-pads and frames a signal: row m covers samples
/// [m*hop - fft/2, m*hop + fft/2) of the original. Errors if the signal is
/// shorter than one window.
Mat frame_signal(const Vec& samples, const StftKernel& kernel);

/// Sample index used by frame_signal for each (frame, tap) position, exposed
/// so the differentiable path frames with exactly the same reflection.
Eigen::ArrayXXi frame_indices(Eigen::Index signal_length, const StftKernel& kernel);

Spectrogram stft(const TimeSignal& sig, const StftParams& params = {});

/// Weighted overlap-add resynthesis: frames are windowed again on the way
/// out and the sum is divided by the accumulated squared-window envelope, so
/// an unmodified spectrogram reproduces the input (edges excluded).
TimeSignal istft_overlap_add(const Mat& magnitude, const Mat& phase,
                             const StftParams& params, int sample_rate,
                             int out_length);

inline TimeSignal istft_overlap_add(const Spectrogram& spec) {
  return istft_overlap_add(spec.magnitude, spec.phase, spec.params,
                           spec.sample_rate, spec.origin_length);
}

}  // namespace srep

#endif  // SREP_STFT_HPP_
