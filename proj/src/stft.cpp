// src/stft.cpp

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

#include "srep/stft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace srep {

int StftParams::window_samples(int sample_rate) const {
  return static_cast<int>(std::lround(window_length_ms * sample_rate / 1000.0));
}

int StftParams::hop_samples(int sample_rate) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

int StftParams::num_frames(int signal_length, int sample_rate) const {
  return 1 + signal_length / hop_samples(sample_rate);
}

StftKernel::StftKernel(const StftParams& params, int sample_rate) {
  fft_size = params.fft_size;
  window = params.window_samples(sample_rate);
  hop = params.hop_samples(sample_rate);
  if (window > fft_size) throw Error("stft: window longer than FFT size");
  if (hop <= 0 || window <= 0) throw Error("stft: non-positive window or hop");
  offset = (fft_size - window) / 2;

  // Periodic Hamming.
  window_fn.resize(window);
  for (int n = 0; n < window; ++n) {
    window_fn[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / window);
  }

  const int bins = params.num_bins();
  fwd_re = Mat::Zero(fft_size, bins);
  fwd_im = Mat::Zero(fft_size, bins);
  inv_re = Mat::Zero(bins, fft_size);
  inv_im = Mat::Zero(bins, fft_size);
  for (int k = 0; k < bins; ++k) {
    // Bins 0 and N/2 appear once in the full spectrum, the rest twice.
    const double weight = (k == 0 || k == fft_size / 2) ? 1.0 : 2.0;
    for (int n = 0; n < fft_size; ++n) {
      const double angle = 2.0 * M_PI * static_cast<double>(n) * k / fft_size;
      const double w = (n >= offset && n < offset + window) ? window_fn[n - offset] : 0.0;
      fwd_re(n, k) = w * std::cos(angle);
      fwd_im(n, k) = -w * std::sin(angle);
      inv_re(k, n) = weight / fft_size * std::cos(angle);
      inv_im(k, n) = -weight / fft_size * std::sin(angle);
    }
  }
}

const StftKernel& stft_kernel(const StftParams& params, int sample_rate) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<StftKernel>> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_tuple(params.fft_size, params.window_samples(sample_rate),
                             params.hop_samples(sample_rate));
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<StftKernel>(params, sample_rate)).first;
  }
  return *it->second;
}

namespace {

// Reflection without edge repetition, folded as often as needed.
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  const Eigen::Index period = 2 * (n - 1);
  i = ((i % period) + period) % period;
  return i < n ? i : period - i;
}

}  // namespace

Eigen::ArrayXXi frame_indices(Eigen::Index n, const StftKernel& kernel) {
  if (n < kernel.window) throw Error("stft: signal shorter than one window");
  const int frames = kernel.num_frames(static_cast<int>(n));
  const int half = kernel.fft_size / 2;
  Eigen::ArrayXXi idx(frames, kernel.fft_size);
  for (int m = 0; m < frames; ++m) {
    const Eigen::Index start = static_cast<Eigen::Index>(m) * kernel.hop - half;
    for (int j = 0; j < kernel.fft_size; ++j) {
      idx(m, j) = static_cast<int>(reflect_index(start + j, n));
    }
  }
  return idx;
}

Mat frame_signal(const Vec& samples, const StftKernel& kernel) {
  const Eigen::ArrayXXi idx = frame_indices(samples.size(), kernel);
  Mat out(idx.rows(), idx.cols());
  for (Eigen::Index m = 0; m < idx.rows(); ++m) {
    for (Eigen::Index j = 0; j < idx.cols(); ++j) {
      out(m, j) = samples[idx(m, j)];
    }
  }
  return out;
}

Spectrogram stft(const TimeSignal& sig, const StftParams& params) {
  validate_signal(sig, "stft input");
  const StftKernel& kernel = stft_kernel(params, sig.sample_rate);
  Mat frames = frame_signal(sig.samples, kernel);
  Mat re = frames * kernel.fwd_re;
  Mat im = frames * kernel.fwd_im;

  Spectrogram spec;
  spec.params = params;
  spec.sample_rate = sig.sample_rate;
  spec.origin_length = sig.length();
  spec.magnitude = (re.array().square() + im.array().square()).sqrt();
  spec.phase.resize(re.rows(), re.cols());
  for (Eigen::Index i = 0; i < re.size(); ++i) {
    spec.phase(i) = std::atan2(im(i), re(i));
  }
  return spec;
}

TimeSignal istft_overlap_add(const Mat& magnitude, const Mat& phase,
                             const StftParams& params, int sample_rate,
                             int out_length) {
  if (magnitude.rows() != phase.rows() || magnitude.cols() != phase.cols()) {
    throw Error("istft: magnitude/phase shape mismatch");
  }
  const StftKernel& kernel = stft_kernel(params, sample_rate);
  if (magnitude.cols() != kernel.fwd_re.cols()) {
    throw Error("istft: bin count does not match params");
  }
  const int frames = static_cast<int>(magnitude.rows());
  const int half = kernel.fft_size / 2;

  Mat re = magnitude.array() * phase.array().cos();
  Mat im = magnitude.array() * phase.array().sin();
  Mat time_frames = re * kernel.inv_re + im * kernel.inv_im;  // frames x fft

  const Eigen::Index padded = static_cast<Eigen::Index>(frames - 1) * kernel.hop +
                              kernel.fft_size;
  Vec acc = Vec::Zero(padded);
  Vec env = Vec::Zero(padded);
  for (int m = 0; m < frames; ++m) {
    const Eigen::Index base = static_cast<Eigen::Index>(m) * kernel.hop;
    for (int j = 0; j < kernel.window; ++j) {
      const double w = kernel.window_fn[j];
      acc[base + kernel.offset + j] += w * time_frames(m, kernel.offset + j);
      env[base + kernel.offset + j] += w * w;
    }
  }

  TimeSignal out;
  out.sample_rate = sample_rate;
  out.samples = Vec::Zero(out_length);
  for (Eigen::Index i = 0; i < out_length; ++i) {
    const Eigen::Index j = i + half;
    if (j < padded && env[j] > 1e-10) out.samples[i] = acc[j] / env[j];
  }
  return out;
}

}  // namespace srep
