// src/resample.cpp

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

#include "srep/resample.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace srep {

namespace {

constexpr double kKaiserBeta = 8.6;
constexpr int kSincLobes = 32;  // zero crossings per side, at the cutoff

// Modified Bessel I0, power series.
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double half_x = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Kaiser-windowed sinc lowpass, cutoff `fc` in cycles/sample, half-width
// `half` input samples. h(0) = fc.
double kernel(double t, double fc, double half) {
  if (std::abs(t) >= half) return 0.0;
  double sinc = (t == 0.0) ? 1.0 : std::sin(M_PI * fc * t) / (M_PI * fc * t);
  double r = t / half;
  double window = bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / bessel_i0(kKaiserBeta);
  return fc * sinc * window;
}

}  // namespace

TimeSignal resample(const TimeSignal& sig, int target_rate) {
  if (target_rate <= 0) throw Error("resample: target rate must be positive");
  validate_signal(sig, "resample input");
  if (target_rate == sig.sample_rate) return sig;

  const int g = std::gcd(target_rate, sig.sample_rate);
  const std::int64_t up = target_rate / g;      // L
  const std::int64_t down = sig.sample_rate / g;  // M

  // Cutoff just below the narrower Nyquist, in input cycles/sample.
  const double fc = 0.97 * std::min(1.0, static_cast<double>(up) / down);
  const double half = kSincLobes / fc;
  const int half_i = static_cast<int>(std::ceil(half));

  const std::int64_t in_len = sig.length();
  const std::int64_t out_len =
      std::llround(static_cast<double>(in_len) * target_rate / sig.sample_rate);

  // Polyphase tap tables: output sample j sits at input position
  // j*M/L = i0 + phase/L with phase = (j*M) mod L.
  std::vector<std::vector<double>> taps(static_cast<std::size_t>(up));
  for (std::int64_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    auto& row = taps[static_cast<std::size_t>(p)];
    row.resize(static_cast<std::size_t>(2 * half_i + 1));
    for (int t = -half_i; t <= half_i; ++t) {
      row[static_cast<std::size_t>(t + half_i)] = kernel(t - frac, fc, half);
    }
  }

  TimeSignal out;
  out.sample_rate = target_rate;
  out.samples = Vec::Zero(out_len);
  for (std::int64_t j = 0; j < out_len; ++j) {
    const std::int64_t num = j * down;
    const std::int64_t i0 = num / up;
    const auto& row = taps[static_cast<std::size_t>(num % up)];
    double acc = 0.0;
    const std::int64_t lo = std::max<std::int64_t>(i0 - half_i, 0);
    const std::int64_t hi = std::min<std::int64_t>(i0 + half_i, in_len - 1);
    for (std::int64_t i = lo; i <= hi; ++i) {
      acc += sig.samples[i] * row[static_cast<std::size_t>(i - i0 + half_i)];
    }
    out.samples[j] = acc;
  }
  return out;
}

}  // namespace srep
