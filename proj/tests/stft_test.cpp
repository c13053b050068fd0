// tests/stft_test.cpp

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

#include "doctest.h"

#include "srep/stft.hpp"

#include "test_util.hpp"

#include <cmath>

using namespace srep;

TEST_CASE("window and geometry defaults") {
  StftParams params;
  CHECK(params.fft_size == 512);
  CHECK(params.num_bins() == 257);
  CHECK(params.window_samples(16000) == 512);
  CHECK(params.hop_samples(16000) == 256);
  CHECK(params.num_frames(4000, 16000) == 16);
  CHECK(params.num_frames(16000, 16000) == 63);

  const StftKernel& kernel = stft_kernel(params, 16000);
  CHECK(kernel.offset == 0);
  // Periodic Hamming reference values.
  CHECK(kernel.window_fn[0] == doctest::Approx(8.000000000000002e-02).epsilon(1e-12));
  CHECK(kernel.window_fn[256] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kernel.window_fn[100] ==
        doctest::Approx(3.850306674395788e-01).epsilon(1e-12));
  CHECK(kernel.window_fn.sum() ==
        doctest::Approx(2.764800000000000e+02).epsilon(1e-12));
}

TEST_CASE("magnitude and phase match the reference transform") {
  TimeSignal sig{testfix::seeded_signal(99, 4000), 16000};
  Spectrogram spec = stft(sig);
  REQUIRE(spec.frames() == 16);
  REQUIRE(spec.bins() == 257);

  struct Probe { int m, k; double mag, ph; };
  const Probe probes[] = {
      {0, 0, 5.505030903771353e+00, 3.141592653589793e+00},
      {1, 1, 3.310918598691432e+00, 1.789447194149376e+00},
      {2, 32, 8.192926890572718e+00, -3.130864413828744e+00},
      {3, 128, 4.426546515891624e+00, 2.200022271511278e+00},
      {15, 256, 8.345892572832170e+00, 3.141592653589793e+00},
      {7, 100, 1.277842355090849e+01, -1.932247690822553e+00},
  };
  for (const Probe& p : probes) {
    CHECK(spec.magnitude(p.m, p.k) == doctest::Approx(p.mag).epsilon(1e-10));
    CHECK(spec.phase(p.m, p.k) == doctest::Approx(p.ph).epsilon(1e-9));
  }
  CHECK(spec.magnitude.sum() ==
        doctest::Approx(3.000821917875770e+04).epsilon(1e-10));
}

TEST_CASE("non-16k rates fold the window into the wider FFT buffer") {
  TimeSignal sig{testfix::seeded_signal(7, 600), 8000};
  Spectrogram spec = stft(sig);
  REQUIRE(spec.frames() == 5);
  CHECK(spec.magnitude(0, 0) == doctest::Approx(1.365451526593096e+00).epsilon(1e-10));
  CHECK(spec.magnitude(2, 50) == doctest::Approx(4.926405327378788e+00).epsilon(1e-10));
  CHECK(spec.magnitude(4, 200) == doctest::Approx(5.863421612422569e+00).epsilon(1e-10));
  CHECK(spec.magnitude.sum() ==
        doctest::Approx(6.655188364600170e+03).epsilon(1e-10));
}

TEST_CASE("a pure tone lands on its analytic bin") {
  const int rate = 16000;
  Vec samples(rate);
  for (int i = 0; i < rate; ++i) {
    samples[i] = std::sin(2.0 * M_PI * 1000.0 * i / rate);
  }
  Spectrogram spec = stft(TimeSignal{samples, rate});
  // 1 kHz at 16 kHz with a 512-point FFT is exactly bin 32; the peak level
  // is half the window sum (the tone's energy splits across +-f).
  for (int m = 2; m < spec.frames() - 2; ++m) {
    int peak = 0;
    spec.magnitude.row(m).maxCoeff(&peak);
    CHECK(peak == 32);
  }
  CHECK(spec.magnitude(10, 32) ==
        doctest::Approx(1.382400000000000e+02).epsilon(1e-10));
}

TEST_CASE("equal-length signals produce equal frame counts") {
  for (int n : {512, 700, 1024, 2049}) {
    Spectrogram a = stft(TimeSignal{testfix::seeded_signal(1, n), 16000});
    Spectrogram b = stft(TimeSignal{testfix::seeded_signal(2, n), 16000});
    CHECK(a.frames() == b.frames());
    CHECK(a.frames() == 1 + n / 256);
  }
}

TEST_CASE("istft(stft(x)) reproduces the signal") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    TimeSignal sig{testfix::seeded_signal(seed, 3200, 0.5), 16000};
    Spectrogram spec = stft(sig);
    TimeSignal rec = istft_overlap_add(spec);
    REQUIRE(rec.length() == sig.length());
    const double rel = (rec.samples - sig.samples).norm() / sig.samples.norm();
    CHECK(rel < 1e-3);
    // Interior samples are much tighter than the edge-inclusive bound.
    const int margin = 512;
    const double rel_interior =
        (rec.samples.segment(margin, 3200 - 2 * margin) -
         sig.samples.segment(margin, 3200 - 2 * margin)).norm() /
        sig.samples.segment(margin, 3200 - 2 * margin).norm();
    CHECK(rel_interior < 1e-10);
  }
}

TEST_CASE("istft respects the requested output length") {
  TimeSignal sig{testfix::seeded_signal(3, 1000), 16000};
  Spectrogram spec = stft(sig);
  TimeSignal rec = istft_overlap_add(spec.magnitude, spec.phase, spec.params,
                                     spec.sample_rate, 777);
  CHECK(rec.length() == 777);
}

TEST_CASE("stft input validation") {
  CHECK_THROWS_AS(stft(TimeSignal{Vec::Zero(100), 16000}), Error);  // < window
  Vec bad = Vec::Zero(1000);
  bad[5] = std::nan("");
  CHECK_THROWS_AS(stft(TimeSignal{bad, 16000}), Error);
  CHECK_THROWS_AS(stft(TimeSignal{Vec::Zero(1000), 0}), Error);
}

TEST_CASE("istft validation") {
  StftParams params;
  CHECK_THROWS_AS(istft_overlap_add(Mat::Zero(4, 257), Mat::Zero(5, 257),
                                    params, 16000, 100),
                  Error);
  CHECK_THROWS_AS(istft_overlap_add(Mat::Zero(4, 100), Mat::Zero(4, 100),
                                    params, 16000, 100),
                  Error);
}
