// srep/synth.cpp

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

#include "srep/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace srep {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

double rms(const Vec& v) {
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

}  // namespace

Vec synth_speech(int length, int sample_rate, SplitMix64& rng) {
  if (length <= 0 || sample_rate <= 0) throw Error("synth_speech: bad dimensions");
  const double f0_base = 100.0 + 80.0 * rng.next_double();
  const double f0_depth = 10.0 + 30.0 * rng.next_double();
  const double f0_rate = 0.4 + 0.8 * rng.next_double();
  const double syllable_rate = 2.0 + 2.0 * rng.next_double();
  const double phase_f0 = kTau * rng.next_double();
  const double phase_env = kTau * rng.next_double();

  // Two random formant-ish bumps shape the harmonic amplitudes.
  const double formant1 = 300.0 + 500.0 * rng.next_double();
  const double formant2 = 1200.0 + 1500.0 * rng.next_double();
  const int harmonics = 24;
  std::vector<double> harmonic_phase(harmonics);
  for (int h = 0; h < harmonics; ++h) harmonic_phase[h] = kTau * rng.next_double();

  Vec out = Vec::Zero(length);
  double f0_integral = 0.0;
  const double dt = 1.0 / sample_rate;
  for (int n = 0; n < length; ++n) {
    const double t = n * dt;
    const double f0 = f0_base + f0_depth * std::sin(kTau * f0_rate * t + phase_f0);
    f0_integral += f0 * dt;
    double sample = 0.0;
    for (int h = 1; h <= harmonics; ++h) {
      const double freq = h * f0;
      if (freq >= 0.45 * sample_rate) break;
      const double bump1 = std::exp(-std::pow((freq - formant1) / 200.0, 2.0));
      const double bump2 = std::exp(-std::pow((freq - formant2) / 400.0, 2.0));
      const double amp = (0.2 + bump1 + 0.6 * bump2) / h;
      sample += amp * std::sin(kTau * h * f0_integral + harmonic_phase[h - 1]);
    }
    double env = 0.5 * (1.0 + std::sin(kTau * syllable_rate * t + phase_env));
    env = 0.15 + 0.85 * env * env;  // never fully silent between syllables
    out[n] = env * sample;
  }
  // Faint aspiration floor, then a fixed working level.
  for (int n = 0; n < length; ++n) out[n] += 0.002 * rng.next_gaussian();
  out *= 0.1 / rms(out);
  return out;
}

Vec synth_noise(const std::string& kind, int length, int sample_rate,
                SplitMix64& rng) {
  if (length <= 0 || sample_rate <= 0) throw Error("synth_noise: bad dimensions");
  Vec out = Vec::Zero(length);
  if (kind == "white") {
    for (int n = 0; n < length; ++n) out[n] = rng.next_gaussian();
  } else if (kind == "pink") {
    double state = 0.0;
    for (int n = 0; n < length; ++n) {
      state = 0.98 * state + rng.next_gaussian();
      out[n] = state;
    }
  } else if (kind == "tonal") {
    // A fixed chord; distinctly non-speech-like lines in the spectrogram.
    const double base = 400.0 + 2000.0 * rng.next_double();
    const double freqs[3] = {base, base * 1.26, base * 1.5};
    const double phases[3] = {kTau * rng.next_double(), kTau * rng.next_double(),
                              kTau * rng.next_double()};
    for (int n = 0; n < length; ++n) {
      const double t = static_cast<double>(n) / sample_rate;
      for (int k = 0; k < 3; ++k) out[n] += std::sin(kTau * freqs[k] * t + phases[k]);
    }
  } else {
    throw ConfigError("synth_noise: unknown kind '" + kind + "'");
  }
  out /= rms(out);
  return out;
}

Vec mix_to_snr(const Vec& clean, const Vec& noise, double snr_db) {
  if (clean.size() != noise.size()) throw Error("mix_to_snr: length mismatch");
  const double clean_rms = rms(clean);
  const double noise_rms = rms(noise);
  if (clean_rms <= 0.0 || noise_rms <= 0.0) throw Error("mix_to_snr: silent input");
  const double scale = clean_rms / (noise_rms * std::pow(10.0, snr_db / 20.0));
  return clean + scale * noise;
}

DatasetManifest write_synthetic_corpus(const std::string& root,
                                       int num_utterances,
                                       const SynthCorpusOptions& options,
                                       std::uint64_t seed) {
  if (num_utterances <= 0) throw ConfigError("synthetic corpus needs >= 1 utterance");
  if (options.snrs_db.empty()) throw ConfigError("synthetic corpus needs >= 1 SNR");
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(root) / "clean");
  fs::create_directories(fs::path(root) / "noisy");

  const int length =
      static_cast<int>(options.duration_s * options.sample_rate + 0.5);
  DatasetManifest manifest;
  manifest.name = "synthetic";
  manifest.split = "test";

  std::ofstream log(fs::path(root) / "log.txt");
  if (!log) throw Error("cannot write corpus log under " + root);

  for (int u = 0; u < num_utterances; ++u) {
    SplitMix64 rng(seed ^ fnv1a("utt-" + std::to_string(u)));
    const Vec clean = synth_speech(length, options.sample_rate, rng);
    const Vec noise = synth_noise(options.noise, length, options.sample_rate, rng);
    for (std::size_t k = 0; k < options.snrs_db.size(); ++k) {
      const double snr = options.snrs_db[k];
      char id[64];
      std::snprintf(id, sizeof(id), "u%03d_snr%02zu", u, k);
      const Vec noisy = mix_to_snr(clean, noise, snr);
      const std::string clean_path = (fs::path(root) / "clean" / (std::string(id) + ".wav")).string();
      const std::string noisy_path = (fs::path(root) / "noisy" / (std::string(id) + ".wav")).string();
      // IEEE-float files: mixtures keep full precision and never clip.
      save_audio(clean_path, TimeSignal{clean, options.sample_rate}, 32);
      save_audio(noisy_path, TimeSignal{noisy, options.sample_rate}, 32);
      log << id << " " << options.noise << " " << snr << "\n";
      PairEntry entry;
      entry.id = id;
      entry.clean_path = clean_path;
      entry.noisy_path = noisy_path;
      entry.snr_db = snr;
      entry.noise_label = options.noise;
      manifest.entries.push_back(std::move(entry));
    }
  }
  return manifest;
}

}  // namespace srep
