// tests/csv_manifest_test.cpp

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

#include "srep/csv.hpp"
#include "srep/manifest.hpp"
#include "srep/synth.hpp"
#include "srep/wav.hpp"

#include "test_util.hpp"

#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace srep;

namespace {

// One deterministic voicebank-layout corpus per process, reused by the
// manifest tests below.
const std::string& synth_root() {
  static const std::string root = [] {
    const std::string r = testfix::scratch_dir() + "/corpus_vb";
    SynthCorpusOptions options;
    options.duration_s = 0.25;
    write_synthetic_corpus(r, 2, options, 123);
    return r;
  }();
  return root;
}

}  // namespace

TEST_CASE("csv round trip with quoting") {
  const std::string path = testfix::scratch_dir() + "/table.csv";
  CsvTable t;
  t.header = {"id", "note", "value"};
  t.rows = {{"a", "plain", "1.5"},
            {"b", "has,comma", "2"},
            {"c", "has \"quotes\"", ""},
            {"d", "multi\nline", "-3"}};
  write_csv(path, t);
  CsvTable back = read_csv(path);
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  CHECK(back.rows == t.rows);
  CHECK(back.column("note") == 1);
  CHECK(back.column("absent") == -1);
  CHECK(back.has_column("value"));
}

TEST_CASE("csv read rejects a missing file") {
  CHECK_THROWS_AS(read_csv(testfix::scratch_dir() + "/no_such.csv"),
                  MissingInputError);
}

TEST_CASE("format_double is compact and round-trippable") {
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.5) == "-0.5");
  CHECK(std::stod(format_double(1.0 / 3.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("voicebank manifest discovers pairs and log metadata") {
  DatasetManifest m = build_manifest(synth_root(), CorpusLayout::kVoicebank, "train");
  CHECK(m.split == "train");
  REQUIRE(m.entries.size() == 8);  // 2 utterances x 4 SNRs

  // ids sorted, metadata from log.txt
  CHECK(m.entries.front().id < m.entries.back().id);
  for (const auto& e : m.entries) {
    REQUIRE(e.snr_db.has_value());
    REQUIRE(e.noise_label.has_value());
    CHECK(*e.noise_label == "white");
    CHECK(fs::exists(e.clean_path));
    CHECK(fs::exists(e.noisy_path));
    CHECK_FALSE(e.mos.has_value());
  }
  const auto snr0 = m.entries[0].snr_db;
  CHECK(*snr0 == 0.0);
}

TEST_CASE("manifest round trip preserves optional fields") {
  DatasetManifest m = build_manifest(synth_root(), CorpusLayout::kVoicebank, "valid");
  m.entries[1].mos = 3.25;
  m.entries[2].snr_db.reset();
  m.entries[2].noise_label.reset();

  const std::string path = testfix::scratch_dir() + "/manifest_rt.csv";
  write_manifest(path, m);
  DatasetManifest back = read_manifest(path);
  REQUIRE(back.entries.size() == m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    CHECK(back.entries[i].id == m.entries[i].id);
    CHECK(back.entries[i].clean_path == m.entries[i].clean_path);
    CHECK(back.entries[i].noisy_path == m.entries[i].noisy_path);
    CHECK(back.entries[i].snr_db == m.entries[i].snr_db);
    CHECK(back.entries[i].noise_label == m.entries[i].noise_label);
    CHECK(back.entries[i].mos == m.entries[i].mos);
  }
}

TEST_CASE("load_pair aligns lengths and resamples to the target rate") {
  DatasetManifest m = build_manifest(synth_root(), CorpusLayout::kVoicebank, "train");
  UtterancePair pair = load_pair(m.entries[0]);
  CHECK(pair.clean.sample_rate == 16000);
  CHECK(pair.noisy.sample_rate == 16000);
  CHECK(pair.clean.length() == pair.noisy.length());
  CHECK(pair.clean.length() == 4000);  // 0.25 s at 16 kHz
  CHECK(pair.id == m.entries[0].id);

  // small skew is truncated to the minimum
  PairEntry skewed = m.entries[0];
  TimeSignal longer = load_audio(skewed.noisy_path);
  longer.samples.conservativeResize(longer.length() + 100);
  longer.samples.tail(100).setZero();
  const std::string alt = testfix::scratch_dir() + "/skewed.wav";
  save_audio(alt, longer, 32);
  skewed.noisy_path = alt;
  UtterancePair aligned = load_pair(skewed);
  CHECK(aligned.clean.length() == aligned.noisy.length());

  // large skew is an error
  longer.samples.conservativeResize(longer.length() + 8000);
  longer.samples.tail(8000).setZero();
  save_audio(alt, longer, 32);
  CHECK_THROWS_AS(load_pair(skewed), Error);
}

TEST_CASE("nisqa layout reads label csv with mos") {
  const std::string root = testfix::scratch_dir() + "/corpus_nisqa";
  fs::create_directories(root + "/deg");
  fs::create_directories(root + "/ref");

  TimeSignal sig;
  sig.sample_rate = 16000;
  for (const char* name : {"f1", "f2"}) {
    sig.samples = testfix::seeded_signal(fnv1a(name), 800, 0.3);
    save_audio(root + "/deg/" + name + ".wav", sig, 16);
    save_audio(root + "/ref/" + name + ".wav", sig, 16);
  }
  {
    std::ofstream csv(root + "/labels.csv");
    csv << "filename_deg,filename_ref,mos\n";
    csv << "deg/f1.wav,ref/f1.wav,4.2\n";
    csv << "deg/f2.wav,ref/f2.wav,1.9\n";
  }

  DatasetManifest m = build_manifest(root, CorpusLayout::kNisqa, "test");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].id == "f1");
  REQUIRE(m.entries[0].mos.has_value());
  CHECK(*m.entries[0].mos == 4.2);
  CHECK(*m.entries[1].mos == 1.9);
  CHECK_FALSE(m.entries[0].snr_db.has_value());
}

TEST_CASE("manifest failures are categorized") {
  CHECK_THROWS_AS(build_manifest(testfix::scratch_dir() + "/nowhere",
                                 CorpusLayout::kVoicebank, "train"),
                  MissingInputError);

  // voicebank root without clean/noisy
  const std::string bare = testfix::scratch_dir() + "/bare_root";
  fs::create_directories(bare);
  CHECK_THROWS_AS(build_manifest(bare, CorpusLayout::kVoicebank, "train"),
                  MissingInputError);

  // directories present but empty -> empty result set
  fs::create_directories(bare + "/clean");
  fs::create_directories(bare + "/noisy");
  CHECK_THROWS_AS(build_manifest(bare, CorpusLayout::kVoicebank, "train"),
                  MissingInputError);

  // nisqa root without a label csv
  CHECK_THROWS_AS(build_manifest(bare, CorpusLayout::kNisqa, "train"),
                  MissingInputError);

  CHECK_THROWS_AS(parse_layout("timit"), ConfigError);
  CHECK(parse_layout("voicebank") == CorpusLayout::kVoicebank);
  CHECK(parse_layout("nisqa") == CorpusLayout::kNisqa);

  CHECK_THROWS_AS(read_manifest(testfix::scratch_dir() + "/absent.csv"),
                  MissingInputError);
}
