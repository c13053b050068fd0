// tests/distances_test.cpp

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
#include "srep/distances.hpp"
#include "srep/synth.hpp"

#include "test_util.hpp"

#include <filesystem>

using namespace srep;

namespace {

Mat seeded_mat(SplitMix64& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = 2.0 * rng.next_double() - 1.0;
  return m;
}

TimeSignal signal_from(std::uint64_t seed, int n, double amp) {
  TimeSignal sig;
  sig.sample_rate = 16000;
  sig.samples = testfix::seeded_signal(seed, n, amp);
  return sig;
}

}  // namespace

TEST_CASE("mse_distance reproduces the reference values") {
  SplitMix64 rng(23);
  Mat a = seeded_mat(rng, 5, 7);
  Mat b = seeded_mat(rng, 5, 7);
  CHECK(mse_distance(a, b, MseReduction::kMean) ==
        doctest::Approx(7.814372710160116e-01).epsilon(1e-12));
  CHECK(mse_distance(a, b, MseReduction::kSum) ==
        doctest::Approx(2.735030448556040e+01).epsilon(1e-12));
  // sum = mean * count
  CHECK(mse_distance(a, b, MseReduction::kSum) ==
        doctest::Approx(35.0 * mse_distance(a, b, MseReduction::kMean)).epsilon(1e-12));

  CHECK(mse_distance(a, a) == 0.0);
  CHECK(mse_distance(a, b) == doctest::Approx(mse_distance(b, a)).epsilon(1e-15));
}

TEST_CASE("mse_distance rejects shape mismatches") {
  Mat a = Mat::Zero(2, 3);
  Mat b = Mat::Zero(3, 2);
  CHECK_THROWS_WITH_AS(mse_distance(a, b),
                       doctest::Contains("shape"), Error);
}

TEST_CASE("spectrogram_distance basics") {
  TimeSignal s = signal_from(41, 4000, 0.5);
  TimeSignal noisier = s;
  noisier.samples += testfix::seeded_signal(42, 4000, 0.05);

  CHECK(spectrogram_distance(s, s) == 0.0);
  const double d = spectrogram_distance(s, noisier);
  CHECK(d > 0.0);
  CHECK(spectrogram_distance(noisier, s) == doctest::Approx(d).epsilon(1e-12));

  // louder perturbation moves the spectrogram further
  TimeSignal worst = s;
  worst.samples += testfix::seeded_signal(42, 4000, 0.3);
  CHECK(spectrogram_distance(s, worst) > d);

  CHECK(spectrogram_distance(s, noisier, MseReduction::kSum) >
        spectrogram_distance(s, noisier, MseReduction::kMean));
}

TEST_CASE("representation_distance identity and frame-gap policy") {
  auto backend = testfix::hubert_backend();
  TimeSignal s = signal_from(51, 1000, 0.3);

  CHECK(representation_distance(*backend, Layer::kFE, s, s) == 0.0);
  CHECK(representation_distance(*backend, Layer::kOL, s, s) == 0.0);

  // up to two frames of length skew are tolerated (truncated to the shorter)
  TimeSignal shorter = s;
  shorter.samples.conservativeResize(1000 - 80);  // one frame less
  const double d = representation_distance(*backend, Layer::kFE, s, shorter);
  CHECK(d == 0.0);  // identical prefix

  TimeSignal far = s;
  far.samples.conservativeResize(1000 - 3 * 80);  // three frames less
  CHECK_THROWS_AS(representation_distance(*backend, Layer::kFE, s, far), Error);

  TimeSignal noisy = s;
  noisy.samples += testfix::seeded_signal(52, 1000, 0.05);
  CHECK(representation_distance(*backend, Layer::kFE, s, noisy) > 0.0);
  CHECK(representation_distance(*backend, Layer::kOL, s, noisy) > 0.0);
}

TEST_CASE("batch_distances processes a synthetic corpus") {
  const std::string root = testfix::scratch_dir() + "/corpus_batch";
  SynthCorpusOptions options;
  options.duration_s = 0.25;
  DatasetManifest manifest = write_synthetic_corpus(root, 1, options, 321);
  REQUIRE(manifest.entries.size() == 4);

  auto backend = testfix::hubert_backend();
  BatchDistanceOptions batch;
  auto records = batch_distances(manifest, {backend}, {Layer::kFE, Layer::kOL}, batch);
  REQUIRE(records.size() == 4);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].utterance_id == manifest.entries[i].id);
    CHECK(records[i].error.empty());
    REQUIRE(records[i].d_sg.has_value());
    CHECK(*records[i].d_sg > 0.0);
    REQUIRE(records[i].d_fe.count("hubert") == 1);
    REQUIRE(records[i].d_ol.count("hubert") == 1);
    CHECK(records[i].d_fe.at("hubert") > 0.0);
  }

  // multithreaded run returns the same numbers in the same order
  batch.num_threads = 3;
  auto parallel = batch_distances(manifest, {backend}, {Layer::kFE, Layer::kOL}, batch);
  REQUIRE(parallel.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parallel[i].utterance_id == records[i].utterance_id);
    CHECK(*parallel[i].d_sg == *records[i].d_sg);
    CHECK(parallel[i].d_fe.at("hubert") == records[i].d_fe.at("hubert"));
    CHECK(parallel[i].d_ol.at("hubert") == records[i].d_ol.at("hubert"));
  }

  // spectrogram-only runs skip the representation columns
  auto sg_only = batch_distances(manifest, {}, {}, BatchDistanceOptions{});
  REQUIRE(sg_only.size() == 4);
  CHECK(sg_only[0].d_fe.empty());
  CHECK(sg_only[0].d_ol.empty());
  REQUIRE(sg_only[0].d_sg.has_value());
  CHECK(*sg_only[0].d_sg == *records[0].d_sg);
}

TEST_CASE("batch_distances captures per-utterance failures") {
  const std::string root = testfix::scratch_dir() + "/corpus_broken";
  SynthCorpusOptions options;
  options.duration_s = 0.25;
  DatasetManifest manifest = write_synthetic_corpus(root, 1, options, 77);
  manifest.entries[1].noisy_path = root + "/noisy/apsent.wav";  // break one pair

  auto records = batch_distances(manifest, {}, {}, BatchDistanceOptions{});
  REQUIRE(records.size() == 4);
  CHECK(records[0].error.empty());
  CHECK_FALSE(records[1].error.empty());
  CHECK_FALSE(records[1].d_sg.has_value());
  CHECK(records[2].error.empty());

  DatasetManifest empty;
  CHECK_THROWS_AS(batch_distances(empty, {}, {}, BatchDistanceOptions{}),
                  MissingInputError);
}

TEST_CASE("distance csv has the fixed column layout") {
  std::vector<DistanceRecord> records(2);
  records[0].utterance_id = "a";
  records[0].d_sg = 0.5;
  records[0].d_fe["hubert"] = 1.5;
  records[0].d_ol["hubert"] = 2.5;
  records[0].mos = 3.0;
  records[1].utterance_id = "b";
  records[1].error = "bad pair";

  const std::string path = testfix::scratch_dir() + "/dist.csv";
  write_distance_csv(path, records, {"hubert"});
  CsvTable t = read_csv(path);
  CHECK(t.header == std::vector<std::string>{"utterance_id", "d_sg", "d_fe_hubert",
                                             "d_ol_hubert", "mos", "error"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "a");
  CHECK(t.rows[0][1] == "0.5");
  CHECK(t.rows[0][2] == "1.5");
  CHECK(t.rows[0][3] == "2.5");
  CHECK(t.rows[0][4] == "3");
  CHECK(t.rows[0][5] == "");
  CHECK(t.rows[1][1] == "");       // failed pair leaves numbers empty
  CHECK(t.rows[1][5] == "bad pair");
}
