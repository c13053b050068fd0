// tests/sssr_test.cpp

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

#include "srep/sssr.hpp"

#include "test_util.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace srep;

namespace {

TimeSignal probe_signal() {
  TimeSignal sig;
  sig.sample_rate = 16000;
  sig.samples = testfix::seeded_signal(11, 185, 0.1);
  return sig;
}

constexpr double kTol = 1e-10;

}  // namespace

TEST_CASE("model id parsing") {
  CHECK(parse_model_id("hubert") == ModelId::kHubert);
  CHECK(parse_model_id("xlsr") == ModelId::kXlsr);
  CHECK_THROWS_AS(parse_model_id("wav2vec"), ConfigError);
  CHECK(to_string(ModelId::kHubert) == "hubert");
  CHECK(to_string(ModelId::kXlsr) == "xlsr");
  CHECK(to_string(Layer::kFE) == "fe");
  CHECK(to_string(Layer::kOL) == "ol");
}

TEST_CASE("backend geometry") {
  auto backend = testfix::hubert_backend();
  CHECK(backend->model_id() == ModelId::kHubert);
  CHECK(backend->fe_channels() == 512);
  CHECK(backend->ol_channels() == 768);
  CHECK(backend->downsample_factor() == 80);
  CHECK(backend->min_input_samples() == 105);

  CHECK(backend->num_frames(105) == 1);
  CHECK(backend->num_frames(184) == 1);
  CHECK(backend->num_frames(185) == 2);
  CHECK(backend->num_frames(105 + 80 * 9) == 10);
  CHECK(backend->num_frames(16000) == 199);  // (16000 - 105) / 80 + 1
}

TEST_CASE("fe extraction reproduces the reference values") {
  auto backend = testfix::hubert_backend();
  SSSRRepresentation fe = extract_fe(*backend, probe_signal());
  CHECK(fe.model_id == ModelId::kHubert);
  CHECK(fe.layer == Layer::kFE);
  REQUIRE(fe.frames() == 2);
  REQUIRE(fe.channels() == 512);

  CHECK(fe.values(0, 0) == doctest::Approx(2.150055526050604e-01).epsilon(kTol));
  CHECK(fe.values(0, 7) == doctest::Approx(7.350314434850174e-01).epsilon(kTol));
  CHECK(fe.values(1, 100) == doctest::Approx(-1.696037478874250e-01).epsilon(kTol));
  CHECK(fe.values(1, 511) == doctest::Approx(-8.062066277755656e-02).epsilon(kTol));
  CHECK(fe.values.sum() == doctest::Approx(2.134541399919465e+02).epsilon(kTol));
}

TEST_CASE("ol extraction reproduces the reference values") {
  auto backend = testfix::hubert_backend();
  SSSRRepresentation ol = extract_ol(*backend, probe_signal());
  CHECK(ol.layer == Layer::kOL);
  REQUIRE(ol.frames() == 2);
  REQUIRE(ol.channels() == 768);

  CHECK(ol.values(0, 0) == doctest::Approx(4.249898879081966e-01).epsilon(kTol));
  CHECK(ol.values(0, 100) == doctest::Approx(1.626620202146439e+00).epsilon(kTol));
  CHECK(ol.values(1, 767) == doctest::Approx(5.594146323215430e-01).epsilon(kTol));
  CHECK(ol.values.cwiseAbs().sum() ==
        doctest::Approx(1.238918782649356e+03).epsilon(kTol));
}

TEST_CASE("extraction is deterministic and checksums agree across loads") {
  auto backend = testfix::hubert_backend();
  TimeSignal sig = probe_signal();
  Mat a = extract_fe(*backend, sig).values;
  Mat b = extract_fe(*backend, sig).values;
  CHECK(a == b);

  auto again = SSSRBackend::load("hubert", testfix::checkpoint_dir(ModelId::kHubert));
  CHECK(again->parameter_checksum() == backend->parameter_checksum());
  CHECK(backend->parameter_checksum() != 0);
  CHECK(extract_ol(*again, sig).values == extract_ol(*backend, sig).values);
}

TEST_CASE("xlsr backend widens the output layer") {
  auto backend = SSSRBackend::load("xlsr", testfix::checkpoint_dir(ModelId::kXlsr));
  CHECK(backend->model_id() == ModelId::kXlsr);
  CHECK(backend->fe_channels() == 512);
  CHECK(backend->ol_channels() == 1024);
  CHECK(backend->parameter_checksum() != testfix::hubert_backend()->parameter_checksum());

  SSSRRepresentation ol = extract_ol(*backend, probe_signal());
  CHECK(ol.frames() == 2);
  CHECK(ol.channels() == 1024);
  CHECK(ol.values.allFinite());
}

TEST_CASE("extraction input validation") {
  auto backend = testfix::hubert_backend();

  TimeSignal tiny;
  tiny.sample_rate = 16000;
  tiny.samples = Vec::Ones(104);  // one short of the receptive field
  CHECK_THROWS_AS(extract_fe(*backend, tiny), Error);

  TimeSignal wrong_rate = probe_signal();
  wrong_rate.sample_rate = 8000;
  CHECK_THROWS_AS(extract_fe(*backend, wrong_rate), Error);
  CHECK_THROWS_AS(extract_ol(*backend, wrong_rate), Error);
}

TEST_CASE("checkpoint loading rejects bad inputs") {
  CHECK_THROWS_AS(SSSRBackend::load("hubert", testfix::scratch_dir() + "/no_ckpt"),
                  MissingInputError);

  // model id mismatch against an otherwise valid checkpoint
  CHECK_THROWS_AS(SSSRBackend::load("xlsr", testfix::checkpoint_dir(ModelId::kHubert)),
                  Error);

  // corrupt weights: copy the fixture and truncate the archive
  const std::string broken = testfix::scratch_dir() + "/broken_ckpt";
  fs::copy(testfix::checkpoint_dir(ModelId::kHubert), broken,
           fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  fs::resize_file(fs::path(broken) / "sssr_weights.bin", 64);
  CHECK_THROWS_AS(SSSRBackend::load("hubert", broken), Error);

  // corrupt meta
  {
    std::ofstream meta(fs::path(broken) / "sssr_meta.json");
    meta << "{ not json";
  }
  CHECK_THROWS_AS(SSSRBackend::load("hubert", broken), Error);
}

TEST_CASE("load_backend falls back to the checkpoint cache directory") {
  const std::string cache = testfix::scratch_dir() + "/ckpt_cache";
  fs::create_directories(cache);
  fs::copy(testfix::checkpoint_dir(ModelId::kHubert), fs::path(cache) / "hubert",
           fs::copy_options::recursive | fs::copy_options::overwrite_existing);

  ::setenv("SREP_CHECKPOINT_DIR", cache.c_str(), 1);
  auto backend = load_backend("hubert", "");
  CHECK(backend->parameter_checksum() == testfix::hubert_backend()->parameter_checksum());

  ::unsetenv("SREP_CHECKPOINT_DIR");
  CHECK_THROWS_AS(load_backend("hubert", ""), ConfigError);

  // explicit ref bypasses the cache entirely
  auto direct = load_backend("hubert", testfix::checkpoint_dir(ModelId::kHubert));
  CHECK(direct->ol_channels() == 768);
}

TEST_CASE("reference checkpoints are seed-reproducible") {
  const std::string d1 = testfix::scratch_dir() + "/ref_a";
  const std::string d2 = testfix::scratch_dir() + "/ref_b";
  write_reference_checkpoint(d1, ModelId::kHubert, 99);
  write_reference_checkpoint(d2, ModelId::kHubert, 99);
  auto b1 = SSSRBackend::load("hubert", d1);
  auto b2 = SSSRBackend::load("hubert", d2);
  CHECK(b1->parameter_checksum() == b2->parameter_checksum());

  const std::string d3 = testfix::scratch_dir() + "/ref_c";
  write_reference_checkpoint(d3, ModelId::kHubert, 100);
  auto b3 = SSSRBackend::load("hubert", d3);
  CHECK(b3->parameter_checksum() != b1->parameter_checksum());
}
