// tests/masknet_test.cpp

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

#include "srep/masknet.hpp"

#include "test_util.hpp"

#include <cmath>

using namespace srep;

namespace {

MaskNetConfig tiny_config() {
  MaskNetConfig config;
  config.input_dim = 3;
  config.output_dim = 3;
  config.recurrent_layers = 1;
  config.recurrent_hidden_size = 2;
  config.leaky_slope = 0.3;
  return config;
}

Mat tiny_input() {
  SplitMix64 rng(5);
  Mat x(4, 3);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) x(r, c) = rng.next_double();
  return x;
}

}  // namespace

TEST_CASE("tiny mask-net reproduces the reference mask") {
  MaskNet net(tiny_config(), 42);
  Mat mask = net.forward_mask(tiny_input());
  REQUIRE(mask.rows() == 4);
  REQUIRE(mask.cols() == 3);

  const double expected[4][3] = {
      {0.501941724984891, 0.501336684766635, 0.500511094744339},
      {0.501757275247836, 0.500712461412628, 0.498709286053448},
      {0.499679470463372, 0.498018225207237, 0.500295182583358},
      {0.500134003670122, 0.498536459005472, 0.499603047443105},
  };
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(mask(r, c) == doctest::Approx(expected[r][c]).epsilon(1e-12));
}

TEST_CASE("masks stay strictly inside (0, 1)") {
  MaskNetConfig config;
  config.input_dim = 16;
  config.output_dim = 16;
  config.recurrent_layers = 2;
  config.recurrent_hidden_size = 8;
  MaskNet net(config, 3);

  SplitMix64 rng(77);
  Mat x(25, 16);
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c)
      x(r, c) = 50.0 * rng.next_double();  // loud magnitudes
  Mat mask = net.forward_mask(x);
  CHECK(mask.minCoeff() > 0.0);
  CHECK(mask.maxCoeff() < 1.0);
}

TEST_CASE("initialization is seed-deterministic") {
  MaskNet a(tiny_config(), 42);
  MaskNet b(tiny_config(), 42);
  MaskNet c(tiny_config(), 43);
  CHECK(a.parameter_checksum() == b.parameter_checksum());
  CHECK(a.parameter_checksum() != c.parameter_checksum());
  CHECK(a.forward_mask(tiny_input()) == b.forward_mask(tiny_input()));
}

TEST_CASE("save/load round trip preserves parameters and behavior") {
  const std::string path = testfix::scratch_dir() + "/masknet.bin";
  MaskNetConfig config = tiny_config();
  config.leaky_slope = 0.17;
  MaskNet net(config, 9);
  net.parameters()["affine1.weight"](0, 0) += 0.5;  // diverge from init
  net.save(path);

  MaskNet back = MaskNet::load(path);
  CHECK(back.config().input_dim == config.input_dim);
  CHECK(back.config().recurrent_layers == config.recurrent_layers);
  CHECK(back.config().recurrent_hidden_size == config.recurrent_hidden_size);
  CHECK(back.config().leaky_slope == doctest::Approx(0.17).epsilon(1e-15));
  CHECK(back.parameter_checksum() == net.parameter_checksum());
  CHECK(back.forward_mask(tiny_input()) == net.forward_mask(tiny_input()));

  CHECK_THROWS_AS(MaskNet::load(testfix::scratch_dir() + "/no_model.bin"),
                  MissingInputError);
}

TEST_CASE("forward rejects bad input") {
  MaskNet net(tiny_config(), 42);
  Mat bad = tiny_input();
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(net.forward_mask(bad), Error);

  Mat wrong_width(4, 5);
  wrong_width.setOnes();
  CHECK_THROWS_AS(net.forward_mask(wrong_width), Error);
}

TEST_CASE("forward_graph and forward_mask agree") {
  MaskNet net(tiny_config(), 42);
  ad::Tape tape;
  std::map<std::string, ad::Var> params;
  ad::Var mask_var = net.forward_graph(tape, tiny_input(), &params);
  CHECK(mask_var.value() == net.forward_mask(tiny_input()));
  // one leaf per parameter tensor
  CHECK(params.size() == net.parameters().size());
}

TEST_CASE("enhance matches input length and output stays finite") {
  MaskNetConfig config;  // full 257-bin geometry
  MaskNet net(config, 21);

  TimeSignal noisy;
  noisy.sample_rate = 16000;
  noisy.samples = testfix::seeded_signal(31, 3200, 0.4);

  TimeSignal out = enhance(net, noisy);
  CHECK(out.sample_rate == 16000);
  CHECK(out.length() == noisy.length());
  CHECK(out.samples.allFinite());

  // masking with the sigmoid output cannot amplify beyond the identity
  // resynthesis by much; sanity-bound the energy
  CHECK(out.samples.squaredNorm() < 4.0 * noisy.samples.squaredNorm() + 1e-9);
}
