// tests/test_util.hpp

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

#ifndef SREP_TESTS_TEST_UTIL_HPP_
#define SREP_TESTS_TEST_UTIL_HPP_

#include "srep/common.hpp"
#include "srep/sssr.hpp"

#include <filesystem>
#include <string>

#include <unistd.h>

namespace srep::testfix {

/// Scratch directory for test artifacts, one per process.
inline std::string scratch_dir() {
  static const std::string dir = [] {
    auto p = std::filesystem::temp_directory_path() /
             ("srep_tests_" + std::to_string(static_cast<long>(::getpid())));
    std::filesystem::create_directories(p);
    return p.string();
  }();
  return dir;
}

/// Seeded reference checkpoint, generated once and reused across test runs
/// (generation is deterministic, so a previously written copy is as good as
/// a fresh one).
inline std::string checkpoint_dir(ModelId id) {
  const std::string name = std::string("srep_fixture_ckpt_") + to_string(id);
  const auto dir = std::filesystem::temp_directory_path() / name;
  const std::string path = dir.string();
  if (!std::filesystem::exists(dir / "sssr_meta.json")) {
    write_reference_checkpoint(path, id, 7);
  } else {
    try {
      SSSRBackend::load(to_string(id), path);
    } catch (const Error&) {
      std::filesystem::remove_all(dir);
      write_reference_checkpoint(path, id, 7);
    }
  }
  return path;
}

/// Process-wide backend fixture (hubert, seed 7).
inline std::shared_ptr<const SSSRBackend> hubert_backend() {
  static std::shared_ptr<const SSSRBackend> backend =
      SSSRBackend::load("hubert", checkpoint_dir(ModelId::kHubert));
  return backend;
}

/// Uniform [-1, 1) noise vector from the project RNG.
inline Vec seeded_signal(std::uint64_t seed, int n, double amp = 1.0) {
  SplitMix64 rng(seed);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = amp * (2.0 * rng.next_double() - 1.0);
  return v;
}

}  // namespace srep::testfix

#endif  // SREP_TESTS_TEST_UTIL_HPP_
