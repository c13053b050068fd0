// srep/common.hpp

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

#ifndef SREP_COMMON_HPP_
#define SREP_COMMON_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace srep {

inline constexpr const char* kVersion = "0.1.0";

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Error categories map onto CLI exit codes: ConfigError -> 2,
// MissingInputError -> 3, everything else -> 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& what) : Error(what) {}
};

// FNV-1a, used for config hashes and parameter checksums.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t seed = 14695981039346656037ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s,
                           std::uint64_t seed = 14695981039346656037ULL) {
  return fnv1a(s.data(), s.size(), seed);
}

std::string to_hex(std::uint64_t value);

/// Deterministic RNG with a fixed bit-level contract, so seeded artifacts
/// (checkpoints, shuffles, synthetic fixtures) are identical across standard
/// libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double next_double() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Gaussian via Box-Muller on two uniform draws.
  double next_gaussian() {
    const double u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1 > 0.0 ? u1 : 0x1.0p-53));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace srep

#endif  // SREP_COMMON_HPP_
