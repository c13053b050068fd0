// srep/config.hpp

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

#ifndef SREP_CONFIG_HPP_
#define SREP_CONFIG_HPP_

#include "srep/common.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace srep {

/// Declarative run configuration, INI-style:
///
///   [section]
///   key = value        ; comment
///
/// Sections and keys are drawn from a fixed registry; anything else is a
/// ConfigError, so typos fail fast instead of silently using a default.
class RunConfig {
 public:
  bool has(const std::string& section, const std::string& key) const;

  /// Typed accessors; the defaulted forms fall back when the key is unset,
  /// the others throw ConfigError. Malformed numbers always throw.
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  /// Comma-separated list; empty or unset key yields an empty vector.
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;

  /// Rejects unknown section/key pairs.
  void set(const std::string& section, const std::string& key,
           const std::string& value);

  /// Sections sorted, keys sorted within each; the hash below is FNV-1a over
  /// exactly this text, so equal configs hash equally regardless of source
  /// formatting.
  std::string canonical() const;
  std::uint64_t hash() const;

  const std::map<std::string, std::map<std::string, std::string>>& values() const {
    return values_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

/// section -> allowed keys.
const std::map<std::string, std::set<std::string>>& known_config_keys();

RunConfig parse_run_config(const std::string& text);

/// MissingInputError if the file does not exist.
RunConfig load_run_config(const std::string& path);

/// Writes `<prefix>.meta.json` next to a command's outputs: tool version,
/// config hash, and the canonical config text.
void write_run_metadata(const std::string& path, const RunConfig& config,
                        const std::string& command);

}  // namespace srep

#endif  // SREP_CONFIG_HPP_
