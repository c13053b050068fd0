// srep/config.cpp

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

#include "srep/config.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace srep {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::map<std::string, std::set<std::string>>& known_config_keys() {
  static const std::map<std::string, std::set<std::string>> kKeys = {
      {"data",
       {"root", "layout", "split", "manifest", "clean_dir", "noisy_dir",
        "sample_rate"}},
      {"stft", {"fft_size", "window_ms", "hop_ms"}},
      {"backends", {"models", "checkpoint_dir"}},
      {"distances", {"reduction", "layers", "workers"}},
      {"training",
       {"loss", "epochs", "learning_rate", "batch_size", "seed", "grad_clip",
        "recurrent_layers", "recurrent_hidden_size", "leaky_slope",
        "sisdr_ceiling_db", "valid_manifest"}},
      {"evaluation",
       {"pesq_cmd", "stoi_cmd", "composite_cmd", "sisdr_ceiling_db"}},
      {"output", {"dir", "prefix", "timestamps"}},
  };
  return kKeys;
}

namespace {

void check_known(const std::string& section, const std::string& key) {
  const auto& keys = known_config_keys();
  auto it = keys.find(section);
  if (it == keys.end()) throw ConfigError("config: unknown section [" + section + "]");
  if (!key.empty() && it->second.find(key) == it->second.end()) {
    throw ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
  }
}

}  // namespace

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  if (it == values_.end()) return false;
  return it->second.find(key) != it->second.end();
}

std::string RunConfig::get_string(const std::string& section,
                                  const std::string& key) const {
  auto it = values_.find(section);
  if (it != values_.end()) {
    auto jt = it->second.find(key);
    if (jt != it->second.end()) return jt->second;
  }
  throw ConfigError("config: required key '" + key + "' missing from [" + section + "]");
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string s = get_string(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: [" + section + "] " + key + " = '" + s +
                      "' is not a number");
  }
}

int RunConfig::get_int(const std::string& section, const std::string& key,
                       int fallback) const {
  if (!has(section, key)) return fallback;
  const std::string s = get_string(section, key);
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("config: [" + section + "] " + key + " = '" + s +
                      "' is not an integer");
  }
}

bool RunConfig::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string s = get_string(section, key);
  if (s == "true" || s == "on" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "off" || s == "0" || s == "no") return false;
  throw ConfigError("config: [" + section + "] " + key + " = '" + s +
                    "' is not a boolean");
}

std::vector<std::string> RunConfig::get_list(const std::string& section,
                                             const std::string& key) const {
  std::vector<std::string> out;
  if (!has(section, key)) return out;
  std::stringstream ss(get_string(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  check_known(section, key);
  values_[section][key] = value;
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [section, kv] : values_) {
    out << "[" << section << "]\n";
    for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
  }
  return out.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments (';' or '#'), then whitespace.
    std::size_t cut = line.find_first_of(";#");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: unterminated section header at line " +
                          std::to_string(line_no));
      }
      section = trim(line.substr(1, line.size() - 2));
      try {
        check_known(section, "");
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " at line " + std::to_string(line_no));
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected 'key = value' at line " +
                        std::to_string(line_no));
    }
    if (section.empty()) {
      throw ConfigError("config: key outside any section at line " +
                        std::to_string(line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: empty key at line " + std::to_string(line_no));
    }
    try {
      config.set(section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("config file not found: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

void write_run_metadata(const std::string& path, const RunConfig& config,
                        const std::string& command) {
  nlohmann::json meta;
  meta["tool"] = "srep";
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["config_hash"] = to_hex(config.hash());
  meta["config"] = config.canonical();
  std::ofstream out(path);
  if (!out) throw Error("cannot write run metadata: " + path);
  out << meta.dump(2) << "\n";
}

}  // namespace srep
