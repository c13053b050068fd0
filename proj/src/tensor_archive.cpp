// srep/tensor_archive.cpp

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

#include "srep/tensor_archive.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace srep {

namespace {

constexpr char kMagic[8] = {'S', 'R', 'E', 'P', 'T', 'N', 'S', '1'};

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw Error(std::string("tensor archive: truncated ") + what);
  return v;
}

}  // namespace

void TensorArchive::put(const std::string& name, Mat value) {
  if (name.empty()) throw Error("tensor archive: empty tensor name");
  tensors_[name] = std::move(value);
}

const Mat& TensorArchive::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw Error("tensor archive: no tensor named '" + name + "'");
  }
  return it->second;
}

bool TensorArchive::contains(const std::string& name) const {
  return tensors_.count(name) > 0;
}

std::vector<std::string> TensorArchive::names() const {
  std::vector<std::string> out;
  out.reserve(tensors_.size());
  for (const auto& [name, m] : tensors_) out.push_back(name);
  return out;
}

void TensorArchive::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("tensor archive: cannot open for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(tensors_.size()));
  for (const auto& [name, m] : tensors_) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
    write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    // Row-major on disk; Mat is column-major, so stage through a buffer.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> staged = m;
    os.write(reinterpret_cast<const char*>(staged.data()),
             static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(staged.size())));
  }
  if (!os) throw Error("tensor archive: write failed: " + path);
}

TensorArchive TensorArchive::load(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingInputError("tensor archive: no such file: " + path);
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("tensor archive: cannot open: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("tensor archive: bad magic in " + path);
  }
  const auto count = read_pod<std::uint32_t>(is, "count");
  TensorArchive archive;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(is, "name length");
    if (name_len == 0 || name_len > 4096) {
      throw Error("tensor archive: implausible name length in " + path);
    }
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw Error("tensor archive: truncated name in " + path);
    const auto rows = read_pod<std::uint64_t>(is, "rows");
    const auto cols = read_pod<std::uint64_t>(is, "cols");
    if (rows > (1u << 24) || cols > (1u << 24)) {
      throw Error("tensor archive: implausible shape in " + path);
    }
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> staged(
        static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    is.read(reinterpret_cast<char*>(staged.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(staged.size())));
    if (!is) throw Error("tensor archive: truncated values in " + path);
    archive.tensors_[name] = staged;
  }
  return archive;
}

}  // namespace srep
