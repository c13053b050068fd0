// src/wav.cpp

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

#include "srep/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace srep {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void write_u32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ofstream& os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

TimeSignal load_audio(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingInputError("audio file not found: " + path);
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open audio file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error("not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + off;
    std::uint32_t chunk_len = read_u32(hdr + 4);
    const unsigned char* body = hdr + 8;
    if (off + 8 + chunk_len > bytes.size()) {
      chunk_len = static_cast<std::uint32_t>(bytes.size() - off - 8);
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_len >= 16) {
      format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real format in the sub-GUID.
      if (format == 0xfffe && chunk_len >= 40) format = read_u16(body + 24);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
    }
    off += 8 + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (data == nullptr || rate == 0) throw Error("malformed WAV file: " + path);
  if (channels != 1) {
    throw Error("only mono WAV is supported (" + std::to_string(channels) +
                " channels): " + path);
  }

  TimeSignal sig;
  sig.sample_rate = static_cast<int>(rate);
  if (format == 1 && bits == 16) {
    std::size_t n = data_len / 2;
    sig.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v = static_cast<std::int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
      sig.samples[static_cast<Eigen::Index>(i)] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    std::size_t n = data_len / 4;
    sig.samples.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, data + 4 * i, 4);
      sig.samples[static_cast<Eigen::Index>(i)] = static_cast<double>(f);
    }
  } else {
    throw Error("unsupported WAV encoding (format=" + std::to_string(format) +
                ", bits=" + std::to_string(bits) + "): " + path);
  }

  if (sig.samples.size() == 0) throw Error("zero-length audio: " + path);
  validate_signal(sig, path);
  return sig;
}

void save_audio(const std::string& path, const TimeSignal& sig, int format) {
  if (sig.samples.size() == 0) throw Error("refusing to write empty audio: " + path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write audio file: " + path);

  const std::uint32_t n = static_cast<std::uint32_t>(sig.samples.size());
  const std::uint16_t bytes_per = format == 16 ? 2 : 4;
  const std::uint32_t data_len = n * bytes_per;

  os.write("RIFF", 4);
  write_u32(os, 36 + data_len);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_u32(os, 16);
  write_u16(os, format == 16 ? 1 : 3);
  write_u16(os, 1);
  write_u32(os, static_cast<std::uint32_t>(sig.sample_rate));
  write_u32(os, static_cast<std::uint32_t>(sig.sample_rate) * bytes_per);
  write_u16(os, bytes_per);
  write_u16(os, static_cast<std::uint16_t>(format == 16 ? 16 : 32));
  os.write("data", 4);
  write_u32(os, data_len);

  if (format == 16) {
    for (Eigen::Index i = 0; i < sig.samples.size(); ++i) {
      double v = std::clamp(sig.samples[i], -1.0, 1.0);
      auto q = static_cast<std::int16_t>(std::lrint(v * 32767.0));
      unsigned char b[2] = {static_cast<unsigned char>(q & 0xff),
                            static_cast<unsigned char>((q >> 8) & 0xff)};
      os.write(reinterpret_cast<const char*>(b), 2);
    }
  } else {
    for (Eigen::Index i = 0; i < sig.samples.size(); ++i) {
      float f = static_cast<float>(sig.samples[i]);
      os.write(reinterpret_cast<const char*>(&f), 4);
    }
  }
  if (!os) throw Error("short write: " + path);
}

void validate_signal(const TimeSignal& sig, const std::string& context) {
  if (sig.sample_rate <= 0) throw Error("non-positive sample rate: " + context);
  if (!sig.samples.allFinite()) throw Error("non-finite samples: " + context);
}

}  // namespace srep
