// srep/image.cpp

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

#include "srep/image.hpp"

#include <fstream>

#include <zlib.h>

namespace srep {

namespace {

void append_u32(std::vector<std::uint8_t>* out, std::uint32_t v) {
  out->push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
  out->push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out->push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out->push_back(static_cast<std::uint8_t>(v & 0xff));
}

void append_chunk(std::vector<std::uint8_t>* out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
  append_u32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out->size();
  out->insert(out->end(), type, type + 4);
  out->insert(out->end(), payload.begin(), payload.end());
  const auto crc = static_cast<std::uint32_t>(
      ::crc32(0L, out->data() + crc_start, static_cast<uInt>(out->size() - crc_start)));
  append_u32(out, crc);
}

}  // namespace

void write_png_gray8(const std::string& path, const GrayImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw Error("png: inconsistent image dimensions");
  }

  // Scanlines, each prefixed with filter type 0 (None).
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(image.height) * (image.width + 1));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = image.pixels.data() + static_cast<std::size_t>(y) * image.width;
    raw.insert(raw.end(), row, row + image.width);
  }

  uLongf compressed_size = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(compressed_size);
  if (::compress2(compressed.data(), &compressed_size, raw.data(),
                  static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK) {
    throw Error("png: deflate failed");
  }
  compressed.resize(compressed_size);

  std::vector<std::uint8_t> file;
  const std::uint8_t signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  file.insert(file.end(), signature, signature + 8);

  std::vector<std::uint8_t> ihdr;
  append_u32(&ihdr, static_cast<std::uint32_t>(image.width));
  append_u32(&ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  append_chunk(&file, "IHDR", ihdr);
  append_chunk(&file, "IDAT", compressed);
  append_chunk(&file, "IEND", {});

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("png: cannot open for writing: " + path);
  os.write(reinterpret_cast<const char*>(file.data()),
           static_cast<std::streamsize>(file.size()));
  if (!os) throw Error("png: write failed: " + path);
}

}  // namespace srep
