// srep/tensor_archive.hpp

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

#ifndef SREP_TENSOR_ARCHIVE_HPP_
#define SREP_TENSOR_ARCHIVE_HPP_

#include "srep/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace srep {

/// Named f64 matrices in one little-endian file. Entries are written sorted
/// by name, so equal contents produce byte-identical files.
///
/// Layout: magic "SREPTNS1", u32 count, then per entry
///   u32 name_len, name bytes, u64 rows, u64 cols, rows*cols f64 (row-major).
class TensorArchive {
 public:
  void put(const std::string& name, Mat value);
  const Mat& get(const std::string& name) const;        // missing name throws
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return tensors_.size(); }

  void save(const std::string& path) const;
  static TensorArchive load(const std::string& path);   // absent file -> MissingInputError

 private:
  std::map<std::string, Mat> tensors_;
};

}  // namespace srep

#endif  // SREP_TENSOR_ARCHIVE_HPP_
