// srep/featviz.hpp

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

#ifndef SREP_FEATVIZ_HPP_
#define SREP_FEATVIZ_HPP_

#include "srep/image.hpp"
#include "srep/sssr.hpp"
#include "srep/stft.hpp"
#include "srep/wav.hpp"

#include <memory>
#include <string>
#include <vector>

namespace srep {

struct SortedRepresentation {
  Mat values;                    // T x F with columns reordered
  std::vector<int> permutation;  // permutation[j] = source channel of column j
};

/// Greedy nearest-neighbor chaining: the chain starts at the channel with the
/// largest L2 norm and repeatedly appends the unvisited channel closest (in
/// Euclidean distance over time) to the last one placed. Ties break on the
/// lower channel index, so the order is deterministic.
SortedRepresentation sort_channels(const SSSRRepresentation& rep);

/// Applies a previously computed permutation to another representation with
/// the same channel count; lets a noisy panel reuse the clean ordering so
/// rows stay aligned across a pair.
Mat apply_permutation(const Mat& values, const std::vector<int>& permutation);

struct RenderOptions {
  StftParams stft;
  int divider = 4;      // gray gap between stacked panels, in pixels
  bool dump_permutations = false;  // also write <path>.permutations.csv
};

struct PanelImage {
  std::string name;     // e.g. "clean_sg", "noisy_fe_hubert"
  GrayImage image;
};

/// Renders the clean/noisy magnitude spectrograms plus one sorted FE panel
/// per backend and signal, stacks them vertically into a single PNG at
/// `path`, and returns the panels in stacking order. Every panel is
/// standardized to zero mean / unit variance and squashed through a sigmoid
/// before quantization. The noisy FE panel reuses the clean permutation.
std::vector<PanelImage> render_panels(
    const TimeSignal& s, const TimeSignal& x,
    const std::vector<std::shared_ptr<const SSSRBackend>>& backends,
    const std::string& path, const RenderOptions& options = {});

/// z-score + sigmoid + 8-bit quantization; rows of `values` map to image
/// columns (time left to right), columns to image rows (channel 0 at the
/// bottom). A constant panel renders mid-gray.
GrayImage panel_to_image(const Mat& values);

}  // namespace srep

#endif  // SREP_FEATVIZ_HPP_
