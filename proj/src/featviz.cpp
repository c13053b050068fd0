// srep/featviz.cpp

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

#include "srep/featviz.hpp"

#include "srep/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace srep {

SortedRepresentation sort_channels(const SSSRRepresentation& rep) {
  const Mat& v = rep.values;
  if (!v.allFinite()) throw Error("sort_channels: representation has non-finite values");
  const int channels = static_cast<int>(v.cols());
  SortedRepresentation out;
  out.permutation.reserve(channels);
  if (channels == 0) {
    out.values = v;
    return out;
  }

  std::vector<char> used(channels, 0);
  // Seed: largest L2 norm, lowest index on ties.
  int current = 0;
  double best_norm = -1.0;
  for (int c = 0; c < channels; ++c) {
    const double n = v.col(c).norm();
    if (n > best_norm) {
      best_norm = n;
      current = c;
    }
  }
  out.permutation.push_back(current);
  used[current] = 1;

  while (static_cast<int>(out.permutation.size()) < channels) {
    int next = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < channels; ++c) {
      if (used[c]) continue;
      const double d = (v.col(c) - v.col(current)).norm();
      if (d < best) {
        best = d;
        next = c;
      }
    }
    out.permutation.push_back(next);
    used[next] = 1;
    current = next;
  }

  out.values = apply_permutation(v, out.permutation);
  return out;
}

Mat apply_permutation(const Mat& values, const std::vector<int>& permutation) {
  if (static_cast<Eigen::Index>(permutation.size()) != values.cols()) {
    throw Error("apply_permutation: permutation size does not match channel count");
  }
  std::vector<char> seen(permutation.size(), 0);
  for (int p : permutation) {
    if (p < 0 || p >= static_cast<int>(permutation.size()) || seen[p]) {
      throw Error("apply_permutation: not a bijection over channels");
    }
    seen[p] = 1;
  }
  Mat out(values.rows(), values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    out.col(j) = values.col(permutation[static_cast<std::size_t>(j)]);
  }
  return out;
}

GrayImage panel_to_image(const Mat& values) {
  const Eigen::Index t = values.rows();
  const Eigen::Index f = values.cols();
  GrayImage img(static_cast<int>(t), static_cast<int>(f));
  if (t == 0 || f == 0) return img;
  const double mean = values.mean();
  const double var = (values.array() - mean).square().mean();
  const double sd = std::sqrt(var);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      const double z = sd > 0.0 ? (values(i, j) - mean) / sd : 0.0;
      const double u = 1.0 / (1.0 + std::exp(-z));
      const int y = static_cast<int>(f - 1 - j);  // channel 0 at the bottom
      img.at(static_cast<int>(i), y) =
          static_cast<unsigned char>(std::lround(u * 255.0));
    }
  }
  return img;
}

namespace {

GrayImage stack_panels(const std::vector<PanelImage>& panels, int divider) {
  int width = 0;
  int height = 0;
  for (const auto& p : panels) {
    width = std::max(width, p.image.width);
    height += p.image.height;
  }
  if (!panels.empty()) height += divider * (static_cast<int>(panels.size()) - 1);
  GrayImage out(std::max(width, 1), std::max(height, 1));
  std::fill(out.pixels.begin(), out.pixels.end(), static_cast<unsigned char>(0));
  int y0 = 0;
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const GrayImage& p = panels[k].image;
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) out.at(x, y0 + y) = p.at(x, y);
    }
    y0 += p.height;
    if (k + 1 < panels.size()) {
      for (int y = 0; y < divider; ++y) {
        for (int x = 0; x < out.width; ++x) out.at(x, y0 + y) = 128;
      }
      y0 += divider;
    }
  }
  return out;
}

}  // namespace

std::vector<PanelImage> render_panels(
    const TimeSignal& s, const TimeSignal& x,
    const std::vector<std::shared_ptr<const SSSRBackend>>& backends,
    const std::string& path, const RenderOptions& options) {
  std::vector<PanelImage> panels;
  std::vector<std::vector<int>> permutations;
  std::vector<std::string> permutation_names;

  Spectrogram s_sg = stft(s, options.stft);
  Spectrogram x_sg = stft(x, options.stft);
  panels.push_back({"clean_sg", panel_to_image(s_sg.magnitude)});
  panels.push_back({"noisy_sg", panel_to_image(x_sg.magnitude)});

  for (const auto& backend : backends) {
    SSSRRepresentation clean_fe = extract_fe(*backend, s);
    SSSRRepresentation noisy_fe = extract_fe(*backend, x);
    SortedRepresentation sorted_clean = sort_channels(clean_fe);
    // The noisy panel reuses the clean ordering so rows align across the pair.
    Mat sorted_noisy = apply_permutation(noisy_fe.values, sorted_clean.permutation);
    const std::string id = to_string(backend->model_id());
    panels.push_back({"clean_fe_" + id, panel_to_image(sorted_clean.values)});
    panels.push_back({"noisy_fe_" + id, panel_to_image(sorted_noisy)});
    permutations.push_back(sorted_clean.permutation);
    permutation_names.push_back(id);
  }

  GrayImage stacked = stack_panels(panels, options.divider);
  write_png_gray8(path, stacked);

  if (options.dump_permutations && !permutations.empty()) {
    CsvTable table;
    table.header = {"model", "position", "channel"};
    for (std::size_t k = 0; k < permutations.size(); ++k) {
      for (std::size_t j = 0; j < permutations[k].size(); ++j) {
        table.rows.push_back({permutation_names[k], std::to_string(j),
                              std::to_string(permutations[k][j])});
      }
    }
    write_csv(path + ".permutations.csv", table);
  }
  return panels;
}

}  // namespace srep
