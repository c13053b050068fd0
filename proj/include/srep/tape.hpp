// srep/tape.hpp

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

#ifndef SREP_TAPE_HPP_
#define SREP_TAPE_HPP_

#include "srep/common.hpp"

#include <functional>
#include <vector>

namespace srep::ad {

class Tape;

/// Lightweight handle to a tape node. Copyable; valid as long as the tape
/// lives.
struct Var {
  Tape* tape = nullptr;
  int index = -1;

  const Mat& value() const;
  const Mat& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

/// Reverse-mode autodiff over dense matrices. One tape records one forward
/// pass; backward() walks it once in reverse. Constants (frozen weights,
/// reference spectrograms, DFT bases) are recorded without gradient storage,
/// so gradients flow through them but never into them.
class Tape {
 public:
  Var constant(Mat value);
  Var leaf(Mat value);  // gradient-tracked input or parameter

  const Mat& value(int index) const { return nodes_[static_cast<std::size_t>(index)].value; }
  const Mat& grad(int index) const;
  bool needs_grad(int index) const { return nodes_[static_cast<std::size_t>(index)].needs_grad; }

  /// Seeds d(out)/d(out) = 1 for a 1x1 node and accumulates gradients into
  /// every gradient-tracked node.
  void backward(Var out);

  std::size_t size() const { return nodes_.size(); }

  // Internal: op construction.
  Var emplace(Mat value, bool needs_grad, std::function<void(Tape&)> backprop);
  void accumulate(int index, const Mat& g);

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    bool grad_ready = false;
    std::function<void(Tape&)> backprop;
  };
  std::vector<Node> nodes_;
};

// ---- elementwise ----
Var add(Var a, Var b);             // same shape
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
Var square(Var a);
Var sqrt_(Var a);                  // domain: positive entries
Var log_(Var a);                   // natural log, positive entries
Var sigmoid(Var a);
Var tanh_(Var a);
Var leaky_relu(Var a, double negative_slope);
Var gelu(Var a);                   // exact erf form
Var clamp_max(Var a, double ceiling);

// ---- broadcast ----
Var add_rowvec(Var a, Var row);    // row: 1 x C
Var mul_rowvec(Var a, Var row);
Var mul_colvec(Var a, Var col);    // col: R x 1
Var add_colvec(Var a, Var col);
Var div_scalar(Var a, Var s);      // s: 1 x 1

// ---- linear algebra ----
Var matmul(Var a, Var b);
Var matmul_t(Var a, Var b);        // a * b^T

// ---- reductions ----
Var sum(Var a);                    // 1 x 1
Var mean(Var a);                   // 1 x 1
Var dot(Var a, Var b);             // sum(a .* b), same shape

// ---- shape ----
Var row(Var a, int i);
Var slice_cols(Var a, int start, int n);
Var concat_cols(const std::vector<Var>& parts);
Var stack_rows(const std::vector<Var>& rows);
Var reverse_rows(Var a);
Var transpose(Var a);

/// out(i,j) = in(rows_idx(i,j), cols_idx(i,j)); backward scatter-adds.
/// Covers STFT framing and conv1d im2col.
Var gather(Var in, const Eigen::ArrayXXi& rows_idx, const Eigen::ArrayXXi& cols_idx);

// ---- row-wise normalization / attention ----
Var layernorm_rows(Var a, double eps = 1e-5);  // zero-mean unit-var per row
Var softmax_rows(Var a);

// ---- signal ----
/// sqrt(re^2 + im^2); gradient at exact zeros is defined as zero.
Var magnitude(Var re, Var im);

/// Synthesis half of the weighted overlap-add used by the ISTFT: frames are
/// windowed, accumulated at hop spacing, divided by the squared-window
/// envelope, and cropped by `half` on the left.
Var overlap_add_rows(Var frames, const Vec& window_fn, int offset, int hop,
                     int half, int out_length);

/// mean((a - b)^2) or sum, matching the distance reduction flag.
Var mse(Var a, Var b, bool mean_reduction = true);

}  // namespace srep::ad

#endif  // SREP_TAPE_HPP_
