// srep/tape.cpp

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

#include "srep/tape.hpp"

#include <cmath>

namespace srep::ad {

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw Error("tape: operands recorded on different tapes");
  }
}

void check_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(std::string("tape: shape mismatch in ") + op);
  }
}

/// Elementwise op with a fixed local derivative matrix: grad_a += g .* d.
/// The derivative is materialized at record time, which keeps backward
/// closures branch-free.
template <typename Fwd, typename Local>
Var record_elementwise(Var a, Fwd&& fwd, Local&& local) {
  Tape& t = *a.tape;
  Mat out = fwd(a.value());
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  Mat d = local(a.value(), out);
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, self, d = std::move(d)](Tape& tp) {
    tp.accumulate(ai, tp.grad(self).cwiseProduct(d));
  });
}

}  // namespace

const Mat& Var::value() const { return tape->value(index); }
const Mat& Var::grad() const { return tape->grad(index); }

Var Tape::constant(Mat value) { return emplace(std::move(value), false, nullptr); }

Var Tape::leaf(Mat value) { return emplace(std::move(value), true, nullptr); }

Var Tape::emplace(Mat value, bool needs_grad, std::function<void(Tape&)> backprop) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad;
  node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(int index, const Mat& g) {
  Node& node = nodes_[static_cast<std::size_t>(index)];
  if (!node.needs_grad) return;
  if (!node.grad_ready) {
    node.grad = Mat::Zero(node.value.rows(), node.value.cols());
    node.grad_ready = true;
  }
  node.grad += g;
}

const Mat& Tape::grad(int index) const {
  const Node& node = nodes_[static_cast<std::size_t>(index)];
  if (!node.needs_grad) throw Error("tape: gradient requested for a constant");
  if (!node.grad_ready) throw Error("tape: backward() has not reached this node");
  return node.grad;
}

void Tape::backward(Var out) {
  if (out.tape != this) throw Error("tape: backward on foreign var");
  const Mat& v = value(out.index);
  if (v.rows() != 1 || v.cols() != 1) {
    throw Error("tape: backward expects a 1x1 objective");
  }
  accumulate(out.index, Mat::Ones(1, 1));
  for (int i = out.index; i >= 0; --i) {
    Node& node = nodes_[static_cast<std::size_t>(i)];
    if (node.backprop && node.grad_ready) node.backprop(*this);
  }
}

// ---- elementwise ----

Var add(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "add");
  Tape& t = *a.tape;
  Mat out = a.value() + b.value();
  if (!t.needs_grad(a.index) && !t.needs_grad(b.index)) return t.constant(std::move(out));
  const int ai = a.index, bi = b.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, bi, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    tp.accumulate(ai, g);
    tp.accumulate(bi, g);
  });
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "sub");
  Tape& t = *a.tape;
  Mat out = a.value() - b.value();
  if (!t.needs_grad(a.index) && !t.needs_grad(b.index)) return t.constant(std::move(out));
  const int ai = a.index, bi = b.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, bi, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    tp.accumulate(ai, g);
    tp.accumulate(bi, -g);
  });
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "mul");
  Tape& t = *a.tape;
  Mat out = a.value().cwiseProduct(b.value());
  if (!t.needs_grad(a.index) && !t.needs_grad(b.index)) return t.constant(std::move(out));
  const int ai = a.index, bi = b.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, bi, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    if (tp.needs_grad(ai)) tp.accumulate(ai, g.cwiseProduct(tp.value(bi)));
    if (tp.needs_grad(bi)) tp.accumulate(bi, g.cwiseProduct(tp.value(ai)));
  });
}

Var scale(Var a, double c) {
  return record_elementwise(
      a, [c](const Mat& x) { return Mat(c * x); },
      [c](const Mat& x, const Mat&) { return Mat(Mat::Constant(x.rows(), x.cols(), c)); });
}

Var add_scalar(Var a, double c) {
  return record_elementwise(
      a, [c](const Mat& x) { return Mat((x.array() + c).matrix()); },
      [](const Mat& x, const Mat&) { return Mat(Mat::Ones(x.rows(), x.cols())); });
}

Var square(Var a) {
  return record_elementwise(
      a, [](const Mat& x) { return Mat(x.array().square().matrix()); },
      [](const Mat& x, const Mat&) { return Mat(2.0 * x); });
}

Var sqrt_(Var a) {
  return record_elementwise(
      a, [](const Mat& x) { return Mat(x.array().sqrt().matrix()); },
      [](const Mat&, const Mat& y) { return Mat((0.5 * y.array().inverse()).matrix()); });
}

Var log_(Var a) {
  return record_elementwise(
      a, [](const Mat& x) { return Mat(x.array().log().matrix()); },
      [](const Mat& x, const Mat&) { return Mat(x.array().inverse().matrix()); });
}

Var sigmoid(Var a) {
  return record_elementwise(
      a,
      [](const Mat& x) { return Mat(((-x.array()).exp() + 1.0).inverse().matrix()); },
      [](const Mat&, const Mat& y) {
        return Mat((y.array() * (1.0 - y.array())).matrix());
      });
}

Var tanh_(Var a) {
  return record_elementwise(
      a, [](const Mat& x) { return Mat(x.array().tanh().matrix()); },
      [](const Mat&, const Mat& y) { return Mat((1.0 - y.array().square()).matrix()); });
}

Var leaky_relu(Var a, double negative_slope) {
  return record_elementwise(
      a,
      [negative_slope](const Mat& x) {
        return Mat((x.array().max(0.0) + negative_slope * x.array().min(0.0)).matrix());
      },
      [negative_slope](const Mat& x, const Mat&) {
        return Mat((x.array() > 0.0).select(Mat::Ones(x.rows(), x.cols()),
                                            negative_slope * Mat::Ones(x.rows(), x.cols())));
      });
}

Var gelu(Var a) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * M_PI);
  return record_elementwise(
      a,
      [inv_sqrt2](const Mat& x) {
        Mat y(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          y(i) = 0.5 * x(i) * (1.0 + std::erf(x(i) * inv_sqrt2));
        }
        return y;
      },
      [inv_sqrt2, inv_sqrt2pi](const Mat& x, const Mat&) {
        Mat d(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double cdf = 0.5 * (1.0 + std::erf(x(i) * inv_sqrt2));
          const double pdf = inv_sqrt2pi * std::exp(-0.5 * x(i) * x(i));
          d(i) = cdf + x(i) * pdf;
        }
        return d;
      });
}

Var clamp_max(Var a, double ceiling) {
  return record_elementwise(
      a, [ceiling](const Mat& x) { return Mat(x.array().min(ceiling).matrix()); },
      [ceiling](const Mat& x, const Mat&) {
        return Mat((x.array() < ceiling)
                       .select(Mat::Ones(x.rows(), x.cols()), Mat::Zero(x.rows(), x.cols())));
      });
}

// ---- broadcast ----

Var add_rowvec(Var a, Var r) {
  check_same_tape(a, r);
  if (r.rows() != 1 || r.cols() != a.cols()) throw Error("tape: add_rowvec shape");
  Tape& t = *a.tape;
  Mat out = a.value().rowwise() + r.value().row(0);
  if (!t.needs_grad(a.index) && !t.needs_grad(r.index)) return t.constant(std::move(out));
  const int ai = a.index, ri = r.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, ri, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    tp.accumulate(ai, g);
    if (tp.needs_grad(ri)) tp.accumulate(ri, g.colwise().sum());
  });
}

Var add_colvec(Var a, Var c) {
  check_same_tape(a, c);
  if (c.cols() != 1 || c.rows() != a.rows()) throw Error("tape: add_colvec shape");
  Tape& t = *a.tape;
  Mat out = a.value().colwise() + c.value().col(0);
  if (!t.needs_grad(a.index) && !t.needs_grad(c.index)) return t.constant(std::move(out));
  const int ai = a.index, ci = c.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, ci, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    tp.accumulate(ai, g);
    if (tp.needs_grad(ci)) tp.accumulate(ci, g.rowwise().sum());
  });
}

Var mul_rowvec(Var a, Var r) {
  check_same_tape(a, r);
  if (r.rows() != 1 || r.cols() != a.cols()) throw Error("tape: mul_rowvec shape");
  Tape& t = *a.tape;
  Mat out = (a.value().array().rowwise() * r.value().row(0).array()).matrix();
  if (!t.needs_grad(a.index) && !t.needs_grad(r.index)) return t.constant(std::move(out));
  const int ai = a.index, ri = r.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, ri, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    if (tp.needs_grad(ai)) {
      tp.accumulate(ai, Mat((g.array().rowwise() * tp.value(ri).row(0).array()).matrix()));
    }
    if (tp.needs_grad(ri)) {
      tp.accumulate(ri, Mat(g.cwiseProduct(tp.value(ai)).colwise().sum()));
    }
  });
}

Var mul_colvec(Var a, Var c) {
  check_same_tape(a, c);
  if (c.cols() != 1 || c.rows() != a.rows()) throw Error("tape: mul_colvec shape");
  Tape& t = *a.tape;
  Mat out = (a.value().array().colwise() * c.value().col(0).array()).matrix();
  if (!t.needs_grad(a.index) && !t.needs_grad(c.index)) return t.constant(std::move(out));
  const int ai = a.index, ci = c.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, ci, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    if (tp.needs_grad(ai)) {
      tp.accumulate(ai, Mat((g.array().colwise() * tp.value(ci).col(0).array()).matrix()));
    }
    if (tp.needs_grad(ci)) {
      tp.accumulate(ci, Mat(g.cwiseProduct(tp.value(ai)).rowwise().sum()));
    }
  });
}

Var div_scalar(Var a, Var s) {
  check_same_tape(a, s);
  if (s.rows() != 1 || s.cols() != 1) throw Error("tape: div_scalar expects 1x1 divisor");
  Tape& t = *a.tape;
  const double sv = s.scalar();
  Mat out = a.value() / sv;
  if (!t.needs_grad(a.index) && !t.needs_grad(s.index)) return t.constant(std::move(out));
  const int ai = a.index, si = s.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, si, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    const double d = tp.value(si)(0, 0);
    if (tp.needs_grad(ai)) tp.accumulate(ai, Mat(g / d));
    if (tp.needs_grad(si)) {
      Mat gs(1, 1);
      gs(0, 0) = -g.cwiseProduct(tp.value(ai)).sum() / (d * d);
      tp.accumulate(si, gs);
    }
  });
}

// ---- linear algebra ----

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  if (a.cols() != b.rows()) throw Error("tape: matmul inner dimensions");
  Tape& t = *a.tape;
  Mat out = a.value() * b.value();
  if (!t.needs_grad(a.index) && !t.needs_grad(b.index)) return t.constant(std::move(out));
  const int ai = a.index, bi = b.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, bi, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    if (tp.needs_grad(ai)) tp.accumulate(ai, g * tp.value(bi).transpose());
    if (tp.needs_grad(bi)) tp.accumulate(bi, tp.value(ai).transpose() * g);
  });
}

Var matmul_t(Var a, Var b) {
  check_same_tape(a, b);
  if (a.cols() != b.cols()) throw Error("tape: matmul_t inner dimensions");
  Tape& t = *a.tape;
  Mat out = a.value() * b.value().transpose();
  if (!t.needs_grad(a.index) && !t.needs_grad(b.index)) return t.constant(std::move(out));
  const int ai = a.index, bi = b.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, bi, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    if (tp.needs_grad(ai)) tp.accumulate(ai, g * tp.value(bi));
    if (tp.needs_grad(bi)) tp.accumulate(bi, g.transpose() * tp.value(ai));
  });
}

// ---- reductions ----

Var sum(Var a) {
  Tape& t = *a.tape;
  Mat out(1, 1);
  out(0, 0) = a.value().sum();
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, self](Tape& tp) {
    const double g = tp.grad(self)(0, 0);
    const Mat& v = tp.value(ai);
    tp.accumulate(ai, Mat(Mat::Constant(v.rows(), v.cols(), g)));
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return scale(sum(a), 1.0 / n);
}

Var dot(Var a, Var b) {
  check_same_shape(a, b, "dot");
  return sum(mul(a, b));
}

// ---- shape ----

Var row(Var a, int i) {
  Tape& t = *a.tape;
  if (i < 0 || i >= a.rows()) throw Error("tape: row index out of range");
  Mat out = a.value().row(i);
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, i, self](Tape& tp) {
    const Mat& v = tp.value(ai);
    Mat g = Mat::Zero(v.rows(), v.cols());
    g.row(i) = tp.grad(self);
    tp.accumulate(ai, g);
  });
}

Var slice_cols(Var a, int start, int n) {
  Tape& t = *a.tape;
  if (start < 0 || n < 0 || start + n > a.cols()) throw Error("tape: slice_cols range");
  Mat out = a.value().middleCols(start, n);
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, start, n, self](Tape& tp) {
    const Mat& v = tp.value(ai);
    Mat g = Mat::Zero(v.rows(), v.cols());
    g.middleCols(start, n) = tp.grad(self);
    tp.accumulate(ai, g);
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error("tape: concat_cols of nothing");
  Tape& t = *parts.front().tape;
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  bool needs = false;
  for (Var p : parts) {
    check_same_tape(parts.front(), p);
    if (p.rows() != rows) throw Error("tape: concat_cols row mismatch");
    cols += p.cols();
    needs = needs || t.needs_grad(p.index);
  }
  Mat out(rows, cols);
  Eigen::Index at = 0;
  std::vector<int> idx;
  std::vector<int> widths;
  for (Var p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    idx.push_back(p.index);
    widths.push_back(static_cast<int>(p.cols()));
    at += p.cols();
  }
  if (!needs) return t.constant(std::move(out));
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [idx, widths, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    int at2 = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      tp.accumulate(idx[k], g.middleCols(at2, widths[k]));
      at2 += widths[k];
    }
  });
}

Var stack_rows(const std::vector<Var>& rows_in) {
  if (rows_in.empty()) throw Error("tape: stack_rows of nothing");
  Tape& t = *rows_in.front().tape;
  const Eigen::Index cols = rows_in.front().cols();
  bool needs = false;
  for (Var r : rows_in) {
    check_same_tape(rows_in.front(), r);
    if (r.rows() != 1 || r.cols() != cols) throw Error("tape: stack_rows expects 1xC rows");
    needs = needs || t.needs_grad(r.index);
  }
  Mat out(static_cast<Eigen::Index>(rows_in.size()), cols);
  std::vector<int> idx;
  for (std::size_t k = 0; k < rows_in.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = rows_in[k].value();
    idx.push_back(rows_in[k].index);
  }
  if (!needs) return t.constant(std::move(out));
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [idx, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      tp.accumulate(idx[k], g.row(static_cast<Eigen::Index>(k)));
    }
  });
}

Var reverse_rows(Var a) {
  Tape& t = *a.tape;
  Mat out = a.value().colwise().reverse();
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, self](Tape& tp) {
    tp.accumulate(ai, tp.grad(self).colwise().reverse());
  });
}

Var transpose(Var a) {
  Tape& t = *a.tape;
  Mat out = a.value().transpose();
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, self](Tape& tp) {
    tp.accumulate(ai, tp.grad(self).transpose());
  });
}

Var gather(Var in, const Eigen::ArrayXXi& rows_idx, const Eigen::ArrayXXi& cols_idx) {
  Tape& t = *in.tape;
  if (rows_idx.rows() != cols_idx.rows() || rows_idx.cols() != cols_idx.cols()) {
    throw Error("tape: gather index shape mismatch");
  }
  const Mat& v = in.value();
  Mat out(rows_idx.rows(), rows_idx.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = v(rows_idx(i, j), cols_idx(i, j));
    }
  }
  if (!t.needs_grad(in.index)) return t.constant(std::move(out));
  const int ai = in.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ai, rows_idx, cols_idx, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    const Mat& v2 = tp.value(ai);
    Mat acc = Mat::Zero(v2.rows(), v2.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        acc(rows_idx(i, j), cols_idx(i, j)) += g(i, j);
      }
    }
    tp.accumulate(ai, acc);
  });
}

// ---- row-wise normalization / attention ----

Var layernorm_rows(Var a, double eps) {
  Tape& t = *a.tape;
  const Mat& x = a.value();
  Vec mu = x.rowwise().mean();
  Mat centered = x;
  centered.colwise() -= mu;
  Vec var = centered.array().square().rowwise().mean().matrix();
  Vec inv_std = (var.array() + eps).sqrt().inverse().matrix();
  Mat out = (centered.array().colwise() * inv_std.array()).matrix();
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  Mat y = out;
  return t.emplace(std::move(out), true,
                   [ai, self, y = std::move(y), inv_std = std::move(inv_std)](Tape& tp) {
    const Mat& g = tp.grad(self);
    // dx = inv_std * (g - mean_row(g) - y .* mean_row(g .* y))
    Vec gm = g.rowwise().mean();
    Vec gym = g.cwiseProduct(y).rowwise().mean();
    Mat dx = g;
    dx.colwise() -= gm;
    dx.array() -= y.array().colwise() * gym.array();
    dx = (dx.array().colwise() * inv_std.array()).matrix();
    tp.accumulate(ai, dx);
  });
}

Var softmax_rows(Var a) {
  Tape& t = *a.tape;
  const Mat& x = a.value();
  Mat out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).maxCoeff();
    Eigen::ArrayXXd e = (x.row(i).array() - m).exp();
    out.row(i) = (e / e.sum()).matrix();
  }
  if (!t.needs_grad(a.index)) return t.constant(std::move(out));
  const int ai = a.index;
  const int self = static_cast<int>(t.size());
  Mat y = out;
  return t.emplace(std::move(out), true, [ai, self, y = std::move(y)](Tape& tp) {
    const Mat& g = tp.grad(self);
    Vec s = g.cwiseProduct(y).rowwise().sum();
    Mat shifted = g;
    shifted.colwise() -= s;
    tp.accumulate(ai, Mat(y.cwiseProduct(shifted)));
  });
}

// ---- signal ----

Var magnitude(Var re, Var im) {
  check_same_tape(re, im);
  check_same_shape(re, im, "magnitude");
  Tape& t = *re.tape;
  Mat out = (re.value().array().square() + im.value().array().square()).sqrt().matrix();
  if (!t.needs_grad(re.index) && !t.needs_grad(im.index)) return t.constant(std::move(out));
  const int ri = re.index, ii = im.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true, [ri, ii, self](Tape& tp) {
    const Mat& g = tp.grad(self);
    const Mat& m = tp.value(self);
    Mat safe = (m.array() > 0.0).select(m, Mat::Ones(m.rows(), m.cols()));
    Mat ratio = g.cwiseQuotient(safe);
    Mat mask = (m.array() > 0.0).select(Mat::Ones(m.rows(), m.cols()),
                                        Mat::Zero(m.rows(), m.cols()));
    ratio = ratio.cwiseProduct(mask);
    if (tp.needs_grad(ri)) tp.accumulate(ri, ratio.cwiseProduct(tp.value(ri)));
    if (tp.needs_grad(ii)) tp.accumulate(ii, ratio.cwiseProduct(tp.value(ii)));
  });
}

Var overlap_add_rows(Var frames, const Vec& window_fn, int offset, int hop,
                     int half, int out_length) {
  Tape& t = *frames.tape;
  const Mat& f = frames.value();
  const int n_frames = static_cast<int>(f.rows());
  const int window = static_cast<int>(window_fn.size());
  const Eigen::Index padded =
      static_cast<Eigen::Index>(n_frames - 1) * hop + f.cols();
  Vec acc = Vec::Zero(padded);
  Vec env = Vec::Zero(padded);
  for (int m = 0; m < n_frames; ++m) {
    const Eigen::Index base = static_cast<Eigen::Index>(m) * hop;
    for (int j = 0; j < window; ++j) {
      const double w = window_fn[j];
      acc[base + offset + j] += w * f(m, offset + j);
      env[base + offset + j] += w * w;
    }
  }
  Mat out = Mat::Zero(out_length, 1);
  for (int i = 0; i < out_length; ++i) {
    const Eigen::Index p = static_cast<Eigen::Index>(i) + half;
    if (p < padded && env[p] > 1e-10) out(i, 0) = acc[p] / env[p];
  }
  if (!t.needs_grad(frames.index)) return t.constant(std::move(out));
  const int fi = frames.index;
  const int self = static_cast<int>(t.size());
  return t.emplace(std::move(out), true,
                   [fi, self, window_fn, offset, hop, half, out_length,
                    env = std::move(env), padded](Tape& tp) {
    const Mat& g = tp.grad(self);
    const Mat& f2 = tp.value(fi);
    const int window = static_cast<int>(window_fn.size());
    Mat gf = Mat::Zero(f2.rows(), f2.cols());
    for (int m = 0; m < static_cast<int>(f2.rows()); ++m) {
      const Eigen::Index base = static_cast<Eigen::Index>(m) * hop;
      for (int j = 0; j < window; ++j) {
        const Eigen::Index p = base + offset + j;
        const Eigen::Index i = p - half;
        if (i < 0 || i >= out_length) continue;
        if (p < padded && env[p] > 1e-10) {
          gf(m, offset + j) += window_fn[j] * g(static_cast<int>(i), 0) / env[p];
        }
      }
    }
    tp.accumulate(fi, gf);
  });
}

Var mse(Var a, Var b, bool mean_reduction) {
  Var d = square(sub(a, b));
  return mean_reduction ? mean(d) : sum(d);
}

}  // namespace srep::ad
