// tests/tape_test.cpp

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

// Every operator's backward pass is checked against central finite
// differences of its forward pass; the forward values themselves are checked
// where a closed form exists. Gradients only need to be as accurate as the
// FD scheme (~1e-6 relative for well-scaled inputs), so the tolerances here
// are looser than the value checks elsewhere.

#include "doctest.h"

#include "srep/tape.hpp"

#include "test_util.hpp"

#include <cmath>
#include <functional>

using namespace srep;
using srep::ad::Tape;
using srep::ad::Var;

namespace {

Mat seeded_mat(std::uint64_t seed, int rows, int cols, double amp = 1.0) {
  SplitMix64 rng(seed);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = amp * (2.0 * rng.next_double() - 1.0);
  }
  return m;
}

/// Max relative error between analytic d(scalar f)/dx and central FD over
/// every entry of every input.
double check_grad(const std::function<Var(Tape&, const std::vector<Var>&)>& f,
                  std::vector<Mat> inputs, double step = 1e-6) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Mat& m : inputs) vars.push_back(tape.leaf(m));
  Var out = f(tape, vars);
  REQUIRE(out.rows() == 1);
  REQUIRE(out.cols() == 1);
  tape.backward(out);

  double worst = 0.0;
  for (std::size_t v = 0; v < inputs.size(); ++v) {
    const Mat analytic = vars[v].grad();
    for (Eigen::Index r = 0; r < inputs[v].rows(); ++r) {
      for (Eigen::Index c = 0; c < inputs[v].cols(); ++c) {
        auto eval = [&](double delta) {
          std::vector<Mat> shifted = inputs;
          shifted[v](r, c) += delta;
          Tape t2;
          std::vector<Var> vs;
          for (const Mat& m : shifted) vs.push_back(t2.constant(m));
          return f(t2, vs).scalar();
        };
        const double fd = (eval(step) - eval(-step)) / (2.0 * step);
        const double denom = std::max({std::abs(fd), std::abs(analytic(r, c)), 1e-8});
        worst = std::max(worst, std::abs(fd - analytic(r, c)) / denom);
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("constants do not track gradients, leaves do") {
  Tape tape;
  Var c = tape.constant(Mat::Ones(2, 2));
  Var l = tape.leaf(Mat::Ones(2, 2));
  CHECK_FALSE(tape.needs_grad(c.index));
  CHECK(tape.needs_grad(l.index));
  Var out = ad::sum(ad::mul(c, l));
  tape.backward(out);
  CHECK(l.grad().isApprox(Mat::Ones(2, 2)));
}

TEST_CASE("elementwise forward values") {
  Tape tape;
  Mat x(1, 3);
  x << -1.0, 0.0, 2.0;
  CHECK(ad::sigmoid(tape.constant(x)).value()(0, 2) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK(ad::leaky_relu(tape.constant(x), 0.3).value()(0, 0) == doctest::Approx(-0.3));
  CHECK(ad::leaky_relu(tape.constant(x), 0.3).value()(0, 2) == doctest::Approx(2.0));
  // gelu(x) = x * Phi(x), exact erf form
  CHECK(ad::gelu(tape.constant(x)).value()(0, 2) ==
        doctest::Approx(2.0 * 0.5 * (1.0 + std::erf(2.0 / std::sqrt(2.0)))));
  CHECK(ad::clamp_max(tape.constant(x), 1.5).value()(0, 2) == doctest::Approx(1.5));
}

TEST_CASE("gradients: arithmetic and activations") {
  const Mat a = seeded_mat(1, 3, 4);
  const Mat b = seeded_mat(2, 3, 4);
  auto two = [&](auto op) {
    return check_grad(
        [op](Tape& t, const std::vector<Var>& v) { return ad::sum(op(v[0], v[1])); },
        {a, b});
  };
  CHECK(two([](Var x, Var y) { return ad::add(x, y); }) < 1e-6);
  CHECK(two([](Var x, Var y) { return ad::sub(x, y); }) < 1e-6);
  CHECK(two([](Var x, Var y) { return ad::mul(x, y); }) < 1e-6);

  auto one = [&](auto op, Mat in) {
    return check_grad(
        [op](Tape& t, const std::vector<Var>& v) { return ad::sum(op(v[0])); }, {in});
  };
  CHECK(one([](Var x) { return ad::square(x); }, a) < 1e-6);
  CHECK(one([](Var x) { return ad::sigmoid(x); }, a) < 1e-5);
  CHECK(one([](Var x) { return ad::tanh_(x); }, a) < 1e-5);
  CHECK(one([](Var x) { return ad::gelu(x); }, a) < 1e-5);
  CHECK(one([](Var x) { return ad::scale(x, -2.5); }, a) < 1e-6);
  CHECK(one([](Var x) { return ad::add_scalar(x, 3.0); }, a) < 1e-6);
  CHECK(one([](Var x) { return ad::leaky_relu(x, 0.3); }, a) < 1e-5);

  // positive-domain ops
  Mat pos = seeded_mat(3, 3, 4);
  pos = (pos.array() * 0.4 + 1.0).matrix();  // in (0.6, 1.4)
  CHECK(one([](Var x) { return ad::sqrt_(x); }, pos) < 1e-5);
  CHECK(one([](Var x) { return ad::log_(x); }, pos) < 1e-5);
}

TEST_CASE("gradients: broadcast ops") {
  const Mat a = seeded_mat(3, 4, 5);
  const Mat row = seeded_mat(4, 1, 5);
  const Mat col = seeded_mat(5, 5, 1);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::add_rowvec(v[0], v[1]));
            },
            {a, row}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::mul_rowvec(v[0], v[1]));
            },
            {a, row}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::add_colvec(v[0], v[1]));
            },
            {a, col}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::mul_colvec(v[0], v[1]));
            },
            {a, col}) < 1e-6);

  Mat denom(1, 1);
  denom << 1.7;
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::div_scalar(v[0], v[1]));
            },
            {a, denom}) < 1e-5);
}

TEST_CASE("gradients: matmul family") {
  const Mat a = seeded_mat(6, 3, 4);
  const Mat b = seeded_mat(7, 4, 5);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::matmul(v[0], v[1]));
            },
            {a, b}) < 1e-6);
  const Mat bt = seeded_mat(8, 5, 4);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::matmul_t(v[0], v[1]));
            },
            {a, bt}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::dot(v[0], v[1]);
            },
            {a, seeded_mat(9, 3, 4)}) < 1e-6);
}

TEST_CASE("gradients: shape ops") {
  const Mat a = seeded_mat(10, 4, 6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(ad::row(v[0], 2)));
            },
            {a}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(ad::slice_cols(v[0], 1, 3)));
            },
            {a}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(ad::transpose(v[0])));
            },
            {a}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(ad::reverse_rows(v[0])));
            },
            {a}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(
                  ad::concat_cols({ad::slice_cols(v[0], 0, 2), ad::slice_cols(v[0], 2, 4)})));
            },
            {a}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(
                  ad::stack_rows({ad::row(v[0], 0), ad::row(v[0], 3), ad::row(v[0], 1)})));
            },
            {a}) < 1e-6);
}

TEST_CASE("gather forward and backward (duplicate reads accumulate)") {
  const Mat a = seeded_mat(11, 3, 5);
  Eigen::ArrayXXi rows_idx(2, 4), cols_idx(2, 4);
  rows_idx << 0, 0, 1, 2, 2, 2, 0, 1;
  cols_idx << 0, 0, 3, 4, 4, 4, 0, 3;  // (0,0) read twice, (2,4) twice

  Tape tape;
  Var in = tape.leaf(a);
  Var g = ad::gather(in, rows_idx, cols_idx);
  CHECK(g.value()(0, 0) == a(0, 0));
  CHECK(g.value()(0, 1) == a(0, 0));
  CHECK(g.value()(1, 1) == a(2, 4));

  CHECK(check_grad(
            [&](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(ad::gather(v[0], rows_idx, cols_idx)));
            },
            {a}) < 1e-6);
}

TEST_CASE("gradients: reductions and normalizations") {
  const Mat a = seeded_mat(12, 3, 6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) { return ad::mean(ad::square(v[0])); },
            {a}) < 1e-6);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(ad::layernorm_rows(v[0])));
            },
            {a}) < 1e-5);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              // weight the entries so softmax gradients are non-trivial
              Mat w = Mat::Zero(3, 6);
              for (int i = 0; i < 18; ++i) w(i / 6, i % 6) = 0.1 * (i + 1);
              return ad::sum(ad::mul(ad::softmax_rows(v[0]), t.constant(w)));
            },
            {a}) < 1e-5);
}

TEST_CASE("layernorm rows have zero mean and unit variance") {
  Tape tape;
  const Mat a = seeded_mat(13, 4, 32, 3.0);
  Mat y = ad::layernorm_rows(tape.constant(a)).value();
  for (int r = 0; r < 4; ++r) {
    CHECK(y.row(r).mean() == doctest::Approx(0.0).epsilon(1e-12));
    const double var = y.row(r).array().square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));  // eps-shifted
  }
}

TEST_CASE("softmax rows are stable under large shifts") {
  Tape tape;
  Mat a(2, 3);
  a << 1000.0, 1001.0, 1002.0, -1000.0, -999.0, -998.0;
  Mat y = ad::softmax_rows(tape.constant(a)).value();
  CHECK(y.row(0).sum() == doctest::Approx(1.0));
  CHECK(y.row(1).sum() == doctest::Approx(1.0));
  CHECK(y(0, 2) == doctest::Approx(y(1, 2)));  // same shifted logits
}

TEST_CASE("gradients: magnitude") {
  const Mat re = seeded_mat(14, 3, 4);
  const Mat im = seeded_mat(15, 3, 4);
  CHECK(check_grad(
            [](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::magnitude(v[0], v[1]));
            },
            {re, im}) < 1e-5);

  // zero magnitude: gradient defined as zero, no NaN
  Tape tape;
  Var zr = tape.leaf(Mat::Zero(2, 2));
  Var zi = tape.leaf(Mat::Zero(2, 2));
  Var m = ad::magnitude(zr, zi);
  tape.backward(ad::sum(m));
  CHECK(zr.grad().allFinite());
  CHECK(zr.grad().isApprox(Mat::Zero(2, 2)));
}

TEST_CASE("gradients: clamp_max blocks above the ceiling") {
  Mat x(1, 2);
  x << 0.5, 3.0;
  Tape tape;
  Var in = tape.leaf(x);
  tape.backward(ad::sum(ad::clamp_max(in, 1.0)));
  CHECK(in.grad()(0, 0) == doctest::Approx(1.0));
  CHECK(in.grad()(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("gradients: mse both reductions") {
  const Mat a = seeded_mat(16, 4, 5);
  const Mat b = seeded_mat(17, 4, 5);
  for (bool mean_reduction : {true, false}) {
    CHECK(check_grad(
              [mean_reduction](Tape& t, const std::vector<Var>& v) {
                return ad::mse(v[0], v[1], mean_reduction);
              },
              {a, b}) < 1e-6);
  }
  Tape tape;
  Var va = tape.constant(a);
  CHECK(ad::mse(va, va).scalar() == 0.0);
}

TEST_CASE("gradients: overlap_add synthesis path") {
  // Miniature WOLA geometry: window 8 inside fft 8, hop 4.
  const int window = 8, hop = 4, offset = 0, half = 4, out_length = 12;
  Vec wf(window);
  for (int n = 0; n < window; ++n) {
    wf[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / window);
  }
  const Mat frames = seeded_mat(18, 4, 8);
  CHECK(check_grad(
            [&](Tape& t, const std::vector<Var>& v) {
              return ad::sum(ad::square(
                  ad::overlap_add_rows(v[0], wf, offset, hop, half, out_length)));
            },
            {frames}) < 1e-5);
}

TEST_CASE("gradient accumulates across fan-out") {
  // y = sum(x) + sum(x .* x): dy/dx = 1 + 2x
  const Mat x = seeded_mat(19, 2, 3);
  Tape tape;
  Var in = tape.leaf(x);
  Var out = ad::add(ad::sum(in), ad::sum(ad::square(in)));
  tape.backward(out);
  const Mat expected = (Mat::Ones(2, 3).array() + 2.0 * x.array()).matrix();
  CHECK(in.grad().isApprox(expected, 1e-12));
}

TEST_CASE("deep chain mirrors the attention block shape") {
  // layernorm -> linear -> softmax attention -> mse against a target
  const Mat x = seeded_mat(20, 3, 8);
  const Mat wq = seeded_mat(21, 8, 8, 0.4);
  const Mat wk = seeded_mat(22, 8, 8, 0.4);
  const Mat target = seeded_mat(23, 3, 8);
  CHECK(check_grad(
            [&](Tape& t, const std::vector<Var>& v) {
              Var ln = ad::layernorm_rows(v[0]);
              Var q = ad::matmul_t(ln, t.constant(wq));
              Var k = ad::matmul_t(ln, t.constant(wk));
              Var scores = ad::scale(ad::matmul_t(q, k), 1.0 / std::sqrt(8.0));
              Var attn = ad::matmul(ad::softmax_rows(scores), ln);
              return ad::mse(attn, t.constant(target));
            },
            {x}, 1e-5) < 1e-4);
}
