// srep/sssr.cpp

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

#include "srep/sssr.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace srep {

namespace {

constexpr const char* kFormat = "srep-sssr-v1";
constexpr const char* kMetaFile = "sssr_meta.json";
constexpr const char* kWeightsFile = "sssr_weights.bin";
constexpr int kFeChannels = 512;

/// Fixed sinusoidal position encoding, T x dim.
Mat position_encoding(int frames, int dim) {
  Mat pe(frames, dim);
  for (int t = 0; t < frames; ++t) {
    for (int i = 0; i < dim; i += 2) {
      const double rate = std::pow(10000.0, static_cast<double>(i) / dim);
      pe(t, i) = std::sin(t / rate);
      if (i + 1 < dim) pe(t, i + 1) = std::cos(t / rate);
    }
  }
  return pe;
}

/// y = layernorm(x) * gamma + beta, rows as frames.
ad::Var affine_layernorm(ad::Tape& tape, ad::Var x, const Mat& gamma, const Mat& beta) {
  ad::Var normed = ad::layernorm_rows(x);
  ad::Var scaled = ad::mul_rowvec(normed, tape.constant(gamma));
  return ad::add_rowvec(scaled, tape.constant(beta));
}

ad::Var linear_rows(ad::Tape& tape, ad::Var x, const Mat& weight, const Mat& bias) {
  // x: T x in, weight: out x in, bias: 1 x out.
  ad::Var y = ad::matmul_t(x, tape.constant(weight));
  return ad::add_rowvec(y, tape.constant(bias));
}

}  // namespace

ModelId parse_model_id(const std::string& s) {
  if (s == "hubert") return ModelId::kHubert;
  if (s == "xlsr") return ModelId::kXlsr;
  throw ConfigError("unknown model id: '" + s + "' (expected hubert or xlsr)");
}

std::string to_string(ModelId id) {
  return id == ModelId::kHubert ? "hubert" : "xlsr";
}

std::string to_string(Layer layer) { return layer == Layer::kFE ? "fe" : "ol"; }

int SSSRBackend::fe_channels() const { return conv_.back().out_channels; }

int SSSRBackend::downsample_factor() const {
  int f = 1;
  for (const ConvLayerSpec& c : conv_) f *= c.stride;
  return f;
}

int SSSRBackend::min_input_samples() const {
  int r = 1;
  for (auto it = conv_.rbegin(); it != conv_.rend(); ++it) {
    r = (r - 1) * it->stride + it->kernel;
  }
  return r;
}

int SSSRBackend::num_frames(int input_samples) const {
  int t = input_samples;
  for (const ConvLayerSpec& c : conv_) {
    t = (t - c.kernel) / c.stride + 1;
    if (t <= 0) return 0;
  }
  return t;
}

std::uint64_t SSSRBackend::parameter_checksum() const {
  std::uint64_t h = fnv1a("sssr-params");
  for (const std::string& name : weights_.names()) {
    h = fnv1a(name, h);
    const Mat& m = weights_.get(name);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        h = fnv1a(&v, sizeof(v), h);
      }
    }
  }
  return h;
}

ad::Var SSSRBackend::fe_graph(ad::Tape& tape, ad::Var samples) const {
  if (samples.cols() != 1) throw Error("sssr: fe_graph expects an N x 1 input");
  const int n = static_cast<int>(samples.rows());
  if (n < min_input_samples()) {
    throw Error("sssr: input too short for one encoder frame (" + std::to_string(n) +
                " < " + std::to_string(min_input_samples()) + " samples)");
  }
  ad::Var x = ad::transpose(samples);  // channels x length, starting at 1 x N
  for (std::size_t l = 0; l < conv_.size(); ++l) {
    const ConvLayerSpec& spec = conv_[l];
    const int length = static_cast<int>(x.cols());
    const int t_out = (length - spec.kernel) / spec.stride + 1;
    // im2col: row c*kernel+k of the patch matrix reads channel c, tap k.
    Eigen::ArrayXXi rows_idx(spec.in_channels * spec.kernel, t_out);
    Eigen::ArrayXXi cols_idx(spec.in_channels * spec.kernel, t_out);
    for (int c = 0; c < spec.in_channels; ++c) {
      for (int k = 0; k < spec.kernel; ++k) {
        for (int t = 0; t < t_out; ++t) {
          rows_idx(c * spec.kernel + k, t) = c;
          cols_idx(c * spec.kernel + k, t) = t * spec.stride + k;
        }
      }
    }
    const std::string prefix = "fe.conv" + std::to_string(l);
    ad::Var patches = ad::gather(x, rows_idx, cols_idx);
    ad::Var y = ad::matmul(tape.constant(weights_.get(prefix + ".weight")), patches);
    y = ad::add_colvec(y, tape.constant(weights_.get(prefix + ".bias")));
    if (l == 0) {
      // Channel norm after the first conv bounds activations regardless of
      // waveform scale; later layers see normalized statistics.
      const std::string norm = "fe.norm0";
      ad::Var frames_major = ad::transpose(y);
      frames_major = affine_layernorm(tape, frames_major, weights_.get(norm + ".gamma"),
                                      weights_.get(norm + ".beta"));
      y = ad::transpose(frames_major);
    }
    x = ad::gelu(y);
  }
  return ad::transpose(x);  // T x 512
}

ad::Var SSSRBackend::ol_graph(ad::Tape& tape, ad::Var fe) const {
  if (static_cast<int>(fe.cols()) != fe_channels()) {
    throw Error("sssr: ol_graph expects T x " + std::to_string(fe_channels()) + " input");
  }
  ad::Var h = affine_layernorm(tape, fe, weights_.get("ol.pre_norm.gamma"),
                               weights_.get("ol.pre_norm.beta"));
  h = linear_rows(tape, h, weights_.get("ol.proj.weight"), weights_.get("ol.proj.bias"));
  h = ad::add(h, tape.constant(position_encoding(static_cast<int>(h.rows()), ol_dim_)));

  const int head_dim = ol_dim_ / ol_heads_;
  for (int l = 0; l < ol_layers_; ++l) {
    const std::string p = "ol.layer" + std::to_string(l);
    // Pre-norm attention block.
    ad::Var a = affine_layernorm(tape, h, weights_.get(p + ".norm1.gamma"),
                                 weights_.get(p + ".norm1.beta"));
    ad::Var q = linear_rows(tape, a, weights_.get(p + ".attn.wq.weight"),
                            weights_.get(p + ".attn.wq.bias"));
    ad::Var k = linear_rows(tape, a, weights_.get(p + ".attn.wk.weight"),
                            weights_.get(p + ".attn.wk.bias"));
    ad::Var v = linear_rows(tape, a, weights_.get(p + ".attn.wv.weight"),
                            weights_.get(p + ".attn.wv.bias"));
    std::vector<ad::Var> heads;
    heads.reserve(static_cast<std::size_t>(ol_heads_));
    for (int hh = 0; hh < ol_heads_; ++hh) {
      ad::Var qh = ad::slice_cols(q, hh * head_dim, head_dim);
      ad::Var kh = ad::slice_cols(k, hh * head_dim, head_dim);
      ad::Var vh = ad::slice_cols(v, hh * head_dim, head_dim);
      ad::Var scores = ad::scale(ad::matmul_t(qh, kh), 1.0 / std::sqrt(head_dim));
      heads.push_back(ad::matmul(ad::softmax_rows(scores), vh));
    }
    ad::Var attn = linear_rows(tape, ad::concat_cols(heads),
                               weights_.get(p + ".attn.wo.weight"),
                               weights_.get(p + ".attn.wo.bias"));
    h = ad::add(h, attn);
    // Pre-norm feed-forward block.
    ad::Var f = affine_layernorm(tape, h, weights_.get(p + ".norm2.gamma"),
                                 weights_.get(p + ".norm2.beta"));
    f = ad::gelu(linear_rows(tape, f, weights_.get(p + ".ffn.w1.weight"),
                             weights_.get(p + ".ffn.w1.bias")));
    f = linear_rows(tape, f, weights_.get(p + ".ffn.w2.weight"),
                    weights_.get(p + ".ffn.w2.bias"));
    h = ad::add(h, f);
  }
  return affine_layernorm(tape, h, weights_.get("ol.final_norm.gamma"),
                          weights_.get("ol.final_norm.beta"));
}

Mat SSSRBackend::fe(const Vec& samples) const {
  ad::Tape tape;
  ad::Var in = tape.constant(samples);
  return fe_graph(tape, in).value();
}

Mat SSSRBackend::ol_from_fe(const Mat& fe) const {
  ad::Tape tape;
  ad::Var in = tape.constant(fe);
  return ol_graph(tape, in).value();
}

std::shared_ptr<const SSSRBackend> SSSRBackend::load(const std::string& model_id,
                                                     const std::string& checkpoint_ref) {
  const ModelId id = parse_model_id(model_id);
  namespace fs = std::filesystem;
  const fs::path dir(checkpoint_ref);
  const fs::path meta_path = dir / kMetaFile;
  if (!fs::exists(meta_path)) {
    throw MissingInputError("sssr: checkpoint meta not found: " + meta_path.string());
  }
  std::ifstream meta_stream(meta_path);
  nlohmann::json meta;
  try {
    meta_stream >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error("sssr: corrupt checkpoint meta " + meta_path.string() + ": " + e.what());
  }

  if (meta.value("format", "") != kFormat) {
    throw Error("sssr: unsupported checkpoint format in " + meta_path.string());
  }
  if (meta.value("model_id", "") != to_string(id)) {
    throw Error("sssr: checkpoint is for model '" + meta.value("model_id", "") +
                "', requested '" + to_string(id) + "'");
  }
  if (meta.value("sample_rate", 0) != 16000) {
    throw Error("sssr: checkpoint expects an unsupported sample rate");
  }

  auto backend = std::shared_ptr<SSSRBackend>(new SSSRBackend());
  backend->model_id_ = id;
  backend->checkpoint_ref_ = checkpoint_ref;
  for (const auto& layer : meta.at("conv_layers")) {
    ConvLayerSpec spec;
    spec.in_channels = layer.at(0).get<int>();
    spec.out_channels = layer.at(1).get<int>();
    spec.kernel = layer.at(2).get<int>();
    spec.stride = layer.at(3).get<int>();
    if (spec.in_channels <= 0 || spec.out_channels <= 0 || spec.kernel <= 0 ||
        spec.stride <= 0) {
      throw Error("sssr: corrupt conv layer spec in " + meta_path.string());
    }
    backend->conv_.push_back(spec);
  }
  if (backend->conv_.empty()) throw Error("sssr: checkpoint has no conv layers");
  if (backend->conv_.front().in_channels != 1) {
    throw Error("sssr: first conv layer must take the 1-channel waveform");
  }
  if (backend->conv_.back().out_channels != kFeChannels) {
    throw Error("sssr: feature encoder must emit 512 channels");
  }
  for (std::size_t l = 1; l < backend->conv_.size(); ++l) {
    if (backend->conv_[l].in_channels != backend->conv_[l - 1].out_channels) {
      throw Error("sssr: conv layer channel chain broken in meta");
    }
  }
  const auto& ol = meta.at("ol");
  backend->ol_dim_ = ol.at("dim").get<int>();
  backend->ol_layers_ = ol.at("layers").get<int>();
  backend->ol_heads_ = ol.at("heads").get<int>();
  backend->ol_ffn_dim_ = ol.at("ffn_dim").get<int>();
  const int expected_dim = id == ModelId::kHubert ? 768 : 1024;
  if (backend->ol_dim_ != expected_dim) {
    throw Error("sssr: output layer dim " + std::to_string(backend->ol_dim_) +
                " does not match " + to_string(id));
  }
  if (backend->ol_layers_ <= 0 || backend->ol_heads_ <= 0 ||
      backend->ol_dim_ % backend->ol_heads_ != 0 || backend->ol_ffn_dim_ <= 0) {
    throw Error("sssr: corrupt output layer spec in " + meta_path.string());
  }

  backend->weights_ = TensorArchive::load((dir / kWeightsFile).string());

  // Validate every tensor the graphs will fetch, so failures happen at load
  // time rather than mid-extraction.
  auto expect = [&](const std::string& name, int rows, int cols) {
    if (!backend->weights_.contains(name)) {
      throw Error("sssr: checkpoint missing tensor '" + name + "'");
    }
    const Mat& m = backend->weights_.get(name);
    if (m.rows() != rows || m.cols() != cols) {
      throw Error("sssr: tensor '" + name + "' has wrong shape");
    }
  };
  for (std::size_t l = 0; l < backend->conv_.size(); ++l) {
    const ConvLayerSpec& c = backend->conv_[l];
    const std::string prefix = "fe.conv" + std::to_string(l);
    expect(prefix + ".weight", c.out_channels, c.in_channels * c.kernel);
    expect(prefix + ".bias", c.out_channels, 1);
  }
  expect("fe.norm0.gamma", 1, backend->conv_.front().out_channels);
  expect("fe.norm0.beta", 1, backend->conv_.front().out_channels);
  expect("ol.pre_norm.gamma", 1, kFeChannels);
  expect("ol.pre_norm.beta", 1, kFeChannels);
  expect("ol.proj.weight", backend->ol_dim_, kFeChannels);
  expect("ol.proj.bias", 1, backend->ol_dim_);
  for (int l = 0; l < backend->ol_layers_; ++l) {
    const std::string p = "ol.layer" + std::to_string(l);
    for (const char* n : {".norm1", ".norm2"}) {
      expect(p + n + ".gamma", 1, backend->ol_dim_);
      expect(p + n + ".beta", 1, backend->ol_dim_);
    }
    for (const char* n : {".attn.wq", ".attn.wk", ".attn.wv", ".attn.wo"}) {
      expect(p + n + ".weight", backend->ol_dim_, backend->ol_dim_);
      expect(p + n + ".bias", 1, backend->ol_dim_);
    }
    expect(p + ".ffn.w1.weight", backend->ol_ffn_dim_, backend->ol_dim_);
    expect(p + ".ffn.w1.bias", 1, backend->ol_ffn_dim_);
    expect(p + ".ffn.w2.weight", backend->ol_dim_, backend->ol_ffn_dim_);
    expect(p + ".ffn.w2.bias", 1, backend->ol_dim_);
  }
  expect("ol.final_norm.gamma", 1, backend->ol_dim_);
  expect("ol.final_norm.beta", 1, backend->ol_dim_);

  // Probe the temporal downsampling instead of trusting the meta: one frame
  // at the receptive field, two frames one hop later.
  const int r = backend->min_input_samples();
  const int hop = backend->downsample_factor();
  if (backend->fe(Vec::Zero(r)).rows() != 1 ||
      backend->fe(Vec::Zero(r + hop)).rows() != 2) {
    throw Error("sssr: probe extraction disagrees with declared conv geometry");
  }

  return backend;
}

SSSRRepresentation extract_fe(const SSSRBackend& backend, const TimeSignal& sig) {
  if (sig.sample_rate != 16000) throw Error("sssr: extraction expects 16 kHz input");
  SSSRRepresentation rep;
  rep.values = backend.fe(sig.samples);
  rep.model_id = backend.model_id();
  rep.layer = Layer::kFE;
  return rep;
}

SSSRRepresentation extract_ol(const SSSRBackend& backend, const TimeSignal& sig) {
  if (sig.sample_rate != 16000) throw Error("sssr: extraction expects 16 kHz input");
  SSSRRepresentation rep;
  rep.values = backend.ol_from_fe(backend.fe(sig.samples));
  rep.model_id = backend.model_id();
  rep.layer = Layer::kOL;
  return rep;
}

std::shared_ptr<const SSSRBackend> load_backend(const std::string& model_id,
                                                const std::string& checkpoint_ref) {
  std::string ref = checkpoint_ref;
  if (ref.empty()) {
    // Fall back to the cache directory, keyed by model id.
    const char* cache = std::getenv("SREP_CHECKPOINT_DIR");
    if (cache == nullptr || *cache == '\0') {
      throw ConfigError("sssr: no checkpoint given for '" + model_id +
                        "' and SREP_CHECKPOINT_DIR is unset");
    }
    ref = (std::filesystem::path(cache) / model_id).string();
  }
  return SSSRBackend::load(model_id, ref);
}

namespace {

Mat seeded_uniform(SplitMix64& rng, int rows, int cols, double bound) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = (2.0 * rng.next_double() - 1.0) * bound;
    }
  }
  return m;
}

}  // namespace

void write_reference_checkpoint(const std::string& dir, ModelId model_id,
                                std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  // Desk-scale depth: three conv layers and two transformer layers keep
  // extraction fast while preserving the published channel counts (FE 512,
  // OL 768 or 1024) and the strided-conv downsampling structure.
  const std::vector<ConvLayerSpec> conv = {
      {1, 256, 10, 5},
      {256, 256, 8, 4},
      {256, kFeChannels, 4, 4},
  };
  const int ol_dim = model_id == ModelId::kHubert ? 768 : 1024;
  const int ol_layers = 2;
  const int ol_heads = 4;
  const int ol_ffn = ol_dim;

  nlohmann::json meta;
  meta["format"] = kFormat;
  meta["model_id"] = to_string(model_id);
  meta["sample_rate"] = 16000;
  meta["conv_layers"] = nlohmann::json::array();
  for (const ConvLayerSpec& c : conv) {
    meta["conv_layers"].push_back({c.in_channels, c.out_channels, c.kernel, c.stride});
  }
  meta["ol"] = {{"dim", ol_dim}, {"layers", ol_layers}, {"heads", ol_heads},
                {"ffn_dim", ol_ffn}};

  SplitMix64 rng(seed ^ fnv1a(to_string(model_id)));
  TensorArchive weights;
  for (std::size_t l = 0; l < conv.size(); ++l) {
    const ConvLayerSpec& c = conv[l];
    const double bound = std::sqrt(6.0 / (c.in_channels * c.kernel));
    const std::string prefix = "fe.conv" + std::to_string(l);
    weights.put(prefix + ".weight",
                seeded_uniform(rng, c.out_channels, c.in_channels * c.kernel, bound));
    weights.put(prefix + ".bias", Mat::Zero(c.out_channels, 1));
  }
  weights.put("fe.norm0.gamma", Mat::Ones(1, conv.front().out_channels));
  weights.put("fe.norm0.beta", Mat::Zero(1, conv.front().out_channels));
  weights.put("ol.pre_norm.gamma", Mat::Ones(1, kFeChannels));
  weights.put("ol.pre_norm.beta", Mat::Zero(1, kFeChannels));
  const double proj_bound = std::sqrt(6.0 / (kFeChannels + ol_dim));
  weights.put("ol.proj.weight", seeded_uniform(rng, ol_dim, kFeChannels, proj_bound));
  weights.put("ol.proj.bias", Mat::Zero(1, ol_dim));
  const double attn_bound = std::sqrt(6.0 / (2.0 * ol_dim));
  const double ffn1_bound = std::sqrt(6.0 / (ol_dim + ol_ffn));
  for (int l = 0; l < ol_layers; ++l) {
    const std::string p = "ol.layer" + std::to_string(l);
    for (const char* n : {".norm1", ".norm2"}) {
      weights.put(p + n + ".gamma", Mat::Ones(1, ol_dim));
      weights.put(p + n + ".beta", Mat::Zero(1, ol_dim));
    }
    for (const char* n : {".attn.wq", ".attn.wk", ".attn.wv", ".attn.wo"}) {
      weights.put(p + n + ".weight", seeded_uniform(rng, ol_dim, ol_dim, attn_bound));
      weights.put(p + n + ".bias", Mat::Zero(1, ol_dim));
    }
    weights.put(p + ".ffn.w1.weight", seeded_uniform(rng, ol_ffn, ol_dim, ffn1_bound));
    weights.put(p + ".ffn.w1.bias", Mat::Zero(1, ol_ffn));
    weights.put(p + ".ffn.w2.weight", seeded_uniform(rng, ol_dim, ol_ffn, ffn1_bound));
    weights.put(p + ".ffn.w2.bias", Mat::Zero(1, ol_dim));
  }
  weights.put("ol.final_norm.gamma", Mat::Ones(1, ol_dim));
  weights.put("ol.final_norm.beta", Mat::Zero(1, ol_dim));

  std::ofstream meta_out(fs::path(dir) / kMetaFile);
  if (!meta_out) throw Error("sssr: cannot write checkpoint meta in " + dir);
  meta_out << meta.dump(2) << "\n";
  weights.save((fs::path(dir) / kWeightsFile).string());
}

}  // namespace srep
