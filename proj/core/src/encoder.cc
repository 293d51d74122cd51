// Copyright 2026 The QRewrite Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrewrite/encoder.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrewrite/errors.h"

namespace qrewrite {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sigmoid(const MatrixXd& a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

GruParams zero_gru(int d_in, int d_hid) {
  return GruParams{MatrixXd::Zero(d_in, 3 * d_hid), MatrixXd::Zero(d_hid, 3 * d_hid),
                   VectorXd::Zero(3 * d_hid)};
}

LinearParams zero_linear(int d_in, int d_out) {
  return LinearParams{MatrixXd::Zero(d_in, d_out), VectorXd::Zero(d_out)};
}

// One GRU time step over the whole batch. Rows whose active flag is 0 carry
// their previous state through unchanged.
void gru_step(const GruParams& p, const MatrixXd& x, const MatrixXd& h_prev,
              const VectorXd& active, MatrixXd& z,
              MatrixXd& r, MatrixXd& n, MatrixXd& rh, MatrixXd& h_out) {
  const Index hid = h_prev.cols();
  MatrixXd gx = x * p.wx;
  gx.rowwise() += p.b.transpose();
  const MatrixXd gh = h_prev * p.wh.leftCols(2 * hid);
  z = sigmoid(gx.leftCols(hid) + gh.leftCols(hid));
  r = sigmoid(gx.middleCols(hid, hid) + gh.rightCols(hid));
  rh = r.cwiseProduct(h_prev);
  n = (gx.rightCols(hid) + rh * p.wh.rightCols(hid)).array().tanh().matrix();
  h_out = h_prev;
  for (Index i = 0; i < x.rows(); ++i) {
    if (active(i) == 0.0) continue;
    h_out.row(i) = (1.0 - z.row(i).array()) * n.row(i).array() +
                   z.row(i).array() * h_prev.row(i).array();
  }
}

// Backpropagates dh (gradient w.r.t. this step's output state) through one
// step. Accumulates parameter gradients, writes the input gradient to dx and
// returns the gradient w.r.t. the previous state.
MatrixXd gru_step_backward(const GruParams& p, const MatrixXd& x,
                           const MatrixXd& h_prev, const MatrixXd& z,
                           const MatrixXd& r, const MatrixXd& n,
                           const MatrixXd& rh, const VectorXd& active,
                           const MatrixXd& dh, GruParams& grad, MatrixXd& dx) {
  const Index hid = h_prev.cols();
  const auto mask = active.asDiagonal();

  const MatrixXd dn = mask * dh.cwiseProduct((1.0 - z.array()).matrix());
  const MatrixXd dz = mask * dh.cwiseProduct(h_prev - n);

  MatrixXd dh_prev = dh;
  for (Index i = 0; i < dh.rows(); ++i) {
    if (active(i) != 0.0) dh_prev.row(i) = dh.row(i).cwiseProduct(z.row(i));
  }

  const MatrixXd dan = dn.cwiseProduct((1.0 - n.array().square()).matrix());
  const MatrixXd daz = dz.array() * z.array() * (1.0 - z.array());
  const MatrixXd drh = dan * p.wh.rightCols(hid).transpose();
  const MatrixXd dar = drh.array() * h_prev.array() * r.array() * (1.0 - r.array());

  dh_prev += drh.cwiseProduct(r);
  dh_prev.noalias() += daz * p.wh.leftCols(hid).transpose();
  dh_prev.noalias() += dar * p.wh.middleCols(hid, hid).transpose();

  MatrixXd dgates(dh.rows(), 3 * hid);
  dgates << daz, dar, dan;
  grad.wx.noalias() += x.transpose() * dgates;
  grad.b += dgates.colwise().sum().transpose();
  grad.wh.leftCols(hid).noalias() += h_prev.transpose() * daz;
  grad.wh.middleCols(hid, hid).noalias() += h_prev.transpose() * dar;
  grad.wh.rightCols(hid).noalias() += rh.transpose() * dan;
  dx.noalias() = dgates * p.wx.transpose();
  return dh_prev;
}

void fill_uniform(std::span<double> values, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : values) v = dist(rng);
}

}  // namespace

void EncoderConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("invalid encoder config: " + what);
  };
  require(vocab_size >= 1, "vocab_size must be >= 1");
  require(d_emb >= 1 && d_hid >= 1 && n_heads >= 1 && d_head >= 1 && d_out >= 1,
          "all dimensions must be >= 1");
  require(max_len >= 1, "max_len must be >= 1");
  require(n_heads * d_head == 2 * d_hid, "n_heads * d_head must equal 2 * d_hid");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout_rate must lie in [0, 1)");
}

EncoderParams EncoderParams::zeros(const EncoderConfig& cfg) {
  cfg.validate();
  EncoderParams p;
  p.config = cfg;
  p.embedding = MatrixXd::Zero(cfg.vocab_size, cfg.d_emb);
  p.gru_fwd = zero_gru(cfg.d_emb, cfg.d_hid);
  p.gru_bwd = zero_gru(cfg.d_emb, cfg.d_hid);
  p.pool_query = MatrixXd::Zero(2 * cfg.d_hid, cfg.n_heads * cfg.d_head);
  p.pool_out = MatrixXd::Zero(cfg.n_heads * cfg.d_head, cfg.d_out);
  p.head_source = zero_linear(cfg.d_out, cfg.d_out);
  p.head_target = zero_linear(cfg.d_out, cfg.d_out);
  return p;
}

namespace {

template <typename View, typename Params>
std::vector<View> collect_tensors(Params& p) {
  auto view = [](std::string_view name, auto& m, bool bias) {
    return View{name, {m.data(), static_cast<std::size_t>(m.size())}, bias};
  };
  return {
      view("embedding", p.embedding, false),
      view("gru_fwd.wx", p.gru_fwd.wx, false),
      view("gru_fwd.wh", p.gru_fwd.wh, false),
      view("gru_fwd.b", p.gru_fwd.b, true),
      view("gru_bwd.wx", p.gru_bwd.wx, false),
      view("gru_bwd.wh", p.gru_bwd.wh, false),
      view("gru_bwd.b", p.gru_bwd.b, true),
      view("pool_query", p.pool_query, false),
      view("pool_out", p.pool_out, false),
      view("head_source.w", p.head_source.w, false),
      view("head_source.b", p.head_source.b, true),
      view("head_target.w", p.head_target.w, false),
      view("head_target.b", p.head_target.b, true),
  };
}

}  // namespace

std::vector<TensorView> EncoderParams::tensors() {
  return collect_tensors<TensorView>(*this);
}

std::vector<ConstTensorView> EncoderParams::tensors() const {
  return collect_tensors<ConstTensorView>(*this);
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.values.size();
  return n;
}

void EncoderParams::set_zero() {
  for (auto& t : tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
}

EncoderParams& EncoderParams::operator+=(const EncoderParams& other) {
  auto mine = tensors();
  const auto theirs = other.tensors();
  for (std::size_t k = 0; k < mine.size(); ++k) {
    if (mine[k].values.size() != theirs[k].values.size()) {
      throw DimensionError("cannot add parameter sets of different shapes (" +
                           std::string(mine[k].name) + ")");
    }
    for (std::size_t i = 0; i < mine[k].values.size(); ++i) {
      mine[k].values[i] += theirs[k].values[i];
    }
  }
  return *this;
}

bool EncoderParams::all_finite() const {
  for (const auto& t : tensors()) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool operator==(const EncoderParams& a, const EncoderParams& b) {
  if (!(a.config == b.config)) return false;
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) {
    if (!std::equal(ta[k].values.begin(), ta[k].values.end(), tb[k].values.begin(),
                    tb[k].values.end())) {
      return false;
    }
  }
  return true;
}

EncoderParams init_params(const EncoderConfig& cfg) {
  EncoderParams p = EncoderParams::zeros(cfg);
  Rng rng(cfg.seed);
  fill_uniform({p.embedding.data(), static_cast<std::size_t>(p.embedding.size())}, 1.0, rng);
  for (GruParams* g : {&p.gru_fwd, &p.gru_bwd}) {
    fill_uniform({g->wx.data(), static_cast<std::size_t>(g->wx.size())},
                 1.0 / std::sqrt(static_cast<double>(g->wx.rows())), rng);
    fill_uniform({g->wh.data(), static_cast<std::size_t>(g->wh.size())},
                 1.0 / std::sqrt(static_cast<double>(g->wh.rows())), rng);
  }
  for (MatrixXd* m : {&p.pool_query, &p.pool_out, &p.head_source.w, &p.head_target.w}) {
    fill_uniform({m->data(), static_cast<std::size_t>(m->size())},
                 1.0 / std::sqrt(static_cast<double>(m->rows())), rng);
  }
  return p;
}

std::vector<VectorXd> EncoderForward::attention_weights(std::size_t i) const {
  std::vector<VectorXd> out;
  for (const HeadCache& head : heads_.at(i)) {
    VectorXd w = VectorXd::Zero(max_len_);
    w.head(head.w.size()) = head.w;
    out.push_back(std::move(w));
  }
  return out;
}

EncoderForward encode_batch(const EncoderParams& params,
                            std::span<const TokenSequence> seqs, bool training,
                            Rng* rng) {
  const EncoderConfig& cfg = params.config;
  if (seqs.empty()) throw ValidationError("cannot encode an empty batch");
  if (training && cfg.dropout_rate > 0.0 && rng == nullptr) {
    throw ValidationError("training-mode encoding needs a random generator");
  }

  EncoderForward fw;
  const auto batch = static_cast<Index>(seqs.size());
  const int hid = cfg.d_hid;
  fw.max_len_ = cfg.max_len;
  for (const TokenSequence& s : seqs) {
    if (s.length < 1) throw ValidationError("cannot encode a zero-length sequence");
    if (s.length > s.max_len()) throw ValidationError("sequence length exceeds its padded width");
    for (TokenId id : s.tokens()) {
      if (id < 0 || id >= cfg.vocab_size) {
        throw DimensionError("token id " + std::to_string(id) +
                             " is outside the encoder vocabulary of " +
                             std::to_string(cfg.vocab_size));
      }
    }
    fw.tokens_.emplace_back(s.tokens().begin(), s.tokens().end());
    fw.lengths_.push_back(s.length);
    fw.steps_ = std::max(fw.steps_, s.length);
  }
  const int steps = fw.steps_;

  fw.inputs_.resize(steps);
  std::vector<VectorXd> active(steps, VectorXd::Zero(batch));
  for (int t = 0; t < steps; ++t) {
    fw.inputs_[t] = MatrixXd::Zero(batch, cfg.d_emb);
    for (Index i = 0; i < batch; ++i) {
      if (t < fw.lengths_[i]) {
        fw.inputs_[t].row(i) = params.embedding.row(seqs[i].ids[t]);
        active[t](i) = 1.0;
      }
    }
  }

  // Output states per step for each direction.
  std::vector<MatrixXd> out_f(steps), out_b(steps);
  fw.fwd_.resize(steps);
  fw.bwd_.resize(steps);
  MatrixXd h = MatrixXd::Zero(batch, hid);
  for (int t = 0; t < steps; ++t) {
    auto& c = fw.fwd_[t];
    c.h_prev = h;
    c.active = active[t];
    gru_step(params.gru_fwd, fw.inputs_[t], c.h_prev, c.active, c.z, c.r, c.n,
             c.rh, out_f[t]);
    h = out_f[t];
  }
  h.setZero();
  for (int t = steps - 1; t >= 0; --t) {
    auto& c = fw.bwd_[t];
    c.h_prev = h;
    c.active = active[t];
    gru_step(params.gru_bwd, fw.inputs_[t], c.h_prev, c.active, c.z, c.r, c.n,
             c.rh, out_b[t]);
    h = out_b[t];
  }

  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg.d_head));
  fw.states_.resize(batch);
  fw.heads_.resize(batch);
  fw.pooled_ = MatrixXd::Zero(batch, cfg.n_heads * cfg.d_head);
  for (Index i = 0; i < batch; ++i) {
    const int len = fw.lengths_[i];
    MatrixXd& x = fw.states_[i];
    x.resize(len, 2 * hid);
    for (int t = 0; t < len; ++t) {
      x.row(t).head(hid) = out_f[t].row(i);
      x.row(t).tail(hid) = out_b[t].row(i);
    }
    fw.heads_[i].resize(cfg.n_heads);
    for (int k = 0; k < cfg.n_heads; ++k) {
      auto& hc = fw.heads_[i][k];
      hc.s = x * params.pool_query.middleCols(k * cfg.d_head, cfg.d_head);
      const MatrixXd logits = (hc.s * hc.s.transpose()) * inv_sqrt;
      VectorXd m(len);
      hc.argmax.resize(len);
      for (int q = 0; q < len; ++q) {
        Index j = 0;
        m(q) = logits.row(q).maxCoeff(&j);
        hc.argmax[q] = j;
      }
      hc.w = (m.array() - m.maxCoeff()).exp().matrix();
      hc.w /= hc.w.sum();
      fw.pooled_.row(i).segment(k * cfg.d_head, cfg.d_head) = hc.w.transpose() * hc.s;
    }
  }

  fw.output_ = fw.pooled_ * params.pool_out;
  if (training) {
    const double keep = 1.0 - cfg.dropout_rate;
    fw.dropout_scale_ = MatrixXd::Constant(batch, cfg.d_out, 1.0 / keep);
    if (cfg.dropout_rate > 0.0) {
      std::bernoulli_distribution keep_draw(keep);
      for (Index i = 0; i < batch; ++i) {
        for (Index j = 0; j < cfg.d_out; ++j) {
          if (!keep_draw(*rng)) fw.dropout_scale_(i, j) = 0.0;
        }
      }
    }
    fw.output_ = fw.output_.cwiseProduct(fw.dropout_scale_);
  }
  return fw;
}

EmbeddingVector encode(const EncoderParams& params, const TokenSequence& seq,
                       bool training, Rng& rng) {
  const EncoderForward fw = encode_batch(params, std::span(&seq, 1), training, &rng);
  return fw.embeddings().row(0).transpose();
}

EmbeddingVector encode(const EncoderParams& params, const TokenSequence& seq) {
  const EncoderForward fw = encode_batch(params, std::span(&seq, 1), false, nullptr);
  return fw.embeddings().row(0).transpose();
}

void backward(const EncoderParams& params, const EncoderForward& fw,
              const MatrixXd& upstream, EncoderParams& grads) {
  const EncoderConfig& cfg = params.config;
  const auto batch = static_cast<Index>(fw.batch_size());
  if (upstream.rows() != batch || upstream.cols() != cfg.d_out) {
    throw DimensionError("upstream gradient is " + std::to_string(upstream.rows()) + "x" +
                         std::to_string(upstream.cols()) + ", expected " +
                         std::to_string(batch) + "x" + std::to_string(cfg.d_out));
  }
  if (!(grads.config == cfg)) grads = EncoderParams::zeros(cfg);

  const int hid = cfg.d_hid;
  const int steps = fw.steps_;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg.d_head));

  const MatrixXd dpre = fw.dropout_scale_.size() == 0
                            ? upstream
                            : MatrixXd(upstream.cwiseProduct(fw.dropout_scale_));
  grads.pool_out.noalias() += fw.pooled_.transpose() * dpre;
  const MatrixXd dpooled = dpre * params.pool_out.transpose();

  std::vector<MatrixXd> dout_f(steps, MatrixXd::Zero(batch, hid));
  std::vector<MatrixXd> dout_b(steps, MatrixXd::Zero(batch, hid));
  for (Index i = 0; i < batch; ++i) {
    const MatrixXd& x = fw.states_[i];
    const Index len = x.rows();
    MatrixXd dx = MatrixXd::Zero(len, 2 * hid);
    for (int k = 0; k < cfg.n_heads; ++k) {
      const auto& hc = fw.heads_[i][k];
      const VectorXd dout = dpooled.row(i).segment(k * cfg.d_head, cfg.d_head).transpose();
      MatrixXd ds = hc.w * dout.transpose();
      const VectorXd dw = hc.s * dout;
      const VectorXd dm = hc.w.cwiseProduct((dw.array() - hc.w.dot(dw)).matrix());
      for (Index q = 0; q < len; ++q) {
        const Index j = hc.argmax[q];
        const double c = dm(q) * inv_sqrt;
        ds.row(q) += c * hc.s.row(j);
        ds.row(j) += c * hc.s.row(q);
      }
      const auto wk = params.pool_query.middleCols(k * cfg.d_head, cfg.d_head);
      grads.pool_query.middleCols(k * cfg.d_head, cfg.d_head).noalias() += x.transpose() * ds;
      dx.noalias() += ds * wk.transpose();
    }
    for (Index t = 0; t < len; ++t) {
      dout_f[t].row(i) = dx.row(t).head(hid);
      dout_b[t].row(i) = dx.row(t).tail(hid);
    }
  }

  std::vector<MatrixXd> dinputs(steps);
  MatrixXd carry = MatrixXd::Zero(batch, hid);
  for (int t = steps - 1; t >= 0; --t) {
    const auto& c = fw.fwd_[t];
    carry = gru_step_backward(params.gru_fwd, fw.inputs_[t], c.h_prev, c.z, c.r, c.n, c.rh,
                              c.active, dout_f[t] + carry, grads.gru_fwd, dinputs[t]);
  }
  carry.setZero();
  MatrixXd dx_b;
  for (int t = 0; t < steps; ++t) {
    const auto& c = fw.bwd_[t];
    carry = gru_step_backward(params.gru_bwd, fw.inputs_[t], c.h_prev, c.z, c.r, c.n, c.rh,
                              c.active, dout_b[t] + carry, grads.gru_bwd, dx_b);
    dinputs[t] += dx_b;
  }

  for (int t = 0; t < steps; ++t) {
    for (Index i = 0; i < batch; ++i) {
      if (t < fw.lengths_[i]) {
        grads.embedding.row(fw.tokens_[i][t]) += dinputs[t].row(i);
      }
    }
  }
}

EncoderParams backward(const EncoderParams& params, std::span<const TokenSequence> seqs,
                       const MatrixXd& upstream) {
  EncoderParams grads = EncoderParams::zeros(params.config);
  const EncoderForward fw = encode_batch(params, seqs, false, nullptr);
  backward(params, fw, upstream, grads);
  return grads;
}

void check_vocab_compatible(const EncoderConfig& cfg, const Vocabulary& vocab) {
  if (static_cast<std::size_t>(cfg.vocab_size) != vocab.size()) {
    throw DimensionError("checkpoint expects a vocabulary of " +
                         std::to_string(cfg.vocab_size) + " tokens but the vocabulary has " +
                         std::to_string(vocab.size()));
  }
}

}  // namespace qrewrite
