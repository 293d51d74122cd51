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

#ifndef QREWRITE_ENCODER_H_
#define QREWRITE_ENCODER_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qrewrite/textproc.h"

namespace qrewrite {

using Rng = std::mt19937_64;
using EmbeddingVector = Eigen::VectorXd;

struct EncoderConfig {
  int vocab_size = 0;
  int d_emb = 64;
  int d_hid = 64;  // per direction
  int n_heads = 4;
  int d_head = 32;
  int d_out = 128;
  int max_len = kDefaultMaxLen;
  double dropout_rate = 0.3;
  std::uint64_t seed = 1;

  // Throws ValidationError unless every dim is >= 1,
  // n_heads * d_head == 2 * d_hid and 0 <= dropout_rate < 1.
  void validate() const;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// Gates are laid out as [update | reset | candidate] along the columns.
struct GruParams {
  Eigen::MatrixXd wx;  // d_in x 3*d_hid
  Eigen::MatrixXd wh;  // d_hid x 3*d_hid
  Eigen::VectorXd b;   // 3*d_hid
};

// y = x * w + b for a row vector x.
struct LinearParams {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

// A named, contiguous view of one trainable tensor.
struct TensorView {
  std::string_view name;
  std::span<double> values;
  bool is_bias = false;
};

struct ConstTensorView {
  std::string_view name;
  std::span<const double> values;
  bool is_bias = false;
};

// Every trainable tensor of the query embedder, plus the config that fixes
// their shapes. Also used as the gradient accumulator.
struct EncoderParams {
  EncoderConfig config;
  Eigen::MatrixXd embedding;   // vocab_size x d_emb
  GruParams gru_fwd;
  GruParams gru_bwd;
  Eigen::MatrixXd pool_query;  // 2*d_hid x n_heads*d_head, head k owns a column block
  Eigen::MatrixXd pool_out;    // n_heads*d_head x d_out
  LinearParams head_source;    // applied to queries
  LinearParams head_target;    // applied to rewrite candidates

  // All-zero tensors shaped for cfg.
  static EncoderParams zeros(const EncoderConfig& cfg);

  // Tensors in checkpoint order.
  std::vector<TensorView> tensors();
  std::vector<ConstTensorView> tensors() const;
  std::size_t parameter_count() const;

  void set_zero();
  EncoderParams& operator+=(const EncoderParams& other);
  bool all_finite() const;

  friend bool operator==(const EncoderParams& a, const EncoderParams& b);
};

// Seeded uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
// The embedding table is a one-hot lookup, so its fan-in is 1.
EncoderParams init_params(const EncoderConfig& cfg);

// Activations of one forward pass over a batch, kept for backward().
class EncoderForward {
 public:
  // batch x d_out, after dropout when training.
  const Eigen::MatrixXd& embeddings() const { return output_; }
  std::size_t batch_size() const { return lengths_.size(); }

  // Attention weights of sequence i, one vector of max_len entries per head.
  // Padded positions are exactly zero.
  std::vector<Eigen::VectorXd> attention_weights(std::size_t i) const;

 private:
  friend EncoderForward encode_batch(const EncoderParams&,
                                     std::span<const TokenSequence>, bool, Rng*);
  friend void backward(const EncoderParams&, const EncoderForward&,
                       const Eigen::MatrixXd&, EncoderParams&);

  struct GruStep {
    Eigen::MatrixXd h_prev, z, r, n, rh;
    Eigen::VectorXd active;  // 1.0 where the row's position is real
  };
  struct HeadCache {
    Eigen::MatrixXd s;                 // len x d_head
    std::vector<Eigen::Index> argmax;  // key position chosen per query row
    Eigen::VectorXd w;                 // len
  };

  std::vector<std::vector<TokenId>> tokens_;
  std::vector<int> lengths_;
  int steps_ = 0;
  std::vector<Eigen::MatrixXd> inputs_;  // per step: batch x d_emb
  std::vector<GruStep> fwd_;
  std::vector<GruStep> bwd_;
  std::vector<Eigen::MatrixXd> states_;       // per sequence: len x 2*d_hid
  std::vector<std::vector<HeadCache>> heads_;  // per sequence, per head
  Eigen::MatrixXd pooled_;                     // batch x n_heads*d_head
  Eigen::MatrixXd dropout_scale_;              // batch x d_out, empty if none
  Eigen::MatrixXd output_;
  int max_len_ = 0;
};

// Runs the embedder over every sequence. Dropout draws from rng and is only
// applied when training is set; rng may be null otherwise.
EncoderForward encode_batch(const EncoderParams& params,
                            std::span<const TokenSequence> seqs, bool training,
                            Rng* rng);

EmbeddingVector encode(const EncoderParams& params, const TokenSequence& seq,
                       bool training, Rng& rng);

// Deterministic inference-mode encoding.
EmbeddingVector encode(const EncoderParams& params, const TokenSequence& seq);

// Adds d(sum_i <upstream_i, embedding_i>)/d(params) into grads. upstream is
// batch x d_out. The projection heads are not touched.
void backward(const EncoderParams& params, const EncoderForward& forward,
              const Eigen::MatrixXd& upstream, EncoderParams& grads);

// Inference-mode forward followed by backward; returns fresh gradients.
EncoderParams backward(const EncoderParams& params,
                       std::span<const TokenSequence> seqs,
                       const Eigen::MatrixXd& upstream);

// Checkpoint file: "qrenc1", config, tensors in tensors() order as
// little-endian doubles, then a checksum. Written atomically.
void save_checkpoint(const EncoderParams& params,
                     const std::filesystem::path& path);
EncoderParams load_checkpoint(const std::filesystem::path& path);

// Throws DimensionError when the checkpoint was trained on a vocabulary of
// a different size.
void check_vocab_compatible(const EncoderConfig& cfg, const Vocabulary& vocab);

}  // namespace qrewrite

#endif  // QREWRITE_ENCODER_H_
