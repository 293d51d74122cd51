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

#include "qrewrite/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "qrewrite/errors.h"

namespace qrewrite {

GradcheckResult check_gradients(const EncoderParams& params, const LossFunction& loss,
                                const EncoderParams& analytic, const GradcheckOptions& opts) {
  if (!(analytic.config == params.config)) {
    throw DimensionError("analytic gradients do not match the parameter shapes");
  }
  GradcheckResult result;
  EncoderParams probe = params;
  auto probe_tensors = probe.tensors();
  const auto grad_tensors = analytic.tensors();
  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    std::span<double> values = probe_tensors[t].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + opts.step;
      const double up = loss(probe);
      values[i] = saved - opts.step;
      const double down = loss(probe);
      values[i] = saved;

      const double numeric = (up - down) / (2.0 * opts.step);
      const double a = grad_tensors[t].values[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.floor});
      double rel = std::abs(a - numeric) / denom;
      if (std::isnan(rel)) rel = INFINITY;
      ++result.n_checked;
      if (result.n_checked == 1 || rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_tensor = std::string(probe_tensors[t].name);
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

EncoderConfig random_tiny_config(std::uint64_t seed) {
  Rng rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  EncoderConfig cfg;
  cfg.vocab_size = pick(6, 14);
  cfg.d_emb = pick(2, 6);
  // n_heads * d_head must equal 2 * d_hid.
  cfg.n_heads = pick(1, 3);
  cfg.d_head = 2 * pick(1, 2);
  cfg.d_hid = cfg.n_heads * cfg.d_head / 2;
  cfg.d_out = pick(2, 8);
  cfg.max_len = pick(2, 6);
  cfg.dropout_rate = 0.3;
  cfg.seed = seed;
  return cfg;
}

std::vector<TokenSequence> random_sequences(const EncoderConfig& cfg, std::size_t count, Rng& rng) {
  std::uniform_int_distribution<int> len_dist(1, cfg.max_len);
  std::uniform_int_distribution<TokenId> id_dist(kUnkId, cfg.vocab_size - 1);
  std::vector<TokenSequence> out(count);
  for (auto& seq : out) {
    seq.length = len_dist(rng);
    seq.ids.assign(static_cast<std::size_t>(cfg.max_len), kPadId);
    for (int i = 0; i < seq.length; ++i) seq.ids[static_cast<std::size_t>(i)] = id_dist(rng);
  }
  return out;
}

GradcheckResult gradcheck_contrastive(const ContrastiveCheck& check, const GradcheckOptions& opts) {
  // Zero biases (the initializer's choice) let a fully dropped output project
  // to the zero vector, where the cosine is not differentiable. Random biases
  // move the check to a generic point.
  EncoderParams params = init_params(check.config);
  Rng bias_rng(check.seed ^ 0xb1a5ULL);
  std::uniform_real_distribution<double> bias_dist(-0.5, 0.5);
  for (TensorView t : params.tensors()) {
    if (!t.is_bias) continue;
    for (double& v : t.values) v = bias_dist(bias_rng);
  }
  Rng data_rng(check.seed ^ 0xda7aULL);
  const std::size_t n_sets = check.joint ? 4 : 2;
  std::vector<std::vector<TokenSequence>> sets;
  for (std::size_t k = 0; k < n_sets; ++k) {
    sets.push_back(random_sequences(check.config, check.batch_size, data_rng));
  }
  const std::vector<TaskSpec> tasks =
      check.joint ? std::vector<TaskSpec>{{0, 2}, {0, 3}, {1, 2}, {1, 3}}
                  : std::vector<TaskSpec>{{0, 1}};
  const SimilarityConfig sim;

  // Reseeding per call replays the same dropout masks for every evaluation.
  auto loss_with = [&](const EncoderParams& p, EncoderParams* grads) {
    Rng mask_rng(check.seed ^ 0xd509ULL);
    return multi_task_loss(sets, tasks, p, sim, check.dropout, &mask_rng, grads);
  };
  EncoderParams analytic = EncoderParams::zeros(params.config);
  loss_with(params, &analytic);
  return check_gradients(
      params, [&](const EncoderParams& p) { return loss_with(p, nullptr); }, analytic, opts);
}

}  // namespace qrewrite
