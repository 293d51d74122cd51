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

#ifndef QREWRITE_GRADCHECK_H_
#define QREWRITE_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qrewrite/encoder.h"
#include "qrewrite/objective.h"

namespace qrewrite {

struct GradcheckOptions {
  double step = 1e-5;        // central-difference step
  double tolerance = 1e-4;   // maximum accepted relative error
  // Denominator floor for the relative error |a - n| / max(|a|, |n|, floor),
  // so entries whose true gradient is ~0 are judged on absolute error.
  double floor = 1e-6;
};

struct GradcheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t n_checked = 0;

  bool passed(const GradcheckOptions& opts) const { return max_rel_error <= opts.tolerance; }
};

using LossFunction = std::function<double(const EncoderParams&)>;

// Compares analytic against central finite differences of loss on every
// scalar parameter.
GradcheckResult check_gradients(const EncoderParams& params, const LossFunction& loss,
                                const EncoderParams& analytic, const GradcheckOptions& opts = {});

// A small random encoder shape: d_out <= 32 and max_len <= 6.
EncoderConfig random_tiny_config(std::uint64_t seed);

// Random token sequences with lengths in [1, max_len] over ids [1, vocab).
std::vector<TokenSequence> random_sequences(const EncoderConfig& cfg, std::size_t count, Rng& rng);

struct ContrastiveCheck {
  EncoderConfig config;
  std::size_t batch_size = 4;
  bool joint = false;     // four-task loss over two views instead of one pair task
  bool dropout = false;   // training-mode forward with a fixed dropout mask
  std::uint64_t seed = 1;
};

// Builds random params and batches and checks the full in-batch contrastive
// loss, including both projection heads.
GradcheckResult gradcheck_contrastive(const ContrastiveCheck& check,
                                      const GradcheckOptions& opts = {});

}  // namespace qrewrite

#endif  // QREWRITE_GRADCHECK_H_
