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

#include <cmath>

#include "qrewrite/errors.h"
#include "qrewrite/trainer.h"

namespace qrewrite {

AdamState AdamState::zeros_like(const EncoderParams& params) {
  return AdamState{EncoderParams::zeros(params.config), EncoderParams::zeros(params.config), 0};
}

void adam_step(EncoderParams& params, const EncoderParams& grads, AdamState& state,
               const TrainConfig& cfg) {
  if (!(grads.config == params.config) || !(state.m.config == params.config) ||
      !(state.v.config == params.config)) {
    throw DimensionError("optimizer state and gradients must match the parameter shapes");
  }
  if (!grads.all_finite()) throw NumericError("non-finite gradient; optimizer step aborted");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);

  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t i = 0; i < p[k].values.size(); ++i) {
      const double gi = g[k].values[i];
      double& mi = m[k].values[i];
      double& vi = v[k].values[i];
      mi = b1 * mi + (1.0 - b1) * gi;
      vi = b2 * vi + (1.0 - b2) * gi * gi;
      const double m_hat = mi / c1;
      const double v_hat = vi / c2;
      p[k].values[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
  }
}

}  // namespace qrewrite
