// Copyright 2026 The fdpaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Likelihood-ratio Monte Carlo for tensor products and mixture envelopes.
// Sampling is counter-based: sample i of a run is fully determined by
// (seed, stream, i), so thread count never changes results.

#ifndef FDP_MC_HPP_
#define FDP_MC_HPP_

#include <cstdint>
#include <vector>

#include "fdp/curve.hpp"

namespace fdp {

// T(tensor_i P_i, tensor_i Q_i) with per-factor P_i = N(0,1) and
// Q_i = N(mu_i, sigma_i^2).
struct ProductPair {
  std::vector<GaussianPair> factors;
};

void check_product(const ProductPair& pair);

// Weighted component pairs of a mixture; weights sum to 1 within 1e-12.
struct MixtureEnvelope {
  struct Component {
    double weight;
    ProductPair pair;
  };
  std::vector<Component> components;
};

void check_envelope(const MixtureEnvelope& env);

struct McOptions {
  uint64_t samples = 1000000;  // per distribution per curve
  uint64_t seed = 0;
  int threads = 1;
};

// Estimates the tensor-product trade-off curve: samples the exact
// log-likelihood-ratio sum under both product distributions, then sweeps
// thresholds t: alpha(t) = frac of P-samples with LLR > t, beta(t) = frac of
// Q-samples with LLR <= t. The (alpha, beta) sweep is resampled onto
// alpha_grid. Ties (degenerate factors) become linear segments, which is the
// randomized-test completion of the curve.
TradeoffCurve product_mc(const ProductPair& pair,
                         const std::vector<double>& alpha_grid,
                         const McOptions& opts);

// Mixture lower envelope: per shared threshold t each component contributes
// (alpha_i(t), beta_i(t)) by the product_mc scheme; the envelope point is
// (sum_i w_i alpha_i(t), sum_i w_i beta_i(t)). The tie parameter c is fixed
// to 0 (all component distributions here are continuous, so P[LLR = t] = 0
// almost surely). Thresholds passed in are merged with quantiles of the
// sampled LLRs, so the sweep always covers every component's support.
TradeoffCurve envelope_mc(const MixtureEnvelope& env,
                          const std::vector<double>& thresholds,
                          const McOptions& opts);

std::vector<double> uniform_alpha_grid(int grid_size = kDefaultGridSize);

}  // namespace fdp

#endif  // FDP_MC_HPP_
