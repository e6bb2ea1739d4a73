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
// Guarantee objects: the closed-form SGM baseline, the EASGM/ASGM/FEASGM
// per-pair envelope guarantees and their analytic upper bounds, and T-round
// composition bounds through the CLT estimator.

#ifndef FDP_GUARANTEES_HPP_
#define FDP_GUARANTEES_HPP_

#include <cstdint>
#include <string>

#include "fdp/curve.hpp"
#include "fdp/mc.hpp"
#include "fdp/mechanisms.hpp"

namespace fdp {

struct GuaranteeRequest {
  Mode mode = Mode::kSgm;
  uint64_t dataset_size = 1;  // N
  double q = 1.0;
  double sigma = 1.0;
  uint64_t dim = 1;  // n
  uint64_t rounds = 1;  // T
  int grid_size = kDefaultGridSize;
  uint64_t mc_samples = 1000000;
  uint64_t seed = 0;
  int threads = 1;
};

struct GuaranteeDiagnostics {
  double mu = 0.0;
  double gamma = 0.0;
  uint64_t samples = 0;
};

struct GuaranteeResult {
  TradeoffCurve curve;
  std::string branch;     // "sgm-branch" | "easgm-branch" | ""
  std::string estimator;  // "closed-form" | "mc" | "clt"
  GuaranteeDiagnostics diagnostics;

  std::string to_json(const GuaranteeRequest& request) const;
};

// Direct MC is used up to this many tensor factors; larger products switch
// to the CLT upper envelope (and the result records which).
inline constexpr uint64_t kProductMcMaxFactors = 200;

// Closed-form SGM guarantee q G_{1/sigma} + (1-q) ID.
TradeoffCurve sgm_baseline(double q, double sigma);

// Upper bound on the EASGM per-pair guarantee: T(P^(n-1), Q_N^(n-1));
// n = 1 gives ID (empty product).
GuaranteeResult easgm_upper(uint64_t dataset_size, uint64_t dim,
                            const GuaranteeRequest& request);

// ASGM: (q - q(1-q)^N) T(P^(n-1), Q_N^(n-1)) + (1 - q + q(1-q)^N) ID.
GuaranteeResult asgm_upper(uint64_t dataset_size, double q, uint64_t dim,
                           const GuaranteeRequest& request);

// FEASGM: the SGM baseline when floor(Nq) = floor((N+1)q) ("sgm-branch"),
// otherwise the EASGM-style bound with K = floor(Nq) ("easgm-branch").
// floor(Nq) = 0 on the easgm-branch is rejected.
GuaranteeResult feasgm_upper(const GuaranteeRequest& request);

// The per-pair mixture-envelope guarantee of the requested mechanism,
// grouped by batch size (all theorem parameters depend on the batch only
// through |B|). EASGM components are T(P^n, Q_N^(n-1) x Q_N^mubar) with
// mubar1 = k/((N+1)sigma), mubar2 = (N+k)/((N+1)sigma); ASGM uses
// Q_k = N(0,(k/(k+1))^2) with mubar = 2k/((k+1)sigma) and empty-batch
// components ID and G_{1/sigma}; FEASGM substitutes K = floor(Nq) on the
// easgm-branch. q = 1 is flagged "tight" in the curve metadata.
GuaranteeResult per_pair_guarantee(const GuaranteeRequest& request);

// T-round upper bound via the CLT envelope with T*(n-1) copies of the
// symmetrized per-factor curve. Supported for EASGM and the FEASGM
// easgm-branch; ASGM and the FEASGM sgm-branch are rejected.
GuaranteeResult multi_round_upper(const GuaranteeRequest& request);

inline constexpr uint64_t kPerPairMaxDatasetSize = 12;
inline constexpr uint64_t kPerPairMaxDim = 4096;

}  // namespace fdp

#endif  // FDP_GUARANTEES_HPP_
