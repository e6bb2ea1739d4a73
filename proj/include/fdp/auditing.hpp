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
// The tight-auditing game: run the mechanism on a secret member of a
// neighboring pair, apply the per-batch-size standardization distinguishers,
// tally the four error cells, bound the error rates with Clopper-Pearson
// intervals, and compare the resulting empirical (eps_L, delta_L) against a
// claimed trade-off curve.

#ifndef FDP_AUDITING_HPP_
#define FDP_AUDITING_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdp/curve.hpp"
#include "fdp/mechanisms.hpp"
#include "fdp/rng.hpp"

namespace fdp {

// Exact binomial interval via Beta quantiles; lo = 0 at successes = 0 and
// hi = 1 at successes = trials.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

Interval clopper_pearson(uint64_t successes, uint64_t trials,
                         double confidence);

// eps_L = max{ log((1-delta-alpha_r)/beta_r), log((1-delta-beta_r)/alpha_r),
// 0 }; branches with non-positive numerators are dropped, division by zero
// saturates to +inf with a flag rather than throwing.
struct AuditedEpsilon {
  double value = 0.0;
  bool saturated = false;
};

AuditedEpsilon audited_epsilon(double alpha_r, double beta_r, double delta);

// delta_L = max{0, 1-alpha_r-e^eps beta_r, 1-beta_r-e^eps alpha_r}.
double audited_delta(double alpha_r, double beta_r, double eps);

// One (batch-size group, case) pair of n-dimensional output distributions,
// each with independent components: mean vector + scalar deviation.
struct DistinguisherComponent {
  double weight = 0.0;
  std::vector<double> mean_p;
  std::vector<double> mean_q;
  double sd_p = 1.0;
  double sd_q = 1.0;
  bool identical = false;  // P == Q; the vote is always a coin
};

// Applies, per component, the affine standardizations Proc_P and Proc_Q and
// a normality test; outputs 1 if only the P-standardization passes, 0 if
// only the Q-standardization passes, a fair coin otherwise. The final
// aggregator is a mixture-weighted majority vote with a coin on exact ties.
class Distinguisher {
 public:
  // Builds the standardizations from the known output distributions of
  // `config` on (data, data + differing). Requires all dataset records to be
  // identical so batch-size grouping is exact, and dataset_size small enough
  // to enumerate groups.
  static Distinguisher build(const MechanismConfig& config,
                             const GradientDataset& data,
                             const std::vector<double>& differing,
                             double test_level);

  const std::vector<DistinguisherComponent>& components() const {
    return components_;
  }
  double test_level() const { return level_; }

  // Normality test for an n-dimensional standardized vector: a z-test along
  // the separating direction plus a two-sided chi-squared test on the
  // residual squared norm (independent statistics, joint null pass rate
  // exactly 1 - level). Without a separating direction the test is a
  // two-sided chi-squared on the full squared norm.
  static bool test_passes(const std::vector<double>& standardized,
                          const std::vector<double>* separating_unit,
                          double level);

  // Guess of the secret bit (0 = first dataset, 1 = neighbor); `coins`
  // supplies tie-break randomness addressed by (trial, component).
  int guess(const std::vector<double>& output, const CounterRng& coins,
            uint64_t trial) const;

 private:
  std::vector<DistinguisherComponent> components_;
  std::vector<std::vector<double>> separating_units_;  // empty when none
  double level_ = 0.05;
  uint64_t dim_ = 1;
};

inline constexpr uint64_t kMaxDistinguisherGroups = 64;

struct AuditConfig {
  MechanismConfig mechanism;
  uint64_t trials = 10000;      // >= 100
  double confidence = 0.95;
  double fixed_eps = 0.0;       // delta_L is reported at this eps
  double fixed_delta = 1e-5;    // eps_L is reported at this delta
  double test_level = 0.05;
  uint64_t seed = 0;
  int threads = 1;
};

struct AuditReport {
  // Tally cells of the auditing game; they always sum to trials.
  uint64_t type1_correct = 0;
  uint64_t type1_incorrect = 0;
  uint64_t type2_correct = 0;
  uint64_t type2_incorrect = 0;

  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  Interval alpha_ci;
  Interval beta_ci;

  AuditedEpsilon eps_l;
  double delta_l = 0.0;
  double claimed_eps = 0.0;
  double claimed_delta = 0.0;
  bool violation = false;

  AuditConfig config;
  std::string distinguisher_info;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

// Runs the auditing game for config.trials rounds on the pair
// (data, data + differing) and decides violation against `claimed`.
// Deterministic given config.seed; trials are independent given per-trial
// sub-seeds, so parallel execution tallies identically.
AuditReport run_audit(const AuditConfig& config, const GradientDataset& data,
                      const std::vector<double>& differing,
                      const TradeoffCurve& claimed);

// Strict comparison of the empirical lower bounds against the claim implied
// by `claimed` at the audit's fixed eps/delta.
bool verdict(const AuditedEpsilon& eps_l, double delta_l,
             const TradeoffCurve& claimed, double fixed_eps,
             double fixed_delta);

// Negative control: audits SGM against its own baseline over `reps`
// seeded repetitions and returns the number of (false-alarm) violations.
int negative_control_false_alarms(const AuditConfig& config, int reps);

}  // namespace fdp

#endif  // FDP_AUDITING_HPP_
