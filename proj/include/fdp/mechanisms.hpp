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
// Per-round DP-SGD mechanism simulators. All four variants share the same
// first three steps (Poisson sample, clip, sum, add isotropic Gaussian noise
// N(0, sigma^2 C^2 I)) and differ only in the final normalization:
//   SGM     divide by 1
//   EASGM   divide by N*q        (1 if N*q = 0)
//   ASGM    divide by |B|        (1 if |B| = 0)
//   FEASGM  divide by floor(N*q) (1 if floor(N*q) = 0; extended zero rule)

#ifndef FDP_MECHANISMS_HPP_
#define FDP_MECHANISMS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace fdp {

enum class Mode { kSgm, kEasgm, kAsgm, kFeasgm };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

struct MechanismConfig {
  Mode mode = Mode::kSgm;
  uint64_t dataset_size = 1;  // N
  double q = 1.0;             // sampling ratio
  double clip = 1.0;          // C
  double sigma = 1.0;         // noise multiplier
  uint64_t dim = 1;           // n
};

void check_config(const MechanismConfig& config);

// Per-sample gradient surrogates; a neighboring pair is (D, D + {g_{N+1}}).
struct GradientDataset {
  uint64_t dim = 0;
  std::vector<std::vector<double>> vectors;

  static GradientDataset from_json(const std::string& text);
  // Canary-style auditing dataset: N identical records C*e2 (norm exactly C,
  // orthogonal to the differing record C*e1). Requires dim >= 2.
  static GradientDataset canary(uint64_t n_records, uint64_t dim, double clip);
  // The differing record C*e1 for the canary construction.
  static std::vector<double> canary_record(uint64_t dim, double clip);

  std::string to_json() const;
  GradientDataset with_record(const std::vector<double>& record) const;
};

void check_dataset(const GradientDataset& data);

// Independent inclusion of each index with probability q.
std::vector<uint64_t> poisson_sample(uint64_t dataset_size, double q,
                                     uint64_t seed);

// g / max(1, ||g||_2 / clip); norm at most clip, direction preserved.
std::vector<double> clip(const std::vector<double>& g, double clip_bound);

struct MechanismOutput {
  std::vector<double> value;
  uint64_t batch_size = 0;
  double divisor = 1.0;
  // Set when a zero nominal divisor was replaced by 1.
  bool zero_divisor_fallback = false;
};

// One mechanism invocation on `data` (the dataset actually passed in; its
// size is the N of the normalization). Deterministic given seed; batch
// sampling and Gaussian noise use disjoint counter streams.
MechanismOutput run_mechanism(const MechanismConfig& config,
                              const GradientDataset& data, uint64_t seed);

// JSON-lines record {seed, trial, vector} for one output.
std::string output_jsonl_line(uint64_t seed, uint64_t trial,
                              const MechanismOutput& out);

}  // namespace fdp

#endif  // FDP_MECHANISMS_HPP_
