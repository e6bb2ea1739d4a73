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

#include "fdp/mechanisms.hpp"

#include <cmath>

#include <json.hpp>

#include "fdp/errors.hpp"
#include "fdp/rng.hpp"

namespace fdp {

namespace {
// Counter streams inside one mechanism invocation.
constexpr uint64_t kSampleStream = 0;
constexpr uint64_t kNoiseStream = 1;
}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kSgm: return "sgm";
    case Mode::kEasgm: return "easgm";
    case Mode::kAsgm: return "asgm";
    case Mode::kFeasgm: return "feasgm";
  }
  return "sgm";
}

Mode mode_from_name(const std::string& name) {
  if (name == "sgm") return Mode::kSgm;
  if (name == "easgm") return Mode::kEasgm;
  if (name == "asgm") return Mode::kAsgm;
  if (name == "feasgm") return Mode::kFeasgm;
  throw InvalidParameterError("unknown mechanism mode: " + name);
}

void check_config(const MechanismConfig& config) {
  if (config.dataset_size < 1) {
    throw InvalidParameterError("MechanismConfig: N must be >= 1");
  }
  if (!(config.q >= 0.0 && config.q <= 1.0)) {
    throw InvalidParameterError("MechanismConfig: q must be in [0,1]");
  }
  if (!(config.clip > 0.0)) {
    throw InvalidParameterError("MechanismConfig: C must be > 0");
  }
  if (!(config.sigma > 0.0)) {
    throw InvalidParameterError("MechanismConfig: sigma must be > 0");
  }
  if (config.dim < 1) {
    throw InvalidParameterError("MechanismConfig: n must be >= 1");
  }
}

void check_dataset(const GradientDataset& data) {
  if (data.dim < 1) {
    throw InvalidParameterError("GradientDataset: dim must be >= 1");
  }
  for (const auto& v : data.vectors) {
    if (v.size() != data.dim) {
      throw InvalidParameterError("GradientDataset: inconsistent dimension");
    }
  }
}

GradientDataset GradientDataset::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.contains("kind")) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "canary") {
      throw InvalidParameterError("unknown dataset generator: " + kind);
    }
    return canary(j.at("N").get<uint64_t>(), j.at("dim").get<uint64_t>(),
                  j.at("C").get<double>());
  }
  GradientDataset d;
  d.dim = j.at("dim").get<uint64_t>();
  for (const auto& v : j.at("vectors")) {
    d.vectors.push_back(v.get<std::vector<double>>());
  }
  check_dataset(d);
  return d;
}

GradientDataset GradientDataset::canary(uint64_t n_records, uint64_t dim,
                                        double clip_bound) {
  if (dim < 2) {
    throw InvalidParameterError(
        "canary dataset needs dim >= 2 (records must be orthogonal to the "
        "differing record)");
  }
  if (!(clip_bound > 0.0)) {
    throw InvalidParameterError("canary dataset: C must be > 0");
  }
  GradientDataset d;
  d.dim = dim;
  std::vector<double> record(dim, 0.0);
  record[1] = clip_bound;
  d.vectors.assign(n_records, record);
  return d;
}

std::vector<double> GradientDataset::canary_record(uint64_t dim,
                                                   double clip_bound) {
  if (dim < 1) throw InvalidParameterError("canary record: dim must be >= 1");
  std::vector<double> record(dim, 0.0);
  record[0] = clip_bound;
  return record;
}

std::string GradientDataset::to_json() const {
  nlohmann::json j = {{"dim", dim}, {"vectors", vectors}};
  return j.dump();
}

GradientDataset GradientDataset::with_record(
    const std::vector<double>& record) const {
  if (record.size() != dim) {
    throw InvalidParameterError("with_record: dimension mismatch");
  }
  GradientDataset d = *this;
  d.vectors.push_back(record);
  return d;
}

std::vector<uint64_t> poisson_sample(uint64_t dataset_size, double q,
                                     uint64_t seed) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidParameterError("poisson_sample: q must be in [0,1]");
  }
  std::vector<uint64_t> batch;
  const CounterRng rng(seed, kSampleStream);
  for (uint64_t i = 0; i < dataset_size; ++i) {
    if (rng.uniform(i) < q) batch.push_back(i);
  }
  return batch;
}

std::vector<double> clip(const std::vector<double>& g, double clip_bound) {
  if (!(clip_bound > 0.0)) {
    throw InvalidParameterError("clip: bound must be > 0");
  }
  double norm_sq = 0.0;
  for (double x : g) norm_sq += x * x;
  const double scale = std::max(1.0, std::sqrt(norm_sq) / clip_bound);
  std::vector<double> out(g.size());
  for (size_t i = 0; i < g.size(); ++i) out[i] = g[i] / scale;
  return out;
}

MechanismOutput run_mechanism(const MechanismConfig& config,
                              const GradientDataset& data, uint64_t seed) {
  check_config(config);
  check_dataset(data);
  if (data.dim != config.dim) {
    throw InvalidParameterError("run_mechanism: dimension mismatch");
  }

  const auto batch = poisson_sample(data.vectors.size(), config.q, seed);
  std::vector<double> sum(config.dim, 0.0);
  for (uint64_t idx : batch) {
    const auto clipped = clip(data.vectors[idx], config.clip);
    for (uint64_t j = 0; j < config.dim; ++j) sum[j] += clipped[j];
  }
  const CounterRng noise(seed, kNoiseStream);
  const double noise_scale = config.sigma * config.clip;
  for (uint64_t j = 0; j < config.dim; ++j) {
    sum[j] += noise_scale * noise.normal(j);
  }

  MechanismOutput out;
  out.batch_size = batch.size();
  const double n_actual = static_cast<double>(data.vectors.size());
  double divisor = 1.0;
  switch (config.mode) {
    case Mode::kSgm:
      divisor = 1.0;
      break;
    case Mode::kEasgm:
      divisor = n_actual * config.q;
      break;
    case Mode::kAsgm:
      divisor = static_cast<double>(batch.size());
      break;
    case Mode::kFeasgm:
      divisor = std::floor(n_actual * config.q);
      break;
  }
  if (divisor == 0.0) {
    divisor = 1.0;
    out.zero_divisor_fallback = true;
  }
  out.divisor = divisor;
  for (uint64_t j = 0; j < config.dim; ++j) sum[j] /= divisor;
  out.value = std::move(sum);
  return out;
}

std::string output_jsonl_line(uint64_t seed, uint64_t trial,
                              const MechanismOutput& out) {
  nlohmann::json j = {{"seed", seed}, {"trial", trial}, {"vector", out.value}};
  if (out.zero_divisor_fallback) j["zero_divisor_fallback"] = true;
  return j.dump();
}

}  // namespace fdp
