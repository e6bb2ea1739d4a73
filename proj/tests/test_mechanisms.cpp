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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdp/errors.hpp"
#include "fdp/mechanisms.hpp"
#include "fdp/rng.hpp"

using namespace fdp;

TEST_CASE("poisson_sample boundary ratios") {
  for (uint64_t seed : {0ull, 1ull, 42ull}) {
    CHECK(poisson_sample(50, 0.0, seed).empty());
    CHECK(poisson_sample(50, 1.0, seed).size() == 50);
  }
  CHECK_THROWS_AS(poisson_sample(50, 1.5, 0), InvalidParameterError);
}

TEST_CASE("poisson_sample batch-size moments") {
  const uint64_t trials = 10000;
  double total = 0.0;
  for (uint64_t t = 0; t < trials; ++t) {
    total += static_cast<double>(poisson_sample(100, 0.5, mix_seed(9, t)).size());
  }
  const double mean = total / trials;
  const double se = std::sqrt(100 * 0.25 / trials);
  CHECK(std::fabs(mean - 50.0) < 3.0 * se);
}

TEST_CASE("clip") {
  const std::vector<double> small{0.1, 0.2};
  CHECK(clip(small, 1.0) == small);

  const std::vector<double> big{2.0, 0.0, 0.0};
  const auto clipped = clip(big, 1.0);
  CHECK(clipped[0] == doctest::Approx(1.0));
  CHECK(clipped[1] == 0.0);

  // Norm lands exactly on the bound.
  std::vector<double> g{1.2, -3.5, 0.3};
  const double norm = std::sqrt(1.2 * 1.2 + 3.5 * 3.5 + 0.3 * 0.3);
  REQUIRE(norm == doctest::Approx(3.7).epsilon(1e-12));
  const auto out = clip(g, 0.1);
  double out_norm = 0.0;
  for (double x : out) out_norm += x * x;
  CHECK(std::fabs(std::sqrt(out_norm) - 0.1) < 1e-12);

  const std::vector<double> zero{0.0, 0.0};
  CHECK(clip(zero, 0.5) == zero);
  CHECK_THROWS_AS(clip(zero, 0.0), InvalidParameterError);
}

TEST_CASE("normalization identities across modes") {
  const auto data = GradientDataset::canary(4, 8, 0.1);
  MechanismConfig cfg{Mode::kSgm, 4, 1.0, 0.1, 10.0, 8};

  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    cfg.mode = Mode::kSgm;
    const auto sgm = run_mechanism(cfg, data, seed);
    cfg.mode = Mode::kEasgm;
    const auto easgm = run_mechanism(cfg, data, seed);
    cfg.mode = Mode::kAsgm;
    const auto asgm = run_mechanism(cfg, data, seed);
    for (uint64_t j = 0; j < 8; ++j) {
      // q=1: EASGM output is the SGM output divided by N, bitwise.
      CHECK(easgm.value[j] == sgm.value[j] / 4.0);
      // q=1: EASGM and ASGM coincide bitwise.
      CHECK(easgm.value[j] == asgm.value[j]);
    }
  }
}

TEST_CASE("FEASGM floor divisor") {
  const auto data3 = GradientDataset::canary(3, 4, 0.1);
  const auto data4 = GradientDataset::canary(4, 4, 0.1);
  MechanismConfig cfg{Mode::kFeasgm, 3, 0.5, 0.1, 10.0, 4};
  CHECK(run_mechanism(cfg, data3, 7).divisor == 1.0);
  cfg.dataset_size = 4;
  CHECK(run_mechanism(cfg, data4, 7).divisor == 2.0);

  // floor(Nq) = 0 falls back to 1 with the warning flag.
  const auto data1 = GradientDataset::canary(1, 4, 0.1);
  cfg.dataset_size = 1;
  cfg.q = 0.4;
  const auto out = run_mechanism(cfg, data1, 7);
  CHECK(out.divisor == 1.0);
  CHECK(out.zero_divisor_fallback);
}

TEST_CASE("pure-noise regime at q = 0") {
  MechanismConfig cfg{Mode::kEasgm, 4, 0.0, 0.1, 10.0, 2};
  const auto data = GradientDataset::canary(4, 2, 0.1);
  const uint64_t trials = 100000;
  double sum0 = 0.0, sum1 = 0.0, sq0 = 0.0, sq1 = 0.0, cross = 0.0;
  for (uint64_t t = 0; t < trials; ++t) {
    const auto out = run_mechanism(cfg, data, mix_seed(3, t));
    CHECK(out.zero_divisor_fallback);
    sum0 += out.value[0];
    sum1 += out.value[1];
    sq0 += out.value[0] * out.value[0];
    sq1 += out.value[1] * out.value[1];
    cross += out.value[0] * out.value[1];
  }
  const double n = static_cast<double>(trials);
  const double noise_var = 1.0;  // (sigma C)^2
  const double se_mean = std::sqrt(noise_var / n);
  CHECK(std::fabs(sum0 / n) < 3.0 * se_mean);
  CHECK(std::fabs(sum1 / n) < 3.0 * se_mean);
  const double se_var = noise_var * std::sqrt(2.0 / n);
  CHECK(std::fabs(sq0 / n - noise_var) < 3.0 * se_var);
  CHECK(std::fabs(sq1 / n - noise_var) < 3.0 * se_var);
  // Coordinates are independent.
  const double corr = (cross / n) / noise_var;
  CHECK(std::fabs(corr) < 0.02);
}

TEST_CASE("SGM singleton moments") {
  // One record of norm exactly C, q = 1: coordinate j is N(g_j, sigma^2 C^2).
  GradientDataset data;
  data.dim = 2;
  data.vectors = {{0.0, 0.1}};
  MechanismConfig cfg{Mode::kSgm, 1, 1.0, 0.1, 10.0, 2};
  const uint64_t trials = 100000;
  double sum1 = 0.0, sq1 = 0.0;
  for (uint64_t t = 0; t < trials; ++t) {
    const auto out = run_mechanism(cfg, data, mix_seed(11, t));
    sum1 += out.value[1];
    sq1 += (out.value[1] - 0.1) * (out.value[1] - 0.1);
  }
  const double n = static_cast<double>(trials);
  CHECK(std::fabs(sum1 / n - 0.1) < 3.0 / std::sqrt(n));
  CHECK(std::fabs(sq1 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("dimension mismatch is rejected") {
  const auto data = GradientDataset::canary(4, 8, 0.1);
  MechanismConfig cfg{Mode::kSgm, 4, 1.0, 0.1, 10.0, 4};
  CHECK_THROWS_AS(run_mechanism(cfg, data, 0), InvalidParameterError);
}

TEST_CASE("canary dataset construction") {
  const auto data = GradientDataset::canary(5, 3, 0.1);
  CHECK(data.vectors.size() == 5);
  for (const auto& v : data.vectors) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    CHECK(std::sqrt(norm) == doctest::Approx(0.1));
    // Orthogonal to the differing record C*e1.
    CHECK(v[0] == 0.0);
  }
  const auto record = GradientDataset::canary_record(3, 0.1);
  CHECK(record == std::vector<double>{0.1, 0.0, 0.0});
  CHECK_THROWS_AS(GradientDataset::canary(5, 1, 0.1), InvalidParameterError);
}

TEST_CASE("dataset JSON load") {
  const auto direct = GradientDataset::from_json(
      R"({"dim": 2, "vectors": [[0.1, 0.0], [0.0, 0.2]]})");
  CHECK(direct.vectors.size() == 2);
  CHECK(direct.vectors[1][1] == 0.2);

  const auto generated = GradientDataset::from_json(
      R"({"kind": "canary", "N": 4, "dim": 3, "C": 0.1})");
  CHECK(generated.vectors.size() == 4);
  CHECK(generated.vectors[0][1] == 0.1);

  CHECK_THROWS_AS(
      GradientDataset::from_json(R"({"dim": 2, "vectors": [[1.0]]})"),
      InvalidParameterError);
  CHECK_THROWS_AS(GradientDataset::from_json(R"({"kind": "nope"})"),
                  InvalidParameterError);

  const auto round = GradientDataset::from_json(direct.to_json());
  CHECK(round.vectors == direct.vectors);
}

TEST_CASE("jsonl output line") {
  MechanismOutput out;
  out.value = {1.5, -2.0};
  const auto line = output_jsonl_line(7, 3, out);
  CHECK(line.find("\"seed\":7") != std::string::npos);
  CHECK(line.find("\"trial\":3") != std::string::npos);
  CHECK(line.find("\"vector\":[1.5,-2.0]") != std::string::npos);
}
