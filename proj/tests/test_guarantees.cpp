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
#include "fdp/functionals.hpp"
#include "fdp/guarantees.hpp"
#include "oracles.hpp"

using namespace fdp;

namespace {

GuaranteeRequest base_request() {
  GuaranteeRequest r;
  r.mc_samples = 400000;
  r.seed = 13;
  r.threads = 2;
  return r;
}

constexpr double kMcTol = 3.0 * 8.0e-4;  // 3 binomial se at 4e5 samples

}  // namespace

TEST_CASE("sgm_baseline closed forms") {
  CHECK(sgm_baseline(0.0, 10.0).kind() == CurveKind::kIdentity);
  const auto full = sgm_baseline(1.0, 10.0);
  CHECK(full.kind() == CurveKind::kGaussian);
  CHECK(full.mu() == doctest::Approx(0.1));

  const auto half = sgm_baseline(0.5, 10.0);
  const double expected =
      0.5 * oracle::norm_cdf(oracle::norm_quantile(0.5) - 0.1) + 0.25;
  CHECK(std::fabs(half(0.5) - expected) < 1e-9);
}

TEST_CASE("easgm_upper paths and comparisons") {
  const auto r = base_request();
  CHECK(easgm_upper(4, 1, r).curve.kind() == CurveKind::kIdentity);

  const auto mc = easgm_upper(4, 100, r);
  CHECK(mc.estimator == "mc");
  CHECK(mc.curve(0.5) < sgm_baseline(0.05, 10.0)(0.5));

  const auto clt = easgm_upper(4, 250, r);
  CHECK(clt.estimator == "clt");
  CHECK(clt.diagnostics.gamma > 0.0);

  // Weakly decreases as the dimension grows.
  const auto n10 = easgm_upper(4, 10, r);
  for (double a : {0.2, 0.5, 0.8}) {
    CHECK(mc.curve(a) <= n10.curve(a) + kMcTol);
  }
}

TEST_CASE("easgm_upper weakly decreases as the dataset shrinks") {
  const auto r = base_request();
  const auto big = easgm_upper(10, 50, r);
  const auto small = easgm_upper(3, 50, r);
  for (int i = 0; i <= 20; ++i) {
    const double a = i / 20.0;
    CHECK(small.curve(a) <= big.curve(a) + kMcTol);
  }
}

TEST_CASE("asgm_upper mixes the product term") {
  const auto r = base_request();
  CHECK(asgm_upper(4, 0.0, 100, r).curve(0.3) == doctest::Approx(0.7));

  // Large-n limit: (1-q+q(1-q)^N) ID within 0.01 away from the left edge.
  const double q = 0.7;
  const auto limit_w = 1.0 - q + q * std::pow(1.0 - q, 4.0);
  const auto big = asgm_upper(4, q, 2000, r);
  CHECK(big.estimator == "clt");
  for (double a = 0.02; a <= 1.0; a += 0.02) {
    CHECK(std::fabs(big.curve(a) - limit_w * (1.0 - a)) < 0.01);
  }

  // Weakly decreases as q grows (shared seed, identical product term).
  const auto q5 = asgm_upper(4, 0.5, 100, r);
  const auto q9 = asgm_upper(4, 0.9, 100, r);
  for (int i = 0; i <= 20; ++i) {
    const double a = i / 20.0;
    CHECK(q9.curve(a) <= q5.curve(a) + 1e-12);
  }
}

TEST_CASE("feasgm_upper branches") {
  auto r = base_request();
  r.sigma = 10.0;
  r.dim = 50;

  r.dataset_size = 4;
  r.q = 0.5;
  const auto sgm_side = feasgm_upper(r);
  CHECK(sgm_side.branch == "sgm-branch");
  CHECK(sgm_side.estimator == "closed-form");

  r.dataset_size = 3;
  const auto easgm_side = feasgm_upper(r);
  CHECK(easgm_side.branch == "easgm-branch");
  // K = 1 substitution gives exactly the easgm_upper(N=1) curve.
  const auto reference = easgm_upper(1, 50, r);
  const auto& a = easgm_side.curve.points();
  const auto& b = reference.curve.points();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].beta == b[i].beta);

  // floor(Nq) = 0 on the easgm-branch is rejected.
  r.dataset_size = 1;
  r.q = 0.6;  // floor(0.6) = 0 != floor(1.2) = 1
  CHECK_THROWS_AS(feasgm_upper(r), InvalidParameterError);
}

TEST_CASE("feasgm branch predicate equals the floor equality") {
  auto r = base_request();
  r.dim = 2;
  for (uint64_t n = 1; n <= 50; ++n) {
    for (double q : {0.1, 0.25, 0.5, 0.9}) {
      r.dataset_size = n;
      r.q = q;
      const bool floors_equal =
          std::floor(static_cast<double>(n) * q) ==
          std::floor(static_cast<double>(n + 1) * q);
      if (!floors_equal &&
          std::floor(static_cast<double>(n) * q) == 0.0) {
        CHECK_THROWS_AS(feasgm_upper(r), InvalidParameterError);
        continue;
      }
      const auto res = feasgm_upper(r);
      CHECK((res.branch == "sgm-branch") == floors_equal);
    }
  }
}

TEST_CASE("per-pair guarantees coincide for EASGM and ASGM at q = 1") {
  auto r = base_request();
  r.q = 1.0;
  r.sigma = 10.0;
  r.dataset_size = 4;
  r.dim = 10;

  r.mode = Mode::kEasgm;
  const auto easgm = per_pair_guarantee(r);
  CHECK(easgm.curve.meta().find("tight") != std::string::npos);
  r.mode = Mode::kAsgm;
  const auto asgm = per_pair_guarantee(r);
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(std::fabs(easgm.curve(a) - asgm.curve(a)) < 2.0 * kMcTol);
  }
}

TEST_CASE("per-pair envelope sits below the analytic upper bound") {
  auto r = base_request();
  r.q = 0.5;
  r.sigma = 10.0;
  r.dataset_size = 3;
  r.dim = 10;

  r.mode = Mode::kEasgm;
  const auto pp = per_pair_guarantee(r);
  const auto upper = easgm_upper(3, 10, r);
  for (int i = 0; i <= 20; ++i) {
    const double a = i / 20.0;
    CHECK(pp.curve(a) <= upper.curve(a) + 2.0 * kMcTol);
  }

  r.mode = Mode::kAsgm;
  const auto pp_asgm = per_pair_guarantee(r);
  const auto upper_asgm = asgm_upper(3, 0.5, 10, r);
  for (int i = 0; i <= 20; ++i) {
    const double a = i / 20.0;
    CHECK(pp_asgm.curve(a) <= upper_asgm.curve(a) + 2.0 * kMcTol);
  }
}

TEST_CASE("larger mean shifts weaken the envelope") {
  // The theorem's mubar shifts give a curve below any envelope built with
  // smaller shifts (checked with mu = mubar / 2).
  const McOptions opts{400000, 13, 2};
  const double sigma = 10.0;
  const uint64_t n_rec = 3;
  const double q = 0.5;
  const double s = 3.0 / 4.0;
  const auto build = [&](double scale) {
    MixtureEnvelope env;
    for (uint64_t k = 0; k <= n_rec; ++k) {
      double comb = 1.0;
      for (uint64_t i = 0; i < k; ++i) {
        comb *= static_cast<double>(n_rec - i) / static_cast<double>(i + 1);
      }
      const double wk = comb * std::pow(q, static_cast<double>(k)) *
                        std::pow(1.0 - q, static_cast<double>(n_rec - k));
      for (int sub = 1; sub <= 2; ++sub) {
        const double w = wk * (sub == 1 ? 1.0 - q : q);
        if (w == 0.0) continue;
        const double mu =
            scale *
            (sub == 1 ? static_cast<double>(k)
                      : static_cast<double>(n_rec + k)) /
            ((static_cast<double>(n_rec) + 1.0) * sigma);
        ProductPair pair;
        pair.factors.assign(7, GaussianPair{0.0, s});
        pair.factors.push_back(GaussianPair{mu, s});
        env.components.push_back({w, pair});
      }
    }
    return envelope_mc(env, {}, opts);
  };
  const auto full = build(1.0);
  const auto half = build(0.5);
  for (int i = 0; i <= 20; ++i) {
    const double a = i / 20.0;
    CHECK(full(a) <= half(a) + 2.0 * kMcTol);
  }
}

TEST_CASE("per-pair capacity limits fail loudly") {
  auto r = base_request();
  r.mode = Mode::kEasgm;
  r.dataset_size = 13;
  CHECK_THROWS_AS(per_pair_guarantee(r), CapacityError);
  r.dataset_size = 4;
  r.dim = 5000;
  CHECK_THROWS_AS(per_pair_guarantee(r), CapacityError);
}

TEST_CASE("multi_round_upper") {
  auto r = base_request();
  r.mode = Mode::kEasgm;
  r.dataset_size = 4;
  r.dim = 250;
  r.rounds = 1;

  // T = 1 reduces to the single-round CLT envelope.
  const auto single = multi_round_upper(r);
  const auto reference = easgm_upper(4, 250, r);
  REQUIRE(reference.estimator == "clt");
  const auto& a = single.curve.points();
  const auto& b = reference.curve.points();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].beta == b[i].beta);

  // mu scales as sqrt(T): T = 4 doubles it.
  r.rounds = 4;
  const auto four = multi_round_upper(r);
  CHECK(four.diagnostics.mu ==
        doctest::Approx(2.0 * single.diagnostics.mu).epsilon(1e-6));

  r.mode = Mode::kAsgm;
  CHECK_THROWS_AS(multi_round_upper(r), UnsupportedModeError);

  r.mode = Mode::kFeasgm;
  r.dataset_size = 4;
  r.q = 0.5;  // sgm-branch
  CHECK_THROWS_AS(multi_round_upper(r), InvalidParameterError);
}

TEST_CASE("multi-round FEASGM bound dips below the SGM baseline") {
  // Paper-scale direction check: 200 rounds of the easgm-branch bound sit
  // below the per-round SGM claim somewhere.
  GuaranteeRequest r;
  r.mode = Mode::kFeasgm;
  r.dataset_size = 140199;
  r.q = 0.005;
  r.sigma = 10.0;
  r.dim = 26010;
  r.rounds = 200;
  const auto res = multi_round_upper(r);
  CHECK(res.branch == "easgm-branch");
  const auto baseline = sgm_baseline(r.q, r.sigma);
  bool below = false;
  for (int i = 1; i < 100; ++i) {
    const double a = i / 100.0;
    below = below || res.curve(a) < baseline(a);
  }
  CHECK(below);
}

TEST_CASE("guarantee results serialize with the resolved request") {
  auto r = base_request();
  r.sigma = 10.0;
  r.dataset_size = 4;
  r.q = 0.5;
  const auto res = feasgm_upper(r);
  const auto json = res.to_json(r);
  CHECK(json.find("\"branch\":\"sgm-branch\"") != std::string::npos);
  CHECK(json.find("\"estimator\":\"closed-form\"") != std::string::npos);
  CHECK(json.find("\"seed\":13") != std::string::npos);
  CHECK(json.find("schema_version") != std::string::npos);
}
