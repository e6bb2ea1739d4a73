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

#include "fdp/guarantees.hpp"

#include <cmath>

#include <json.hpp>

#include "fdp/errors.hpp"
#include "fdp/functionals.hpp"
#include "fdp/version.hpp"

namespace fdp {

namespace {

double pair_sigma(uint64_t x) {
  const double v = static_cast<double>(x);
  return v / (v + 1.0);
}

double binom_pmf(uint64_t n, uint64_t k, double q) {
  double comb = 1.0;
  for (uint64_t i = 0; i < k; ++i) {
    comb *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return comb * std::pow(q, static_cast<double>(k)) *
         std::pow(1.0 - q, static_cast<double>(n - k));
}

McOptions mc_options(const GuaranteeRequest& r) {
  return McOptions{r.mc_samples, r.seed, r.threads};
}

// The shared product term T(P^(n-1), Q_x^(n-1)): MC below the factor cutoff,
// CLT envelope above.
GuaranteeResult product_term(uint64_t x, uint64_t dim,
                             const GuaranteeRequest& request) {
  GuaranteeResult res;
  if (dim <= 1) {
    res.curve = TradeoffCurve::identity();
    res.estimator = "closed-form";
    return res;
  }
  const uint64_t copies = dim - 1;
  const GaussianPair factor{0.0, pair_sigma(x)};
  if (copies <= kProductMcMaxFactors) {
    ProductPair pair;
    pair.factors.assign(copies, factor);
    res.curve = product_mc(pair, uniform_alpha_grid(request.grid_size),
                           mc_options(request));
    res.estimator = "mc";
    res.diagnostics.samples = request.mc_samples;
  } else {
    res.curve = clt_upper_curve(factor, copies);
    res.estimator = "clt";
    const CltParams p = clt_params(functionals(factor), copies);
    res.diagnostics.mu = p.mu;
    res.diagnostics.gamma = p.gamma;
  }
  return res;
}

bool feasgm_sgm_branch(uint64_t n, double q) {
  const double a = std::floor(static_cast<double>(n) * q);
  const double b = std::floor(static_cast<double>(n + 1) * q);
  return a == b;
}

void require_ratio(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidParameterError("sampling ratio q must be in [0,1]");
  }
}

}  // namespace

TradeoffCurve sgm_baseline(double q, double sigma) {
  require_ratio(q);
  if (!(sigma > 0.0)) {
    throw InvalidParameterError("sgm_baseline: sigma must be > 0");
  }
  return mix({q, 1.0 - q}, {gdp_curve(1.0 / sigma), TradeoffCurve::identity()});
}

GuaranteeResult easgm_upper(uint64_t dataset_size, uint64_t dim,
                            const GuaranteeRequest& request) {
  if (dataset_size < 1) {
    throw InvalidParameterError("easgm_upper: N must be >= 1");
  }
  if (dim < 1) throw InvalidParameterError("easgm_upper: n must be >= 1");
  return product_term(dataset_size, dim, request);
}

GuaranteeResult asgm_upper(uint64_t dataset_size, double q, uint64_t dim,
                           const GuaranteeRequest& request) {
  require_ratio(q);
  GuaranteeResult core = easgm_upper(dataset_size, dim, request);
  const double w =
      q - q * std::pow(1.0 - q, static_cast<double>(dataset_size));
  core.curve = mix({w, 1.0 - w}, {core.curve, TradeoffCurve::identity()});
  return core;
}

GuaranteeResult feasgm_upper(const GuaranteeRequest& request) {
  require_ratio(request.q);
  if (request.dataset_size < 1) {
    throw InvalidParameterError("feasgm_upper: N must be >= 1");
  }
  if (feasgm_sgm_branch(request.dataset_size, request.q)) {
    GuaranteeResult res;
    res.curve = sgm_baseline(request.q, request.sigma);
    res.branch = "sgm-branch";
    res.estimator = "closed-form";
    return res;
  }
  const uint64_t k = static_cast<uint64_t>(
      std::floor(static_cast<double>(request.dataset_size) * request.q));
  if (k == 0) {
    throw InvalidParameterError(
        "feasgm_upper: floor(Nq) = 0 on the easgm-branch; the pair analysis "
        "does not apply under the zero-divisor convention");
  }
  GuaranteeResult res = product_term(k, request.dim, request);
  res.branch = "easgm-branch";
  return res;
}

GuaranteeResult per_pair_guarantee(const GuaranteeRequest& request) {
  require_ratio(request.q);
  if (!(request.sigma > 0.0)) {
    throw InvalidParameterError("per_pair_guarantee: sigma must be > 0");
  }
  if (request.dataset_size > kPerPairMaxDatasetSize) {
    throw CapacityError(
        "per_pair_guarantee: N exceeds the envelope capacity limit (12)");
  }
  if (request.dim > kPerPairMaxDim) {
    throw CapacityError(
        "per_pair_guarantee: n exceeds the MC-feasible capacity limit");
  }
  if (request.dim < 1 || request.dataset_size < 1) {
    throw InvalidParameterError("per_pair_guarantee: N and n must be >= 1");
  }

  const uint64_t n_rec = request.dataset_size;
  const double q = request.q;
  const double sigma = request.sigma;

  Mode mode = request.mode;
  std::string branch;
  uint64_t shift_base = n_rec;  // the x of Q_x in the shifted coordinate
  if (mode == Mode::kSgm) {
    GuaranteeResult res;
    res.curve = sgm_baseline(q, sigma);
    res.estimator = "closed-form";
    return res;
  }
  if (mode == Mode::kFeasgm) {
    if (feasgm_sgm_branch(n_rec, q)) {
      GuaranteeResult res;
      res.curve = sgm_baseline(q, sigma);
      res.branch = "sgm-branch";
      res.estimator = "closed-form";
      return res;
    }
    const uint64_t k = static_cast<uint64_t>(
        std::floor(static_cast<double>(n_rec) * q));
    if (k == 0) {
      throw InvalidParameterError(
          "per_pair_guarantee: floor(Nq) = 0 on the easgm-branch");
    }
    shift_base = k;
    branch = "easgm-branch";
    mode = Mode::kEasgm;  // same component structure with K substituted
  }

  MixtureEnvelope env;
  for (uint64_t k = 0; k <= n_rec; ++k) {
    const double wk = binom_pmf(n_rec, k, q);
    for (int sub = 1; sub <= 2; ++sub) {
      const double w = wk * (sub == 1 ? 1.0 - q : q);
      if (w == 0.0) continue;
      ProductPair pair;
      if (mode == Mode::kEasgm) {
        const double s = pair_sigma(shift_base);
        const double mu_shift =
            (sub == 1 ? static_cast<double>(k)
                      : static_cast<double>(shift_base + k)) /
            ((static_cast<double>(shift_base) + 1.0) * sigma);
        pair.factors.assign(request.dim - 1, GaussianPair{0.0, s});
        pair.factors.push_back(GaussianPair{mu_shift, s});
      } else {  // ASGM
        if (sub == 1) {
          pair.factors.push_back(GaussianPair{0.0, 1.0});  // ID
        } else if (k == 0) {
          pair.factors.push_back(GaussianPair{1.0 / sigma, 1.0});  // G_{1/s}
        } else {
          const double s = pair_sigma(k);
          const double mu_shift = 2.0 * static_cast<double>(k) /
                                  ((static_cast<double>(k) + 1.0) * sigma);
          pair.factors.assign(request.dim - 1, GaussianPair{0.0, s});
          pair.factors.push_back(GaussianPair{mu_shift, s});
        }
      }
      env.components.push_back({w, std::move(pair)});
    }
  }

  GuaranteeResult res;
  res.curve = envelope_mc(env, {}, mc_options(request));
  res.branch = branch;
  res.estimator = "mc";
  res.diagnostics.samples = request.mc_samples;
  if (q == 1.0) {
    res.curve.set_meta("per_pair tight (q=1: the envelope is exact)");
  } else {
    res.curve.set_meta("per_pair");
  }
  return res;
}

GuaranteeResult multi_round_upper(const GuaranteeRequest& request) {
  if (request.rounds < 1) {
    throw InvalidParameterError("multi_round_upper: T must be >= 1");
  }
  if (request.mode == Mode::kAsgm) {
    throw UnsupportedModeError(
        "multi_round_upper: no closed-form multi-round ASGM visualization");
  }
  if (request.mode == Mode::kSgm) {
    throw UnsupportedModeError(
        "multi_round_upper: SGM composition is out of scope");
  }
  uint64_t base = request.dataset_size;
  std::string branch;
  if (request.mode == Mode::kFeasgm) {
    if (feasgm_sgm_branch(request.dataset_size, request.q)) {
      throw InvalidParameterError(
          "multi_round_upper: FEASGM sgm-branch rounds have no product term; "
          "multi-round composition of the SGM mixture is not defined here");
    }
    base = static_cast<uint64_t>(
        std::floor(static_cast<double>(request.dataset_size) * request.q));
    if (base == 0) {
      throw InvalidParameterError("multi_round_upper: floor(Nq) = 0");
    }
    branch = "easgm-branch";
  }

  GuaranteeResult res;
  res.branch = branch;
  if (request.dim <= 1) {
    res.curve = TradeoffCurve::identity();
    res.estimator = "closed-form";
    return res;
  }
  const uint64_t copies = request.rounds * (request.dim - 1);
  const GaussianPair factor{0.0, pair_sigma(base)};
  res.curve = clt_upper_curve(factor, copies);
  res.estimator = "clt";
  const CltParams p = clt_params(functionals(factor), copies);
  res.diagnostics.mu = p.mu;
  res.diagnostics.gamma = p.gamma;
  return res;
}

std::string GuaranteeResult::to_json(const GuaranteeRequest& request) const {
  const nlohmann::json j = {
      {"schema_version", kSchemaVersion},
      {"version", kVersion},
      {"request",
       {{"mode", mode_name(request.mode)},
        {"N", request.dataset_size},
        {"q", request.q},
        {"sigma", request.sigma},
        {"n", request.dim},
        {"rounds", request.rounds},
        {"grid", request.grid_size},
        {"mc_samples", request.mc_samples},
        {"seed", request.seed}}},
      {"branch", branch},
      {"estimator", estimator},
      {"diagnostics",
       {{"mu", diagnostics.mu},
        {"gamma", diagnostics.gamma},
        {"samples", diagnostics.samples}}},
      {"curve", nlohmann::json::parse(curve.to_json())}};
  return j.dump();
}

}  // namespace fdp
