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

#include "fdp/auditing.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "fdp/errors.hpp"
#include "fdp/guarantees.hpp"
#include "fdp/special.hpp"
#include "fdp/threading.hpp"
#include "fdp/version.hpp"

namespace fdp {

namespace {

// Audit-level counter streams (the mechanism derives its own from the
// per-trial sub-seed).
constexpr uint64_t kBitStream = 100;
constexpr uint64_t kCoinStream = 101;

double binom_pmf(uint64_t n, uint64_t k, double q) {
  double comb = 1.0;
  for (uint64_t i = 0; i < k; ++i) {
    comb *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return comb * std::pow(q, static_cast<double>(k)) *
         std::pow(1.0 - q, static_cast<double>(n - k));
}

double mechanism_divisor(Mode mode, uint64_t dataset_size, double q,
                         uint64_t batch_size) {
  double d = 1.0;
  switch (mode) {
    case Mode::kSgm: d = 1.0; break;
    case Mode::kEasgm: d = static_cast<double>(dataset_size) * q; break;
    case Mode::kAsgm: d = static_cast<double>(batch_size); break;
    case Mode::kFeasgm:
      d = std::floor(static_cast<double>(dataset_size) * q);
      break;
  }
  return d == 0.0 ? 1.0 : d;
}

}  // namespace

Interval clopper_pearson(uint64_t successes, uint64_t trials,
                         double confidence) {
  if (trials == 0 || successes > trials) {
    throw InvalidParameterError("clopper_pearson: need 0 <= successes <= trials");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidParameterError("clopper_pearson: confidence must be in (0,1)");
  }
  const double tail = 0.5 * (1.0 - confidence);
  Interval iv;
  iv.lo = successes == 0
              ? 0.0
              : beta_quantile(tail, static_cast<double>(successes),
                              static_cast<double>(trials - successes + 1));
  iv.hi = successes == trials
              ? 1.0
              : beta_quantile(1.0 - tail, static_cast<double>(successes + 1),
                              static_cast<double>(trials - successes));
  return iv;
}

AuditedEpsilon audited_epsilon(double alpha_r, double beta_r, double delta) {
  for (double v : {alpha_r, beta_r, delta}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidParameterError("audited_epsilon: inputs must be in [0,1]");
    }
  }
  AuditedEpsilon out;
  const auto branch = [&out](double numerator, double denominator) {
    if (numerator <= 0.0) return 0.0;
    if (denominator == 0.0) {
      out.saturated = true;
      return std::numeric_limits<double>::infinity();
    }
    return std::log(numerator / denominator);
  };
  out.value = std::max({0.0, branch(1.0 - delta - alpha_r, beta_r),
                        branch(1.0 - delta - beta_r, alpha_r)});
  return out;
}

double audited_delta(double alpha_r, double beta_r, double eps) {
  for (double v : {alpha_r, beta_r}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidParameterError("audited_delta: inputs must be in [0,1]");
    }
  }
  if (!(eps >= 0.0)) {
    throw InvalidParameterError("audited_delta: eps must be >= 0");
  }
  const double e = std::exp(eps);
  return std::max({0.0, 1.0 - alpha_r - e * beta_r, 1.0 - beta_r - e * alpha_r});
}

Distinguisher Distinguisher::build(const MechanismConfig& config,
                                   const GradientDataset& data,
                                   const std::vector<double>& differing,
                                   double test_level) {
  check_config(config);
  check_dataset(data);
  if (!(test_level > 0.0 && test_level < 1.0)) {
    throw InvalidParameterError("Distinguisher: test level must be in (0,1)");
  }
  if (data.vectors.empty()) {
    throw InvalidParameterError("Distinguisher: dataset is empty");
  }
  if (data.vectors.size() > kMaxDistinguisherGroups) {
    throw CapacityError("Distinguisher: dataset too large to enumerate "
                        "batch-size groups");
  }
  if (differing.size() != data.dim || data.dim != config.dim) {
    throw InvalidParameterError("Distinguisher: dimension mismatch");
  }
  // Batch-size grouping is exact only when every record contributes the same
  // clipped gradient.
  for (const auto& v : data.vectors) {
    if (v != data.vectors.front()) {
      throw InvalidParameterError(
          "Distinguisher: batch-size grouping requires identical dataset "
          "records (use the canary generator)");
    }
  }

  const auto g = clip(data.vectors.front(), config.clip);
  const auto g_diff = clip(differing, config.clip);
  const uint64_t n_rec = data.vectors.size();
  const double noise_sd = config.sigma * config.clip;

  Distinguisher d;
  d.level_ = test_level;
  d.dim_ = config.dim;
  for (uint64_t k = 0; k <= n_rec; ++k) {
    const double wk = binom_pmf(n_rec, k, config.q);
    const double dp = mechanism_divisor(config.mode, n_rec, config.q, k);
    for (int sub = 1; sub <= 2; ++sub) {
      const double w = wk * (sub == 1 ? 1.0 - config.q : config.q);
      if (w == 0.0) continue;
      const uint64_t batch_q = sub == 1 ? k : k + 1;
      const double dq =
          mechanism_divisor(config.mode, n_rec + 1, config.q, batch_q);
      DistinguisherComponent comp;
      comp.weight = w;
      comp.sd_p = noise_sd / dp;
      comp.sd_q = noise_sd / dq;
      comp.mean_p.resize(config.dim);
      comp.mean_q.resize(config.dim);
      for (uint64_t j = 0; j < config.dim; ++j) {
        const double base = static_cast<double>(k) * g[j];
        comp.mean_p[j] = base / dp;
        comp.mean_q[j] = (base + (sub == 2 ? g_diff[j] : 0.0)) / dq;
      }
      double sep_norm_sq = 0.0;
      for (uint64_t j = 0; j < config.dim; ++j) {
        const double diff = comp.mean_q[j] - comp.mean_p[j];
        sep_norm_sq += diff * diff;
      }
      comp.identical = comp.sd_p == comp.sd_q && sep_norm_sq == 0.0;
      std::vector<double> unit;
      if (sep_norm_sq > 0.0) {
        unit.resize(config.dim);
        const double inv = 1.0 / std::sqrt(sep_norm_sq);
        for (uint64_t j = 0; j < config.dim; ++j) {
          unit[j] = (comp.mean_q[j] - comp.mean_p[j]) * inv;
        }
      }
      d.components_.push_back(std::move(comp));
      d.separating_units_.push_back(std::move(unit));
    }
  }
  return d;
}

bool Distinguisher::test_passes(const std::vector<double>& standardized,
                                const std::vector<double>* separating_unit,
                                double level) {
  const size_t n = standardized.size();
  double norm_sq = 0.0;
  for (double y : standardized) norm_sq += y * y;
  if (separating_unit == nullptr || separating_unit->empty()) {
    const double lo = chi2_quantile(level / 2.0, static_cast<double>(n));
    const double hi = chi2_quantile(1.0 - level / 2.0, static_cast<double>(n));
    return norm_sq >= lo && norm_sq <= hi;
  }
  double z = 0.0;
  for (size_t j = 0; j < n; ++j) z += standardized[j] * (*separating_unit)[j];
  if (n == 1) {
    return std::fabs(z) <= norm_quantile(1.0 - level / 2.0);
  }
  // Split the level so the two independent checks jointly pass with
  // probability exactly 1 - level under the null.
  const double sub = 1.0 - std::sqrt(1.0 - level);
  if (std::fabs(z) > norm_quantile(1.0 - sub / 2.0)) return false;
  const double resid = norm_sq - z * z;
  const double df = static_cast<double>(n - 1);
  return resid >= chi2_quantile(sub / 2.0, df) &&
         resid <= chi2_quantile(1.0 - sub / 2.0, df);
}

int Distinguisher::guess(const std::vector<double>& output,
                         const CounterRng& coins, uint64_t trial) const {
  if (output.size() != dim_) {
    throw InvalidParameterError("Distinguisher: output dimension mismatch");
  }
  const uint64_t coin_base = trial * (components_.size() + 1);
  double votes = 0.0;
  double total = 0.0;
  std::vector<double> y(dim_);
  for (size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    total += comp.weight;
    double vote;
    if (comp.identical) {
      vote = coins.uniform(coin_base + c) < 0.5 ? 1.0 : 0.0;
    } else {
      const std::vector<double>* unit =
          separating_units_[c].empty() ? nullptr : &separating_units_[c];
      for (uint64_t j = 0; j < dim_; ++j) {
        y[j] = (output[j] - comp.mean_p[j]) / comp.sd_p;
      }
      const bool pass_p = test_passes(y, unit, level_);
      for (uint64_t j = 0; j < dim_; ++j) {
        y[j] = (output[j] - comp.mean_q[j]) / comp.sd_q;
      }
      const bool pass_q = test_passes(y, unit, level_);
      if (pass_p && !pass_q) {
        vote = 1.0;
      } else if (pass_q && !pass_p) {
        vote = 0.0;
      } else {
        vote = coins.uniform(coin_base + c) < 0.5 ? 1.0 : 0.0;
      }
    }
    votes += comp.weight * vote;
  }
  if (votes > 0.5 * total) return 0;
  if (votes < 0.5 * total) return 1;
  return coins.uniform(coin_base + components_.size()) < 0.5 ? 0 : 1;
}

bool verdict(const AuditedEpsilon& eps_l, double delta_l,
             const TradeoffCurve& claimed, double fixed_eps,
             double fixed_delta) {
  const double claimed_delta = delta_of_eps(claimed, fixed_eps);
  const double claimed_eps = eps_of_delta(claimed, fixed_delta);
  return eps_l.value > claimed_eps || delta_l > claimed_delta;
}

AuditReport run_audit(const AuditConfig& config, const GradientDataset& data,
                      const std::vector<double>& differing,
                      const TradeoffCurve& claimed) {
  if (config.trials < 100) {
    throw InvalidParameterError("run_audit: trials must be >= 100");
  }
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw InvalidParameterError("run_audit: confidence must be in (0,1)");
  }
  const Distinguisher dist = Distinguisher::build(
      config.mechanism, data, differing, config.test_level);
  const GradientDataset neighbor = data.with_record(differing);
  const CounterRng bits(config.seed, kBitStream);
  const CounterRng coins(config.seed, kCoinStream);

  std::atomic<uint64_t> c1{0}, ic1{0}, c2{0}, ic2{0};
  parallel_for(config.trials, config.threads, [&](uint64_t lo, uint64_t hi) {
    uint64_t t1c = 0, t1ic = 0, t2c = 0, t2ic = 0;
    for (uint64_t r = lo; r < hi; ++r) {
      const int b = bits.uniform(r) < 0.5 ? 0 : 1;
      const uint64_t trial_seed = mix_seed(config.seed, r);
      const MechanismOutput out =
          run_mechanism(config.mechanism, b == 0 ? data : neighbor, trial_seed);
      const int b_guess = dist.guess(out.value, coins, r);
      if (b == 0) {
        (b_guess == 0 ? t1c : t1ic)++;
      } else {
        (b_guess == 1 ? t2c : t2ic)++;
      }
    }
    c1 += t1c;
    ic1 += t1ic;
    c2 += t2c;
    ic2 += t2ic;
  });

  AuditReport rep;
  rep.config = config;
  rep.type1_correct = c1;
  rep.type1_incorrect = ic1;
  rep.type2_correct = c2;
  rep.type2_incorrect = ic2;

  const uint64_t n1 = rep.type1_correct + rep.type1_incorrect;
  const uint64_t n2 = rep.type2_correct + rep.type2_incorrect;
  rep.alpha_hat = n1 == 0 ? 0.0
                          : static_cast<double>(rep.type1_incorrect) /
                                static_cast<double>(n1);
  rep.beta_hat = n2 == 0 ? 0.0
                         : static_cast<double>(rep.type2_incorrect) /
                               static_cast<double>(n2);
  rep.alpha_ci = n1 == 0 ? Interval{0.0, 1.0}
                         : clopper_pearson(rep.type1_incorrect, n1,
                                           config.confidence);
  rep.beta_ci = n2 == 0 ? Interval{0.0, 1.0}
                        : clopper_pearson(rep.type2_incorrect, n2,
                                          config.confidence);

  rep.eps_l =
      audited_epsilon(rep.alpha_ci.hi, rep.beta_ci.hi, config.fixed_delta);
  rep.delta_l = audited_delta(rep.alpha_ci.hi, rep.beta_ci.hi, config.fixed_eps);
  rep.claimed_delta = delta_of_eps(claimed, config.fixed_eps);
  rep.claimed_eps = eps_of_delta(claimed, config.fixed_delta);
  rep.violation = verdict(rep.eps_l, rep.delta_l, claimed, config.fixed_eps,
                          config.fixed_delta);

  char info[128];
  std::snprintf(info, sizeof(info), "batch-size groups: %zu components, test level %g",
                dist.components().size(), dist.test_level());
  rep.distinguisher_info = info;
  return rep;
}

int negative_control_false_alarms(const AuditConfig& config, int reps) {
  if (config.mechanism.mode != Mode::kSgm) {
    throw InvalidParameterError(
        "negative control audits SGM against its own baseline");
  }
  const TradeoffCurve baseline =
      sgm_baseline(config.mechanism.q, config.mechanism.sigma);
  const GradientDataset data = GradientDataset::canary(
      config.mechanism.dataset_size, config.mechanism.dim,
      config.mechanism.clip);
  const auto record =
      GradientDataset::canary_record(config.mechanism.dim,
                                     config.mechanism.clip);
  int alarms = 0;
  for (int rep = 0; rep < reps; ++rep) {
    AuditConfig c = config;
    c.seed = mix_seed(config.seed, static_cast<uint64_t>(rep) + 7711);
    const AuditReport r = run_audit(c, data, record, baseline);
    if (r.violation) ++alarms;
  }
  return alarms;
}

std::string AuditReport::to_json() const {
  const double eps_out = eps_l.saturated
                             ? std::numeric_limits<double>::max()
                             : eps_l.value;
  const nlohmann::json j = {
      {"schema_version", kSchemaVersion},
      {"version", kVersion},
      {"config",
       {{"mode", mode_name(config.mechanism.mode)},
        {"N", config.mechanism.dataset_size},
        {"q", config.mechanism.q},
        {"C", config.mechanism.clip},
        {"sigma", config.mechanism.sigma},
        {"n", config.mechanism.dim},
        {"trials", config.trials},
        {"confidence", config.confidence},
        {"fixed_eps", config.fixed_eps},
        {"fixed_delta", config.fixed_delta},
        {"test_level", config.test_level},
        {"seed", config.seed}}},
      {"counts",
       {{"type1_correct", type1_correct},
        {"type1_incorrect", type1_incorrect},
        {"type2_correct", type2_correct},
        {"type2_incorrect", type2_incorrect}}},
      {"alpha_hat", alpha_hat},
      {"beta_hat", beta_hat},
      {"alpha_ci", {alpha_ci.lo, alpha_ci.hi}},
      {"beta_ci", {beta_ci.lo, beta_ci.hi}},
      {"eps_l", eps_out},
      {"eps_l_saturated", eps_l.saturated},
      {"delta_l", delta_l},
      {"claimed_eps", claimed_eps},
      {"claimed_delta", claimed_delta},
      {"verdict", violation ? "violation" : "no-violation"},
      {"distinguisher", distinguisher_info}};
  return j.dump();
}

std::string AuditReport::csv_header() {
  return "mode,N,q,C,sigma,n,trials,confidence,seed,alpha_hat,beta_hat,"
         "alpha_hi,beta_hi,fixed_eps,fixed_delta,eps_l,delta_l,claimed_eps,"
         "claimed_delta,verdict";
}

std::string AuditReport::to_csv_row() const {
  char buf[640];
  std::snprintf(
      buf, sizeof(buf),
      "%s,%llu,%.17g,%.17g,%.17g,%llu,%llu,%.17g,%llu,%.17g,%.17g,%.17g,"
      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s",
      mode_name(config.mechanism.mode).c_str(),
      static_cast<unsigned long long>(config.mechanism.dataset_size),
      config.mechanism.q, config.mechanism.clip, config.mechanism.sigma,
      static_cast<unsigned long long>(config.mechanism.dim),
      static_cast<unsigned long long>(config.trials), config.confidence,
      static_cast<unsigned long long>(config.seed), alpha_hat, beta_hat,
      alpha_ci.hi, beta_ci.hi, config.fixed_eps, config.fixed_delta,
      eps_l.saturated ? std::numeric_limits<double>::infinity() : eps_l.value,
      delta_l, claimed_eps, claimed_delta,
      violation ? "violation" : "no-violation");
  return buf;
}

}  // namespace fdp
