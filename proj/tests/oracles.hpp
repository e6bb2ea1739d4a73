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
// Test-only oracles, deliberately independent of the library's numeric
// paths: the normal CDF comes from quadrature (not erfc), Monte Carlo uses
// std::mt19937_64 (not the counter engine), and interval endpoints come from
// direct binomial-tail bisection (not Beta quantiles).
//
// Two precision tiers: norm_cdf/norm_quantile integrate on demand (slow,
// ~1e-12, for point assertions); the sampling helpers go through a table
// built once by a single cumulative pass (fast, ~1e-8, plenty under any
// Monte-Carlo tolerance).

#ifndef FDP_TESTS_ORACLES_HPP_
#define FDP_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double phi(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

inline double simpson(const std::function<double(double)>& f, double lo,
                      double hi, int panels = 4096) {
  if (hi <= lo) return 0.0;
  const int n = panels + (panels % 2);
  const double h = (hi - lo) / n;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * ((i % 2) ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// High-precision standard normal CDF by quadrature of the density from 0,
// with an asymptotic series for far tails. Good to ~1e-12 absolute.
inline double norm_cdf(double x) {
  const double ax = std::fabs(x);
  double v;
  if (ax > 12.0) {
    const double inv = 1.0 / ax;
    const double i2 = inv * inv;
    v = phi(ax) * inv * (1.0 - i2 * (1.0 - 3.0 * i2 * (1.0 - 5.0 * i2)));
    return x > 0.0 ? 1.0 - v : v;
  }
  v = 0.5 + simpson([](double t) { return phi(t); }, 0.0, ax, 4096);
  v = std::min(v, 1.0);
  return x > 0.0 ? v : 1.0 - v;
}

inline double norm_quantile(double p) {
  double lo = -13.0, hi = 13.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (norm_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Table of the normal CDF on [-14, 14], filled by one cumulative pass of
// two-panel Simpson steps; lookups interpolate linearly.
class FastNormal {
 public:
  static const FastNormal& instance() {
    static const FastNormal table;
    return table;
  }

  double cdf(double x) const {
    if (x <= kLo) return 0.0;
    if (x >= kHi) return 1.0;
    const double pos = (x - kLo) / kStep;
    const size_t i = static_cast<size_t>(pos);
    const double t = pos - static_cast<double>(i);
    return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
  }

  double quantile(double p) const {
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
    if (it == cdf_.begin()) return kLo;
    if (it == cdf_.end()) return kHi;
    const size_t j = it - cdf_.begin();
    const double span = cdf_[j] - cdf_[j - 1];
    const double t = span > 0.0 ? (p - cdf_[j - 1]) / span : 0.5;
    return kLo + (static_cast<double>(j - 1) + t) * kStep;
  }

 private:
  FastNormal() : cdf_(kCount) {
    cdf_[0] = 6.5e-45;  // Phi(-14)
    for (size_t i = 1; i < kCount; ++i) {
      const double a = kLo + (i - 1) * kStep;
      cdf_[i] = cdf_[i - 1] + kStep / 6.0 *
                                  (phi(a) + 4.0 * phi(a + 0.5 * kStep) +
                                   phi(a + kStep));
    }
    const double scale = 0.5 / cdf(0.0);  // renormalize cumulative drift
    for (auto& v : cdf_) v = std::min(1.0, v * scale);
  }

  static constexpr double kLo = -14.0;
  static constexpr double kHi = 14.0;
  static constexpr double kStep = 5.0e-4;
  static constexpr size_t kCount = 56001;
  std::vector<double> cdf_;
};

// Monte-Carlo likelihood-ratio oracle for the Neyman-Pearson Type II error
// of N(0,1) vs N(mu, sigma^2): samples both sides, thresholds the exact LLR
// at the empirical (1-alpha)-quantile of the P side. Returns the estimate
// and its binomial standard error. The identical pair is exact: beta=1-alpha.
struct McEstimate {
  double value;
  double se;
};

inline McEstimate mc_np_beta(double mu, double sigma, double alpha,
                             uint64_t samples, uint64_t seed) {
  if (mu == 0.0 && sigma == 1.0) return {1.0 - alpha, 0.0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double log_sigma = std::log(sigma);
  const auto llr = [&](double x) {
    const double z = (x - mu) / sigma;
    return 0.5 * x * x - 0.5 * z * z - log_sigma;
  };
  std::vector<double> llr_p(samples), llr_q(samples);
  for (uint64_t i = 0; i < samples; ++i) llr_p[i] = llr(gauss(rng));
  for (uint64_t i = 0; i < samples; ++i) llr_q[i] = llr(mu + sigma * gauss(rng));
  std::sort(llr_p.begin(), llr_p.end());
  const uint64_t idx = static_cast<uint64_t>((1.0 - alpha) * (samples - 1));
  const double thr = llr_p[idx];
  uint64_t count = 0;
  for (double v : llr_q) count += v <= thr;
  const double beta = static_cast<double>(count) / samples;
  return {beta, std::sqrt(std::max(beta * (1.0 - beta), 1e-12) / samples)};
}

// Binomial lower tail P[X <= k] for X ~ Bin(n, p), exact summation.
inline double binom_cdf(uint64_t k, uint64_t n, double p) {
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return k >= n ? 1.0 : 0.0;
  double term = std::pow(1.0 - p, static_cast<double>(n));  // P[X=0]
  double sum = term;
  for (uint64_t i = 1; i <= k; ++i) {
    term *= (static_cast<double>(n - i + 1) / static_cast<double>(i)) * p /
            (1.0 - p);
    sum += term;
  }
  return std::min(sum, 1.0);
}

// Clopper-Pearson endpoints by direct bisection of the exact binomial tails.
inline double cp_hi_by_search(uint64_t s, uint64_t n, double confidence) {
  if (s >= n) return 1.0;
  const double tail = 0.5 * (1.0 - confidence);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binom_cdf(s, n, mid) > tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double cp_lo_by_search(uint64_t s, uint64_t n, double confidence) {
  if (s == 0) return 0.0;
  const double tail = 0.5 * (1.0 - confidence);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    // P[X >= s] = 1 - P[X <= s-1]
    (1.0 - binom_cdf(s - 1, n, mid) < tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Closed-form pieces of the unequal-variance pair used by the sampling
// helpers. fstar is T(N(0,1), N(0,sigma^2)); table-backed normal.
inline double fstar(double a, double s) {
  if (a >= 1.0) return 0.0;
  if (a <= 0.0) return 1.0;
  const auto& fn = FastNormal::instance();
  return 2.0 * (1.0 - fn.cdf(fn.quantile(0.5 * (1.0 + a)) / s));
}

inline double fstar_inv(double a, double s) {
  if (a >= 1.0) return 0.0;
  if (a <= 0.0) return 1.0;
  const auto& fn = FastNormal::instance();
  return 2.0 * fn.cdf(s * fn.quantile(1.0 - 0.5 * a)) - 1.0;
}

inline double fbar(double a, double s) {
  return std::max(fstar(a, s), fstar_inv(a, s));
}

// log |fbar'(a)| via the branch taken by the max.
inline double fbar_logd(double a, double s) {
  const auto& fn = FastNormal::instance();
  const double c = (1.0 - s * s) / (2.0 * s * s);
  if (fstar(a, s) >= fstar_inv(a, s)) {
    const double t = fn.quantile(0.5 * (1.0 + a));
    return std::log(1.0 / s) - c * t * t;
  }
  const double t = s * fn.quantile(1.0 - 0.5 * a);
  return std::log(s) + c * t * t;
}

// MC estimate of the m-fold composition of the symmetric curve fbar, via the
// p-value realization T(Unif[0,1], nu) with nu's CDF 1 - fbar: the per-copy
// LLR of an observation u is log|fbar'(u)|. Returns sorted LLR sums under
// both sides; threshold sweeps give the composed trade-off curve.
struct ComposedSample {
  std::vector<double> llr_p;
  std::vector<double> llr_q;
};

inline ComposedSample sample_fbar_composition(double s, int copies,
                                              uint64_t samples,
                                              uint64_t seed) {
  // Tabulate the nu quantile function once.
  constexpr int kTab = 20001;
  std::vector<double> xs(kTab), hs(kTab);
  for (int i = 0; i < kTab; ++i) {
    xs[i] = static_cast<double>(i) / (kTab - 1);
    hs[i] = 1.0 - fbar(xs[i], s);  // nu CDF, increasing
  }
  const auto nu_quantile = [&](double u) {
    const auto it = std::lower_bound(hs.begin(), hs.end(), u);
    if (it == hs.begin()) return xs.front();
    if (it == hs.end()) return xs.back();
    const size_t j = it - hs.begin();
    const double span = hs[j] - hs[j - 1];
    const double t = span > 0.0 ? (u - hs[j - 1]) / span : 0.0;
    return xs[j - 1] + t * (xs[j] - xs[j - 1]);
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ComposedSample out;
  out.llr_p.resize(samples);
  out.llr_q.resize(samples);
  for (uint64_t i = 0; i < samples; ++i) {
    double sp = 0.0, sq = 0.0;
    for (int j = 0; j < copies; ++j) {
      sp += fbar_logd(unif(rng), s);
      sq += fbar_logd(nu_quantile(unif(rng)), s);
    }
    out.llr_p[i] = sp;
    out.llr_q[i] = sq;
  }
  std::sort(out.llr_p.begin(), out.llr_p.end());
  std::sort(out.llr_q.begin(), out.llr_q.end());
  return out;
}

// beta at a given alpha from sorted composed LLR samples.
inline McEstimate composed_beta(const ComposedSample& cs, double alpha) {
  const uint64_t m = cs.llr_p.size();
  const uint64_t idx = static_cast<uint64_t>((1.0 - alpha) * (m - 1));
  const double thr = cs.llr_p[idx];
  const uint64_t count =
      std::upper_bound(cs.llr_q.begin(), cs.llr_q.end(), thr) -
      cs.llr_q.begin();
  const double beta = static_cast<double>(count) / m;
  return {beta, std::sqrt(std::max(beta * (1.0 - beta), 1e-12) /
                          static_cast<double>(m))};
}

}  // namespace oracle

#endif  // FDP_TESTS_ORACLES_HPP_
