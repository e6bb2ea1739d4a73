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

#include "fdp/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "fdp/errors.hpp"
#include "fdp/rng.hpp"
#include "fdp/threading.hpp"

namespace fdp {

namespace {

constexpr uint64_t kMinSamples = 10000;

// Log-likelihood-ratio contribution log q(x)/p(x) of one factor, where the
// standardized residual z = (x - mu)/sigma is known exactly on the Q side.
double llr_term(double x, double z, double log_sigma) {
  return 0.5 * x * x - 0.5 * z * z - log_sigma;
}

// Samples the LLR sum under the P side (side=0) or Q side (side=1).
std::vector<double> sample_llr(const ProductPair& pair, int side,
                               uint64_t stream, const McOptions& opts) {
  const size_t nf = pair.factors.size();
  std::vector<double> log_sigmas(nf);
  for (size_t j = 0; j < nf; ++j) log_sigmas[j] = std::log(pair.factors[j].sigma);

  std::vector<double> llr(opts.samples);
  const CounterRng rng(opts.seed, stream);
  parallel_for(opts.samples, opts.threads, [&](uint64_t lo, uint64_t hi) {
    for (uint64_t i = lo; i < hi; ++i) {
      double sum = 0.0;
      for (size_t j = 0; j < nf; ++j) {
        const double g = rng.normal(i * nf + j);
        const auto& f = pair.factors[j];
        if (side == 0) {
          sum += llr_term(g, (g - f.mu) / f.sigma, log_sigmas[j]);
        } else {
          sum += llr_term(f.mu + f.sigma * g, g, log_sigmas[j]);
        }
      }
      llr[i] = sum;
    }
  });
  std::sort(llr.begin(), llr.end());
  return llr;
}

// Parametric trade-off points of the empirical randomized likelihood-ratio
// test: one point per distinct P-side LLR value v, alpha = #(P > v)/M,
// beta = #(Q <= v)/M, plus the t -> -inf endpoint (1, 0). Linear segments
// between points are the randomized completion of the test, so LLR atoms
// (degenerate factors) are handled exactly.
std::vector<CurvePoint> sweep_points(const std::vector<double>& llr_p,
                                     const std::vector<double>& llr_q) {
  const double mp = static_cast<double>(llr_p.size());
  const double mq = static_cast<double>(llr_q.size());
  std::vector<CurvePoint> pts;
  pts.reserve(llr_p.size() + 2);
  pts.push_back({1.0, 0.0});  // t -> -inf
  size_t ip = 0, iq = 0;
  while (ip < llr_p.size()) {
    const double v = llr_p[ip];
    while (ip < llr_p.size() && llr_p[ip] <= v) ++ip;
    while (iq < llr_q.size() && llr_q[iq] <= v) ++iq;
    pts.push_back({(llr_p.size() - ip) / mp, iq / mq});
  }
  // Generated with alpha strictly descending (t ascending); make ascending.
  std::reverse(pts.begin(), pts.end());
  return pts;
}

// Resamples parametric (alpha ascending, beta descending) points onto a
// target alpha grid by linear interpolation.
TradeoffCurve resample(std::vector<CurvePoint> pts,
                       const std::vector<double>& alpha_grid,
                       const std::string& meta) {
  std::vector<CurvePoint> out;
  out.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    const auto it = std::lower_bound(
        pts.begin(), pts.end(), a,
        [](const CurvePoint& p, double x) { return p.alpha < x; });
    double beta;
    if (it == pts.begin()) {
      beta = pts.front().beta;
    } else if (it == pts.end()) {
      beta = pts.back().beta;
    } else {
      const auto lo = it - 1;
      const double span = it->alpha - lo->alpha;
      beta = span > 0.0
                 ? lo->beta + (a - lo->alpha) / span * (it->beta - lo->beta)
                 : std::min(lo->beta, it->beta);
    }
    out.push_back({a, beta});
  }
  return TradeoffCurve::grid(std::move(out), meta);
}

void check_alpha_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) {
    throw InvalidParameterError("alpha grid needs at least two points");
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      throw InvalidParameterError("alpha grid values must be in [0,1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidParameterError("alpha grid must strictly increase");
    }
  }
}

}  // namespace

void check_product(const ProductPair& pair) {
  if (pair.factors.empty()) {
    throw InvalidParameterError("ProductPair: factor list is empty");
  }
  for (const auto& f : pair.factors) check_pair(f);
}

void check_envelope(const MixtureEnvelope& env) {
  if (env.components.empty()) {
    throw InvalidParameterError("MixtureEnvelope: no components");
  }
  double sum = 0.0;
  for (const auto& c : env.components) {
    if (!(c.weight >= 0.0)) {
      throw InvalidParameterError("MixtureEnvelope: negative weight");
    }
    sum += c.weight;
    check_product(c.pair);
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw InvalidParameterError("MixtureEnvelope: weights must sum to 1");
  }
}

std::vector<double> uniform_alpha_grid(int grid_size) {
  std::vector<double> grid(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    grid[i] = static_cast<double>(i) / (grid_size - 1);
  }
  return grid;
}

TradeoffCurve product_mc(const ProductPair& pair,
                         const std::vector<double>& alpha_grid,
                         const McOptions& opts) {
  check_product(pair);
  check_alpha_grid(alpha_grid);
  if (opts.samples < kMinSamples) {
    throw InvalidParameterError("product_mc: samples must be >= 10^4");
  }
  const auto llr_p = sample_llr(pair, 0, 0, opts);
  const auto llr_q = sample_llr(pair, 1, 1, opts);
  return resample(sweep_points(llr_p, llr_q), alpha_grid, "product_mc");
}

TradeoffCurve envelope_mc(const MixtureEnvelope& env,
                          const std::vector<double>& thresholds,
                          const McOptions& opts) {
  check_envelope(env);
  if (opts.samples < kMinSamples) {
    throw InvalidParameterError("envelope_mc: samples must be >= 10^4");
  }
  if (env.components.size() == 1) {
    return product_mc(env.components[0].pair, uniform_alpha_grid(), opts);
  }

  const size_t nc = env.components.size();
  std::vector<std::vector<double>> llr_p(nc), llr_q(nc);
  for (size_t c = 0; c < nc; ++c) {
    llr_p[c] = sample_llr(env.components[c].pair, 0, 2 * c, opts);
    llr_q[c] = sample_llr(env.components[c].pair, 1, 2 * c + 1, opts);
  }

  // Shared threshold sweep: caller thresholds plus per-component LLR
  // quantiles, extended past every sampled value.
  std::vector<double> ts(thresholds);
  constexpr int kLevels = 4096;
  for (size_t c = 0; c < nc; ++c) {
    for (const auto* v : {&llr_p[c], &llr_q[c]}) {
      for (int l = 0; l < kLevels; ++l) {
        ts.push_back((*v)[(v->size() - 1) * l / (kLevels - 1)]);
      }
    }
  }
  double lo = ts[0], hi = ts[0];
  for (double t : ts) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  ts.push_back(lo - 1.0);
  ts.push_back(hi + 1.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  // Sweep in t-ascending order: alpha is non-increasing and beta
  // non-decreasing in t, so keeping only the first point of each equal-alpha
  // run retains the smallest achievable beta there.
  std::vector<CurvePoint> pts;
  pts.reserve(ts.size() + 1);
  pts.push_back({1.0, 0.0});  // t -> -inf
  const double m = static_cast<double>(opts.samples);
  for (double t : ts) {
    double alpha = 0.0, beta = 0.0;
    for (size_t c = 0; c < nc; ++c) {
      const double w = env.components[c].weight;
      const auto up_p =
          std::upper_bound(llr_p[c].begin(), llr_p[c].end(), t) -
          llr_p[c].begin();
      const auto up_q =
          std::upper_bound(llr_q[c].begin(), llr_q[c].end(), t) -
          llr_q[c].begin();
      alpha += w * (m - up_p) / m;
      beta += w * up_q / m;
    }
    if (alpha != pts.back().alpha) pts.push_back({alpha, beta});
  }
  std::reverse(pts.begin(), pts.end());
  return resample(std::move(pts), uniform_alpha_grid(), "envelope_mc");
}

}  // namespace fdp
