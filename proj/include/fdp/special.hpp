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

#ifndef FDP_SPECIAL_HPP_
#define FDP_SPECIAL_HPP_

#include <cmath>

namespace fdp {

inline double norm_pdf(double x) {
  static const double kInvSqrt2Pi = 0.3989422804014326779;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Standard normal CDF via erfc; accurate in both tails.
inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Upper tail P[Z > x]; keeps precision for large positive x.
inline double norm_sf(double x) {
  return 0.5 * std::erfc(x * 0.7071067811865475244);
}

// Inverse standard normal CDF (Wichura's AS241, ~1e-15 relative accuracy).
// Returns -inf at 0 and +inf at 1. This is also the documented deterministic
// uniform-to-normal transform used by the counter-based sample streams.
double norm_quantile(double p);

// Exact binomial confidence-interval endpoints and the distinguisher's test
// thresholds need Beta / chi-squared quantiles; these wrap Boost.Math.
double beta_quantile(double p, double a, double b);
double chi2_quantile(double p, double df);
double chi2_cdf(double x, double df);

}  // namespace fdp

#endif  // FDP_SPECIAL_HPP_
