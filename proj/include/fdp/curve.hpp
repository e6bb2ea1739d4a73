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
// Trade-off function calculus. A trade-off curve f maps a Type I error
// alpha in [0,1] to the smallest achievable Type II error; it is convex,
// non-increasing and bounded by ID(alpha) = 1 - alpha. Curves are immutable
// after construction and safe to evaluate concurrently.

#ifndef FDP_CURVE_HPP_
#define FDP_CURVE_HPP_

#include <string>
#include <vector>

namespace fdp {

inline constexpr int kDefaultGridSize = 2001;

enum class CurveKind { kIdentity, kGaussian, kEpsDelta, kGrid };

struct CurvePoint {
  double alpha;
  double beta;
};

class TradeoffCurve {
 public:
  // ID, the identity trade-off function 1 - alpha (zero leakage).
  TradeoffCurve() : kind_(CurveKind::kIdentity) {}

  static TradeoffCurve identity();
  static TradeoffCurve gaussian(double mu);
  static TradeoffCurve eps_delta(double eps, double delta);
  // Points must have strictly increasing alpha covering [0,1]; evaluation
  // between points is linear interpolation (a conservative under-estimate
  // of a convex curve).
  static TradeoffCurve grid(std::vector<CurvePoint> points, std::string meta);

  double operator()(double alpha) const;

  CurveKind kind() const { return kind_; }
  double mu() const { return mu_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  const std::string& meta() const { return meta_; }
  void set_meta(std::string meta) { meta_ = std::move(meta); }

  // Grid view of the curve; closed forms are sampled on the default grid.
  std::vector<CurvePoint> sample(int grid_size = kDefaultGridSize) const;
  const std::vector<CurvePoint>& points() const { return points_; }

  std::string to_json() const;
  static TradeoffCurve from_json(const std::string& text);
  // Two columns `alpha,beta`, header row, 17 significant digits.
  std::string to_csv(int grid_size = kDefaultGridSize) const;

 private:
  CurveKind kind_;
  double mu_ = 0.0;
  double eps_ = 0.0;
  double delta_ = 0.0;
  std::vector<CurvePoint> points_;
  std::string meta_;
};

// Checks the trade-off invariants: beta in [0,1] non-increasing,
// beta(alpha) <= 1 - alpha, and chord slopes non-decreasing (convexity),
// all up to `tol`. Throws InvalidParameterError describing the violation.
void check_curve(const TradeoffCurve& curve, double tol,
                 int grid_size = kDefaultGridSize);

// G_mu(alpha) = Phi(Phi^-1(1-alpha) - mu); G_0 = ID.
TradeoffCurve gdp_curve(double mu);

// f_{eps,delta}(alpha) = max{0, 1-delta-e^eps alpha, e^-eps (1-delta-alpha)}.
TradeoffCurve eps_delta_curve(double eps, double delta);

// The distribution pair T(N(0,1), N(mu, sigma^2)); P is implicitly N(0,1).
struct GaussianPair {
  double mu;
  double sigma;
};

void check_pair(const GaussianPair& pair);

// Exact Neyman-Pearson Type II error for N(0,1) vs N(mu, sigma^2) at Type I
// error alpha. For sigma < 1 the optimal rejection region is the interval
// [z-t, z+t] with z = mu/(1-sigma^2); t is found by bisection (the region
// mass is strictly increasing in t). For sigma = 1 this is G_mu(alpha).
double np_gaussian_pair(const GaussianPair& pair, double alpha);

// f^-1: the reflection of the graph across the diagonal; (f^-1)^-1 = f at
// grid resolution. Symmetric closed forms (ID, G_mu, f_{eps,delta}) are
// their own inverses.
TradeoffCurve invert(const TradeoffCurve& curve);

// max{f, f^-1}; a symmetric trade-off curve.
TradeoffCurve symmetrize(const TradeoffCurve& curve);

// Pointwise convex combination sum_i w_i f_i. Weights must be non-negative
// and sum to 1 within 1e-9.
TradeoffCurve mix(const std::vector<double>& weights,
                  const std::vector<TradeoffCurve>& curves);

// Privacy profile: the smallest delta such that curve >= f_{eps,delta},
//   max{0, sup_a [1 - e^eps a - f(a)], sup_a [1 - a - e^eps f(a)]},
// grid search plus golden-section refinement around the argmax.
double delta_of_eps(const TradeoffCurve& curve, double eps);

// Smallest eps >= 0 with delta_of_eps(curve, eps) <= delta (+inf if none).
double eps_of_delta(const TradeoffCurve& curve, double delta);

}  // namespace fdp

#endif  // FDP_CURVE_HPP_
