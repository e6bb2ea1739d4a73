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

#include "fdp/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "fdp/errors.hpp"
#include "fdp/special.hpp"

namespace fdp {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidParameterError("alpha must be in [0,1]");
  }
}

double eval_gaussian(double mu, double alpha) {
  if (alpha <= 0.0) return 1.0;
  if (alpha >= 1.0) return 0.0;
  return norm_cdf(norm_quantile(1.0 - alpha) - mu);
}

double eval_eps_delta(double eps, double delta, double alpha) {
  const double a = 1.0 - delta - std::exp(eps) * alpha;
  const double b = std::exp(-eps) * (1.0 - delta - alpha);
  return std::max(0.0, std::max(a, b));
}

double interp(const std::vector<CurvePoint>& pts, double alpha) {
  if (alpha <= pts.front().alpha) return pts.front().beta;
  if (alpha >= pts.back().alpha) return pts.back().beta;
  const auto it = std::lower_bound(
      pts.begin(), pts.end(), alpha,
      [](const CurvePoint& p, double a) { return p.alpha < a; });
  const auto hi = it;
  const auto lo = it - 1;
  const double span = hi->alpha - lo->alpha;
  if (span <= 0.0) return std::min(lo->beta, hi->beta);
  const double t = (alpha - lo->alpha) / span;
  return lo->beta + t * (hi->beta - lo->beta);
}

const char* kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::kIdentity: return "identity";
    case CurveKind::kGaussian: return "gaussian";
    case CurveKind::kEpsDelta: return "eps_delta";
    case CurveKind::kGrid: return "grid";
  }
  return "grid";
}

}  // namespace

TradeoffCurve TradeoffCurve::identity() { return TradeoffCurve(); }

TradeoffCurve TradeoffCurve::gaussian(double mu) {
  TradeoffCurve c;
  c.kind_ = CurveKind::kGaussian;
  c.mu_ = mu;
  return c;
}

TradeoffCurve TradeoffCurve::eps_delta(double eps, double delta) {
  TradeoffCurve c;
  c.kind_ = CurveKind::kEpsDelta;
  c.eps_ = eps;
  c.delta_ = delta;
  return c;
}

TradeoffCurve TradeoffCurve::grid(std::vector<CurvePoint> points,
                                  std::string meta) {
  if (points.size() < 2) {
    throw InvalidParameterError("grid curve needs at least two points");
  }
  for (size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].alpha) || !std::isfinite(points[i].beta)) {
      throw InvalidParameterError("grid curve: non-finite point");
    }
    if (i > 0 && !(points[i].alpha > points[i - 1].alpha)) {
      throw InvalidParameterError("grid curve: alpha must strictly increase");
    }
    points[i].beta = clamp01(points[i].beta);
  }
  TradeoffCurve c;
  c.kind_ = CurveKind::kGrid;
  c.points_ = std::move(points);
  c.meta_ = std::move(meta);
  return c;
}

double TradeoffCurve::operator()(double alpha) const {
  require_alpha(alpha);
  switch (kind_) {
    case CurveKind::kIdentity: return 1.0 - alpha;
    case CurveKind::kGaussian: return eval_gaussian(mu_, alpha);
    case CurveKind::kEpsDelta: return eval_eps_delta(eps_, delta_, alpha);
    case CurveKind::kGrid: return interp(points_, alpha);
  }
  return 0.0;
}

std::vector<CurvePoint> TradeoffCurve::sample(int grid_size) const {
  if (grid_size < 2) throw InvalidParameterError("grid_size must be >= 2");
  if (kind_ == CurveKind::kGrid &&
      static_cast<int>(points_.size()) == grid_size) {
    return points_;
  }
  std::vector<CurvePoint> pts(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double a = static_cast<double>(i) / (grid_size - 1);
    pts[i] = {a, (*this)(a)};
  }
  return pts;
}

std::string TradeoffCurve::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  if (kind_ == CurveKind::kGaussian) params["mu"] = mu_;
  if (kind_ == CurveKind::kEpsDelta) {
    params["eps"] = eps_;
    params["delta"] = delta_;
  }
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : sample()) {
    points.push_back({p.alpha, p.beta});
  }
  const nlohmann::json j = {{"kind", kind_name(kind_)},
                            {"params", params},
                            {"points", points},
                            {"meta", meta_}};
  return j.dump();
}

TradeoffCurve TradeoffCurve::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  TradeoffCurve c;
  if (kind == "identity") {
    c = identity();
  } else if (kind == "gaussian") {
    c = gaussian(j.at("params").at("mu").get<double>());
  } else if (kind == "eps_delta") {
    c = eps_delta(j.at("params").at("eps").get<double>(),
                  j.at("params").at("delta").get<double>());
  } else if (kind == "grid") {
    std::vector<CurvePoint> pts;
    for (const auto& p : j.at("points")) {
      pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    c = grid(std::move(pts), "");
  } else {
    throw InvalidParameterError("unknown curve kind: " + kind);
  }
  if (j.contains("meta")) c.set_meta(j.at("meta").get<std::string>());
  return c;
}

std::string TradeoffCurve::to_csv(int grid_size) const {
  std::string out = "alpha,beta\n";
  char buf[64];
  for (const auto& p : sample(grid_size)) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.alpha, p.beta);
    out += buf;
  }
  return out;
}

void check_curve(const TradeoffCurve& curve, double tol, int grid_size) {
  const auto pts = curve.sample(grid_size);
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (p.beta < -tol || p.beta > 1.0 + tol) {
      throw InvalidParameterError("curve: beta outside [0,1]");
    }
    if (p.beta > 1.0 - p.alpha + tol) {
      throw InvalidParameterError("curve: beta exceeds ID");
    }
    if (i > 0 && pts[i].beta > pts[i - 1].beta + tol) {
      throw InvalidParameterError("curve: beta increases");
    }
  }
  // Chord slopes must be non-decreasing.
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < pts.size(); ++i) {
    const double da = pts[i].alpha - pts[i - 1].alpha;
    if (da <= 0.0) continue;
    const double slope = (pts[i].beta - pts[i - 1].beta) / da;
    if (slope < prev_slope - tol / da) {
      throw InvalidParameterError("curve: not convex");
    }
    prev_slope = slope;
  }
}

TradeoffCurve gdp_curve(double mu) {
  if (!std::isfinite(mu) || mu < 0.0) {
    throw InvalidParameterError("gdp_curve: mu must be finite and >= 0");
  }
  if (mu == 0.0) return TradeoffCurve::identity();
  return TradeoffCurve::gaussian(mu);
}

TradeoffCurve eps_delta_curve(double eps, double delta) {
  if (!std::isfinite(eps) || eps < 0.0) {
    throw InvalidParameterError("eps_delta_curve: eps must be >= 0");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidParameterError("eps_delta_curve: delta must be in [0,1]");
  }
  return TradeoffCurve::eps_delta(eps, delta);
}

void check_pair(const GaussianPair& pair) {
  if (!std::isfinite(pair.mu) || pair.mu < 0.0) {
    throw InvalidParameterError("GaussianPair: mu must be finite and >= 0");
  }
  if (!(pair.sigma > 0.0 && pair.sigma <= 1.0)) {
    throw InvalidParameterError("GaussianPair: sigma must be in (0,1]");
  }
}

double np_gaussian_pair(const GaussianPair& pair, double alpha) {
  check_pair(pair);
  require_alpha(alpha);
  if (pair.sigma == 1.0) return eval_gaussian(pair.mu, alpha);
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return 0.0;

  const double z = pair.mu / (1.0 - pair.sigma * pair.sigma);
  // Mass of [z-t, z+t] under N(0,1); written with survival functions so the
  // difference stays accurate when z is large.
  const auto region_mass = [z](double t) {
    return norm_sf(z - t) - norm_sf(z + t);
  };

  double t_max = 1.0;
  int grow = 0;
  while (region_mass(t_max) < alpha) {
    t_max *= 2.0;
    if (++grow > 200) {
      throw NumericalError("np_gaussian_pair: failed to bracket the region");
    }
  }
  double lo = 0.0, hi = t_max;
  double t = 0.5 * (lo + hi);
  bool converged = false;
  for (int it = 0; it < 500; ++it) {
    t = 0.5 * (lo + hi);
    const double m = region_mass(t);
    if (std::fabs(m - alpha) <= 1e-12) {
      converged = true;
      break;
    }
    (m < alpha ? lo : hi) = t;
  }
  if (!converged && std::fabs(region_mass(t) - alpha) > 1e-10) {
    throw NumericalError("np_gaussian_pair: bisection did not converge");
  }
  const double s = pair.sigma;
  return clamp01(norm_cdf((z - t - pair.mu) / s) +
                 norm_sf((z + t - pair.mu) / s));
}

TradeoffCurve invert(const TradeoffCurve& curve) {
  switch (curve.kind()) {
    case CurveKind::kIdentity:
    case CurveKind::kGaussian:
    case CurveKind::kEpsDelta:
      return curve;  // symmetric closed forms
    case CurveKind::kGrid:
      break;
  }
  // f^-1(alpha) = inf{ t : f(t) <= alpha }, computed by inverting the
  // piecewise-linear grid.
  const auto& pts = curve.points();
  std::vector<CurvePoint> out;
  out.reserve(pts.size());
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / (n - 1);
    // Smallest t with f(t) <= a. Beta is non-increasing in alpha, so
    // binary-search the first point with beta <= a, then interpolate.
    int lo = 0, hi = n - 1;
    if (pts[0].beta <= a) {
      out.push_back({a, pts[0].alpha});
      continue;
    }
    if (pts[n - 1].beta > a) {
      out.push_back({a, 1.0});
      continue;
    }
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (pts[mid].beta > a ? lo : hi) = mid;
    }
    const double db = pts[hi].beta - pts[lo].beta;
    double t = pts[hi].alpha;
    if (db < 0.0) {
      const double frac = (a - pts[lo].beta) / db;
      t = pts[lo].alpha + frac * (pts[hi].alpha - pts[lo].alpha);
    }
    out.push_back({a, t});
  }
  return TradeoffCurve::grid(std::move(out),
                             "invert(" + curve.meta() + ")");
}

TradeoffCurve symmetrize(const TradeoffCurve& curve) {
  switch (curve.kind()) {
    case CurveKind::kIdentity:
    case CurveKind::kGaussian:
    case CurveKind::kEpsDelta:
      return curve;
    case CurveKind::kGrid:
      break;
  }
  const TradeoffCurve inv = invert(curve);
  std::vector<CurvePoint> out;
  out.reserve(kDefaultGridSize);
  for (int i = 0; i < kDefaultGridSize; ++i) {
    const double a = static_cast<double>(i) / (kDefaultGridSize - 1);
    out.push_back({a, std::max(curve(a), inv(a))});
  }
  return TradeoffCurve::grid(std::move(out),
                             "symmetrize(" + curve.meta() + ")");
}

TradeoffCurve mix(const std::vector<double>& weights,
                  const std::vector<TradeoffCurve>& curves) {
  if (weights.size() != curves.size() || weights.empty()) {
    throw InvalidParameterError("mix: weights and curves must match");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidParameterError("mix: negative weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw InvalidParameterError("mix: weights must sum to 1");
  }
  // A unit weight returns its curve unchanged (exactness at q in {0,1}).
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 1.0) return curves[i];
  }
  std::vector<CurvePoint> out;
  out.reserve(kDefaultGridSize);
  for (int i = 0; i < kDefaultGridSize; ++i) {
    const double a = static_cast<double>(i) / (kDefaultGridSize - 1);
    double beta = 0.0;
    for (size_t k = 0; k < weights.size(); ++k) beta += weights[k] * curves[k](a);
    out.push_back({a, beta});
  }
  return TradeoffCurve::grid(std::move(out), "mix");
}

namespace {

// Golden-section maximization of a unimodal-enough objective on [lo, hi];
// both delta_of_eps branches are piecewise-smooth in alpha.
template <typename Fn>
double golden_max(Fn&& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 80 && (b - a) > 1e-14; ++i) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

template <typename Fn>
double grid_sup_refined(Fn&& f, int grid_size) {
  double best = -std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int i = 0; i < grid_size; ++i) {
    const double a = static_cast<double>(i) / (grid_size - 1);
    const double v = f(a);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  const double lo = std::max(0.0, (arg - 1.0) / (grid_size - 1));
  const double hi = std::min(1.0, (arg + 1.0) / (grid_size - 1));
  return std::max(best, golden_max(f, lo, hi));
}

}  // namespace

double delta_of_eps(const TradeoffCurve& curve, double eps) {
  if (!std::isfinite(eps) || eps < 0.0) {
    throw InvalidParameterError("delta_of_eps: eps must be >= 0");
  }
  const double e = std::exp(eps);
  const double s1 = grid_sup_refined(
      [&](double a) { return 1.0 - e * a - curve(a); }, kDefaultGridSize);
  const double s2 = grid_sup_refined(
      [&](double a) { return 1.0 - a - e * curve(a); }, kDefaultGridSize);
  return std::max(0.0, std::max(s1, s2));
}

double eps_of_delta(const TradeoffCurve& curve, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidParameterError("eps_of_delta: delta must be in [0,1]");
  }
  if (delta_of_eps(curve, 0.0) <= delta) return 0.0;
  double hi = 1.0;
  int grow = 0;
  while (delta_of_eps(curve, hi) > delta) {
    hi *= 2.0;
    if (++grow > 60) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int i = 0; i < 100 && hi - lo > 1e-10; ++i) {
    const double mid = 0.5 * (lo + hi);
    (delta_of_eps(curve, mid) > delta ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace fdp
