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

#include "fdp/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fdp/errors.hpp"
#include "fdp/special.hpp"

namespace fdp {

namespace {

// f*(alpha) for the pair (N(0,1), N(0, sigma^2)), via alpha = 2 Phi(t) - 1.
double fstar(double alpha, double sigma) {
  if (alpha >= 1.0) return 0.0;
  const double t = norm_quantile(0.5 * (1.0 + alpha));
  return 2.0 * norm_sf(t / sigma);
}

// Functional inverse of f*: solve f*(x) = alpha.
double fstar_inv(double alpha, double sigma) {
  if (alpha <= 0.0) return 1.0;
  const double t = sigma * norm_quantile(1.0 - 0.5 * alpha);
  return 2.0 * norm_cdf(t) - 1.0;
}

// Composite Simpson over [lo, hi] with `panels` panels.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               int panels) {
  if (hi <= lo) return 0.0;
  const int n = std::max(2, panels + (panels % 2));
  const double h = (hi - lo) / n;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) {
    sum += f(lo + i * h) * ((i % 2) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

struct BranchInterval {
  double a, b;    // alpha interval
  bool on_fstar;  // which branch fbar takes here
};

// Splits [0,1] at the crossings of f* and f*^-1 (sign changes of
// h = f* - f*^-1 on a 1e4 grid, refined by bisection; the zero set of the
// analytic h is discrete).
std::vector<BranchInterval> branch_intervals(double sigma) {
  const auto h = [sigma](double a) {
    return fstar(a, sigma) - fstar_inv(a, sigma);
  };
  constexpr int kGrid = 10000;
  std::vector<double> cuts{0.0};
  double prev_a = 1.0 / kGrid;
  double prev_h = h(prev_a);
  for (int i = 2; i < kGrid; ++i) {
    const double a = static_cast<double>(i) / kGrid;
    const double ha = h(a);
    if ((prev_h < 0.0 && ha > 0.0) || (prev_h > 0.0 && ha < 0.0)) {
      double lo = prev_a, hi = a, flo = prev_h;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = h(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev_a = a;
    prev_h = ha;
  }
  cuts.push_back(1.0);
  std::vector<BranchInterval> out;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    out.push_back({cuts[i], cuts[i + 1], h(mid) >= 0.0});
  }
  return out;
}

// Integrates g(log|fbar'(alpha)|) d alpha over the branch intervals using
// the t-parametrization: on the f* branch alpha = 2 Phi(t) - 1,
// d alpha = 2 phi(t) dt and log|f*'| = log(1/sigma) - c t^2; on the inverse
// branch the mirrored substitution s = sigma Phi^-1(1 - alpha/2) gives
// d alpha = (2/sigma) phi(s/sigma) ds and log|(f*^-1)'| = log(sigma) + c s^2.
double integrate_moment(const std::vector<BranchInterval>& intervals,
                        double sigma, int panels,
                        const std::function<double(double)>& g) {
  const double c = (1.0 - sigma * sigma) / (2.0 * sigma * sigma);
  constexpr double kTailCut = 40.0;
  double total = 0.0;
  for (const auto& iv : intervals) {
    if (iv.on_fstar) {
      const double t_lo = norm_quantile(0.5 * (1.0 + iv.a));
      const double t_hi =
          iv.b >= 1.0 ? kTailCut : norm_quantile(0.5 * (1.0 + iv.b));
      total += simpson(
          [&](double t) {
            return g(std::log(1.0 / sigma) - c * t * t) * 2.0 * norm_pdf(t);
          },
          t_lo, std::min(t_hi, kTailCut), panels);
    } else {
      const double s_hi =
          iv.a <= 0.0 ? kTailCut * sigma : sigma * norm_quantile(1.0 - 0.5 * iv.a);
      const double s_lo =
          iv.b >= 1.0 ? 0.0 : sigma * norm_quantile(1.0 - 0.5 * iv.b);
      total += simpson(
          [&](double s) {
            return g(std::log(sigma) + c * s * s) * (2.0 / sigma) *
                   norm_pdf(s / sigma);
          },
          s_lo, std::min(s_hi, kTailCut * sigma), panels);
    }
  }
  return total;
}

Functionals compute_at(const std::vector<BranchInterval>& intervals,
                       double sigma, int panels) {
  Functionals f;
  f.kl = -integrate_moment(intervals, sigma, panels,
                           [](double L) { return L; });
  f.k2 = integrate_moment(intervals, sigma, panels,
                          [](double L) { return L * L; });
  f.k3 = integrate_moment(intervals, sigma, panels, [](double L) {
    return std::fabs(L) * L * L;
  });
  const double kl = f.kl;
  f.k3bar = integrate_moment(intervals, sigma, panels, [kl](double L) {
    const double d = std::fabs(L + kl);
    return d * d * d;
  });
  return f;
}

}  // namespace

Functionals functionals(const GaussianPair& pair, int quadrature_points) {
  check_pair(pair);
  if (pair.mu != 0.0) {
    throw InvalidParameterError("functionals: pair must have mu = 0");
  }
  if (quadrature_points < 16) {
    throw InvalidParameterError("functionals: too few quadrature points");
  }
  if (pair.sigma == 1.0) return Functionals{};  // fbar = ID, |f'| = 1

  const auto intervals = branch_intervals(pair.sigma);
  const Functionals coarse = compute_at(intervals, pair.sigma, quadrature_points);
  const Functionals fine = compute_at(intervals, pair.sigma, 2 * quadrature_points);
  const auto rel = [](double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
  };
  if (rel(coarse.kl, fine.kl) > 1e-8 || rel(coarse.k2, fine.k2) > 1e-8 ||
      rel(coarse.k3, fine.k3) > 1e-8 || rel(coarse.k3bar, fine.k3bar) > 1e-8) {
    throw NumericalError("functionals: quadrature did not converge");
  }
  return fine;
}

CltParams clt_params(const Functionals& f, uint64_t copies) {
  if (copies < 1) throw InvalidParameterError("clt_params: copies must be >= 1");
  const double m = static_cast<double>(copies);
  const double var = m * f.k2 - m * f.kl * f.kl;
  if (!(var > 0.0)) {
    throw AssumptionViolatedError(
        "clt_params: zero privacy-loss variance (sigma = 1 composition needs "
        "no CLT)");
  }
  CltParams p;
  p.mu = 2.0 * m * f.kl / std::sqrt(var);
  p.gamma = 0.56 * m * f.k3bar / (var * std::sqrt(var));
  if (!(p.gamma < 0.5)) {
    throw AssumptionViolatedError("clt_params: Assume gamma < 1/2");
  }
  return p;
}

namespace {

double gmu(double mu, double alpha) {
  if (alpha <= 0.0) return 1.0;
  if (alpha >= 1.0) return 0.0;
  return norm_cdf(norm_quantile(1.0 - alpha) - mu);
}

}  // namespace

CltBounds clt_bounds(const GaussianPair& pair, uint64_t copies, double alpha) {
  const CltParams p = clt_params(functionals(pair), copies);
  if (!(alpha >= p.gamma && alpha <= 1.0 - p.gamma)) {
    throw InvalidParameterError(
        "clt_bounds: alpha must lie in [gamma, 1-gamma]");
  }
  return {gmu(p.mu, alpha + p.gamma) - p.gamma,
          gmu(p.mu, alpha - p.gamma) + p.gamma};
}

TradeoffCurve clt_upper_curve(const GaussianPair& pair, uint64_t copies) {
  const CltParams p = clt_params(functionals(pair), copies);
  // G_mu(alpha-gamma)+gamma exceeds ID near the endpoints; take the greatest
  // convex minorant of min(envelope, ID), which still dominates the (convex)
  // true curve and restores the trade-off invariants.
  std::vector<CurvePoint> pts;
  pts.reserve(kDefaultGridSize);
  for (int i = 0; i < kDefaultGridSize; ++i) {
    const double a = static_cast<double>(i) / (kDefaultGridSize - 1);
    const double env = gmu(p.mu, a - p.gamma) + p.gamma;
    pts.push_back({a, std::min(env, 1.0 - a)});
  }
  std::vector<CurvePoint> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& p1 = hull[hull.size() - 2];
      const auto& p2 = hull[hull.size() - 1];
      const double cross = (p2.alpha - p1.alpha) * (pt.beta - p1.beta) -
                           (pt.alpha - p1.alpha) * (p2.beta - p1.beta);
      if (cross < 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  std::vector<CurvePoint> out;
  out.reserve(kDefaultGridSize);
  size_t seg = 0;
  for (const auto& pt : pts) {
    while (seg + 1 < hull.size() && hull[seg + 1].alpha < pt.alpha) ++seg;
    double beta = hull[seg].beta;
    if (seg + 1 < hull.size()) {
      const double span = hull[seg + 1].alpha - hull[seg].alpha;
      if (span > 0.0) {
        beta = hull[seg].beta + (pt.alpha - hull[seg].alpha) / span *
                                    (hull[seg + 1].beta - hull[seg].beta);
      }
    }
    out.push_back({pt.alpha, beta});
  }
  auto curve = TradeoffCurve::grid(std::move(out), "clt_upper");
  return curve;
}

}  // namespace fdp
