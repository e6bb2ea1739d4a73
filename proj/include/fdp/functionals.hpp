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
// Per-copy moment functionals of the symmetrized unequal-variance Gaussian
// trade-off function, and the central-limit sandwich they drive.
//
// For the pair (N(0,1), N(0, sigma^2)) with sigma in (0,1), the optimal test
// admits the parametrization alpha(t) = 2 Phi(t) - 1 with
// f*'(alpha(t)) = -(1/sigma) exp(-(1-sigma^2)/(2 sigma^2) t^2). The moments
// of fbar = max{f*, f*^-1} are integrals of powers of log|fbar'| over [0,1],
// evaluated by splitting at the crossings of f* and f*^-1 and changing
// variables to t (d alpha = 2 phi(t) dt on the f* branch, the mirrored
// substitution on the inverse branch).

#ifndef FDP_FUNCTIONALS_HPP_
#define FDP_FUNCTIONALS_HPP_

#include <cstdint>

#include "fdp/curve.hpp"

namespace fdp {

// kl = -int log|fbar'|, k2 = int log^2|fbar'|, k3 = int |log|fbar'||^3,
// k3bar = int |log|fbar'| + kl|^3 (the centered third absolute moment).
struct Functionals {
  double kl = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k3bar = 0.0;
};

// Per-copy moments for a zero-mean pair; sigma = 1 gives fbar = ID and all
// zeros. Throws InvalidParameterError for mu != 0 or sigma outside (0,1],
// NumericalError if the quadrature fails to converge.
Functionals functionals(const GaussianPair& pair, int quadrature_points = 4096);

// mu and gamma of the sandwich for `copies` identical copies:
//   mu = 2 m kl / sqrt(m k2 - m kl^2),
//   gamma = 0.56 m k3bar / (m k2 - m kl^2)^{3/2}.
struct CltParams {
  double mu = 0.0;
  double gamma = 0.0;
};

// Throws AssumptionViolatedError when the privacy-loss variance is zero
// (sigma = 1; the composition needs no CLT) or when gamma >= 1/2.
CltParams clt_params(const Functionals& f, uint64_t copies);

// (G_mu(alpha+gamma)-gamma, G_mu(alpha-gamma)+gamma) for `copies` identical
// copies of the symmetrized pair curve. alpha must lie in [gamma, 1-gamma].
struct CltBounds {
  double lower = 0.0;
  double upper = 0.0;
};

CltBounds clt_bounds(const GaussianPair& pair, uint64_t copies, double alpha);

// The upper envelope G_mu(alpha-gamma)+gamma as a curve (clamped to valid
// trade-off range). Used to visualize large tensor products.
TradeoffCurve clt_upper_curve(const GaussianPair& pair, uint64_t copies);

}  // namespace fdp

#endif  // FDP_FUNCTIONALS_HPP_
