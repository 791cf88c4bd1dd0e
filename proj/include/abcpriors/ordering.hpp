// Copyright 2026 The abcpriors Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Numerical checks of the stochastic-ordering properties of the tilted
// classes: likelihood-ratio ordering on a grid, the MTP2 condition, and the
// monotonicity of the bands exp(h(theta) t) in t.

#include "abcpriors/prior_classes.hpp"

namespace abcpriors {

enum class LrRelation { LeqLr, GeqLr, Equal, Incomparable };

struct OrderingVerdict {
  LrRelation relation = LrRelation::Incomparable;
  /// Present iff incomparable: grid points where the log-ratio slope turns.
  std::optional<std::pair<double, double>> witness;
  double max_ratio_slope_violation = 0.0;
};

const char* to_string(LrRelation r);

/// Likelihood-ratio order of two univariate densities on a grid: d1 <=lr d2
/// iff log d2 - log d1 is nondecreasing across the grid (slack `tol` on
/// successive differences). Errors when the grid misses >= 1e-6 of either
/// density's mass.
OrderingVerdict lr_order(const Density& d1, const Density& d2, const GridSpec& grid,
                         double tol = 1e-9);

struct ChainResult {
  std::vector<OrderingVerdict> verdicts;  // one per consecutive pair of ts
  TiltedPrior lower_bound;                // member at -eps (h increasing) or +eps
  TiltedPrior upper_bound;
  bool tilt_increasing = true;
};

/// Orders consecutive members of a univariate class along sorted tilt values.
/// With h increasing every verdict must be LeqLr; with h decreasing, GeqLr.
ChainResult class_order_chain(const PriorClass& cls, std::vector<double> ts,
                              const GridSpec& grid, double tol = 1e-9);

struct Mtp2Result {
  bool holds = true;
  double worst_margin = 0.0;  // most negative slack seen (0 when all pass)
  std::optional<std::pair<ParamPoint, ParamPoint>> witness;
};

/// Checks log pi(a) + log pi(b) <= log pi(a v b) + log pi(a ^ b) + tol on the
/// given pairs (v/^ are component-wise max/min). Univariate input is an error;
/// use lr_order there.
Mtp2Result mtp2_check(const Density& d,
                      const std::vector<std::pair<ParamPoint, ParamPoint>>& pairs,
                      double tol = 1e-9);

/// Seeded helper producing `count` support-box pairs for mtp2_check.
std::vector<std::pair<ParamPoint, ParamPoint>> mtp2_sample_pairs(const Density& d,
                                                                 std::size_t count,
                                                                 RngSeed seed);

struct TiltBand {
  std::vector<double> thetas;
  std::vector<double> ts;                  // {-eps, -eps/2, 0, eps/2, eps}
  std::vector<std::vector<double>> bands;  // bands[j][i] = exp(h(theta_i) t_j)
  bool monotone_in_t = true;
  std::optional<double> violation_theta;
};

/// Band table exp(h(theta) t) for t in {-eps, -eps/2, 0, eps/2, eps}; checks
/// pointwise monotonicity in t (increasing where h > 0, decreasing where
/// h < 0, constant 1 where h = 0).
TiltBand tilt_band(const TiltFn& h, double eps, const GridSpec& grid);

}  // namespace abcpriors
