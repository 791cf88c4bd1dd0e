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

// Kolmogorov distance K(pi, pi'_t) = sup_tau |CDF difference| between the base
// prior and tilted members, and its inversion to elicit epsilon from an
// acceptable prior distortion bound.

#include "abcpriors/prior_classes.hpp"

namespace abcpriors {

/// CDF of a (possibly unnormalized) univariate density by cumulative trapezoid
/// on the grid, normalized to end at 1.
std::vector<double> grid_cdf(const Density& d, const GridSpec& grid);

/// sup over the grid of |CDF(base) - CDF(member)|; result in [0, 1].
/// Errors when the grid misses >= 1e-6 of either density's mass.
double kolmogorov_distance(const Density& base, const TiltedPrior& member,
                           const GridSpec& grid);

struct DistanceCurve {
  std::vector<double> ts;
  std::vector<double> distances;
  GridSpec grid;
};

/// Distances at `num_t` equispaced tilts in [-eps, eps]; always includes t = 0
/// (num_t is rounded up to the next odd value).
DistanceCurve distance_curve(const PriorClass& cls, int num_t, const GridSpec& grid);

struct ElicitResult {
  double t_star = 0.0;
  /// True when K never reached kappa inside the bracket; t_star is the bracket top.
  bool reached_bracket_top = false;
  std::vector<double> probe_ts;  // the monotonicity probe, for diagnostics
  std::vector<double> probe_ks;
};

/// Largest t >= 0 with max(K(pi, pi'_{+t}), K(pi, pi'_{-t})) <= kappa, by
/// bisection to `tol` on t. `bracket_top` <= 0 selects the default bracket
/// [0, 10 * prior sd]. Non-monotone K over the probe raises numerical_error.
ElicitResult elicit_epsilon(const Density& base, const TiltFn& tilt, double kappa,
                            const GridSpec& grid, double tol = 1e-7,
                            double bracket_top = 0.0);

}  // namespace abcpriors
