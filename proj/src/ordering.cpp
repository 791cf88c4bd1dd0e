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

#include "abcpriors/ordering.hpp"

#include <algorithm>
#include <cmath>

#include "abcpriors/kernels.hpp"

namespace abcpriors {

const char* to_string(LrRelation r) {
  switch (r) {
    case LrRelation::LeqLr: return "leq_lr";
    case LrRelation::GeqLr: return "geq_lr";
    case LrRelation::Equal: return "equal";
    case LrRelation::Incomparable: return "incomparable";
  }
  return "?";
}

namespace {

// Fraction of a density's mass covered by the grid, judged against the same
// density on a 3x-wide grid with the same spacing.
double grid_coverage(const Density& d, const GridSpec& grid) {
  const GridAxis& ax = grid.axes[0];
  const double span = ax.hi - ax.lo;
  GridSpec wide(ax.lo - span, ax.hi + span, 3 * (ax.points - 1) + 1);
  const double log_mass = log_quadrature(d.log_pdf, grid);
  const double log_wide = log_quadrature(d.log_pdf, wide);
  return std::exp(log_mass - log_wide);
}

void require_coverage(const Density& d, const GridSpec& grid, const char* who) {
  if (grid_coverage(d, grid) < 1.0 - 1e-6)
    throw std::invalid_argument(std::string(who) +
                                ": grid too narrow, it misses >= 1e-6 of a density's mass");
}

std::vector<double> eval_log_on_grid(const Density& d, const GridSpec& grid) {
  const std::size_t n = grid.total_points();
  std::vector<double> out(n);
  kernels::transform_indexed(n, out.data(), [&](std::size_t i) {
    const double x = grid.axes[0].value(static_cast<int>(i));
    return d.log_pdf(ParamView(&x, 1));
  });
  return out;
}

}  // namespace

OrderingVerdict lr_order(const Density& d1, const Density& d2, const GridSpec& grid,
                         double tol) {
  if (grid.dim() != 1 || d1.dim != 1 || d2.dim != 1)
    throw std::invalid_argument("lr_order: univariate densities only");
  require_coverage(d1, grid, "lr_order");
  require_coverage(d2, grid, "lr_order");

  const auto l1 = eval_log_on_grid(d1, grid);
  const auto l2 = eval_log_on_grid(d2, grid);
  const std::size_t n = l1.size();
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) ratio[i] = l2[i] - l1[i];

  OrderingVerdict verdict;
  const auto [mn, mx] = std::minmax_element(ratio.begin(), ratio.end());
  if (*mx - *mn <= 2.0 * tol) {
    verdict.relation = LrRelation::Equal;
    verdict.max_ratio_slope_violation = 0.0;
    return verdict;
  }

  double worst_down = 0.0, worst_up = 0.0;
  std::size_t at_down = 0, at_up = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double diff = ratio[i + 1] - ratio[i];
    if (-diff > worst_down) {
      worst_down = -diff;
      at_down = i;
    }
    if (diff > worst_up) {
      worst_up = diff;
      at_up = i;
    }
  }
  if (worst_down <= tol) {
    verdict.relation = LrRelation::LeqLr;
    verdict.max_ratio_slope_violation = worst_down;
  } else if (worst_up <= tol) {
    verdict.relation = LrRelation::GeqLr;
    verdict.max_ratio_slope_violation = worst_up;
  } else {
    verdict.relation = LrRelation::Incomparable;
    verdict.max_ratio_slope_violation = std::max(worst_down, worst_up);
    verdict.witness = std::make_pair(grid.axes[0].value(static_cast<int>(at_down)),
                                     grid.axes[0].value(static_cast<int>(at_up)));
  }
  return verdict;
}

ChainResult class_order_chain(const PriorClass& cls, std::vector<double> ts,
                              const GridSpec& grid, double tol) {
  if (cls.tilt.dim != 1 || cls.base.dim != 1)
    throw std::invalid_argument("class_order_chain: univariate classes only");
  if (ts.size() < 2) throw std::invalid_argument("class_order_chain: need at least two ts");
  if (!std::is_sorted(ts.begin(), ts.end()))
    throw std::invalid_argument("class_order_chain: ts must be sorted");

  // Direction of h over the grid (sign convention folded in).
  double h_lo, h_hi;
  {
    double buf[1];
    const double lo = grid.axes[0].lo, hi = grid.axes[0].hi;
    cls.tilt.h(ParamView(&lo, 1), std::span<double>(buf, 1));
    h_lo = cls.sign * buf[0];
    cls.tilt.h(ParamView(&hi, 1), std::span<double>(buf, 1));
    h_hi = cls.sign * buf[0];
  }
  ChainResult result;
  result.tilt_increasing = h_hi >= h_lo;

  std::vector<Density> members;
  members.reserve(ts.size());
  for (double t : ts) members.push_back(member_density(make_member(cls, {t})));
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    result.verdicts.push_back(lr_order(members[i], members[i + 1], grid, tol));

  const double eps = cls.epsilon[0];
  if (result.tilt_increasing) {
    result.lower_bound = make_member(cls, {-eps});
    result.upper_bound = make_member(cls, {eps});
  } else {
    result.lower_bound = make_member(cls, {eps});
    result.upper_bound = make_member(cls, {-eps});
  }
  return result;
}

Mtp2Result mtp2_check(const Density& d,
                      const std::vector<std::pair<ParamPoint, ParamPoint>>& pairs,
                      double tol) {
  if (d.dim < 2)
    throw std::invalid_argument("mtp2_check: univariate density (MTP2 is trivial, use lr_order)");
  Mtp2Result result;
  const std::size_t dim = static_cast<std::size_t>(d.dim);
  std::vector<double> margins(pairs.size());
  kernels::transform_indexed(pairs.size(), margins.data(), [&](std::size_t i) {
    const auto& [a, b] = pairs[i];
    std::vector<double> join(dim), meet(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      join[k] = std::max(a.coords[k], b.coords[k]);
      meet[k] = std::min(a.coords[k], b.coords[k]);
    }
    return d.log_pdf(join) + d.log_pdf(meet) - d.log_pdf(a.view()) - d.log_pdf(b.view());
  });
  // serial scan keeps the reported worst pair deterministic
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (margins[i] < result.worst_margin) {
      result.worst_margin = margins[i];
      if (margins[i] < -tol) {
        result.holds = false;
        result.witness = pairs[i];
      }
    }
  }
  return result;
}

std::vector<std::pair<ParamPoint, ParamPoint>> mtp2_sample_pairs(const Density& d,
                                                                 std::size_t count,
                                                                 RngSeed seed) {
  if (!d.support) throw std::invalid_argument("mtp2_sample_pairs: density has no support box");
  std::vector<std::pair<ParamPoint, ParamPoint>> pairs;
  pairs.reserve(count);
  const std::size_t dim = d.support->lo.size();
  for (std::size_t i = 0; i < count; ++i) {
    Prng gen = substream(seed, 37, i);
    std::vector<double> a(dim), b(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      a[k] = gen.uniform(d.support->lo[k], d.support->hi[k]);
      b[k] = gen.uniform(d.support->lo[k], d.support->hi[k]);
    }
    pairs.emplace_back(ParamPoint(std::move(a)), ParamPoint(std::move(b)));
  }
  return pairs;
}

TiltBand tilt_band(const TiltFn& h, double eps, const GridSpec& grid) {
  if (h.dim != 1 || grid.dim() != 1)
    throw std::invalid_argument("tilt_band: univariate tilts only");
  TiltBand band;
  band.thetas = grid.axis_values(0);
  band.ts = {-eps, -eps / 2.0, 0.0, eps / 2.0, eps};
  const std::size_t n = band.thetas.size();

  std::vector<double> hvals(n);
  kernels::transform_indexed(n, hvals.data(), [&](std::size_t i) {
    double buf[1];
    h.h(ParamView(&band.thetas[i], 1), std::span<double>(buf, 1));
    return buf[0];
  });

  band.bands.assign(band.ts.size(), std::vector<double>(n));
  for (std::size_t j = 0; j < band.ts.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) band.bands[j][i] = std::exp(hvals[i] * band.ts[j]);

  for (std::size_t i = 0; i < n && band.monotone_in_t; ++i) {
    for (std::size_t j = 0; j + 1 < band.ts.size(); ++j) {
      const double a = band.bands[j][i], b = band.bands[j + 1][i];
      const bool ok = hvals[i] > 0.0 ? b >= a : (hvals[i] < 0.0 ? b <= a : b == a);
      if (!ok) {
        band.monotone_in_t = false;
        band.violation_theta = band.thetas[i];
        break;
      }
    }
  }
  return band;
}

}  // namespace abcpriors
