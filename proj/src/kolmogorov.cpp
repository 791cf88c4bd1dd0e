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

#include "abcpriors/kolmogorov.hpp"

#include <algorithm>
#include <cmath>

#include "abcpriors/kernels.hpp"

namespace abcpriors {

namespace {

std::vector<double> grid_pdf_normalized(const Density& d, const GridSpec& grid,
                                        const char* who) {
  const std::size_t n = grid.total_points();
  std::vector<double> logs(n);
  kernels::transform_indexed(n, logs.data(), [&](std::size_t i) {
    const double x = grid.axes[0].value(static_cast<int>(i));
    return d.log_pdf(ParamView(&x, 1));
  });
  // coverage check against a 3x-wide grid, same spacing
  const GridAxis& ax = grid.axes[0];
  const double span = ax.hi - ax.lo;
  const GridSpec wide(ax.lo - span, ax.hi + span, 3 * (ax.points - 1) + 1);
  const double log_mass = log_quadrature(d.log_pdf, grid);
  const double log_wide = log_quadrature(d.log_pdf, wide);
  if (std::exp(log_mass - log_wide) < 1.0 - 1e-6)
    throw std::invalid_argument(std::string(who) +
                                ": grid too narrow, >= 1e-6 of the mass lies outside");
  std::vector<double> pdf(n);
  for (std::size_t i = 0; i < n; ++i) pdf[i] = std::exp(logs[i] - log_mass);
  return pdf;
}

std::vector<double> cumtrapz(const std::vector<double>& pdf, double h) {
  std::vector<double> cdf(pdf.size());
  cdf[0] = 0.0;
  for (std::size_t i = 1; i < pdf.size(); ++i)
    cdf[i] = cdf[i - 1] + 0.5 * h * (pdf[i - 1] + pdf[i]);
  return cdf;
}

}  // namespace

std::vector<double> grid_cdf(const Density& d, const GridSpec& grid) {
  if (grid.dim() != 1 || d.dim != 1)
    throw std::invalid_argument("grid_cdf: univariate only");
  return cumtrapz(grid_pdf_normalized(d, grid, "grid_cdf"), grid.axes[0].step());
}

double kolmogorov_distance(const Density& base, const TiltedPrior& member,
                           const GridSpec& grid) {
  if (grid.dim() != 1 || base.dim != 1)
    throw std::invalid_argument("kolmogorov_distance: univariate only");
  const auto base_pdf = grid_pdf_normalized(base, grid, "kolmogorov_distance");
  const auto member_pdf =
      grid_pdf_normalized(member_density(member), grid, "kolmogorov_distance");
  const double h = grid.axes[0].step();
  const auto base_cdf = cumtrapz(base_pdf, h);
  const auto member_cdf = cumtrapz(member_pdf, h);
  double sup = 0.0;
  for (std::size_t i = 0; i < base_cdf.size(); ++i)
    sup = std::max(sup, std::fabs(base_cdf[i] - member_cdf[i]));
  return std::min(sup, 1.0);
}

DistanceCurve distance_curve(const PriorClass& cls, int num_t, const GridSpec& grid) {
  if (cls.tilt.dim != 1)
    throw std::invalid_argument("distance_curve: univariate classes only");
  if (num_t < 3) num_t = 3;
  if (num_t % 2 == 0) ++num_t;  // force t = 0 onto the curve
  const double eps = cls.epsilon.at(0);
  DistanceCurve curve;
  curve.grid = grid;
  curve.ts.resize(static_cast<std::size_t>(num_t));
  curve.distances.resize(static_cast<std::size_t>(num_t));
  for (int i = 0; i < num_t; ++i)
    curve.ts[static_cast<std::size_t>(i)] =
        -eps + 2.0 * eps * static_cast<double>(i) / static_cast<double>(num_t - 1);
  curve.ts[static_cast<std::size_t>(num_t / 2)] = 0.0;
  for (std::size_t i = 0; i < curve.ts.size(); ++i)
    curve.distances[i] =
        kolmogorov_distance(cls.base, make_member(cls, {curve.ts[i]}), grid);
  return curve;
}

ElicitResult elicit_epsilon(const Density& base, const TiltFn& tilt, double kappa,
                            const GridSpec& grid, double tol, double bracket_top) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("elicit_epsilon: kappa must lie in (0, 1)");
  if (tilt.dim != 1)
    throw std::invalid_argument("elicit_epsilon: univariate tilts only");

  if (bracket_top <= 0.0) {
    // default bracket: 10 prior standard deviations
    const double mass = quadrature_mass(base, grid);
    const double mean = quadrature_expectation(
                            base, [](ParamView th) { return th[0]; }, grid) / mass;
    const double second = quadrature_expectation(
                              base, [&](ParamView th) { return th[0] * th[0]; }, grid) / mass;
    bracket_top = 10.0 * std::sqrt(std::max(second - mean * mean, 0.0));
  }
  if (!(bracket_top > 0.0))
    throw std::invalid_argument("elicit_epsilon: empty bisection bracket");

  PriorClass cls = make_class(ClassKind::ABC, base, tilt, {bracket_top});
  auto k_both = [&](double t) -> double {
    if (t == 0.0) return 0.0;
    const double kp = kolmogorov_distance(base, make_member(cls, {t}), grid);
    const double km = kolmogorov_distance(base, make_member(cls, {-t}), grid);
    return std::max(kp, km);
  };

  ElicitResult result;
  // monotonicity probe over the bracket
  constexpr int kProbes = 9;
  for (int i = 0; i <= kProbes; ++i) {
    const double t = bracket_top * static_cast<double>(i) / static_cast<double>(kProbes);
    result.probe_ts.push_back(t);
    result.probe_ks.push_back(k_both(t));
  }
  for (std::size_t i = 0; i + 1 < result.probe_ks.size(); ++i)
    if (result.probe_ks[i + 1] < result.probe_ks[i] - 1e-9)
      throw numerical_error("elicit_epsilon: K(t) is not monotone over the bracket");

  if (result.probe_ks.back() <= kappa) {
    result.t_star = bracket_top;
    result.reached_bracket_top = true;
    return result;
  }

  double lo = 0.0, hi = bracket_top;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (k_both(mid) <= kappa)
      lo = mid;
    else
      hi = mid;
  }
  result.t_star = lo;
  return result;
}

}  // namespace abcpriors
