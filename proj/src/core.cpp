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

#include "abcpriors/core.hpp"

#include <atomic>
#include <cmath>

#include "abcpriors/kernels.hpp"

namespace abcpriors {

namespace {
void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}
}  // namespace

ParamPoint::ParamPoint(std::vector<double> c) : coords(std::move(c)) {
  if (coords.empty()) throw std::invalid_argument("ParamPoint: dimension must be >= 1");
  require_finite(coords, "ParamPoint");
}

DataVector::DataVector(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) throw std::invalid_argument("DataVector: must hold at least one value");
  require_finite(values, "DataVector");
}

SuffStat::SuffStat(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) throw std::invalid_argument("SuffStat: must hold at least one value");
  require_finite(values, "SuffStat");
}

GridSpec::GridSpec(std::vector<GridAxis> a) : axes(std::move(a)) {
  for (const auto& ax : axes) {
    if (!(ax.lo < ax.hi)) throw std::invalid_argument("GridSpec: lower bound must be < upper");
    if (ax.points < 2) throw std::invalid_argument("GridSpec: need at least 2 points per axis");
  }
}

std::size_t GridSpec::total_points() const {
  std::size_t n = 1;
  for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.points);
  return n;
}

void GridSpec::unflatten(std::size_t flat, std::span<double> out) const {
  for (int d = dim() - 1; d >= 0; --d) {
    const auto p = static_cast<std::size_t>(axes[d].points);
    out[d] = axes[d].value(static_cast<int>(flat % p));
    flat /= p;
  }
}

std::vector<double> GridSpec::axis_values(int axis) const {
  const auto& ax = axes.at(static_cast<std::size_t>(axis));
  std::vector<double> v(static_cast<std::size_t>(ax.points));
  for (int i = 0; i < ax.points; ++i) v[static_cast<std::size_t>(i)] = ax.value(i);
  return v;
}

std::uint64_t Density::next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

GridSpec default_grid(const Density& d, int points_per_axis) {
  if (!d.support) throw std::invalid_argument("default_grid: density has no support box");
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < d.support->lo.size(); ++i) {
    if (!std::isfinite(d.support->lo[i]) || !std::isfinite(d.support->hi[i]))
      throw std::invalid_argument("default_grid: unbounded support axis");
    axes.push_back(GridAxis{d.support->lo[i], d.support->hi[i], points_per_axis});
  }
  return GridSpec(std::move(axes));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  double m = -INFINITY;
  for (double v : values) {
    if (std::isnan(v) || v == INFINITY)
      throw std::invalid_argument("log_sum_exp: entries must lie in [-inf, inf)");
    if (v > m) m = v;
  }
  if (m == -INFINITY) throw numerical_error("log_sum_exp: empty mass");
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

WeightedSample normalize(WeightedSample sample) {
  const double lse = log_sum_exp(sample.log_weights);  // throws on zero total mass
  sample.weights.resize(sample.log_weights.size());
  for (std::size_t i = 0; i < sample.log_weights.size(); ++i) {
    sample.log_weights[i] -= lse;
    sample.weights[i] = std::exp(sample.log_weights[i]);
  }
  sample.normalized = true;
  return sample;
}

double ess(const WeightedSample& sample) {
  if (!sample.normalized) throw std::invalid_argument("ess: sample must be normalized");
  double sq = 0.0;
  for (double w : sample.weights) sq += w * w;
  return 1.0 / sq;
}

namespace {
// Composite trapezoid weight along one axis: h/2 at the ends, h inside.
double axis_weight(const GridAxis& ax, int i) {
  const double h = ax.step();
  return (i == 0 || i == ax.points - 1) ? 0.5 * h : h;
}
}  // namespace

double quadrature_expectation(const Density& density,
                              const std::function<double(ParamView)>& integrand,
                              const GridSpec& grid) {
  if (grid.dim() > 3)
    throw std::invalid_argument(
        "quadrature_expectation: tensor trapezoid supports dimension <= 3; "
        "use the Monte Carlo normalizer for higher dimensions");
  if (grid.dim() != density.dim)
    throw std::invalid_argument("quadrature_expectation: grid/density dimension mismatch");

  const std::size_t n = grid.total_points();
  std::vector<double> logs(n), values(n);
  kernels::transform_indexed(n, logs.data(), [&](std::size_t flat) {
    double pt[3];
    grid.unflatten(flat, std::span<double>(pt, static_cast<std::size_t>(grid.dim())));
    return density.log_pdf(ParamView(pt, static_cast<std::size_t>(grid.dim())));
  });
  double shift = -INFINITY;
  for (double v : logs)
    if (v > shift) shift = v;
  if (shift == -INFINITY) throw numerical_error("quadrature_expectation: density vanishes on grid");

  kernels::transform_indexed(n, values.data(), [&](std::size_t flat) {
    double pt[3];
    grid.unflatten(flat, std::span<double>(pt, static_cast<std::size_t>(grid.dim())));
    const ParamView theta(pt, static_cast<std::size_t>(grid.dim()));
    double w = 1.0;
    std::size_t rest = flat;
    for (int d = grid.dim() - 1; d >= 0; --d) {
      const auto p = static_cast<std::size_t>(grid.axes[static_cast<std::size_t>(d)].points);
      w *= axis_weight(grid.axes[static_cast<std::size_t>(d)], static_cast<int>(rest % p));
      rest /= p;
    }
    const double f = integrand(theta);
    if (!std::isfinite(f))
      throw numerical_error("quadrature_expectation: integrand not finite on grid");
    return w * f * std::exp(logs[flat] - shift);
  });
  double acc = 0.0;
  for (double v : values) acc += v;  // serial reduction, deterministic
  return acc * std::exp(shift);
}

double quadrature_mass(const Density& density, const GridSpec& grid) {
  return quadrature_expectation(density, [](ParamView) { return 1.0; }, grid);
}

double log_quadrature(const std::function<double(ParamView)>& log_integrand,
                      const GridSpec& grid) {
  if (grid.dim() > 3)
    throw std::invalid_argument("log_quadrature: tensor trapezoid supports dimension <= 3");
  const std::size_t n = grid.total_points();
  std::vector<double> logs(n);
  kernels::transform_indexed(n, logs.data(), [&](std::size_t flat) {
    double pt[3];
    grid.unflatten(flat, std::span<double>(pt, static_cast<std::size_t>(grid.dim())));
    return log_integrand(ParamView(pt, static_cast<std::size_t>(grid.dim())));
  });
  double shift = -INFINITY;
  for (double v : logs) {
    if (std::isnan(v)) throw numerical_error("log_quadrature: NaN integrand on grid");
    if (v > shift) shift = v;
  }
  if (shift == -INFINITY) throw numerical_error("log_quadrature: integrand vanishes on grid");
  double acc = 0.0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    double w = 1.0;
    std::size_t rest = flat;
    for (int d = grid.dim() - 1; d >= 0; --d) {
      const auto p = static_cast<std::size_t>(grid.axes[static_cast<std::size_t>(d)].points);
      w *= axis_weight(grid.axes[static_cast<std::size_t>(d)], static_cast<int>(rest % p));
      rest /= p;
    }
    acc += w * std::exp(logs[flat] - shift);
  }
  return shift + std::log(acc);
}

}  // namespace abcpriors
