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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcpriors/rng.hpp"

namespace abcpriors {

/// Thrown when a verified mathematical property fails (CLI exit code 2).
struct property_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a computation degenerates numerically (CLI exit code 3).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// View of one point in parameter space.
using ParamView = std::span<const double>;

/// A point theta in the parameter space (dimension >= 1, finite coordinates).
struct ParamPoint {
  std::vector<double> coords;

  explicit ParamPoint(std::vector<double> c);
  ParamPoint(std::initializer_list<double> c) : ParamPoint(std::vector<double>(c)) {}
  int dim() const { return static_cast<int>(coords.size()); }
  ParamView view() const { return coords; }
};

/// Observed or simulated dataset (length >= 1, finite values).
struct DataVector {
  std::vector<double> values;

  explicit DataVector(std::vector<double> v);
  DataVector(std::initializer_list<double> v) : DataVector(std::vector<double>(v)) {}
  int size() const { return static_cast<int>(values.size()); }
};

/// Value of a (possibly vector) sufficient statistic.
struct SuffStat {
  std::vector<double> values;

  explicit SuffStat(std::vector<double> v);
  SuffStat(std::initializer_list<double> v) : SuffStat(std::vector<double>(v)) {}
  int dim() const { return static_cast<int>(values.size()); }
  std::span<const double> view() const { return values; }
};

/// Per-dimension uniform grid; hosts quadrature and sup computations.
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;

  double step() const { return (hi - lo) / static_cast<double>(points - 1); }
  double value(int i) const { return lo + step() * static_cast<double>(i); }
};

struct GridSpec {
  std::vector<GridAxis> axes;

  GridSpec() = default;
  explicit GridSpec(std::vector<GridAxis> a);
  /// Convenience 1-D grid.
  GridSpec(double lo, double hi, int points) : GridSpec({GridAxis{lo, hi, points}}) {}

  int dim() const { return static_cast<int>(axes.size()); }
  std::size_t total_points() const;
  /// Coordinates of the flattened grid point `flat` (row-major over axes).
  void unflatten(std::size_t flat, std::span<double> out) const;
  std::vector<double> axis_values(int axis) const;
};

/// Axis-aligned box; `lo`/`hi` entries may be +/-infinity for declared-unbounded.
struct SupportBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// A (possibly unnormalized) density over parameter space, carried in log space.
struct Density {
  std::function<double(ParamView)> log_pdf;
  int dim = 1;
  bool normalized = false;
  /// Hyper-rectangle covering all but a negligible tail of the mass; used to
  /// build default grids. Absent means no usable default grid.
  std::optional<SupportBox> support;
  /// Optional direct sampler (writes `dim` coordinates).
  std::function<void(Prng&, std::span<double>)> sampler;
  /// Identity tag; copies compare equal, independently built densities do not.
  std::uint64_t id = next_id();

  static std::uint64_t next_id();
};

/// Default grid over the density's support box (`points` per axis).
GridSpec default_grid(const Density& d, int points_per_axis);

/// Particle set {(theta_i, w_i)}. Coordinates are stored flat, row-major.
struct WeightedSample {
  std::vector<double> coords;  // size() == size * dim
  int dim = 1;
  std::vector<double> log_weights;
  std::vector<double> weights;  // filled by normalize()
  bool normalized = false;
  std::uint64_t seed = 0;

  std::size_t size() const { return log_weights.size(); }
  ParamView point(std::size_t i) const {
    return ParamView(coords.data() + i * static_cast<std::size_t>(dim),
                     static_cast<std::size_t>(dim));
  }
};

/// log(sum(exp(values))) with max-shift. Throws numerical_error("empty mass")
/// when every entry is -inf.
double log_sum_exp(std::span<const double> values);

/// Self-normalizes the weights (sum to 1); invariant to additive shifts of the
/// log-weights and idempotent.
WeightedSample normalize(WeightedSample sample);

/// Effective sample size 1/sum(w_i^2) of a normalized sample; lies in [1, N].
double ess(const WeightedSample& sample);

/// Tensor-trapezoid estimate of integral of integrand(theta) * exp(log_pdf(theta))
/// over the grid. Supported for grid dimension <= 3; beyond that use the
/// Monte Carlo normalizer in the samplers.
double quadrature_expectation(const Density& density,
                              const std::function<double(ParamView)>& integrand,
                              const GridSpec& grid);

/// Grid quadrature of exp(log_pdf) alone (the mass covered by the grid).
double quadrature_mass(const Density& density, const GridSpec& grid);

/// log of the tensor-trapezoid integral of exp(log_integrand) over the grid,
/// max-shifted so that huge tilt factors never overflow.
double log_quadrature(const std::function<double(ParamView)>& log_integrand,
                      const GridSpec& grid);

}  // namespace abcpriors
