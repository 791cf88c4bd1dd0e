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

#include <algorithm>
#include <cmath>

#include "abcpriors/models.hpp"
#include "abcpriors/stats.hpp"
#include "doctest.h"

using namespace abcpriors;

namespace {
const double kInf = INFINITY;
}

TEST_CASE("log_sum_exp matches hand values") {
  CHECK(log_sum_exp(std::vector<double>{0.0, 0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(log_sum_exp(std::vector<double>{-kInf, 0.0}) == doctest::Approx(0.0).epsilon(1e-14));
  // large-offset case against exact arithmetic at small offset
  const double small = log_sum_exp(std::vector<double>{0.0, 0.0});
  CHECK(log_sum_exp(std::vector<double>{1000.0, 1000.0}) ==
        doctest::Approx(1000.0 + small).epsilon(1e-14));
}

TEST_CASE("log_sum_exp rejects degenerate input") {
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{-kInf, -kInf}), numerical_error);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{0.0, kInf}), std::invalid_argument);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{0.0, NAN}), std::invalid_argument);
}

TEST_CASE("log_sum_exp permutation invariance and shift equivariance") {
  Prng gen(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(10);
    for (double& x : v) x = gen.normal(0.0, 5.0);
    const double base = log_sum_exp(v);
    std::vector<double> shuffled = v;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 3, shuffled.end());
    CHECK(log_sum_exp(shuffled) == doctest::Approx(base).epsilon(1e-13));
    const double c = gen.normal(0.0, 10.0);
    std::vector<double> shifted = v;
    for (double& x : shifted) x += c;
    CHECK(std::fabs(log_sum_exp(shifted) - (base + c)) < 1e-12);
  }
}

namespace {
WeightedSample make_sample(std::vector<double> lw) {
  WeightedSample s;
  s.dim = 1;
  s.coords.assign(lw.size(), 0.0);
  s.log_weights = std::move(lw);
  return s;
}
}  // namespace

TEST_CASE("normalize examples") {
  auto s = normalize(make_sample({0.0, 0.0, 0.0, 0.0}));
  for (double w : s.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-14));

  s = normalize(make_sample({std::log(1.0), std::log(3.0)}));
  CHECK(s.weights[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s.weights[1] == doctest::Approx(0.75).epsilon(1e-14));

  // shift invariance: same ratios as {0, log 2} up to the 1e3-magnitude ulp
  s = normalize(make_sample({-1000.0, -1000.0 + std::log(2.0)}));
  CHECK(s.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(normalize(make_sample({-kInf, -kInf})), numerical_error);
}

TEST_CASE("normalize is idempotent and shift invariant") {
  Prng gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> lw(8);
    for (double& x : lw) x = gen.normal(0.0, 3.0);
    auto once = normalize(make_sample(lw));
    auto twice = normalize(once);
    for (std::size_t i = 0; i < once.size(); ++i)
      CHECK(std::fabs(once.weights[i] - twice.weights[i]) <= 2e-15);

    std::vector<double> shifted = lw;
    const double c = gen.normal(0.0, 100.0);
    for (double& x : shifted) x += c;
    auto other = normalize(make_sample(shifted));
    for (std::size_t i = 0; i < once.size(); ++i)
      CHECK(other.weights[i] == doctest::Approx(once.weights[i]).epsilon(1e-13));
  }
  double total = 0.0;
  auto s = normalize(make_sample({0.3, -1.2, 2.0, 0.0, -0.5}));
  for (double w : s.weights) total += w;
  CHECK(std::fabs(total - 1.0) < 1e-12);
}

TEST_CASE("ess examples and bounds") {
  auto uniform = normalize(make_sample(std::vector<double>(100, 0.0)));
  CHECK(ess(uniform) == doctest::Approx(100.0).epsilon(1e-12));

  auto degenerate = normalize(make_sample({0.0, -kInf, -kInf}));
  CHECK(ess(degenerate) == doctest::Approx(1.0).epsilon(1e-12));

  auto mixed = normalize(make_sample({std::log(0.5), std::log(0.25), std::log(0.25)}));
  CHECK(ess(mixed) == doctest::Approx(1.0 / 0.375).epsilon(1e-12));

  WeightedSample raw = make_sample({0.0, 1.0});
  CHECK_THROWS_AS(ess(raw), std::invalid_argument);

  Prng gen(99);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> lw(50);
    for (double& x : lw) x = gen.normal(0.0, 2.0);
    const double e = ess(normalize(make_sample(lw)));
    CHECK(e >= 1.0 - 1e-12);
    CHECK(e <= 50.0 + 1e-12);
  }
}

TEST_CASE("quadrature_expectation on the normal oracle") {
  const Density std_normal = make_normal_density(0.0, 1.0);
  const GridSpec grid(-10.0, 10.0, 2001);
  CHECK(quadrature_expectation(std_normal, [](ParamView) { return 1.0; }, grid) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(quadrature_expectation(std_normal, [](ParamView th) { return th[0] * th[0]; }, grid) ==
        doctest::Approx(1.0).epsilon(1e-5));

  // moment generating function of N(10, 0.02) at 5, tilt written as 50(theta-9.975)*0.1
  const Density prior = make_normal_density(10.0, 0.02);
  const GridSpec tight = default_grid(prior, 20001);
  const double expected = std::exp(5.0 * (10.0 - 9.975) + 0.5 * 25.0 * 0.02);
  CHECK(expected == doctest::Approx(1.4549914146182013).epsilon(1e-12));
  CHECK(quadrature_expectation(prior,
                               [](ParamView th) { return std::exp(5.0 * (th[0] - 9.975)); },
                               tight) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("quadrature error shrinks under grid refinement") {
  // On truncated ranges the trapezoid endpoint term makes the error O(h^2),
  // so halving the spacing must shrink it; exact values come from Phi.
  const Density std_normal = make_normal_density(0.0, 1.0);
  const double a = -1.0, b = 1.5;
  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(6.283185307179586); };

  const double mass_exact = stats::normal_cdf(b) - stats::normal_cdf(a);
  auto mass_err = [&](int points) {
    return std::fabs(quadrature_mass(std_normal, GridSpec(a, b, points)) - mass_exact);
  };
  const double second_exact = mass_exact - (b * phi(b) - a * phi(a));
  auto second_err = [&](int points) {
    return std::fabs(quadrature_expectation(std_normal,
                                            [](ParamView th) { return th[0] * th[0]; },
                                            GridSpec(a, b, points)) - second_exact);
  };
  // tilted normal completes the square to N(10.1, 0.02)
  const Density prior = make_normal_density(10.0, 0.02);
  const double s = std::sqrt(0.02);
  const double mgf_exact = std::exp(0.375) * (stats::normal_cdf((10.3 - 10.1) / s) -
                                              stats::normal_cdf((9.8 - 10.1) / s));
  auto mgf_err = [&](int points) {
    return std::fabs(quadrature_expectation(
                         prior, [](ParamView th) { return std::exp(5.0 * (th[0] - 9.975)); },
                         GridSpec(9.8, 10.3, points)) - mgf_exact);
  };
  for (auto err : {std::function<double(int)>(mass_err), std::function<double(int)>(second_err),
                   std::function<double(int)>(mgf_err)}) {
    CHECK(err(101) < err(51));
    CHECK(err(201) < err(101));
    CHECK(err(401) < err(201));
  }
}

TEST_CASE("quadrature rejects dimension > 3") {
  Density d;
  d.dim = 4;
  d.log_pdf = [](ParamView) { return 0.0; };
  GridSpec grid({GridAxis{0, 1, 3}, GridAxis{0, 1, 3}, GridAxis{0, 1, 3}, GridAxis{0, 1, 3}});
  CHECK_THROWS_WITH_AS(quadrature_expectation(d, [](ParamView) { return 1.0; }, grid),
                       doctest::Contains("Monte Carlo"), std::invalid_argument);
}

TEST_CASE("log_quadrature agrees with linear-space mass") {
  const Density prior = make_normal_density(2.0, 4.0);
  const GridSpec grid = default_grid(prior, 4001);
  CHECK(log_quadrature(prior.log_pdf, grid) ==
        doctest::Approx(std::log(quadrature_mass(prior, grid))).epsilon(1e-12));
}

TEST_CASE("tensor quadrature integrates a bivariate normal") {
  const Density d = make_bivariate_normal_density(0.0, 0.0, 1.0, 1.0, 0.5);
  GridSpec grid({GridAxis{-8.0, 8.0, 401}, GridAxis{-8.0, 8.0, 401}});
  CHECK(quadrature_mass(d, grid) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("domain type invariants") {
  CHECK_THROWS_AS(ParamPoint(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ParamPoint({1.0, kInf}), std::invalid_argument);
  CHECK_THROWS_AS(DataVector(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(DataVector({NAN}), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(1.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(0.0, 1.0, 1), std::invalid_argument);
  const GridSpec g(0.0, 1.0, 5);
  CHECK(g.total_points() == 5);
  CHECK(g.axes[0].value(4) == doctest::Approx(1.0));
}
