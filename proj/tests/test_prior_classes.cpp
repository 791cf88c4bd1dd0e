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

#include "abcpriors/prior_classes.hpp"

#include <cmath>

#include "abcpriors/models.hpp"
#include "abcpriors/stats.hpp"
#include "doctest.h"

using namespace abcpriors;

namespace {

const NormalKnownVar kNormal{100, 2.0, 10.0, 0.02, 9.975};
const PoissonGamma kPoisson{10, 2.0, 1.0, 30.0};

// Student-t location model: log g is genuinely nonlinear in s with
// theta-coupled curvature, so the first-order tilt really is approximate.
SuffStatModel student_t_location_model(double nu) {
  const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                   0.5 * std::log(nu * 3.141592653589793);
  SuffStatModel m;
  m.stat_dim = 1;
  m.log_g = [nu, c](std::span<const double> s, ParamView th) {
    const double u = s[0] - th[0];
    return c - 0.5 * (nu + 1.0) * std::log1p(u * u / nu);
  };
  m.dlogg_ds = [nu](std::span<const double> s, ParamView th, std::span<double> out) {
    const double u = s[0] - th[0];
    out[0] = -(nu + 1.0) * u / (nu + u * u);
  };
  m.suff_stat = [](const DataVector& x) {
    double acc = 0.0;
    for (double v : x.values) acc += v;
    return SuffStat({acc / static_cast<double>(x.values.size())});
  };
  return m;
}

double eval_tilt1(const TiltFn& tilt, double theta) {
  double out[1];
  tilt.h(ParamView(&theta, 1), std::span<double>(out, 1));
  return out[0];
}

// max - min over a grid, i.e. deviation from "constant in theta"
double deviation_from_constant(const std::function<double(double)>& f, const GridSpec& grid) {
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < grid.axes[0].points; ++i) {
    const double v = f(grid.axes[0].value(i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

}  // namespace

TEST_CASE("suffstat tilt reproduces the worked models") {
  const DataVector x0({kNormal.xbar0});
  const TiltFn h = tilt_from_suffstat(normal_suffstat_model(kNormal), x0);
  for (double mu : {9.5, 9.975, 10.0, 10.6}) {
    CHECK(eval_tilt1(h, mu) == doctest::Approx(50.0 * (mu - 9.975)).epsilon(1e-12));
  }
  CHECK(eval_tilt1(h, kNormal.xbar0) == doctest::Approx(0.0));

  const TiltFn hp = tilt_from_suffstat(poisson_suffstat_model(kPoisson), DataVector({30.0}));
  for (double lam : {0.5, 1.0, 3.0}) {
    CHECK(eval_tilt1(hp, lam) == doctest::Approx(std::log(lam)).epsilon(1e-12));
  }
}

TEST_CASE("suffstat derivatives agree with finite differences") {
  const std::vector<ParamPoint> mus = {{9.6}, {10.0}, {10.4}};
  const double s_normal[1] = {9.975};
  CHECK(suffstat_derivative_error(normal_suffstat_model(kNormal),
                                  std::span<const double>(s_normal, 1), mus) < 1e-5);
  const std::vector<ParamPoint> lams = {{0.7}, {2.0}, {4.5}};
  const double s_pois[1] = {30.0};
  CHECK(suffstat_derivative_error(poisson_suffstat_model(kPoisson),
                                  std::span<const double>(s_pois, 1), lams) < 1e-5);
  const std::vector<ParamPoint> locs = {{-0.5}, {0.1}, {0.8}};
  const double s_t[1] = {0.3};
  CHECK(suffstat_derivative_error(student_t_location_model(5.0),
                                  std::span<const double>(s_t, 1), locs) < 1e-5);
}

TEST_CASE("expfam tilt equals the suffstat tilt for the oracles") {
  const DataVector x0({kNormal.xbar0});
  const ExpFamSpec spec = normal_expfam_spec(kNormal);
  const TiltFn he = tilt_from_expfam(spec, x0);
  // constant term -n xbar0 / sigma^2 retained, C(mu) = n mu / sigma^2
  for (double mu : {9.7, 10.0, 10.3}) {
    CHECK(eval_tilt1(he, mu) ==
          doctest::Approx(-50.0 * 9.975 + 50.0 * mu).epsilon(1e-12));
  }
  const double s[1] = {9.975};
  CHECK(expfam_dlogB0_error(spec, std::span<const double>(s, 1)) < 1e-5);

  const ExpFamSpec pspec = poisson_expfam_spec(kPoisson);
  const TiltFn hpe = tilt_from_expfam(pspec, DataVector({30.0}));
  for (double lam : {0.5, 2.5}) {
    CHECK(eval_tilt1(hpe, lam) == doctest::Approx(std::log(lam)).epsilon(1e-12));
  }
}

TEST_CASE("expfam reconstruction matches the suffstat log-likelihood up to a constant") {
  const ExpFamSpec spec = normal_expfam_spec(kNormal);
  const SuffStatModel ssm = normal_suffstat_model(kNormal);
  const double s[1] = {9.975};
  double ref = NAN;
  for (double mu : {9.6, 9.9, 10.2, 10.5}) {
    const double diff = expfam_log_g(spec, std::span<const double>(s, 1), ParamView(&mu, 1)) -
                        ssm.log_g(std::span<const double>(s, 1), ParamView(&mu, 1));
    if (std::isnan(ref)) ref = diff;
    CHECK(diff == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("degenerate family C == 0 gives members equal to the base prior") {
  ExpFamSpec spec = normal_expfam_spec(kNormal);
  spec.C = [](ParamView, std::span<double> out) { out[0] = 0.0; };
  spec.log_B0 = [](std::span<const double>) { return 0.0; };
  spec.dlogB0_ds = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
  const TiltFn h = tilt_from_expfam(spec, DataVector({9.975}));
  PriorClass cls = make_class(ClassKind::ABC, normal_prior(kNormal), h, {1.0});
  const TiltedPrior member = make_member(cls, {0.7});
  const Density base = normal_prior(kNormal);
  for (double mu : {9.8, 10.0, 10.2}) {
    CHECK(member_log_pdf(member, ParamView(&mu, 1), true) ==
          doctest::Approx(base.log_pdf(ParamView(&mu, 1))).epsilon(1e-9));
  }
}

TEST_CASE("likelihood tilt: iid normal derivative and degenerate cases") {
  const double sigma2 = 2.0;
  auto loglik = [sigma2](const DataVector& x, ParamView th) {
    double acc = 0.0;
    for (double v : x.values) acc += stats::normal_log_pdf(v, th[0], sigma2);
    return acc;
  };
  const DataVector x0({9.2, 10.1, 10.9});
  const TiltFn k = tilt_from_likelihood(loglik, x0);
  CHECK(k.dim == 3);
  std::vector<double> out(3);
  const double mu = 10.3;
  k.h(ParamView(&mu, 1), out);
  for (int i = 0; i < 3; ++i) {
    CHECK(out[static_cast<std::size_t>(i)] ==
          doctest::Approx((mu - x0.values[static_cast<std::size_t>(i)]) / sigma2)
              .epsilon(1e-6));
  }

  auto flat = [](const DataVector&, ParamView th) { return -0.5 * th[0] * th[0]; };
  const TiltFn kz = tilt_from_likelihood(flat, x0);
  kz.h(ParamView(&mu, 1), out);
  for (double v : out) CHECK(v == doctest::Approx(0.0));

  CHECK_THROWS_WITH_AS(tilt_from_likelihood(loglik, x0, /*discrete_data=*/true),
                       doctest::Contains("tilt_from_suffstat"), std::invalid_argument);
}

TEST_CASE("likelihood-ratio tilt") {
  auto log_normal_lik = [](const DataVector& x, ParamView th) {
    return stats::normal_log_pdf(x.values[0], th[0], 1.0);
  };
  const DataVector x0({0.4});

  // f~ == f
  const TiltFn zero = tilt_from_likelihood_ratio(log_normal_lik, log_normal_lik, x0);
  CHECK(eval_tilt1(zero, 1.3) == doctest::Approx(0.0));

  // Student-t(5) against a unit normal, direct evaluation of both log-densities
  const double nu = 5.0;
  const double tc = std::lgamma(3.0) - std::lgamma(2.5) - 0.5 * std::log(nu * 3.141592653589793);
  auto log_t5 = [nu, tc](const DataVector& x, ParamView th) {
    const double u = x.values[0] - th[0];
    return tc - 3.0 * std::log1p(u * u / nu);
  };
  const TiltFn h = tilt_from_likelihood_ratio(log_t5, log_normal_lik, x0);
  for (double th : {-0.5, 0.4, 1.0}) {
    const double u = 0.4 - th;
    const double expected = (tc - 3.0 * std::log1p(u * u / nu)) -
                            stats::normal_log_pdf(0.4, th, 1.0);
    CHECK(eval_tilt1(h, th) == doctest::Approx(expected).epsilon(1e-12));
  }

  // f~ = c f: the tilt is constant, so the AB member equals the base prior
  auto scaled = [log_normal_lik](const DataVector& x, ParamView th) {
    return log_normal_lik(x, th) + std::log(3.7);
  };
  const TiltFn hc = tilt_from_likelihood_ratio(log_normal_lik, scaled, x0);
  PriorClass ab = make_class(ClassKind::AB, make_normal_density(0.0, 1.0), hc, {});
  const TiltedPrior member = make_member(ab, {1.0});
  const Density base = make_normal_density(0.0, 1.0);
  for (double th : {-1.0, 0.0, 2.0}) {
    CHECK(member_log_pdf(member, ParamView(&th, 1), true) ==
          doctest::Approx(base.log_pdf(ParamView(&th, 1))).epsilon(1e-9));
  }

  // f~ zero where f is positive
  auto truncated = [log_normal_lik](const DataVector& x, ParamView th) {
    return th[0] > 0.0 ? log_normal_lik(x, th) : -INFINITY;
  };
  const TiltFn bad = tilt_from_likelihood_ratio(log_normal_lik, truncated, x0);
  double buf[1];
  const double neg = -1.0;
  CHECK_THROWS_WITH_AS(bad.h(ParamView(&neg, 1), std::span<double>(buf, 1)),
                       doctest::Contains("ratio undefined"), numerical_error);
}

TEST_CASE("make_member: t = 0 reproduces the base prior exactly") {
  PriorClass cls = normal_class_abc(kNormal, 1.0);
  const TiltedPrior member = make_member(cls, {0.0});
  for (double mu : {9.6, 10.0, 10.4}) {
    CHECK(member.log_pdf_unnormalized(ParamView(&mu, 1)) ==
          cls.base.log_pdf(ParamView(&mu, 1)));
  }
}

TEST_CASE("make_member: Gaussian completion of the square") {
  // exp(50(mu - 9.975) * 0.1) tilt of N(10, 0.02) is N(10.1, 0.02)
  PriorClass cls = normal_class_abc(kNormal, 1.0);
  const TiltedPrior member = make_member(cls, {0.1});
  const GridSpec grid = default_grid(cls.base, 4001);
  double worst = 0.0;
  for (int i = 0; i < grid.axes[0].points; i += 4) {
    const double mu = grid.axes[0].value(i);
    const double got = std::exp(member_log_pdf(member, ParamView(&mu, 1), true));
    const double want = std::exp(stats::normal_log_pdf(mu, 10.1, 0.02));
    worst = std::max(worst, std::fabs(got - want));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("make_member: lambda^t tilt of a Gamma prior shifts the shape") {
  const PoissonGamma model{10, 2.0, 1.0, 30.0};
  PriorClass cls = poisson_class_abc(model, 2.0);
  const TiltedPrior member = make_member(cls, {2.0});
  const GridSpec grid = default_grid(cls.base, 8001);
  double worst = 0.0;
  for (int i = 0; i < grid.axes[0].points; i += 4) {
    const double lam = grid.axes[0].value(i);
    const double got = std::exp(member_log_pdf(member, ParamView(&lam, 1), true));
    const double want = std::exp(stats::gamma_log_pdf(lam, 4.0, 1.0));
    worst = std::max(worst, std::fabs(got - want));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("make_member rejects tilts outside the class") {
  PriorClass cls = normal_class_abc(kNormal, 1.0);
  CHECK_THROWS_WITH_AS(make_member(cls, {1.5}), doctest::Contains("epsilon_0"),
                       std::invalid_argument);
  PriorClass ab = make_class(ClassKind::AB, make_normal_density(0.0, 1.0),
                             cls.tilt, {});
  CHECK_THROWS_AS(make_member(ab, {0.5}), std::invalid_argument);
}

TEST_CASE("member_log_pdf oracle values") {
  PriorClass cls = normal_class_abc(kNormal, 1.0);
  // N(10.1, 0.02) log-density at its mean: -0.5 log(2 pi 0.02)
  const TiltedPrior member = make_member(cls, {0.1});
  const double at = 10.1;
  CHECK(-0.5 * std::log(2.0 * 3.141592653589793 * 0.02) ==
        doctest::Approx(1.0370730415810575).epsilon(1e-12));
  CHECK(member_log_pdf(member, ParamView(&at, 1), true) ==
        doctest::Approx(1.0370730415810575).epsilon(1e-8));

  // Gamma(3,1) log-pdf at 3 = log(9 e^-3 / 2)
  const PoissonGamma pg{10, 2.0, 1.0, 30.0};
  PriorClass pcls = poisson_class_abc(pg, 1.0);
  const TiltedPrior pmember = make_member(pcls, {1.0});
  const double lam = 3.0;
  CHECK(std::log(9.0 * std::exp(-3.0) / 2.0) ==
        doctest::Approx(-1.4959226032237258).epsilon(1e-10));
  CHECK(member_log_pdf(pmember, ParamView(&lam, 1), true) ==
        doctest::Approx(std::log(9.0 * std::exp(-3.0) / 2.0)).epsilon(1e-7));
}

TEST_CASE("conjugate_shift: worked hyperparameter moves") {
  // Poisson-Gamma: gamma' realizes Gamma(r + t, v)
  const ExpFamSpec pspec = poisson_expfam_spec(kPoisson);
  const ExpFamSpec shifted = conjugate_shift(pspec, 1.5);
  CHECK(shifted.conj_hyper.l[0] == doctest::Approx(kPoisson.r - 1.0 + 1.5));
  CHECK(shifted.conj_hyper.k == doctest::Approx(pspec.conj_hyper.k));

  // Normal: prior mean moves by (w2/w1) t, variance unchanged
  const ExpFamSpec nspec = normal_expfam_spec(kNormal);
  const ExpFamSpec nshift = conjugate_shift(nspec, 0.25);
  const Density moved = normal_prior_for_hyper(kNormal, nshift.conj_hyper);
  const Density want = make_normal_density(10.25, 0.02);  // w2/w1 = 1 here
  for (double mu : {9.9, 10.25, 10.6}) {
    CHECK(moved.log_pdf(ParamView(&mu, 1)) ==
          doctest::Approx(want.log_pdf(ParamView(&mu, 1))).epsilon(1e-10));
  }

  // t = 0 leaves gamma unchanged
  const ExpFamSpec same = conjugate_shift(nspec, 0.0);
  CHECK(same.conj_hyper.l[0] == nspec.conj_hyper.l[0]);

  // Gamma shape must stay positive
  CHECK_THROWS_WITH_AS(conjugate_shift(pspec, -2.0), doctest::Contains("valid region"),
                       std::invalid_argument);
}

TEST_CASE("class_contains membership and comparability") {
  const Density base = normal_prior(kNormal);
  const TiltFn tilt = tilt_from_suffstat(normal_suffstat_model(kNormal),
                                         DataVector({kNormal.xbar0}));
  PriorClass small = make_class(ClassKind::ABC, base, tilt, {1.0});
  PriorClass large = make_class(ClassKind::ABC, base, tilt, {2.0});

  CHECK(class_contains(small, make_member(small, {0.5})));
  CHECK_FALSE(class_contains(small, make_member(large, {1.5})));

  // vector case: second coordinate out of range
  TiltFn vec_tilt;
  vec_tilt.dim = 2;
  vec_tilt.h = [](ParamView th, std::span<double> out) {
    out[0] = th[0];
    out[1] = -th[0];
  };
  PriorClass vec_small = make_class(ClassKind::ABC, base, vec_tilt, {1.0, 1.0});
  PriorClass vec_large = make_class(ClassKind::ABC, base, vec_tilt, {1.0, 3.0});
  CHECK_FALSE(class_contains(vec_small, make_member(vec_large, {0.5, -2.0})));

  // different tilt object: not comparable
  const TiltFn other_tilt = tilt_from_suffstat(normal_suffstat_model(kNormal),
                                               DataVector({kNormal.xbar0}));
  PriorClass other = make_class(ClassKind::ABC, base, other_tilt, {1.0});
  CHECK_THROWS_WITH_AS(class_contains(small, make_member(other, {0.5})),
                       doctest::Contains("not comparable"), std::invalid_argument);
}

TEST_CASE("invariant: both construction routes give the same normalized members") {
  const DataVector x0({kNormal.xbar0});
  PriorClass via_g = normal_class_abc(kNormal, 1.0);
  PriorClass via_ef = make_class(ClassKind::ABC, normal_prior(kNormal),
                                 tilt_from_expfam(normal_expfam_spec(kNormal), x0), {1.0});
  for (double t : {-1.0, 0.3, 1.0}) {
    const TiltedPrior a = make_member(via_g, {t});
    const TiltedPrior b = make_member(via_ef, {t});
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double mu = 9.0 + 2.0 * i / 400.0;
      worst = std::max(worst, std::fabs(std::exp(member_log_pdf(a, ParamView(&mu, 1), true)) -
                                        std::exp(member_log_pdf(b, ParamView(&mu, 1), true))));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("invariant: conjugate-tilt equivalence (Gamma_eps^E chain)") {
  PriorClass cls_e = normal_class_E(kNormal, 1.0);
  for (double t : {-0.8, 0.4}) {
    const TiltedPrior member = make_member(cls_e, {t});
    const Density closed = normal_member_E_density(kNormal, t);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double mu = 9.0 + 2.0 * i / 400.0;
      worst = std::max(worst, std::fabs(member_log_pdf(member, ParamView(&mu, 1), true) -
                                        closed.log_pdf(ParamView(&mu, 1))));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("invariant: duality identity is exact for the exponential-family oracles") {
  // log[pi(theta) g(s'|theta)] - log[pi'_t(theta) g(s0|theta)] constant in theta
  const SuffStatModel nm = normal_suffstat_model(kNormal);
  PriorClass ncls = normal_class_abc(kNormal, 1.0);
  const GridSpec ngrid(9.0, 11.0, 1001);
  for (double t : {0.01, 0.02, 0.04, 0.5, 1.0}) {
    const TiltedPrior member = make_member(ncls, {t});
    const double s0 = kNormal.xbar0, s1 = kNormal.xbar0 + t;
    auto logratio = [&](double mu) {
      const ParamView th(&mu, 1);
      return (ncls.base.log_pdf(th) + nm.log_g(std::span<const double>(&s1, 1), th)) -
             (member.log_pdf_unnormalized(th) + nm.log_g(std::span<const double>(&s0, 1), th));
    };
    CHECK(deviation_from_constant(logratio, ngrid) < 1e-8);
  }

  const SuffStatModel pm = poisson_suffstat_model(kPoisson);
  PriorClass pcls = poisson_class_abc(kPoisson, 1.0);
  const GridSpec pgrid(0.05, 8.0, 1001);
  for (double t : {0.25, 1.0}) {
    const TiltedPrior member = make_member(pcls, {t});
    const double s0 = kPoisson.sum_x0, s1 = kPoisson.sum_x0 + t;
    auto logratio = [&](double lam) {
      const ParamView th(&lam, 1);
      return (pcls.base.log_pdf(th) + pm.log_g(std::span<const double>(&s1, 1), th)) -
             (member.log_pdf_unnormalized(th) + pm.log_g(std::span<const double>(&s0, 1), th));
    };
    CHECK(deviation_from_constant(logratio, pgrid) < 1e-8);
  }
}

TEST_CASE("invariant: Taylor deviation scales as t^2 for a general model") {
  const SuffStatModel tm = student_t_location_model(5.0);
  const Density prior = make_normal_density(0.0, 1.0);
  const DataVector x0({0.3});
  PriorClass cls = make_class(ClassKind::ABC, prior, tilt_from_suffstat(tm, x0), {1.0});
  const GridSpec grid(-4.0, 4.0, 2001);

  auto deviation = [&](double t) {
    const TiltedPrior member = make_member(cls, {t});
    const double s0 = 0.3, s1 = 0.3 + t;
    return deviation_from_constant(
        [&](double th) {
          const ParamView view(&th, 1);
          return (prior.log_pdf(view) + tm.log_g(std::span<const double>(&s1, 1), view)) -
                 (member.log_pdf_unnormalized(view) +
                  tm.log_g(std::span<const double>(&s0, 1), view));
        },
        grid);
  };
  const double d1 = deviation(0.01), d2 = deviation(0.02), d4 = deviation(0.04);
  CHECK(d1 > 1e-9);  // genuinely nonzero, unlike the exponential-family case
  CHECK(d2 / d1 > 3.5);
  CHECK(d2 / d1 < 4.5);
  CHECK(d4 / d2 > 3.5);
  CHECK(d4 / d2 < 4.5);
}

TEST_CASE("property: nesting of classes in epsilon") {
  const Density base = normal_prior(kNormal);
  const TiltFn tilt = tilt_from_suffstat(normal_suffstat_model(kNormal),
                                         DataVector({kNormal.xbar0}));
  Prng gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const double e1 = gen.uniform(0.1, 1.0);
    const double e2 = e1 + gen.uniform(0.1, 1.0);
    PriorClass c1 = make_class(ClassKind::ABC, base, tilt, {e1});
    PriorClass c2 = make_class(ClassKind::ABC, base, tilt, {e2});
    const double t = gen.uniform(-e1, e1);
    const TiltedPrior inner = make_member(c1, {t});
    CHECK(class_contains(c2, inner));  // Gamma_e1 subset of Gamma_e2
    const double sign = gen.uniform01() < 0.5 ? -1.0 : 1.0;
    const TiltedPrior outer = make_member(c2, {sign * gen.uniform(e1 * 1.0000001, e2)});
    CHECK_FALSE(class_contains(c1, outer));
  }
}

TEST_CASE("property: members approach the base prior as |t| -> 0") {
  PriorClass cls = normal_class_abc(kNormal, 1.0);
  const Density base = cls.base;
  double previous = INFINITY;
  for (int k = 1; k <= 6; ++k) {
    const double t = std::pow(10.0, -k);
    const TiltedPrior member = make_member(cls, {t});
    double sup = 0.0;
    for (int i = 0; i <= 500; ++i) {
      const double mu = 9.2 + 1.6 * i / 500.0;
      sup = std::max(sup, std::fabs(std::exp(member_log_pdf(member, ParamView(&mu, 1), true)) -
                                    std::exp(base.log_pdf(ParamView(&mu, 1)))));
    }
    CHECK(sup < previous);
    previous = sup;
  }
  CHECK(previous < 1e-4);  // at t = 1e-6 the member is visually the prior
}

TEST_CASE("normalizer cache is single-assignment and shared across copies") {
  PriorClass cls = normal_class_abc(kNormal, 1.0);
  const TiltedPrior member = make_member(cls, {0.1});
  const double first = member_log_normalizer(member);
  const TiltedPrior copy = member;
  CHECK(member_log_normalizer(copy) == first);  // cached value reused bitwise
  CHECK(copy.log_normalizer_cache.get() == member.log_normalizer_cache.get());
}
