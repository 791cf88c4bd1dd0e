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

#include "abcpriors/models.hpp"

#include <algorithm>
#include <cmath>

#include "abcpriors/kernels.hpp"
#include "abcpriors/stats.hpp"

namespace abcpriors {

Density make_normal_density(double mean, double var) {
  if (!(var > 0.0)) throw std::invalid_argument("make_normal_density: variance must be > 0");
  const double sd = std::sqrt(var);
  Density d;
  d.dim = 1;
  d.normalized = true;
  d.support = SupportBox{{mean - 12.0 * sd}, {mean + 12.0 * sd}};
  d.log_pdf = [mean, var](ParamView th) { return stats::normal_log_pdf(th[0], mean, var); };
  d.sampler = [mean, sd](Prng& gen, std::span<double> out) { out[0] = gen.normal(mean, sd); };
  return d;
}

Density make_gamma_density(double shape, double rate) {
  if (!(shape > 0.0 && rate > 0.0))
    throw std::invalid_argument("make_gamma_density: shape and rate must be > 0");
  const double mean = shape / rate, sd = std::sqrt(shape) / rate;
  Density d;
  d.dim = 1;
  d.normalized = true;
  const double lo = shape >= 1.0 ? 0.0 : 1e-8;  // pdf unbounded at 0 for shape < 1
  d.support = SupportBox{{lo}, {mean + 12.0 * sd}};
  d.log_pdf = [shape, rate](ParamView th) { return stats::gamma_log_pdf(th[0], shape, rate); };
  d.sampler = [shape, rate](Prng& gen, std::span<double> out) {
    out[0] = gen.gamma(shape, rate);
  };
  return d;
}

Density make_bivariate_normal_density(double mean1, double mean2, double sd1, double sd2,
                                      double rho) {
  if (!(sd1 > 0.0 && sd2 > 0.0) || !(std::fabs(rho) < 1.0))
    throw std::invalid_argument("make_bivariate_normal_density: bad parameters");
  Density d;
  d.dim = 2;
  d.normalized = true;
  d.support = SupportBox{{mean1 - 12.0 * sd1, mean2 - 12.0 * sd2},
                         {mean1 + 12.0 * sd1, mean2 + 12.0 * sd2}};
  const double one_minus = 1.0 - rho * rho;
  const double log_norm =
      -std::log(6.283185307179586 * sd1 * sd2 * std::sqrt(one_minus));
  d.log_pdf = [=](ParamView th) {
    const double z1 = (th[0] - mean1) / sd1, z2 = (th[1] - mean2) / sd2;
    return log_norm - 0.5 * (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / one_minus;
  };
  d.sampler = [=](Prng& gen, std::span<double> out) {
    const double z1 = gen.normal(), z2 = gen.normal();
    out[0] = mean1 + sd1 * z1;
    out[1] = mean2 + sd2 * (rho * z1 + std::sqrt(one_minus) * z2);
  };
  return d;
}

Density make_std_normal_product_density(int dim) {
  if (dim < 1) throw std::invalid_argument("make_std_normal_product_density: dim >= 1");
  Density d;
  d.dim = dim;
  d.normalized = true;
  d.support = SupportBox{std::vector<double>(static_cast<std::size_t>(dim), -12.0),
                         std::vector<double>(static_cast<std::size_t>(dim), 12.0)};
  d.log_pdf = [dim](ParamView th) {
    double acc = -0.5 * static_cast<double>(dim) * stats::kLogTwoPi;
    for (double x : th) acc -= 0.5 * x * x;
    return acc;
  };
  d.sampler = [](Prng& gen, std::span<double> out) {
    for (double& x : out) x = gen.normal();
  };
  return d;
}

// ---------------------------------------------------------------------------
// Normal with known variance.

NormalPosterior normal_truth(const NormalKnownVar& model) {
  if (!(model.sigma2 > 0.0 && model.s2 > 0.0 && model.n > 0))
    throw std::invalid_argument("normal_truth: sigma2, s2 and n must be positive");
  NormalPosterior post;
  post.var = 1.0 / (1.0 / model.s2 + static_cast<double>(model.n) / model.sigma2);
  post.w1 = post.var / model.s2;
  post.w2 = static_cast<double>(model.n) * post.var / model.sigma2;
  post.mean = post.w1 * model.m + post.w2 * model.xbar0;
  return post;
}

Density normal_prior(const NormalKnownVar& model) {
  return make_normal_density(model.m, model.s2);
}

Density normal_posterior_density(const NormalKnownVar& model, double xbar) {
  const NormalPosterior post = normal_truth(model);
  return make_normal_density(post.w1 * model.m + post.w2 * xbar, post.var);
}

SuffStatModel normal_suffstat_model(const NormalKnownVar& model) {
  const double tau2 = model.sigma2 / static_cast<double>(model.n);  // var of xbar
  SuffStatModel ssm;
  ssm.stat_dim = 1;
  ssm.log_g = [tau2](std::span<const double> s, ParamView th) {
    return stats::normal_log_pdf(s[0], th[0], tau2);
  };
  ssm.dlogg_ds = [tau2](std::span<const double> s, ParamView th, std::span<double> out) {
    out[0] = (th[0] - s[0]) / tau2;
  };
  ssm.suff_stat = [](const DataVector& x) {
    double acc = 0.0;
    for (double v : x.values) acc += v;
    return SuffStat({acc / static_cast<double>(x.values.size())});
  };
  return ssm;
}

ExpFamSpec normal_expfam_spec(const NormalKnownVar& model) {
  const double a = static_cast<double>(model.n) / model.sigma2;  // n / sigma^2
  ExpFamSpec spec;
  spec.stat_dim = 1;
  spec.log_A = [a](ParamView th) { return -0.5 * a * th[0] * th[0]; };
  spec.log_B0 = [a](std::span<const double> s) { return -0.5 * a * s[0] * s[0]; };
  spec.dlogB0_ds = [a](std::span<const double> s, std::span<double> out) {
    out[0] = -a * s[0];
  };
  spec.C = [a](ParamView th, std::span<double> out) { out[0] = a * th[0]; };
  spec.suff_stat = [](const DataVector& x) {
    double acc = 0.0;
    for (double v : x.values) acc += v;
    return SuffStat({acc / static_cast<double>(x.values.size())});
  };
  spec.conj_hyper.k = model.sigma2 / (static_cast<double>(model.n) * model.s2);
  spec.conj_hyper.l = {spec.conj_hyper.k * model.m};
  spec.hyper_valid = [](const ConjHyper& h) { return h.k > 0.0; };
  return spec;
}

Density normal_prior_for_hyper(const NormalKnownVar& model, const ConjHyper& hyper) {
  const double var = model.sigma2 / (static_cast<double>(model.n) * hyper.k);
  return make_normal_density(hyper.l.at(0) / hyper.k, var);
}

PriorClass normal_class_abc(const NormalKnownVar& model, double eps) {
  const DataVector x0({model.xbar0});
  return make_class(ClassKind::ABC, normal_prior(model),
                    tilt_from_suffstat(normal_suffstat_model(model), x0), {eps});
}

PriorClass normal_class_E(const NormalKnownVar& model, double eps) {
  const ExpFamSpec spec = normal_expfam_spec(model);
  PriorClass cls =
      make_class(ClassKind::ABC_E, normal_prior(model), tilt_from_conjugate(spec), {eps});
  cls.expfam = spec;
  return cls;
}

Density normal_member_E_density(const NormalKnownVar& model, double t) {
  const NormalPosterior post = normal_truth(model);
  return make_normal_density(model.m + (post.w2 / post.w1) * t, model.s2);
}

Simulator normal_simulator_full(const NormalKnownVar& model) {
  const double sd = std::sqrt(model.sigma2);
  const auto n = static_cast<std::size_t>(model.n);
  return [sd, n](ParamView theta, Prng& gen, std::vector<double>& out) {
    out.resize(n);
    for (double& v : out) v = gen.normal(theta[0], sd);
  };
}

Simulator normal_simulator_suffstat(const NormalKnownVar& model) {
  const double tau = std::sqrt(model.sigma2 / static_cast<double>(model.n));
  return [tau](ParamView theta, Prng& gen, std::vector<double>& out) {
    out.resize(1);
    out[0] = gen.normal(theta[0], tau);
  };
}

WeightedSample normal_direct_posterior_x0(const NormalKnownVar& model, double eps,
                                          std::size_t n, RngSeed seed) {
  const NormalPosterior post = normal_truth(model);
  const double post_sd = std::sqrt(post.var);
  WeightedSample out;
  out.dim = 1;
  out.seed = seed.seed;
  out.coords.resize(n);
  out.log_weights.assign(n, 0.0);
  kernels::transform_indexed(n, out.coords.data(), [&](std::size_t i) {
    Prng gen = substream(seed, 7, i);
    const double t = gen.uniform(-eps, eps);
    const double mean = post.w1 * model.m + post.w2 * (model.xbar0 + t);
    return gen.normal(mean, post_sd);
  });
  return normalize(std::move(out));
}

WeightedSample normal_true_posterior_sample(const NormalKnownVar& model, std::size_t n,
                                            RngSeed seed) {
  const NormalPosterior post = normal_truth(model);
  const double post_sd = std::sqrt(post.var);
  WeightedSample out;
  out.dim = 1;
  out.seed = seed.seed;
  out.coords.resize(n);
  out.log_weights.assign(n, 0.0);
  kernels::transform_indexed(n, out.coords.data(), [&](std::size_t i) {
    Prng gen = substream(seed, 8, i);
    return gen.normal(post.mean, post_sd);
  });
  return normalize(std::move(out));
}

// ---------------------------------------------------------------------------
// Poisson-Gamma.

Density poisson_prior(const PoissonGamma& model) {
  return make_gamma_density(model.r, model.v);
}

SuffStatModel poisson_suffstat_model(const PoissonGamma& model) {
  const double n = static_cast<double>(model.n);
  SuffStatModel ssm;
  ssm.stat_dim = 1;
  // theta-free factors of the count density (n^s / s!) are dropped; they cancel
  // in every normalized member and every self-normalized weight.
  ssm.log_g = [n](std::span<const double> s, ParamView th) {
    return -n * th[0] + s[0] * std::log(th[0]);
  };
  ssm.dlogg_ds = [](std::span<const double>, ParamView th, std::span<double> out) {
    out[0] = std::log(th[0]);
  };
  ssm.suff_stat = [](const DataVector& x) {
    double acc = 0.0;
    for (double v : x.values) acc += v;
    return SuffStat({acc});
  };
  return ssm;
}

ExpFamSpec poisson_expfam_spec(const PoissonGamma& model) {
  const double n = static_cast<double>(model.n);
  ExpFamSpec spec;
  spec.stat_dim = 1;
  spec.log_A = [n](ParamView th) { return -n * th[0]; };
  spec.log_B0 = [](std::span<const double>) { return 0.0; };
  spec.dlogB0_ds = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
  spec.C = [](ParamView th, std::span<double> out) { out[0] = std::log(th[0]); };
  spec.suff_stat = [](const DataVector& x) {
    double acc = 0.0;
    for (double v : x.values) acc += v;
    return SuffStat({acc});
  };
  spec.conj_hyper.k = model.v / n;        // prior rate = k n
  spec.conj_hyper.l = {model.r - 1.0};    // prior shape = l + 1
  spec.hyper_valid = [](const ConjHyper& h) { return h.k > 0.0 && h.l.at(0) + 1.0 > 0.0; };
  return spec;
}

PriorClass poisson_class_abc(const PoissonGamma& model, double eps) {
  const DataVector x0({model.sum_x0});
  return make_class(ClassKind::ABC, poisson_prior(model),
                    tilt_from_suffstat(poisson_suffstat_model(model), x0), {eps});
}

PriorClass poisson_class_E(const PoissonGamma& model, double eps) {
  if (!(model.r - eps > 0.0))
    throw std::invalid_argument(
        "poisson_class_E: r - eps must stay positive (Gamma shape would leave its range)");
  const ExpFamSpec spec = poisson_expfam_spec(model);
  PriorClass cls =
      make_class(ClassKind::ABC_E, poisson_prior(model), tilt_from_conjugate(spec), {eps});
  cls.expfam = spec;
  return cls;
}

Density poisson_member_density(const PoissonGamma& model, double t) {
  return make_gamma_density(model.r + t, model.v);
}

Density poisson_posterior_density(const PoissonGamma& model, double t) {
  return make_gamma_density(model.r + t + model.sum_x0,
                            model.v + static_cast<double>(model.n));
}

// ---------------------------------------------------------------------------
// Poisson regression.

PoissonRegression make_synthetic_poisson_regression(int n_obs, RngSeed seed, double eps) {
  if (n_obs < 2) throw std::invalid_argument("make_synthetic_poisson_regression: n_obs >= 2");
  PoissonRegression model;
  model.n_obs = n_obs;
  model.p = 2;
  model.X.resize(static_cast<std::size_t>(n_obs) * 2);
  model.y0.resize(static_cast<std::size_t>(n_obs));
  model.epsilon.assign(static_cast<std::size_t>(n_obs), eps);
  const double beta0 = 0.5, beta1 = -0.25;
  for (int i = 0; i < n_obs; ++i) {
    const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n_obs - 1);
    model.X[static_cast<std::size_t>(i) * 2] = 1.0;
    model.X[static_cast<std::size_t>(i) * 2 + 1] = x;
    Prng gen = substream(seed, 23, static_cast<std::uint64_t>(i));
    model.y0[static_cast<std::size_t>(i)] =
        static_cast<double>(gen.poisson(std::exp(beta0 + beta1 * x)));
  }
  model.prior = make_std_normal_product_density(2);
  return model;
}

PriorClass poisson_regression_class(const PoissonRegression& model) {
  if (model.n_obs < 1 || model.p < 1 ||
      model.X.size() != static_cast<std::size_t>(model.n_obs) * static_cast<std::size_t>(model.p) ||
      model.y0.size() != static_cast<std::size_t>(model.n_obs) ||
      model.epsilon.size() != static_cast<std::size_t>(model.n_obs))
    throw std::invalid_argument("poisson_regression_class: inconsistent dimensions");
  auto X = std::make_shared<std::vector<double>>(model.X);
  const int p = model.p;
  TiltFn tilt;
  tilt.dim = model.n_obs;
  tilt.provenance = TiltProvenance::LikelihoodGeneral;
  tilt.h = [X, p](ParamView beta, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      double dot = 0.0;
      for (int j = 0; j < p; ++j)
        dot += beta[static_cast<std::size_t>(j)] *
               (*X)[i * static_cast<std::size_t>(p) + static_cast<std::size_t>(j)];
      out[i] = dot;
    }
  };
  PriorClass cls = make_class(ClassKind::ABC_G, model.prior, tilt, model.epsilon);
  // The displayed tilt enters positively: exp(+sum_i beta'X_i t_i).
  cls.sign = 1.0;
  return cls;
}

double poisson_regression_loglik(const PoissonRegression& model, ParamView beta) {
  double acc = 0.0;
  for (int i = 0; i < model.n_obs; ++i) {
    double eta = 0.0;
    const auto xi = model.row(i);
    for (int j = 0; j < model.p; ++j)
      eta += beta[static_cast<std::size_t>(j)] * xi[static_cast<std::size_t>(j)];
    const double y = model.y0[static_cast<std::size_t>(i)];
    acc += y * eta - std::exp(eta) - std::lgamma(y + 1.0);
  }
  return acc;
}

RobustnessReport regression_robustness(const PoissonRegression& model,
                                       std::size_t n_members, std::size_t n_particles,
                                       RngSeed seed) {
  const PriorClass cls = poisson_regression_class(model);
  const auto dim = static_cast<std::size_t>(model.p);
  const auto n_obs = static_cast<std::size_t>(model.n_obs);

  RobustnessReport report;
  report.min_ess = static_cast<double>(n_particles);

  auto posterior_mean = [&](std::span<const double> t, RngSeed member_seed) {
    WeightedSample ws;
    ws.dim = model.p;
    ws.seed = member_seed.seed;
    ws.coords.resize(n_particles * dim);
    ws.log_weights.resize(n_particles);
    kernels::transform_indexed(n_particles, ws.log_weights.data(), [&](std::size_t q) {
      Prng gen = substream(member_seed, 1, q);
      std::span<double> beta(ws.coords.data() + q * dim, dim);
      cls.base.sampler(gen, beta);
      return cls.sign * [&] {
        thread_local std::vector<double> hbuf;
        hbuf.resize(n_obs);
        cls.tilt.h(beta, hbuf);
        double dot = 0.0;
        for (std::size_t k = 0; k < n_obs; ++k) dot += hbuf[k] * t[k];
        return dot;
      }() + poisson_regression_loglik(model, beta);
    });
    ws = normalize(std::move(ws));
    report.min_ess = std::min(report.min_ess, ess(ws));
    std::vector<double> mean(dim, 0.0);
    for (std::size_t q = 0; q < n_particles; ++q)
      for (std::size_t j = 0; j < dim; ++j) mean[j] += ws.weights[q] * ws.coords[q * dim + j];
    return mean;
  };

  const std::vector<double> t0(n_obs, 0.0);
  report.center_mean = posterior_mean(t0, derive_seed(seed, 0));
  report.lower = report.center_mean;
  report.upper = report.center_mean;

  std::vector<double> t(n_obs);
  for (std::size_t k = 0; k < n_members; ++k) {
    Prng gen = substream(seed, 29, k);
    for (std::size_t i = 0; i < n_obs; ++i)
      t[i] = gen.uniform(-model.epsilon[i], model.epsilon[i]);
    const auto mean = posterior_mean(t, derive_seed(seed, 0));
    report.member_means.push_back(mean);
    for (std::size_t j = 0; j < dim; ++j) {
      report.lower[j] = std::min(report.lower[j], mean[j]);
      report.upper[j] = std::max(report.upper[j], mean[j]);
    }
  }
  return report;
}

std::vector<double> marginal_pdf_2d(const std::function<double(ParamView)>& log_pdf,
                                    const GridSpec& grid2d, int axis) {
  if (grid2d.dim() != 2) throw std::invalid_argument("marginal_pdf_2d: 2-D grids only");
  const int other = 1 - axis;
  const auto& ax = grid2d.axes[static_cast<std::size_t>(axis)];
  const auto& oax = grid2d.axes[static_cast<std::size_t>(other)];
  std::vector<double> marg(static_cast<std::size_t>(ax.points));
  kernels::transform_indexed(marg.size(), marg.data(), [&](std::size_t i) {
    // trapezoid along the other axis in log space
    double shift = -INFINITY;
    thread_local std::vector<double> logs;
    logs.resize(static_cast<std::size_t>(oax.points));
    double pt[2];
    pt[axis] = ax.value(static_cast<int>(i));
    for (int j = 0; j < oax.points; ++j) {
      pt[other] = oax.value(j);
      logs[static_cast<std::size_t>(j)] = log_pdf(ParamView(pt, 2));
      shift = std::max(shift, logs[static_cast<std::size_t>(j)]);
    }
    if (shift == -INFINITY) return 0.0;
    double acc = 0.0;
    for (int j = 0; j < oax.points; ++j) {
      const double w = (j == 0 || j == oax.points - 1) ? 0.5 : 1.0;
      acc += w * std::exp(logs[static_cast<std::size_t>(j)] - shift);
    }
    return std::exp(shift) * acc * oax.step();
  });
  // normalize over the axis
  double mass = 0.0;
  for (std::size_t i = 0; i < marg.size(); ++i) {
    const double w = (i == 0 || i + 1 == marg.size()) ? 0.5 : 1.0;
    mass += w * marg[i] * ax.step();
  }
  for (double& v : marg) v /= mass;
  return marg;
}

std::vector<double> regression_elicit_epsilon(const PoissonRegression& model, double kappa,
                                              const GridSpec& grid2d, double tol) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("regression_elicit_epsilon: kappa must lie in (0,1)");
  if (model.p != 2)
    throw std::invalid_argument("regression_elicit_epsilon: implemented for p = 2");
  const PriorClass cls = poisson_regression_class(model);

  auto cdf_of = [&](const std::vector<double>& pdf, double step) {
    std::vector<double> cdf(pdf.size(), 0.0);
    for (std::size_t i = 1; i < pdf.size(); ++i)
      cdf[i] = cdf[i - 1] + 0.5 * step * (pdf[i - 1] + pdf[i]);
    return cdf;
  };
  std::vector<std::vector<double>> base_cdf(2);
  for (int axis = 0; axis < 2; ++axis)
    base_cdf[static_cast<std::size_t>(axis)] =
        cdf_of(marginal_pdf_2d(model.prior.log_pdf, grid2d, axis),
               grid2d.axes[static_cast<std::size_t>(axis)].step());

  auto worst_marginal_k = [&](int obs, double t) -> double {
    const auto xi = model.row(obs);
    auto member_log_pdf = [&](ParamView beta) {
      double dot = 0.0;
      for (int j = 0; j < 2; ++j) dot += beta[static_cast<std::size_t>(j)] * xi[static_cast<std::size_t>(j)];
      return model.prior.log_pdf(beta) + t * dot;
    };
    double worst = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const auto pdf = marginal_pdf_2d(member_log_pdf, grid2d, axis);
      const auto cdf = cdf_of(pdf, grid2d.axes[static_cast<std::size_t>(axis)].step());
      double sup = 0.0;
      for (std::size_t i = 0; i < cdf.size(); ++i)
        sup = std::max(sup, std::fabs(cdf[i] - base_cdf[static_cast<std::size_t>(axis)][i]));
      worst = std::max(worst, sup);
    }
    return worst;
  };

  std::vector<double> eps(static_cast<std::size_t>(model.n_obs));
  for (int i = 0; i < model.n_obs; ++i) {
    double lo = 0.0, hi = 1.0;
    while (worst_marginal_k(i, hi) < kappa && hi < 1e3) hi *= 2.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (std::max(worst_marginal_k(i, mid), worst_marginal_k(i, -mid)) <= kappa)
        lo = mid;
      else
        hi = mid;
    }
    eps[static_cast<std::size_t>(i)] = lo;
  }
  return eps;
}

}  // namespace abcpriors
