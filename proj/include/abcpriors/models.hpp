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

// Worked models shipped as executable oracles: Normal with known variance,
// Poisson-Gamma, and the Poisson-regression robustness workflow.

#include "abcpriors/prior_classes.hpp"
#include "abcpriors/samplers.hpp"

namespace abcpriors {

// ---------------------------------------------------------------------------
// Density factories (12-sigma default support boxes, direct samplers).

Density make_normal_density(double mean, double var);
Density make_gamma_density(double shape, double rate);
Density make_bivariate_normal_density(double mean1, double mean2, double sd1, double sd2,
                                      double rho);
/// Independent standard normal coordinates (product density, MTP2).
Density make_std_normal_product_density(int dim);

// ---------------------------------------------------------------------------
// Normal with known data variance.

struct NormalKnownVar {
  int n = 100;          // observation count
  double sigma2 = 2.0;  // known data variance
  double m = 10.0;      // prior mean
  double s2 = 0.02;     // prior variance
  double xbar0 = 9.975; // observed sufficient statistic
};

struct NormalPosterior {
  double mean = 0.0;
  double var = 0.0;
  double w1 = 0.0;  // s'^2 / s^2
  double w2 = 0.0;  // n s'^2 / sigma^2
};

/// Conjugate posterior parameters: 1/s'^2 = 1/s^2 + n/sigma^2, m' = w1 m + w2 xbar0.
NormalPosterior normal_truth(const NormalKnownVar& model);

Density normal_prior(const NormalKnownVar& model);
/// Posterior density for an arbitrary observed mean xbar.
Density normal_posterior_density(const NormalKnownVar& model, double xbar);

/// g(xbar | mu) = N(xbar; mu, sigma^2/n); sufficient statistic is the mean.
SuffStatModel normal_suffstat_model(const NormalKnownVar& model);
ExpFamSpec normal_expfam_spec(const NormalKnownVar& model);
/// Conjugate prior N(l/k * sigma^2/n ... ) realized from hyperparameters.
Density normal_prior_for_hyper(const NormalKnownVar& model, const ConjHyper& hyper);

/// Gamma_eps via the derivative of log g at xbar0.
PriorClass normal_class_abc(const NormalKnownVar& model, double eps);
/// ABC-E class; member at shift t is N(m + (w2/w1) t, s^2).
PriorClass normal_class_E(const NormalKnownVar& model, double eps);
Density normal_member_E_density(const NormalKnownVar& model, double t);

/// Simulates n raw observations N(theta, sigma^2).
Simulator normal_simulator_full(const NormalKnownVar& model);
/// Simulates the sufficient statistic directly: one draw of
/// xbar' ~ N(theta, sigma^2/n), distribution-identical to the full simulator
/// at the acceptance test by sufficiency.
Simulator normal_simulator_suffstat(const NormalKnownVar& model);

/// Direct route for the ABC-E class: t ~ U(-eps, eps), then one exact draw
/// from the conjugate posterior with observed mean xbar0 + t.
WeightedSample normal_direct_posterior_x0(const NormalKnownVar& model, double eps,
                                          std::size_t n, RngSeed seed);
/// Exact draws from the true posterior (t = 0).
WeightedSample normal_true_posterior_sample(const NormalKnownVar& model, std::size_t n,
                                            RngSeed seed);

// ---------------------------------------------------------------------------
// Poisson counts with a Gamma(r, v) prior (shape r, rate v).

struct PoissonGamma {
  int n = 10;          // observation count
  double r = 2.0;      // prior shape
  double v = 1.0;      // prior rate
  double sum_x0 = 30;  // observed sufficient statistic (sum of counts)
};

Density poisson_prior(const PoissonGamma& model);
/// g(s | lambda) = exp(-n lambda) lambda^s up to theta-free factors, so the
/// tilt is exactly log(lambda); sufficient statistic is the sum.
SuffStatModel poisson_suffstat_model(const PoissonGamma& model);
ExpFamSpec poisson_expfam_spec(const PoissonGamma& model);

PriorClass poisson_class_abc(const PoissonGamma& model, double eps);
/// ABC-E class {Gamma(r + t, v)}; requires r - eps > 0.
PriorClass poisson_class_E(const PoissonGamma& model, double eps);
/// Member prior Gamma(r + t, v).
Density poisson_member_density(const PoissonGamma& model, double t);
/// Posterior for the member at shift t: Gamma(r + t + sum_x0, v + n).
Density poisson_posterior_density(const PoissonGamma& model, double t);

// ---------------------------------------------------------------------------
// Poisson regression log E[Y_i] = beta' X_i (the robustness workflow).

struct PoissonRegression {
  int n_obs = 0;
  int p = 0;
  std::vector<double> X;      // row-major n_obs x p design matrix
  std::vector<double> y0;     // observed counts (nonnegative integers)
  std::vector<double> epsilon;  // per-observation tolerance, length n_obs
  Density prior;              // defaults to independent standard normals

  std::span<const double> row(int i) const {
    return std::span<const double>(X.data() + static_cast<std::size_t>(i) *
                                   static_cast<std::size_t>(p), static_cast<std::size_t>(p));
  }
};

/// Synthetic dataset: intercept plus an equispaced covariate on [-1, 1],
/// counts drawn at beta_true = (0.5, -0.25) under the given seed.
PoissonRegression make_synthetic_poisson_regression(int n_obs, RngSeed seed,
                                                    double eps = 1.0);

/// Class with tilt h_i(beta) = beta' X_i and the tilt entering positively (the
/// class perturbs the observations y_i as the general construction does, but
/// its displayed weight is exp(+sum_i beta'X_i t_i)).
PriorClass poisson_regression_class(const PoissonRegression& model);

/// Poisson-regression log-likelihood of the observed counts.
double poisson_regression_loglik(const PoissonRegression& model, ParamView beta);

struct RobustnessReport {
  std::vector<double> center_mean;    // posterior mean at t = 0
  std::vector<double> lower, upper;   // range of posterior means over members
  std::vector<std::vector<double>> member_means;  // one row per sampled member
  double min_ess = 0.0;
};

/// Samples `n_members` tilt vectors uniformly in the epsilon box, forms each
/// member's posterior by importance weighting with the regression likelihood
/// at y0, and reports the range of posterior means of beta.
RobustnessReport regression_robustness(const PoissonRegression& model,
                                       std::size_t n_members, std::size_t n_particles,
                                       RngSeed seed);

/// Marginal pdf of one coordinate of a 2-D density on the grid's axis
/// (normalized over the grid).
std::vector<double> marginal_pdf_2d(const std::function<double(ParamView)>& log_pdf,
                                    const GridSpec& grid2d, int axis);

/// Per-observation elicitation: for each i, the largest t such that tilting
/// with t e_i keeps every coordinate's marginal Kolmogorov distance <= kappa
/// (the binding marginal decides).
std::vector<double> regression_elicit_epsilon(const PoissonRegression& model, double kappa,
                                              const GridSpec& grid2d, double tol = 1e-4);

}  // namespace abcpriors
