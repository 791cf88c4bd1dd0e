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

// Importance samplers for the tilted classes and a standard rejection-ABC
// baseline. All outputs are bit-identical across runs and thread counts for a
// fixed RngSeed: every particle draws from its own substream and reductions
// are serial.

#include "abcpriors/prior_classes.hpp"

namespace abcpriors {

struct SampleResult {
  WeightedSample sample;
  double ess = 0.0;
  /// Set when ESS < N/100 (severe weight degeneracy); the sample is still valid.
  bool degeneracy_warning = false;
};

/// A.I: draw theta_i from the base prior, weight by exp(sign * h(theta_i) . t),
/// self-normalize.
SampleResult sample_prior_member(const TiltedPrior& member, std::size_t n, RngSeed seed);

/// A.II: weighted sample from the posterior pi(theta | x') induced by the
/// member at tilt t, using only the observed statistic: log-weight =
/// sign * h(theta) . t + log g(s(x0) | theta). Never touches a data simulator.
SampleResult sample_posterior_xprime(const PriorClass& cls, const SuffStatModel& model,
                                     const DataVector& x0, std::vector<double> t,
                                     std::size_t n, RngSeed seed);
SampleResult sample_posterior_xprime(const PriorClass& cls, const ExpFamSpec& spec,
                                     const DataVector& x0, std::vector<double> t,
                                     std::size_t n, RngSeed seed);

/// A.III: t_i ~ U(-eps, eps) component-wise, m-particle A.II block per t_i,
/// joint normalization over all N_t * m weights (equal pooling, since m is
/// constant per block).
SampleResult sample_posterior_x0(const PriorClass& cls, const SuffStatModel& model,
                                 const DataVector& x0, std::size_t n_t, std::size_t m,
                                 RngSeed seed);

struct AbcConfig {
  std::size_t n = 1000;               // accepted draws wanted
  std::vector<double> epsilon;        // per-coordinate tolerance on |s(x') - s(x0)|
  std::size_t max_attempts = 1000000;
};

/// Simulator writes a dataset for theta into `out` (size fixed by the model).
using Simulator = std::function<void(ParamView theta, Prng&, std::vector<double>& out)>;

struct AbcResult {
  WeightedSample sample;  // uniform weights
  double acceptance_rate = 0.0;
  std::size_t attempts = 0;
  double min_distance_seen = 0.0;  // max-coordinate |s'-s0| closest to acceptance
};

/// Standard rejection ABC: theta ~ prior, x' ~ simulator, accept iff
/// |s_k(x') - s_k(x0)| <= eps_k for every k. Attempts are indexed and scanned
/// in order, so acceptance is thread-count independent.
AbcResult rejection_abc(const Density& prior, const Simulator& simulator,
                        const std::function<SuffStat(const DataVector&)>& suff_stat,
                        const DataVector& x0, const AbcConfig& cfg, RngSeed seed);

/// Systematic resampling to M equal-weight points; expected multiplicity of
/// point i is M * w_i.
WeightedSample systematic_resample(const WeightedSample& sample, std::size_t m, RngSeed seed);

struct KsTestResult {
  double statistic = 0.0;
  double critical_1pct = 0.0;
  bool below_critical() const { return statistic < critical_1pct; }
};

/// Classical two-sample Kolmogorov-Smirnov statistic for equal-weight
/// univariate samples, with the asymptotic 1% critical value
/// 1.628 * sqrt((n_a + n_b) / (n_a * n_b)). Both sizes must be >= 25.
KsTestResult ks_two_sample(const WeightedSample& a, const WeightedSample& b);
KsTestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Values of a univariate sample (convenience for KS and summaries).
std::vector<double> sample_values(const WeightedSample& s);

/// Weighted mean / sd of a normalized sample, and standard error of the mean.
struct MomentSummary {
  double mean = 0.0;
  double sd = 0.0;
  double mean_se = 0.0;
};
MomentSummary weighted_moments(const WeightedSample& s);

}  // namespace abcpriors
