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

// Tilted-prior classes built from a base prior and a model-derived tilt:
//   ABC    pi'(theta,t) = pi(theta) exp(sum_k h_k(theta) t_k) / normalizer,
//          h from the derivative of log g at the observed sufficient statistic;
//   ABC-E  the conjugate-hyperparameter-shift family for exponential-family
//          likelihoods (tilt is C(theta), shifts are exact);
//   ABC-G  per-observation likelihood-derivative tilt, negative sign;
//   AB     single ratio-tilted prior log f - log f~ at the observed data.

#include <atomic>
#include <memory>
#include <optional>

#include "abcpriors/core.hpp"

namespace abcpriors {

/// Likelihood reduced to its sufficient statistic: log g(s|theta), the
/// derivative of log g in s, and the statistic map itself.
struct SuffStatModel {
  std::function<double(std::span<const double> s, ParamView theta)> log_g;
  std::function<void(std::span<const double> s, ParamView theta, std::span<double> out)> dlogg_ds;
  std::function<SuffStat(const DataVector&)> suff_stat;
  int stat_dim = 1;
};

/// Max relative disagreement between dlogg_ds and central finite differences of
/// log_g over the given probe points. The model invariant requires < 1e-5.
double suffstat_derivative_error(const SuffStatModel& model,
                                 std::span<const double> s,
                                 const std::vector<ParamPoint>& thetas);

struct ConjHyper {
  double k = 0.0;
  std::vector<double> l;
};

/// A(theta) B0(s) exp(C(theta) . s) factorization plus conjugate
/// hyperparameters gamma = (k, l) for the prior [A(theta)]^k exp(C(theta) . l).
struct ExpFamSpec {
  std::function<double(ParamView)> log_A;
  std::function<double(std::span<const double> s)> log_B0;
  std::function<void(std::span<const double> s, std::span<double> out)> dlogB0_ds;
  std::function<void(ParamView, std::span<double> out)> C;
  std::function<SuffStat(const DataVector&)> suff_stat;
  ConjHyper conj_hyper;
  int stat_dim = 1;
  /// Returns false when hyperparameters leave the family's valid region.
  std::function<bool(const ConjHyper&)> hyper_valid;
};

/// log g(s|theta) reconstructed from the factorization (theta-free pieces of
/// B(x) are dropped, so this is exact up to an additive constant in theta).
double expfam_log_g(const ExpFamSpec& spec, std::span<const double> s, ParamView theta);

/// Unnormalized log of the conjugate prior [A]^k exp(C . l).
double conjugate_prior_log_pdf(const ExpFamSpec& spec, ParamView theta);

double expfam_dlogB0_error(const ExpFamSpec& spec, std::span<const double> s);

enum class TiltProvenance { SuffStatDerivative, ExpFam, LikelihoodGeneral, LikelihoodRatio };

/// Vector tilt function h(theta); writes its `dim` components into `out`.
struct TiltFn {
  std::function<void(ParamView, std::span<double> out)> h;
  int dim = 1;
  TiltProvenance provenance = TiltProvenance::SuffStatDerivative;
  std::uint64_t id = Density::next_id();

  std::vector<double> eval(ParamView theta) const {
    std::vector<double> out(static_cast<std::size_t>(dim));
    h(theta, out);
    return out;
  }
};

/// h_k(theta) = d log g / d s_k evaluated at (s(x0), theta).
TiltFn tilt_from_suffstat(const SuffStatModel& model, const DataVector& x0);

/// h(theta) = dlogB0_ds(S(x0)) + C(theta); the theta-free term is retained,
/// normalization removes it.
TiltFn tilt_from_expfam(const ExpFamSpec& spec, const DataVector& x0);

/// h(theta) = C(theta): the ABC-E tilt (conjugate shift t enters through l+t).
TiltFn tilt_from_conjugate(const ExpFamSpec& spec);

/// k_i(theta) = d log f / d x_i at x0 via central differences (length N).
/// Callers build ABC-G members with the negative sign convention.
/// Pass discrete_data = true for count data: the derivative is meaningless and
/// the sufficient-statistic route must be used instead.
TiltFn tilt_from_likelihood(
    const std::function<double(const DataVector&, ParamView)>& loglik,
    const DataVector& x0, bool discrete_data = false);

/// Scalar h(theta) = log f(x0|theta) - log f~(x0|theta) for the AB class.
TiltFn tilt_from_likelihood_ratio(
    const std::function<double(const DataVector&, ParamView)>& log_f,
    const std::function<double(const DataVector&, ParamView)>& log_f_tilde,
    const DataVector& x0);

enum class ClassKind { ABC, ABC_E, ABC_G, AB };

/// How member normalizers are computed: tensor trapezoid over the base support
/// for dimension <= 3, self-normalized Monte Carlo from the base beyond that.
struct NormalizerPolicy {
  int grid_points_1d = 20001;
  int grid_points_2d = 513;
  int grid_points_3d = 129;
  std::size_t mc_particles = 200000;
  RngSeed mc_seed{0x5eed, 901};

  int points_for_dim(int dim) const {
    return dim == 1 ? grid_points_1d : (dim == 2 ? grid_points_2d : grid_points_3d);
  }
};

/// One member pi'(theta, t) of a class; unnormalized log-pdf is
/// base.log_pdf(theta) + sign * sum_k h_k(theta) t_k.
struct TiltedPrior {
  Density base;
  TiltFn tilt;
  std::vector<double> t;
  double sign = 1.0;
  NormalizerPolicy normalizer_policy;
  /// Cached log normalizer; single-assignment (first computation wins,
  /// concurrent recomputations are identical).
  std::shared_ptr<std::atomic<double>> log_normalizer_cache;

  double log_pdf_unnormalized(ParamView theta) const;
};

struct PriorClass {
  ClassKind kind = ClassKind::ABC;
  Density base;
  TiltFn tilt;
  std::vector<double> epsilon;  // empty for AB
  double sign = 1.0;
  std::optional<ExpFamSpec> expfam;  // present for ABC-E
};

PriorClass make_class(ClassKind kind, Density base, TiltFn tilt, std::vector<double> epsilon);

/// Member at tilt magnitude t; |t_k| <= epsilon_k enforced (AB requires t = {1}).
TiltedPrior make_member(const PriorClass& cls, std::vector<double> t);

/// Computes (and caches) log E_pi[exp(sign * h . t)].
double member_log_normalizer(const TiltedPrior& member);

/// Member log-density; when `normalized`, the cached log-normalizer is
/// subtracted (quadrature for dim <= 3, Monte Carlo above).
double member_log_pdf(const TiltedPrior& member, ParamView theta, bool normalized);

/// Normalized member as a Density (shares the cached normalizer).
Density member_density(const TiltedPrior& member);

/// gamma' = (k, l + t): the ABC-E member at shift t.
ExpFamSpec conjugate_shift(const ExpFamSpec& spec, double t);
ExpFamSpec conjugate_shift(const ExpFamSpec& spec, std::span<const double> t);

/// True iff |t_k| <= epsilon_k for all k. Members built over a different base
/// or tilt are not comparable and raise invalid_argument.
bool class_contains(const PriorClass& cls, const TiltedPrior& member);

}  // namespace abcpriors
