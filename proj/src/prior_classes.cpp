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

#include <algorithm>
#include <cmath>
#include <limits>

namespace abcpriors {

namespace {

std::vector<double> central_diff_in_s(
    const std::function<double(std::span<const double>, ParamView)>& log_g,
    std::span<const double> s, ParamView theta) {
  std::vector<double> out(s.size());
  std::vector<double> probe(s.begin(), s.end());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::fabs(s[k]));
    probe[k] = s[k] + h;
    const double up = log_g(probe, theta);
    probe[k] = s[k] - h;
    const double dn = log_g(probe, theta);
    probe[k] = s[k];
    out[k] = (up - dn) / (2.0 * h);
  }
  return out;
}

}  // namespace

double suffstat_derivative_error(const SuffStatModel& model,
                                 std::span<const double> s,
                                 const std::vector<ParamPoint>& thetas) {
  double worst = 0.0;
  std::vector<double> analytic(static_cast<std::size_t>(model.stat_dim));
  for (const auto& theta : thetas) {
    model.dlogg_ds(s, theta.view(), analytic);
    const auto numeric = central_diff_in_s(model.log_g, s, theta.view());
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      const double scale = std::max(1.0, std::fabs(numeric[k]));
      worst = std::max(worst, std::fabs(analytic[k] - numeric[k]) / scale);
    }
  }
  return worst;
}

double expfam_log_g(const ExpFamSpec& spec, std::span<const double> s, ParamView theta) {
  std::vector<double> c(static_cast<std::size_t>(spec.stat_dim));
  spec.C(theta, c);
  double dot = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) dot += c[k] * s[k];
  return spec.log_A(theta) + spec.log_B0(s) + dot;
}

double conjugate_prior_log_pdf(const ExpFamSpec& spec, ParamView theta) {
  std::vector<double> c(static_cast<std::size_t>(spec.stat_dim));
  spec.C(theta, c);
  double dot = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) dot += c[k] * spec.conj_hyper.l[k];
  return spec.conj_hyper.k * spec.log_A(theta) + dot;
}

double expfam_dlogB0_error(const ExpFamSpec& spec, std::span<const double> s) {
  std::vector<double> analytic(s.size());
  spec.dlogB0_ds(s, analytic);
  const auto numeric = central_diff_in_s(
      [&](std::span<const double> sv, ParamView) { return spec.log_B0(sv); }, s,
      ParamView());
  double worst = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double scale = std::max(1.0, std::fabs(numeric[k]));
    worst = std::max(worst, std::fabs(analytic[k] - numeric[k]) / scale);
  }
  return worst;
}

TiltFn tilt_from_suffstat(const SuffStatModel& model, const DataVector& x0) {
  auto s0 = std::make_shared<SuffStat>(model.suff_stat(x0));
  auto deriv = model.dlogg_ds;
  TiltFn tilt;
  tilt.dim = model.stat_dim;
  tilt.provenance = TiltProvenance::SuffStatDerivative;
  tilt.h = [s0, deriv](ParamView theta, std::span<double> out) {
    deriv(s0->view(), theta, out);
    for (std::size_t k = 0; k < out.size(); ++k)
      if (!std::isfinite(out[k]))
        throw numerical_error("tilt_from_suffstat: derivative of log g not finite at s_" +
                              std::to_string(k));
  };
  return tilt;
}

TiltFn tilt_from_expfam(const ExpFamSpec& spec, const DataVector& x0) {
  const SuffStat s0 = spec.suff_stat(x0);
  auto constant = std::make_shared<std::vector<double>>(s0.values.size());
  spec.dlogB0_ds(s0.view(), *constant);
  for (std::size_t k = 0; k < constant->size(); ++k)
    if (!std::isfinite((*constant)[k]))
      throw numerical_error("tilt_from_expfam: dlogB0_ds not finite at s_" + std::to_string(k));
  auto cfun = spec.C;
  TiltFn tilt;
  tilt.dim = spec.stat_dim;
  tilt.provenance = TiltProvenance::ExpFam;
  tilt.h = [constant, cfun](ParamView theta, std::span<double> out) {
    cfun(theta, out);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += (*constant)[k];
      if (!std::isfinite(out[k]))
        throw numerical_error("tilt_from_expfam: tilt not finite at component " +
                              std::to_string(k));
    }
  };
  return tilt;
}

TiltFn tilt_from_conjugate(const ExpFamSpec& spec) {
  auto cfun = spec.C;
  TiltFn tilt;
  tilt.dim = spec.stat_dim;
  tilt.provenance = TiltProvenance::ExpFam;
  tilt.h = [cfun](ParamView theta, std::span<double> out) { cfun(theta, out); };
  return tilt;
}

TiltFn tilt_from_likelihood(
    const std::function<double(const DataVector&, ParamView)>& loglik,
    const DataVector& x0, bool discrete_data) {
  if (discrete_data)
    throw std::invalid_argument(
        "tilt_from_likelihood: data is discrete, the derivative in x is meaningless; "
        "supply a SuffStatModel and use tilt_from_suffstat");
  auto x0c = std::make_shared<DataVector>(x0);
  TiltFn tilt;
  tilt.dim = x0.size();
  tilt.provenance = TiltProvenance::LikelihoodGeneral;
  tilt.h = [loglik, x0c](ParamView theta, std::span<double> out) {
    DataVector probe = *x0c;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double xi = x0c->values[i];
      const double h = 1e-5 * std::max(1.0, std::fabs(xi));
      probe.values[i] = xi + h;
      const double up = loglik(probe, theta);
      probe.values[i] = xi - h;
      const double dn = loglik(probe, theta);
      const double d = (up - dn) / (2.0 * h);
      // half-step consistency guard against kinks and non-differentiable points
      probe.values[i] = xi + 0.5 * h;
      const double up2 = loglik(probe, theta);
      probe.values[i] = xi - 0.5 * h;
      const double dn2 = loglik(probe, theta);
      probe.values[i] = xi;
      const double d2 = (up2 - dn2) / h;
      if (!std::isfinite(d) || !std::isfinite(d2) ||
          std::fabs(d - d2) > 1e-3 * std::max(1.0, std::fabs(d)))
        throw numerical_error("tilt_from_likelihood: log f not differentiable in x_" +
                              std::to_string(i));
      out[i] = d;
    }
  };
  return tilt;
}

TiltFn tilt_from_likelihood_ratio(
    const std::function<double(const DataVector&, ParamView)>& log_f,
    const std::function<double(const DataVector&, ParamView)>& log_f_tilde,
    const DataVector& x0) {
  auto x0c = std::make_shared<DataVector>(x0);
  TiltFn tilt;
  tilt.dim = 1;
  tilt.provenance = TiltProvenance::LikelihoodRatio;
  tilt.h = [log_f, log_f_tilde, x0c](ParamView theta, std::span<double> out) {
    const double lf = log_f(*x0c, theta);
    const double lft = log_f_tilde(*x0c, theta);
    if (lft == -std::numeric_limits<double>::infinity() && std::isfinite(lf))
      throw numerical_error("tilt_from_likelihood_ratio: ratio undefined, f~ is zero where f is positive");
    out[0] = lf - lft;
  };
  return tilt;
}

PriorClass make_class(ClassKind kind, Density base, TiltFn tilt, std::vector<double> epsilon) {
  PriorClass cls;
  cls.kind = kind;
  cls.base = std::move(base);
  cls.tilt = std::move(tilt);
  cls.sign = (kind == ClassKind::ABC_G) ? -1.0 : 1.0;
  if (kind == ClassKind::AB) {
    if (!epsilon.empty())
      throw std::invalid_argument("make_class: the AB class carries no epsilon");
  } else {
    if (epsilon.size() != static_cast<std::size_t>(cls.tilt.dim))
      throw std::invalid_argument("make_class: epsilon length must match tilt dimension");
    for (double e : epsilon)
      if (!(e > 0.0)) throw std::invalid_argument("make_class: epsilon must be > 0");
  }
  cls.epsilon = std::move(epsilon);
  return cls;
}

TiltedPrior make_member(const PriorClass& cls, std::vector<double> t) {
  if (t.size() != static_cast<std::size_t>(cls.tilt.dim))
    throw std::invalid_argument("make_member: t length must match tilt dimension");
  if (cls.kind == ClassKind::AB) {
    for (double v : t)
      if (v != 1.0)
        throw std::invalid_argument("make_member: AB members have t fixed at 1");
  } else {
    for (std::size_t k = 0; k < t.size(); ++k)
      if (std::fabs(t[k]) > cls.epsilon[k])
        throw std::invalid_argument("make_member: |t_" + std::to_string(k) +
                                    "| exceeds epsilon_" + std::to_string(k) +
                                    ", not a member of the class");
  }
  TiltedPrior member;
  member.base = cls.base;
  member.tilt = cls.tilt;
  member.t = std::move(t);
  member.sign = cls.sign;
  member.log_normalizer_cache =
      std::make_shared<std::atomic<double>>(std::numeric_limits<double>::quiet_NaN());
  return member;
}

double TiltedPrior::log_pdf_unnormalized(ParamView theta) const {
  thread_local std::vector<double> buf;
  buf.resize(static_cast<std::size_t>(tilt.dim));
  tilt.h(theta, buf);
  double dot = 0.0;
  for (std::size_t k = 0; k < buf.size(); ++k) dot += buf[k] * t[k];
  return base.log_pdf(theta) + sign * dot;
}

double member_log_normalizer(const TiltedPrior& member) {
  const double cached = member.log_normalizer_cache->load();
  if (!std::isnan(cached)) return cached;

  double value;
  if (member.base.dim <= 3) {
    const GridSpec grid =
        default_grid(member.base, member.normalizer_policy.points_for_dim(member.base.dim));
    const double log_joint = log_quadrature(
        [&](ParamView theta) { return member.log_pdf_unnormalized(theta); }, grid);
    const double log_base = log_quadrature(member.base.log_pdf, grid);
    // E_pi[exp(sign h.t)] with the same truncation for numerator and base mass.
    value = log_joint - log_base;
  } else {
    if (!member.base.sampler)
      throw std::invalid_argument(
          "member_log_normalizer: base prior of dimension > 3 needs a sampler "
          "for the Monte Carlo normalizer");
    const std::size_t n = member.normalizer_policy.mc_particles;
    std::vector<double> logs(n);
    std::vector<double> theta(static_cast<std::size_t>(member.base.dim));
    std::vector<double> hbuf(static_cast<std::size_t>(member.tilt.dim));
    for (std::size_t i = 0; i < n; ++i) {
      Prng gen = substream(member.normalizer_policy.mc_seed, 11, i);
      member.base.sampler(gen, theta);
      member.tilt.h(theta, hbuf);
      double dot = 0.0;
      for (std::size_t k = 0; k < hbuf.size(); ++k) dot += hbuf[k] * member.t[k];
      logs[i] = member.sign * dot;
    }
    value = log_sum_exp(logs) - std::log(static_cast<double>(n));
  }
  if (!std::isfinite(value)) {
    double tmax = 0.0;
    for (double v : member.t) tmax = std::max(tmax, std::fabs(v));
    throw numerical_error("member_log_normalizer: normalizer not finite (max |t| = " +
                          std::to_string(tmax) + ")");
  }
  member.log_normalizer_cache->store(value);
  return value;
}

double member_log_pdf(const TiltedPrior& member, ParamView theta, bool normalized) {
  const double raw = member.log_pdf_unnormalized(theta);
  return normalized ? raw - member_log_normalizer(member) : raw;
}

Density member_density(const TiltedPrior& member) {
  auto holder = std::make_shared<TiltedPrior>(member);
  Density d;
  d.dim = member.base.dim;
  d.normalized = member.base.normalized;
  d.support = member.base.support;
  d.log_pdf = [holder](ParamView theta) { return member_log_pdf(*holder, theta, true); };
  return d;
}

ExpFamSpec conjugate_shift(const ExpFamSpec& spec, double t) {
  if (spec.conj_hyper.l.size() != 1)
    throw std::invalid_argument("conjugate_shift: scalar shift requires a 1-dimensional l");
  return conjugate_shift(spec, std::span<const double>(&t, 1));
}

ExpFamSpec conjugate_shift(const ExpFamSpec& spec, std::span<const double> t) {
  if (t.size() != spec.conj_hyper.l.size())
    throw std::invalid_argument("conjugate_shift: shift length must match l");
  ExpFamSpec shifted = spec;
  for (std::size_t k = 0; k < t.size(); ++k) shifted.conj_hyper.l[k] += t[k];
  if (shifted.hyper_valid && !shifted.hyper_valid(shifted.conj_hyper))
    throw std::invalid_argument(
        "conjugate_shift: shifted hyperparameters leave the conjugate family's valid region");
  return shifted;
}

bool class_contains(const PriorClass& cls, const TiltedPrior& member) {
  if (member.base.id != cls.base.id || member.tilt.id != cls.tilt.id)
    throw std::invalid_argument(
        "class_contains: member was built over a different base or tilt, not comparable");
  if (cls.kind == ClassKind::AB) {
    for (double v : member.t)
      if (v != 1.0) return false;
    return true;
  }
  for (std::size_t k = 0; k < member.t.size(); ++k)
    if (std::fabs(member.t[k]) > cls.epsilon[k]) return false;
  return true;
}

}  // namespace abcpriors
