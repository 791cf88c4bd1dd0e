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

#include "abcpriors/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "abcpriors/kernels.hpp"

namespace abcpriors {

namespace {

constexpr std::uint64_t kTagPrior = 1;
constexpr std::uint64_t kTagTilt = 2;
constexpr std::uint64_t kTagAbc = 3;
constexpr std::uint64_t kTagResample = 4;

SampleResult finish(WeightedSample sample) {
  SampleResult result;
  result.sample = normalize(std::move(sample));
  result.ess = ess(result.sample);
  result.degeneracy_warning =
      result.ess < static_cast<double>(result.sample.size()) / 100.0;
  return result;
}

// Draw n particles from the base prior (one substream per index) and compute
// per-particle log-weights; fully data-parallel, bit-identical for any thread
// count.
WeightedSample draw_and_weight(const Density& base, std::size_t n, RngSeed seed,
                               const std::function<double(ParamView)>& log_weight) {
  if (!base.sampler)
    throw std::invalid_argument("sampler: base prior is not directly sampleable");
  if (n < 1) throw std::invalid_argument("sampler: need at least one particle");
  const auto dim = static_cast<std::size_t>(base.dim);
  WeightedSample out;
  out.dim = base.dim;
  out.seed = seed.seed;
  out.coords.resize(n * dim);
  out.log_weights.resize(n);
  kernels::transform_indexed(n, out.log_weights.data(), [&](std::size_t i) {
    Prng gen = substream(seed, kTagPrior, i);
    std::span<double> theta(out.coords.data() + i * dim, dim);
    base.sampler(gen, theta);
    return log_weight(theta);
  });
  return out;
}

double tilt_dot(const TiltFn& tilt, std::span<const double> t, ParamView theta) {
  thread_local std::vector<double> buf;
  buf.resize(static_cast<std::size_t>(tilt.dim));
  tilt.h(theta, buf);
  double dot = 0.0;
  for (std::size_t k = 0; k < buf.size(); ++k) dot += buf[k] * t[k];
  return dot;
}

SampleResult posterior_xprime_impl(const PriorClass& cls,
                                   const std::function<double(ParamView)>& log_g0,
                                   std::vector<double> t, std::size_t n, RngSeed seed) {
  if (t.size() != static_cast<std::size_t>(cls.tilt.dim))
    throw std::invalid_argument("sample_posterior_xprime: t length must match tilt dimension");
  auto member = make_member(cls, t);  // validates |t| <= eps
  WeightedSample ws = draw_and_weight(
      cls.base, n, seed, [&](ParamView theta) {
        return cls.sign * tilt_dot(cls.tilt, member.t, theta) + log_g0(theta);
      });
  return finish(std::move(ws));
}

}  // namespace

SampleResult sample_prior_member(const TiltedPrior& member, std::size_t n, RngSeed seed) {
  WeightedSample ws = draw_and_weight(
      member.base, n, seed, [&](ParamView theta) {
        return member.sign * tilt_dot(member.tilt, member.t, theta);
      });
  return finish(std::move(ws));
}

SampleResult sample_posterior_xprime(const PriorClass& cls, const SuffStatModel& model,
                                     const DataVector& x0, std::vector<double> t,
                                     std::size_t n, RngSeed seed) {
  const SuffStat s0 = model.suff_stat(x0);
  auto log_g = model.log_g;
  return posterior_xprime_impl(
      cls, [s0, log_g](ParamView theta) { return log_g(s0.view(), theta); }, std::move(t),
      n, seed);
}

SampleResult sample_posterior_xprime(const PriorClass& cls, const ExpFamSpec& spec,
                                     const DataVector& x0, std::vector<double> t,
                                     std::size_t n, RngSeed seed) {
  const SuffStat s0 = spec.suff_stat(x0);
  return posterior_xprime_impl(
      cls, [&spec, s0](ParamView theta) { return expfam_log_g(spec, s0.view(), theta); },
      std::move(t), n, seed);
}

SampleResult sample_posterior_x0(const PriorClass& cls, const SuffStatModel& model,
                                 const DataVector& x0, std::size_t n_t, std::size_t m,
                                 RngSeed seed) {
  if (n_t < 1 || m < 1)
    throw std::invalid_argument("sample_posterior_x0: N_t and m must be >= 1");
  if (cls.kind == ClassKind::AB)
    throw std::invalid_argument("sample_posterior_x0: the AB class has no epsilon to draw from");
  const auto tilt_dim = static_cast<std::size_t>(cls.tilt.dim);
  const auto dim = static_cast<std::size_t>(cls.base.dim);
  const SuffStat s0 = model.suff_stat(x0);

  // Step I: t_i ~ U(-eps, +eps), component-wise.
  std::vector<double> ts(n_t * tilt_dim);
  for (std::size_t i = 0; i < n_t; ++i) {
    Prng gen = substream(seed, kTagTilt, i);
    for (std::size_t k = 0; k < tilt_dim; ++k)
      ts[i * tilt_dim + k] = gen.uniform(-cls.epsilon[k], cls.epsilon[k]);
  }

  // Step II: m-particle importance block per t_i.
  const std::size_t total = n_t * m;
  WeightedSample pool;
  pool.dim = cls.base.dim;
  pool.seed = seed.seed;
  pool.coords.resize(total * dim);
  pool.log_weights.resize(total);
  kernels::transform_indexed(total, pool.log_weights.data(), [&](std::size_t q) {
    const std::size_t block = q / m;
    const RngSeed block_seed = derive_seed(seed, 0x626c6b00ULL + block);
    Prng gen = substream(block_seed, kTagPrior, q % m);
    std::span<double> theta(pool.coords.data() + q * dim, dim);
    cls.base.sampler(gen, theta);
    const std::span<const double> t(ts.data() + block * tilt_dim, tilt_dim);
    return cls.sign * tilt_dot(cls.tilt, t, theta) + model.log_g(s0.view(), theta);
  });

  // Step III: joint normalization of the N_t x m weights. Each block is
  // self-normalized by its own estimated E_pi[w_t g] (the A.II denominator);
  // dividing the pooled weights by their total then weighs blocks equally.
  for (std::size_t block = 0; block < n_t; ++block) {
    const std::span<double> slice(pool.log_weights.data() + block * m, m);
    const double lse = log_sum_exp(slice);
    for (double& lw : slice) lw -= lse;
  }
  return finish(std::move(pool));
}

AbcResult rejection_abc(const Density& prior, const Simulator& simulator,
                        const std::function<SuffStat(const DataVector&)>& suff_stat,
                        const DataVector& x0, const AbcConfig& cfg, RngSeed seed) {
  if (!prior.sampler)
    throw std::invalid_argument("rejection_abc: prior is not directly sampleable");
  if (cfg.n < 1 || cfg.max_attempts < cfg.n)
    throw std::invalid_argument("rejection_abc: need n >= 1 and max_attempts >= n");
  const SuffStat s0 = suff_stat(x0);
  if (cfg.epsilon.size() != s0.values.size())
    throw std::invalid_argument("rejection_abc: epsilon length must match the statistic");
  for (double e : cfg.epsilon)
    if (!(e > 0.0)) throw std::invalid_argument("rejection_abc: epsilon must be > 0");

  const auto dim = static_cast<std::size_t>(prior.dim);
  AbcResult result;
  result.sample.dim = prior.dim;
  result.sample.seed = seed.seed;
  result.min_distance_seen = INFINITY;

  constexpr std::size_t kChunk = 1 << 15;
  std::vector<double> thetas(kChunk * dim);
  std::vector<double> dist(kChunk);  // max_k |s'_k - s0_k| / eps_k; accept iff <= 1
  std::size_t accepted = 0;

  for (std::size_t start = 0; start < cfg.max_attempts && accepted < cfg.n;
       start += kChunk) {
    const std::size_t count = std::min(kChunk, cfg.max_attempts - start);
    kernels::transform_indexed(count, dist.data(), [&](std::size_t j) {
      const std::size_t attempt = start + j;
      Prng gen = substream(seed, kTagAbc, attempt);
      std::span<double> theta(thetas.data() + j * dim, dim);
      prior.sampler(gen, theta);
      thread_local DataVector sim({0.0});
      simulator(theta, gen, sim.values);
      const SuffStat s = suff_stat(sim);
      double worst = 0.0;
      for (std::size_t k = 0; k < s.values.size(); ++k)
        worst = std::max(worst, std::fabs(s.values[k] - s0.values[k]) / cfg.epsilon[k]);
      return worst;
    });
    // serial scan in attempt order: acceptance set is chunk- and
    // thread-count-independent
    for (std::size_t j = 0; j < count && accepted < cfg.n; ++j) {
      ++result.attempts;
      result.min_distance_seen = std::min(result.min_distance_seen, dist[j]);
      if (dist[j] <= 1.0) {
        const double* th = thetas.data() + j * dim;
        result.sample.coords.insert(result.sample.coords.end(), th, th + dim);
        ++accepted;
      }
    }
  }

  if (accepted == 0)
    throw numerical_error(
        "rejection_abc: no acceptances in " + std::to_string(result.attempts) +
        " attempts; closest scaled distance seen was " +
        std::to_string(result.min_distance_seen));
  result.sample.log_weights.assign(accepted, 0.0);
  result.sample = normalize(std::move(result.sample));
  result.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(result.attempts);
  return result;
}

WeightedSample systematic_resample(const WeightedSample& sample, std::size_t m, RngSeed seed) {
  if (m < 1) throw std::invalid_argument("systematic_resample: M must be >= 1");
  if (!sample.normalized)
    throw std::invalid_argument("systematic_resample: input must be normalized");
  const auto dim = static_cast<std::size_t>(sample.dim);
  WeightedSample out;
  out.dim = sample.dim;
  out.seed = sample.seed;
  out.coords.reserve(m * dim);
  out.log_weights.assign(m, -std::log(static_cast<double>(m)));

  Prng gen = substream(seed, kTagResample, 0);
  const double u0 = gen.uniform01() / static_cast<double>(m);
  std::size_t i = 0;
  double cumulative = sample.weights[0];
  for (std::size_t k = 0; k < m; ++k) {
    const double u = u0 + static_cast<double>(k) / static_cast<double>(m);
    while (cumulative < u && i + 1 < sample.size()) cumulative += sample.weights[++i];
    const ParamView p = sample.point(i);
    out.coords.insert(out.coords.end(), p.begin(), p.end());
  }
  return normalize(std::move(out));
}

KsTestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 25 || b.size() < 25)
    throw std::invalid_argument("ks_two_sample: both samples must have size >= 25");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsTestResult result;
  result.statistic = d;
  result.critical_1pct = 1.628 * std::sqrt((na + nb) / (na * nb));
  return result;
}

KsTestResult ks_two_sample(const WeightedSample& a, const WeightedSample& b) {
  return ks_two_sample(sample_values(a), sample_values(b));
}

std::vector<double> sample_values(const WeightedSample& s) {
  if (s.dim != 1)
    throw std::invalid_argument("sample_values: univariate samples only");
  return s.coords;
}

MomentSummary weighted_moments(const WeightedSample& s) {
  if (!s.normalized) throw std::invalid_argument("weighted_moments: normalize first");
  if (s.dim != 1) throw std::invalid_argument("weighted_moments: univariate samples only");
  MomentSummary out;
  double sq = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.mean += s.weights[i] * s.coords[i];
    sq += s.weights[i] * s.weights[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s.coords[i] - out.mean;
    var += s.weights[i] * d * d;
  }
  out.sd = std::sqrt(var);
  out.mean_se = out.sd * std::sqrt(sq);
  return out;
}

}  // namespace abcpriors
