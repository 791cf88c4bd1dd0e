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

// Scalar distribution functions used as closed-form oracles throughout.

namespace abcpriors::stats {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS241, ~1e-15 relative accuracy).
double normal_quantile(double p);

double normal_log_pdf(double x, double mean, double var);

/// Gamma(shape, rate) log-density.
double gamma_log_pdf(double x, double shape, double rate);

double gamma_cdf(double x, double shape, double rate);

double digamma(double x);

}  // namespace abcpriors::stats
