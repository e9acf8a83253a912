// Copyright 2026 The wptmec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wptmec/numerics/lambert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wptmec {
namespace {

constexpr double kE = std::numbers::e;
constexpr double kInvE = 1.0 / std::numbers::e;
constexpr int kMaxHalleyIterations = 50;
constexpr double kHalleyTolerance = 1e-14;

double initial_guess(double x) {
  if (x < -0.32) {
    // Branch-point series in p = sqrt(2 (1 + e x)).
    const double p = std::sqrt(std::max(0.0, 2.0 * std::fma(kE, x, 1.0)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  }
  if (x < 3.0) {
    // Winitzki's approximation.
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l = std::log(x);
  const double ll = std::log(l);
  return l - ll + ll / l;
}

// e^v (v - 1) + 1, by series for the small v where the direct form cancels.
double shifted_residual_base(double v) {
  if (v > 1.5) return std::exp(v) * (v - 1.0) + 1.0;
  double term = v;  // v^n / n!
  double sum = 0.0;
  for (int n = 2; n < 40; ++n) {
    term *= v / n;
    const double add = (n - 1) * term;
    sum += add;
    if (add < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
  if (x < -kInvE - 1e-15) throw std::domain_error("lambert_w0: argument below -1/e");
  if (x <= -kInvE) return -1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  double w = initial_guess(x);
  for (int it = 0; it < kMaxHalleyIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 <= 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (w < -1.0) w = -1.0;
    if (std::abs(step) <= kHalleyTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

double lambert_w0_shifted(double r) {
  if (std::isnan(r) || r < 0.0) throw std::domain_error("lambert_w0_shifted: r must be >= 0");
  if (r == 0.0) return 0.0;
  if (r > 0.5) return 1.0 + lambert_w0((r - 1.0) * kInvE);
  // Solve e^v (v - 1) + 1 = r for v = 1 + W >= 0 by Newton from the
  // branch-point series.
  const double p = std::sqrt(2.0 * r);
  double v = p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  for (int it = 0; it < kMaxHalleyIterations; ++it) {
    const double f = shifted_residual_base(v) - r;
    const double step = f / (v * std::exp(v));
    v -= step;
    if (std::abs(step) <= kHalleyTolerance * v) break;
  }
  return v;
}

}  // namespace wptmec
