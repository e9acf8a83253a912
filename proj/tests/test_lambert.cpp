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

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "wptmec/numerics/lambert.hpp"

using namespace wptmec;
using doctest::Approx;

namespace {

// Plain Newton on w e^w = x from a safe start, as an independent check.
double newton_w(double x) {
  double w = x < 1.0 ? 0.0 : std::log(x);
  for (int i = 0; i < 200; ++i) {
    const double f = w * std::exp(w) - x;
    const double d = std::exp(w) * (w + 1.0);
    const double next = w - f / d;
    if (std::abs(next - w) < 1e-16 * std::max(1.0, std::abs(w))) return next;
    w = next;
  }
  return w;
}

// e^z (z - 1) + 1 = sum_{n>=2} (n - 1) z^n / n!, summed directly so small z
// does not cancel.
double shifted_inverse(double z) {
  if (z > 0.5) return std::exp(z) * (z - 1.0) + 1.0;
  double term = z;  // z^n / n! at n = 1
  double sum = 0.0;
  for (int n = 2; n < 40; ++n) {
    term *= z / n;
    sum += (n - 1) * term;
  }
  return sum;
}

}  // namespace

TEST_CASE("fixed values") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(-std::exp(-1.0)) == Approx(-1.0).epsilon(1e-7));
  CHECK(lambert_w0(1.0) == Approx(0.5671432904).epsilon(1e-10));
  CHECK(lambert_w0(1.0) == Approx(newton_w(1.0)).epsilon(1e-14));
  CHECK(lambert_w0(std::exp(1.0)) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("domain") {
  CHECK_THROWS_AS(lambert_w0(-0.4), std::domain_error);
  CHECK_NOTHROW(lambert_w0(-std::exp(-1.0) - 1e-16));
  CHECK_THROWS_AS(lambert_w0(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("inverse property on a log grid") {
  const double e_inv = std::exp(-1.0);
  // Offsets from the branch point, then positive arguments up to 1e6.
  for (int i = 0; i < 500; ++i) {
    const double x = -e_inv + std::pow(10.0, -12.0 + 12.0 * i / 499.0) * e_inv;
    const double w = lambert_w0(x);
    CHECK(w >= -1.0);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
  for (int i = 0; i < 500; ++i) {
    const double x = std::pow(10.0, -12.0 + 18.0 * i / 499.0);
    const double w = lambert_w0(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("matches an independent Newton iteration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lx(-3.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double x = std::pow(10.0, lx(rng));
    CHECK(lambert_w0(x) == Approx(newton_w(x)).epsilon(1e-13));
  }
}

TEST_CASE("shifted form keeps precision near zero") {
  CHECK(lambert_w0_shifted(0.0) == 0.0);
  CHECK(lambert_w0_shifted(1.0) == Approx(1.0));
  // z = 1 + W0((r-1)/e) solves e^z (z - 1) + 1 = r.
  for (double r : {1e-14, 1e-9, 1e-4, 0.1, 0.49, 0.51, 2.0, 1e3, 1e8}) {
    const double z = lambert_w0_shifted(r);
    CHECK(shifted_inverse(z) == Approx(r).epsilon(1e-12));
  }
  for (double r : {0.6, 3.0, 50.0})
    CHECK(lambert_w0_shifted(r) ==
          Approx(1.0 + lambert_w0((r - 1.0) / std::exp(1.0))).epsilon(1e-14));
}
