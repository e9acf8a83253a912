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
#include <numeric>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "wptmec/numerics/subgradient.hpp"

using namespace wptmec;
using doctest::Approx;

TEST_CASE("zero subgradient leaves x unchanged") {
  SubgradientState s = SubgradientState::start({1.0, 2.0}, DualSense::kMaximize);
  const std::vector<double> g{0.0, 0.0};
  s = subgradient_step(s, g, 0.0);
  CHECK(s.x == std::vector<double>{1.0, 2.0});
  CHECK_FALSE(s.converged);
  s = subgradient_step(s, g, 0.0);
  CHECK(s.converged);
  CHECK(s.residual == 0.0);
}

TEST_CASE("projection zeroes negative components") {
  SubgradientState s = SubgradientState::start({0.1, 5.0}, DualSense::kMinimize);
  const std::vector<double> g{10.0, -1.0};
  s = subgradient_step(s, g, 1.0);
  CHECK(s.x[0] == 0.0);
  CHECK(s.x[1] == Approx(6.0));
  CHECK(SubgradientState::start({-3.0}, DualSense::kMaximize).x[0] == 0.0);
}

TEST_CASE("scalar concave maximisation reaches the optimum") {
  SubgradientState s = SubgradientState::start({0.0}, DualSense::kMaximize);
  SubgradientOptions opt;
  opt.tolerance = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double x = s.x[0];
    const std::vector<double> g{-2.0 * (x - 1.0)};
    s = subgradient_step(s, g, -(x - 1.0) * (x - 1.0), opt);
  }
  CHECK(std::abs(s.x[0] - 1.0) < 1e-2);
  CHECK(std::abs(s.best_point[0] - 1.0) < 1e-2);
}

TEST_CASE("best value is monotone") {
  SubgradientState s = SubgradientState::start({3.0}, DualSense::kMinimize);
  double last = s.best_value;
  for (int k = 0; k < 200; ++k) {
    const double x = s.x[0];
    const std::vector<double> g{x > 1.0 ? 1.0 : -1.0};
    s = subgradient_step(s, g, std::abs(x - 1.0));
    CHECK(s.best_value <= last);
    last = s.best_value;
  }
  CHECK(s.best_value < 0.2);
}

TEST_CASE("non-finite subgradients are rejected") {
  SubgradientState s = SubgradientState::start({1.0}, DualSense::kMaximize);
  const std::vector<double> g{std::nan("")};
  CHECK_THROWS_AS(subgradient_step(s, g, 0.0), std::invalid_argument);
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(subgradient_step(s, wrong, 0.0), std::invalid_argument);
}

TEST_CASE("scaled simplex projection") {
  std::vector<double> v{0.5, 2.0, -1.0};
  project_scaled_simplex(v, 1.0);
  CHECK(std::accumulate(v.begin(), v.end(), 0.0) == Approx(1.0));
  CHECK(v[0] == Approx(0.0));
  CHECK(v[1] == Approx(1.0));
  CHECK(v[2] == 0.0);

  std::vector<double> w{1.0, 1.0};
  project_scaled_simplex(w, 4.0);
  CHECK(w[0] == Approx(2.0));
  CHECK(w[1] == Approx(2.0));

  std::vector<double> z{1.0, 3.0};
  project_scaled_simplex(z, 0.0);
  CHECK(z == std::vector<double>{0.0, 0.0});
}
