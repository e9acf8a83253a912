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

#include "wptmec/numerics/subgradient.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace wptmec {

SubgradientState SubgradientState::start(std::vector<double> x0, DualSense sense) {
  SubgradientState s;
  for (double& v : x0) v = std::max(0.0, v);
  s.x = std::move(x0);
  s.sense = sense;
  s.best_value = sense == DualSense::kMaximize ? -std::numeric_limits<double>::infinity()
                                               : std::numeric_limits<double>::infinity();
  s.best_point = s.x;
  return s;
}

SubgradientState subgradient_step(SubgradientState state, std::span<const double> g,
                                  double value, const SubgradientOptions& options) {
  if (g.size() != state.x.size())
    throw std::invalid_argument("subgradient_step: gradient size mismatch");
  for (double gi : g)
    if (!std::isfinite(gi)) throw std::invalid_argument("subgradient_step: non-finite subgradient");

  const bool better = state.sense == DualSense::kMaximize ? value > state.best_value
                                                          : value < state.best_value;
  if (better) {
    state.best_value = value;
    state.best_point = state.x;
  }

  if (state.last_gradient.size() == g.size()) {
    double sq = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      const double d = g[i] - state.last_gradient[i];
      sq += d * d;
    }
    state.residual = std::sqrt(sq);
    state.converged = state.residual <= options.tolerance;
  }
  state.last_gradient.assign(g.begin(), g.end());

  state.iteration += 1;
  const double step = options.step_scale / std::sqrt(static_cast<double>(state.iteration));
  const double sign = state.sense == DualSense::kMaximize ? 1.0 : -1.0;
  for (size_t i = 0; i < g.size(); ++i)
    state.x[i] = std::max(0.0, state.x[i] + sign * step * g[i]);
  return state;
}

void project_scaled_simplex(std::span<double> v, double total) {
  if (v.empty()) return;
  if (total <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - total) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) shift = candidate;
  }
  for (double& x : v) x = std::max(0.0, x - shift);
}

}  // namespace wptmec
