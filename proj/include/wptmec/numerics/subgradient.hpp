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

#ifndef WPTMEC_NUMERICS_SUBGRADIENT_HPP_
#define WPTMEC_NUMERICS_SUBGRADIENT_HPP_

#include <limits>
#include <span>
#include <vector>

namespace wptmec {

enum class DualSense { kMaximize, kMinimize };

struct SubgradientOptions {
  double step_scale = 1.0;  // beta_k = step_scale / sqrt(k)
  double tolerance = 1e-4;  // epsilon_2 on ||g^(k+1) - g^(k)||_2
};

/// Projected subgradient iterate over a nonnegative dual vector. The caller
/// evaluates the dual function and a subgradient at `x` and feeds both to
/// subgradient_step; the state tracks the best point seen so far.
struct SubgradientState {
  std::vector<double> x;
  int iteration = 0;  // steps taken
  DualSense sense = DualSense::kMaximize;
  double best_value = 0.0;
  std::vector<double> best_point;
  std::vector<double> last_gradient;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;

  static SubgradientState start(std::vector<double> x0, DualSense sense);
};

/// Records `value` (the dual function at state.x) for best-point tracking,
/// updates the residual and convergence flag, then moves x along g (ascent
/// for kMaximize, descent for kMinimize) with step step_scale/sqrt(k) and
/// projects onto x >= 0.
SubgradientState subgradient_step(SubgradientState state, std::span<const double> g,
                                  double value, const SubgradientOptions& options = {});

/// Euclidean projection of v onto {x >= 0, sum(x) = total}.
void project_scaled_simplex(std::span<double> v, double total);

}  // namespace wptmec

#endif  // WPTMEC_NUMERICS_SUBGRADIENT_HPP_
