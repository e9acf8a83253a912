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

#ifndef WPTMEC_NUMERICS_LP_HPP_
#define WPTMEC_NUMERICS_LP_HPP_

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace wptmec {

/// maximize c^T x  s.t.  A x <= b,  sum(x) <= sum_bound (if set),  x >= 0,
/// and x_1 >= x_2 >= ... >= x_n when `ordered_descending` is set.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;  // m x n, may have zero rows
  Eigen::VectorXd bounds;       // m
  std::optional<double> sum_bound;
  bool ordered_descending = false;

  Eigen::Index n_vars() const { return objective.size(); }
  /// Throws std::invalid_argument on inconsistent dimensions or non-finite data.
  void validate() const;
};

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  // The solver works in the variables delta >= 0 with x = L delta (L the
  // upper-triangular ones matrix when ordered, identity otherwise). Rows are
  // [sum bound (if any), A rows]; these are the data of that transformed LP
  // and its optimal dual, exposed for complementary-slackness audits.
  Eigen::VectorXd delta;
  Eigen::MatrixXd transformed_rows;
  Eigen::VectorXd transformed_bounds;
  Eigen::VectorXd transformed_objective;
  Eigen::VectorXd duals;
  int pivots = 0;
};

class LpInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LpUnbounded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense two-phase simplex with Bland's rule. Throws LpInfeasible or
/// LpUnbounded.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace wptmec

#endif  // WPTMEC_NUMERICS_LP_HPP_
