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

#include "wptmec/numerics/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wptmec {

void LpProblem::validate() const {
  const Eigen::Index n = objective.size();
  if (n == 0) throw std::invalid_argument("LpProblem: no variables");
  if (constraints.rows() != bounds.size())
    throw std::invalid_argument("LpProblem: constraint rows do not match bounds");
  if (constraints.rows() > 0 && constraints.cols() != n)
    throw std::invalid_argument("LpProblem: constraint columns do not match objective");
  if (!objective.allFinite() || !constraints.allFinite() || !bounds.allFinite())
    throw std::invalid_argument("LpProblem: non-finite data");
  if (sum_bound && !std::isfinite(*sum_bound))
    throw std::invalid_argument("LpProblem: non-finite sum bound");
}

namespace {

// Tableau simplex on: max c^T d  s.t.  M d <= r, d >= 0.
class Simplex {
 public:
  Simplex(const Eigen::MatrixXd& m, const Eigen::VectorXd& r, const Eigen::VectorXd& c)
      : rows_(m.rows()), vars_(m.cols()), c_(c) {
    n_art_ = (r.array() < 0).count();
    cols_ = vars_ + rows_ + n_art_;
    tab_ = Eigen::MatrixXd::Zero(rows_ + 1, cols_ + 1);
    basis_.resize(static_cast<size_t>(rows_));
    Eigen::Index art = 0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double sign = r(i) < 0 ? -1.0 : 1.0;
      tab_.row(i).head(vars_) = sign * m.row(i);
      tab_(i, vars_ + i) = sign;
      tab_(i, cols_) = sign * r(i);
      if (r(i) < 0) {
        const Eigen::Index col = vars_ + rows_ + art++;
        tab_(i, col) = 1.0;
        basis_[static_cast<size_t>(i)] = col;
      } else {
        basis_[static_cast<size_t>(i)] = vars_ + i;
      }
    }
    double mag = 1.0;
    if (rows_ > 0) mag = std::max(mag, tab_.topLeftCorner(rows_, cols_).cwiseAbs().maxCoeff());
    if (c.size() > 0) mag = std::max(mag, c.cwiseAbs().maxCoeff());
    tol_ = 1e-11 * mag;
  }

  void solve() {
    if (n_art_ > 0) {
      Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
      cost.tail(n_art_).setConstant(-1.0);
      price(cost);
      run(/*allow_artificial=*/true);
      if (tab_(rows_, cols_) < -1e-9 * std::max(1.0, tab_.col(cols_).head(rows_).cwiseAbs().maxCoeff()))
        throw LpInfeasible("solve_lp: feasible region is empty");
      drive_out_artificials();
    }
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    cost.head(vars_) = c_;
    price(cost);
    run(/*allow_artificial=*/false);
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(vars_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index b = basis_[static_cast<size_t>(i)];
      if (b < vars_) d(b) = std::max(0.0, tab_(i, cols_));
    }
    return d;
  }

  Eigen::VectorXd duals() const {
    Eigen::VectorXd y(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) y(i) = tab_(rows_, vars_ + i);
    return y;
  }

  int pivots() const { return pivots_; }

 private:
  // Objective row of reduced costs c_B B^-1 A - c for the given cost vector.
  void price(const Eigen::VectorXd& cost) {
    tab_.row(rows_).setZero();
    tab_.row(rows_).head(cols_) = -cost.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double cb = cost(basis_[static_cast<size_t>(i)]);
      if (cb != 0.0) tab_.row(rows_) += cb * tab_.row(i);
    }
  }

  void run(bool allow_artificial) {
    const Eigen::Index limit = allow_artificial ? cols_ : vars_ + rows_;
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (tab_(rows_, j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = tab_(i, enter);
        if (a <= tol_) continue;
        const double ratio = tab_(i, cols_) / a;
        if (leave < 0) {
          best = ratio;
          leave = i;
          continue;
        }
        const double tie = 1e-14 * std::max(1.0, std::abs(best));
        if (ratio < best - tie ||
            (ratio <= best + tie &&
             basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) throw LpUnbounded("solve_lp: objective is unbounded");
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    tab_.row(row) /= tab_(row, col);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == row) continue;
      const double f = tab_(i, col);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(row);
    }
    basis_[static_cast<size_t>(row)] = col;
    ++pivots_;
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<size_t>(i)] < vars_ + rows_) continue;
      for (Eigen::Index j = 0; j < vars_ + rows_; ++j) {
        if (std::abs(tab_(i, j)) > tol_) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Eigen::Index rows_;
  Eigen::Index vars_;
  Eigen::Index n_art_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::VectorXd c_;
  Eigen::MatrixXd tab_;
  std::vector<Eigen::Index> basis_;
  double tol_ = 1e-11;
  int pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  problem.validate();
  const Eigen::Index n = problem.n_vars();
  // x = L delta with L(k, j) = 1 for j >= k keeps x descending and >= 0
  // exactly when delta >= 0.
  Eigen::MatrixXd lift = Eigen::MatrixXd::Identity(n, n);
  if (problem.ordered_descending)
    lift = Eigen::MatrixXd::Ones(n, n).triangularView<Eigen::Upper>();

  const Eigen::Index extra = problem.sum_bound ? 1 : 0;
  const Eigen::Index m = problem.constraints.rows() + extra;
  Eigen::MatrixXd rows(m, n);
  Eigen::VectorXd rhs(m);
  if (problem.sum_bound) {
    rows.row(0) = Eigen::RowVectorXd::Ones(n) * lift;
    rhs(0) = *problem.sum_bound;
  }
  if (problem.constraints.rows() > 0) {
    rows.bottomRows(problem.constraints.rows()) = problem.constraints * lift;
    rhs.tail(problem.constraints.rows()) = problem.bounds;
  }
  const Eigen::VectorXd cost = lift.transpose() * problem.objective;

  Simplex simplex(rows, rhs, cost);
  simplex.solve();

  LpSolution sol;
  sol.delta = simplex.primal();
  sol.x = lift * sol.delta;
  sol.objective = problem.objective.dot(sol.x);
  sol.transformed_rows = std::move(rows);
  sol.transformed_bounds = std::move(rhs);
  sol.transformed_objective = cost;
  sol.duals = simplex.duals();
  sol.pivots = simplex.pivots();
  return sol;
}

}  // namespace wptmec
