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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include <doctest.h>

#include "wptmec/channel.hpp"
#include "wptmec/charge.hpp"

using namespace wptmec;
using doctest::Approx;

namespace {

CMatrix random_channels(std::mt19937_64& rng, int n, int k) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMatrix h(n, k);
  for (int j = 0; j < k; ++j) {
    const double gain = std::pow(10.0, -1.0 - 1.5 * std::uniform_real_distribution<double>()(rng));
    for (int a = 0; a < n; ++a) h(a, j) = std::sqrt(gain) * Complex(g(rng), g(rng));
  }
  return h;
}

// Best objective over a grid of descending (lambda1, lambda2) for fixed directions.
double lambda_grid_oracle(const LpProblem& lp, double p) {
  double best = 0.0;
  double lo1 = 0.0;
  double hi1 = p;
  double lo2 = 0.0;
  double hi2 = p / 2.0;
  const int n = 400;
  double b1 = 0.0;
  double b2 = 0.0;
  for (int zoom = 0; zoom < 6; ++zoom) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        const Eigen::Vector2d x(lo1 + (hi1 - lo1) * a / n, lo2 + (hi2 - lo2) * b / n);
        if (x(1) > x(0) || x.sum() > p) continue;
        if (((lp.constraints * x - lp.bounds).array() > 1e-12).any()) continue;
        const double f = lp.objective.dot(x);
        if (f > best) {
          best = f;
          b1 = x(0);
          b2 = x(1);
        }
      }
    }
    const double s1 = (hi1 - lo1) * 4.0 / n;
    const double s2 = (hi2 - lo2) * 4.0 / n;
    lo1 = std::max(0.0, b1 - s1);
    hi1 = std::min(p, b1 + s1);
    lo2 = std::max(0.0, b2 - s2);
    hi2 = std::min(p / 2.0, b2 + s2);
  }
  return best;
}

struct Cell {
  SystemParams params;
  CMatrix h;
};

Cell default_cell(int k, std::uint64_t seed) {
  Cell c;
  c.params = SystemParams::defaults(k);
  const NetworkLayout layout = generate_layout(c.params, seed);
  c.h = generate_channels(layout, c.params, seed + 100).cell(0).h;
  return c;
}

}  // namespace

TEST_CASE("direction matrix of a single user is rank one") {
  std::mt19937_64 rng(1);
  const CMatrix h = random_channels(rng, 6, 1);
  const std::vector<double> xi{1.0};
  const CMatrix c = build_c(WcDuals::zeros(1), h, xi, 1.0);
  CHECK((c - h * h.adjoint()).norm() <= 1e-14 * c.norm());
  const CMatrix u = beam_directions(c, 1);
  CHECK(std::abs(u.col(0).dot(h.col(0))) == Approx(h.norm()).epsilon(1e-10));
}

TEST_CASE("chi shifts the spectrum without moving eigenvectors") {
  std::mt19937_64 rng(2);
  const CMatrix h = random_channels(rng, 5, 3);
  const std::vector<double> xi{0.5, 0.4, 0.6};
  WcDuals d = WcDuals::zeros(3);
  d.rho = {0.2, 1.0, 0.0};
  const Eigen::VectorXd base =
      Eigen::SelfAdjointEigenSolver<CMatrix>(build_c(d, h, xi, 0.02)).eigenvalues();
  d.chi = 0.7;
  const CMatrix shifted = build_c(d, h, xi, 0.02);
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(shifted);
  CHECK((es.eigenvalues() - base - Eigen::VectorXd::Constant(5, 0.7)).norm() <= 1e-12);

  // Reconstruction from the descending eigenpairs.
  const CMatrix u = beam_directions(shifted, 5);
  const Eigen::VectorXd mu = (u.adjoint() * shifted * u).diagonal().real();
  const CMatrix rebuilt = u * mu.cast<Complex>().asDiagonal() * u.adjoint();
  CHECK((rebuilt - shifted).norm() <= 1e-8 * shifted.norm());
  for (int j = 1; j < 5; ++j) CHECK(mu(j) <= mu(j - 1) + 1e-12);
}

TEST_CASE("low-rank and full eigen routes agree") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix h = random_channels(rng, 24, 4);
    const std::vector<double> xi{0.5, 0.5, 0.5, 0.5};
    WcDuals d = WcDuals::zeros(4);
    for (double& r : d.rho) r = 3.0 * std::uniform_real_distribution<double>()(rng);
    d.chi = 0.1 * trial;
    const CMatrix full = beam_directions(build_c(d, h, xi, 0.015), 4);
    const CMatrix fast = beam_directions_low_rank(d, h, xi, 0.015);
    CHECK((fast.adjoint() * fast - CMatrix::Identity(4, 4)).norm() <= 1e-8);
    CHECK((full.adjoint() * full - CMatrix::Identity(4, 4)).norm() <= 1e-8);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(full.col(j).dot(fast.col(j))) == Approx(1.0).epsilon(1e-8));
  }
  // Negative weights take the full route.
  const CMatrix h = random_channels(rng, 8, 2);
  const std::vector<double> xi{0.5, 0.5};
  WcDuals d = WcDuals::zeros(2);
  d.rho = {3.0, 0.0};
  const CMatrix full = beam_directions(build_c(d, h, xi, 1.0, CapWeighting::kMinus), 2);
  const CMatrix fast = beam_directions_low_rank(d, h, xi, 1.0, CapWeighting::kMinus);
  CHECK((full - fast).norm() == Approx(0.0));
}

TEST_CASE("degenerate spectrum: objective invariant to the eigenbasis") {
  // Two orthogonal channels of equal norm give a repeated top eigenvalue.
  CMatrix h = CMatrix::Zero(4, 2);
  h(0, 0) = Complex(1.0, 0.0);
  h(1, 1) = Complex(0.0, 1.0);
  const std::vector<double> xi{0.5, 0.5};
  const std::vector<UserRequest> req(2, UserRequest{0.0, 1e9});
  const CMatrix u = beam_directions(build_c(WcDuals::zeros(2), h, xi, 0.01), 2);
  const double theta = 0.37;
  CMatrix rot(2, 2);
  rot << std::cos(theta), -std::sin(theta) * Complex(0.0, 1.0), std::sin(theta), std::cos(theta) * Complex(0.0, 1.0);
  const CMatrix v = u * rot;
  CHECK((v.adjoint() * v - CMatrix::Identity(2, 2)).norm() <= 1e-12);
  const double a = solve_lp(build_pbp(u, h, req, xi, 0.01, 10.0)).objective;
  const double b = solve_lp(build_pbp(v, h, req, xi, 0.01, 10.0)).objective;
  CHECK(a == Approx(b).epsilon(1e-8));
}

TEST_CASE("beam-power LP data on a 2x2 fixture") {
  CMatrix u(2, 2);
  u << 1.0, 1.0, 1.0, -1.0;
  u /= std::sqrt(2.0);
  CMatrix h(2, 2);
  h << 1.0, 2.0, 0.0, 1.0;
  const std::vector<double> xi{0.5, 0.25};
  const std::vector<UserRequest> req{{0.0, 0.5}, {0.0, 0.1}};
  const LpProblem lp = build_pbp(u, h, req, xi, 0.01, 40.0);
  // r_1 = U^* h_1 = (1, 1)/sqrt2, r_2 = (3, 1)/sqrt2.
  CHECK(lp.constraints(0, 0) == Approx(0.5));
  CHECK(lp.constraints(0, 1) == Approx(0.5));
  CHECK(lp.constraints(1, 0) == Approx(4.5));
  CHECK(lp.constraints(1, 1) == Approx(0.5));
  CHECK(lp.bounds(0) == Approx(100.0));
  CHECK(lp.bounds(1) == Approx(40.0));
  CHECK(lp.objective(0) == Approx(0.5 * 0.01 * 0.5 + 0.25 * 0.01 * 4.5));
  CHECK(lp.objective(1) == Approx(0.5 * 0.01 * 0.5 + 0.25 * 0.01 * 0.5));
  CHECK(*lp.sum_bound == 40.0);
  CHECK(lp.ordered_descending);
  CHECK_THROWS_AS(build_pbp(u, h, req, xi, 0.0, 40.0), std::domain_error);
}

TEST_CASE("uncapped requests put all power on the first beam") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix h = random_channels(rng, 6, 2);
    const std::vector<double> xi{0.5, 0.5};
    const std::vector<UserRequest> req(2, UserRequest{0.0, 1e9});
    const CMatrix u = beam_directions(build_c(WcDuals::zeros(2), h, xi, 0.01), 2);
    const LpProblem lp = build_pbp(u, h, req, xi, 0.01, 40.0);
    const LpSolution s = solve_lp(lp);
    CHECK(s.x(0) == Approx(40.0));
    CHECK(s.x(1) == Approx(0.0));
    CHECK(s.objective == Approx(lambda_grid_oracle(lp, 40.0)).epsilon(1e-3));
  }
}

TEST_CASE("zero requests admit only zero power") {
  std::mt19937_64 rng(5);
  const CMatrix h = random_channels(rng, 6, 3);
  const std::vector<double> xi{0.5, 0.5, 0.5};
  const std::vector<UserRequest> req(3, UserRequest{0.0, 0.0});
  const CMatrix u = beam_directions(build_c(WcDuals::zeros(3), h, xi, 0.01), 3);
  const LpSolution s = solve_lp(build_pbp(u, h, req, xi, 0.01, 40.0));
  CHECK(s.x.norm() == Approx(0.0));
}

TEST_CASE("no charging time, no charging") {
  const Cell c = default_cell(4, 1);
  const std::vector<UserRequest> req(4, UserRequest{0.0, 1.0});
  const ChargeSolution s = solve_pwc(c.h, req, 0.0, c.params);
  CHECK(s.received == 0.0);
  CHECK(s.charging == 0.0);
  CHECK(s.active_beams == 0);
  for (double e : s.harvested) CHECK(e == 0.0);
}

TEST_CASE("single user gets the maximum-ratio beam") {
  const Cell c = default_cell(1, 2);
  const std::vector<UserRequest> req{{0.0, 1e9}};
  const ChargeSolution s = solve_pwc(c.h, req, 0.015, c.params);
  const double p = c.params.ap_power;
  const double hn = c.h.col(0).squaredNorm();
  const CMatrix mrt = p * c.h.col(0) * c.h.col(0).adjoint() / hn;
  CHECK((s.covariance() - mrt).norm() <= 1e-8 * mrt.norm());
  CHECK(s.harvested[0] == Approx(c.params.xi(0) * p * hn * 0.015).epsilon(1e-10));
}

TEST_CASE("two users on four antennas match a power grid on the returned basis") {
  std::mt19937_64 rng(6);
  SystemParams p = SystemParams::defaults(2);
  p.n_antennas = 4;
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix h = random_channels(rng, 4, 2);
    const std::vector<double> xi{p.xi(0), p.xi(1)};
    const double tc = 0.015;
    const double cap = 0.3 * xi[0] * tc * p.ap_power * h.col(0).squaredNorm();
    const std::vector<UserRequest> req{{0.0, cap}, {0.0, 1e9}};
    const ChargeSolution s = solve_pwc(h, req, tc, p);
    const double own = lambda_grid_oracle(build_pbp(s.directions, h, req, xi, tc, p.ap_power), p.ap_power);
    CHECK(s.received == Approx(own).epsilon(1e-3));
    const CMatrix first = beam_directions(build_c(WcDuals::zeros(2), h, xi, tc), 2);
    const double start = lambda_grid_oracle(build_pbp(first, h, req, xi, tc, p.ap_power), p.ap_power);
    CHECK(s.received >= start * (1.0 - 1e-3));
  }
}

TEST_CASE("solutions satisfy the power budget and every cap") {
  for (int k : {2, 4, 10}) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const Cell c = default_cell(k, seed);
      const std::vector<UserRequest> req(static_cast<size_t>(k), UserRequest{0.0, 0.5});
      const ChargeSolution s = solve_pwc(c.h, req, 0.015, c.params);
      CHECK(s.trace_power() <= c.params.ap_power + 1e-9);
      for (size_t i = 0; i < req.size(); ++i) CHECK(s.harvested[i] <= req[i].energy_req + 1e-9);
      for (Eigen::Index j = 1; j < s.powers.size(); ++j) CHECK(s.powers(j) <= s.powers(j - 1) + 1e-12);
      CHECK((s.powers.array() >= -1e-12).all());
      CHECK(s.active_beams <= k);
      CHECK((s.directions.adjoint() * s.directions - CMatrix::Identity(k, k)).norm() <= 1e-8);
      const CMatrix w = s.covariance();
      CHECK(Eigen::SelfAdjointEigenSolver<CMatrix>(w).eigenvalues().minCoeff() >= -1e-9 * c.params.ap_power);
      CHECK(s.charging == Approx(0.015 * w.trace().real()));
    }
  }
}

TEST_CASE("dual iterations improve on the first iterate") {
  double first = 0.0;
  double final = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Cell c = default_cell(4, seed);
    const std::vector<UserRequest> req(4, UserRequest{0.0, 0.5});
    ChargeOptions one;
    one.max_iterations = 1;
    const ChargeSolution a = solve_pwc(c.h, req, 0.015, c.params, one);
    const ChargeSolution b = solve_pwc(c.h, req, 0.015, c.params);
    CHECK(b.received >= a.received);
    CHECK(b.converged);
    first += a.received;
    final += b.received;
  }
  CHECK(final > first);
}

TEST_CASE("sorted eigen pairing beats permuted pairings") {
  std::mt19937_64 rng(7);
  const Cell c = default_cell(4, 3);
  const std::vector<UserRequest> req(4, UserRequest{0.0, 0.5});
  const std::vector<double> xi(4, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    WcDuals d = WcDuals::zeros(4);
    for (double& r : d.rho) r = 5.0 * std::uniform_real_distribution<double>()(rng);
    const CMatrix cm = build_c(d, c.h, xi, 0.015);
    const CMatrix u = beam_directions(cm, 4);
    const Eigen::VectorXd lambda = solve_lp(build_pbp(u, c.h, req, xi, 0.015, c.params.ap_power)).x;
    const Eigen::VectorXd mu = (u.adjoint() * cm * u).diagonal().real();
    const double sorted = mu.dot(lambda);
    std::vector<int> perm{0, 1, 2, 3};
    for (int k = 0; k < 1000; ++k) {
      std::shuffle(perm.begin(), perm.end(), rng);
      double permuted = 0.0;
      for (int j = 0; j < 4; ++j) permuted += mu(j) * lambda(perm[static_cast<size_t>(j)]);
      CHECK(permuted <= sorted * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("trace rows and deterministic output") {
  const Cell c = default_cell(4, 5);
  const std::vector<UserRequest> req(4, UserRequest{0.0, 0.5});
  ChargeOptions opt;
  opt.record_trace = true;
  const ChargeSolution a = solve_pwc(c.h, req, 0.015, c.params, opt);
  const ChargeSolution b = solve_pwc(c.h, req, 0.015, c.params, opt);
  CHECK(static_cast<int>(a.trace.size()) == a.iterations);
  CHECK(a.powers == b.powers);
  CHECK(a.harvested == b.harvested);
  for (const ChargeTraceRow& row : a.trace) {
    CHECK(row.trace_power <= c.params.ap_power + 1e-9);
    CHECK(row.max_cap_violation <= 1e-9);
  }
  ChargeOptions full = opt;
  full.eigen_route = EigenRoute::kFull;
  const ChargeSolution f = solve_pwc(c.h, req, 0.015, c.params, full);
  CHECK(f.received == Approx(a.received).epsilon(1e-6));
}
