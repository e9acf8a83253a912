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

#include "wptmec/charge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wptmec/numerics/eig.hpp"
#include "wptmec/numerics/subgradient.hpp"

namespace wptmec {
namespace {

void check_inputs(const CMatrix& channels, std::span<const double> xi) {
  if (static_cast<Eigen::Index>(xi.size()) != channels.cols())
    throw std::invalid_argument("charge: one conversion efficiency per user required");
  if (channels.rows() < channels.cols())
    throw std::invalid_argument("charge: need at least as many antennas as users");
}

double user_weight(const WcDuals& duals, size_t i, CapWeighting weighting) {
  const double rho = duals.rho.empty() ? 0.0 : duals.rho.at(i);
  return weighting == CapWeighting::kPlus ? 1.0 + rho : 1.0 - rho;
}

}  // namespace

WcDuals WcDuals::zeros(size_t k) {
  WcDuals d;
  d.rho.assign(k, 0.0);
  return d;
}

CMatrix ChargeSolution::covariance() const {
  return directions * powers.cast<Complex>().asDiagonal() * directions.adjoint();
}

int count_active_beams(const Eigen::VectorXd& powers, double ap_power) {
  const double floor = 1e-6 * ap_power;
  return static_cast<int>((powers.array() > floor).count());
}

CMatrix build_c(const WcDuals& duals, const CMatrix& channels, std::span<const double> xi,
                double charge_time, CapWeighting weighting) {
  check_inputs(channels, xi);
  if (charge_time < 0.0) throw std::domain_error("build_c: negative charging time");
  const Eigen::Index n = channels.rows();
  CMatrix c = duals.chi * CMatrix::Identity(n, n);
  for (Eigen::Index i = 0; i < channels.cols(); ++i) {
    const auto u = static_cast<size_t>(i);
    const double a = charge_time * xi[u] * user_weight(duals, u, weighting);
    c.noalias() += a * channels.col(i) * channels.col(i).adjoint();
  }
  return c;
}

CMatrix beam_directions(const CMatrix& c, int count) {
  if (count < 0 || count > c.rows()) throw std::invalid_argument("beam_directions: bad beam count");
  return hermitian_eig_desc(c).vectors.leftCols(count);
}

CMatrix beam_directions_low_rank(const WcDuals& duals, const CMatrix& channels,
                                 std::span<const double> xi, double charge_time,
                                 CapWeighting weighting) {
  check_inputs(channels, xi);
  const Eigen::Index k = channels.cols();
  Eigen::VectorXd a(k);
  for (Eigen::Index i = 0; i < k; ++i)
    a(i) = charge_time * xi[static_cast<size_t>(i)] *
           user_weight(duals, static_cast<size_t>(i), weighting);
  if ((a.array() < 0.0).any())
    return beam_directions(build_c(duals, channels, xi, charge_time, weighting),
                           static_cast<int>(k));

  // C - chi I = Q (R diag(a) R^*) Q^*; chi shifts every eigenvalue equally
  // and the complement of range(Q) has eigenvalue chi, which no retained
  // direction falls below.
  const Eigen::HouseholderQR<CMatrix> qr(channels);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(channels.rows(), k);
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  CMatrix m = r * a.cast<Complex>().asDiagonal() * r.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return q * hermitian_eig_desc(m).vectors;
}

LpProblem build_pbp(const CMatrix& directions, const CMatrix& channels,
                    std::span<const UserRequest> requests, std::span<const double> xi,
                    double charge_time, double ap_power) {
  check_inputs(channels, xi);
  if (!(charge_time > 0.0)) throw std::domain_error("build_pbp: charging time must be positive");
  const Eigen::Index k = channels.cols();
  if (static_cast<Eigen::Index>(requests.size()) != k)
    throw std::invalid_argument("build_pbp: one request per user required");
  const Eigen::Index beams = directions.cols();

  // Row i holds d_i = |U^* h_i|^2 elementwise.
  const Eigen::MatrixXd d = (directions.adjoint() * channels).cwiseAbs2().transpose();
  LpProblem lp;
  lp.constraints = d;
  lp.bounds.resize(k);
  lp.objective = Eigen::VectorXd::Zero(beams);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double x = xi[static_cast<size_t>(i)];
    const double e = requests[static_cast<size_t>(i)].energy_req;
    if (!(x > 0.0)) throw std::domain_error("build_pbp: conversion efficiency must be positive");
    if (e < 0.0) throw std::domain_error("build_pbp: negative energy request");
    lp.bounds(i) = e / (x * charge_time);
    lp.objective += x * charge_time * d.row(i).transpose();
  }
  lp.sum_bound = ap_power;
  lp.ordered_descending = true;
  return lp;
}

std::vector<double> harvested_energy(const CMatrix& directions, const Eigen::VectorXd& powers,
                                     const CMatrix& channels, std::span<const double> xi,
                                     double charge_time) {
  check_inputs(channels, xi);
  const Eigen::MatrixXd d = (directions.adjoint() * channels).cwiseAbs2();
  std::vector<double> out(static_cast<size_t>(channels.cols()));
  for (Eigen::Index i = 0; i < channels.cols(); ++i)
    out[static_cast<size_t>(i)] = xi[static_cast<size_t>(i)] * charge_time * d.col(i).dot(powers);
  return out;
}

void finish_charge_solution(ChargeSolution& sol, const CMatrix& channels,
                            std::span<const double> xi, double ap_power) {
  sol.harvested = harvested_energy(sol.directions, sol.powers, channels, xi, sol.charge_time);
  sol.received = std::accumulate(sol.harvested.begin(), sol.harvested.end(), 0.0);
  sol.charging = sol.charge_time * sol.powers.sum();
  sol.active_beams = count_active_beams(sol.powers, ap_power);
}

ChargeSolution solve_pwc(const CMatrix& channels, std::span<const UserRequest> requests,
                         double charge_time, const SystemParams& params,
                         const ChargeOptions& options) {
  const Eigen::Index k = channels.cols();
  const auto ku = static_cast<size_t>(k);
  if (requests.size() != ku) throw std::invalid_argument("solve_pwc: one request per user required");
  if (charge_time < 0.0) throw std::domain_error("solve_pwc: negative charging time");
  std::vector<double> xi(ku);
  for (size_t i = 0; i < ku; ++i) xi[i] = params.xi(static_cast<int>(i));
  check_inputs(channels, xi);
  const double p = params.ap_power;

  ChargeSolution best;
  best.charge_time = charge_time;
  best.directions = CMatrix::Identity(channels.rows(), k);
  best.powers = Eigen::VectorXd::Zero(k);
  best.duals = WcDuals::zeros(ku);
  if (charge_time == 0.0) {
    best.converged = true;
    finish_charge_solution(best, channels, xi, p);
    return best;
  }

  // Duals in normalised units: chi against P, rho_i against e_i, and each
  // rho_i scaled by the gain ratio max_j g_j / g_i so that a unit step tilts
  // a weak user's weight as much as a strong one's.
  std::vector<double> gain(ku);
  for (size_t i = 0; i < ku; ++i)
    gain[i] = xi[i] * channels.col(static_cast<Eigen::Index>(i)).squaredNorm();
  const double top_gain = *std::max_element(gain.begin(), gain.end());
  std::vector<double> rho_scale(ku);
  for (size_t i = 0; i < ku; ++i) rho_scale[i] = gain[i] > 0.0 ? top_gain / gain[i] : 1.0;
  SubgradientState state = SubgradientState::start(std::vector<double>(ku + 1, 0.0),
                                                   DualSense::kMinimize);
  SubgradientOptions sg;
  sg.step_scale = options.step_scale;
  sg.tolerance = options.tolerance;
  best.received = -1.0;
  std::vector<ChargeTraceRow> trace;
  int iterations = 0;
  bool converged = false;
  WcDuals duals = WcDuals::zeros(ku);
  for (int it = 0; it < options.max_iterations; ++it) {
    duals.chi = state.x[0];
    for (size_t i = 0; i < ku; ++i) duals.rho[i] = state.x[i + 1] * rho_scale[i];
    const CMatrix u =
        options.eigen_route == EigenRoute::kLowRank
            ? beam_directions_low_rank(duals, channels, xi, charge_time, options.cap_weighting)
            : beam_directions(build_c(duals, channels, xi, charge_time, options.cap_weighting),
                              static_cast<int>(k));
    const LpSolution lp = solve_lp(build_pbp(u, channels, requests, xi, charge_time, p));

    ChargeSolution cur;
    cur.charge_time = charge_time;
    cur.directions = u;
    cur.powers = lp.x;
    finish_charge_solution(cur, channels, xi, p);

    std::vector<double> g(ku + 1);
    g[0] = (cur.trace_power() - p) / p;
    double violation = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ku; ++i) {
      const double e = requests[i].energy_req;
      g[i + 1] = e > 0.0 ? (cur.harvested[i] - e) / e : 0.0;
      violation = std::max(violation, cur.harvested[i] - e);
    }
    const double total_req = std::accumulate(requests.begin(), requests.end(), 0.0,
                                             [](double a, const UserRequest& r) {
                                               return a + r.energy_req;
                                             });
    double value = cur.received / std::max(total_req, 1e-300);
    for (size_t j = 0; j < g.size(); ++j) value -= state.x[j] * g[j];

    if (cur.received > best.received) best = std::move(cur);
    if (options.record_trace)
      trace.push_back({it + 1, value, lp.x.sum(), violation});

    state = subgradient_step(std::move(state), g, value, sg);
    iterations = it + 1;
    if (state.converged) {
      converged = true;
      break;
    }
  }
  best.duals = duals;
  best.iterations = iterations;
  best.converged = converged;
  best.trace = std::move(trace);
  return best;
}

}  // namespace wptmec
