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

// Energy beamforming for the charging phase: dual-shaped beam directions and
// a small LP for the beam powers.

#ifndef WPTMEC_CHARGE_HPP_
#define WPTMEC_CHARGE_HPP_

#include <span>
#include <vector>

#include "wptmec/model.hpp"
#include "wptmec/numerics/lp.hpp"

namespace wptmec {

struct WcDuals {
  double chi = 0.0;          // total power budget
  std::vector<double> rho;   // per-user energy cap

  static WcDuals zeros(size_t k);
};

// How the per-user cap multiplier enters the direction matrix.
enum class CapWeighting {
  kPlus,   // (1 + rho_i)
  kMinus,  // (1 - rho_i), the sign of a Lagrangian for an upper bound
};

// Eigen-decomposition route for the direction matrix.
enum class EigenRoute {
  kLowRank,  // thin QR of the channels then a K x K Jacobi solve
  kFull,     // N x N Jacobi solve
};

struct ChargeOptions {
  double tolerance = 1e-4;   // on normalised subgradient differences
  double step_scale = 3.0;
  int max_iterations = 2000;
  CapWeighting cap_weighting = CapWeighting::kPlus;
  EigenRoute eigen_route = EigenRoute::kLowRank;
  bool record_trace = false;
};

struct ChargeTraceRow {
  int iteration = 0;
  double dual_value = 0.0;
  double trace_power = 0.0;       // tr(W_q)
  double max_cap_violation = 0.0; // max_i (E_h,i - e_i), <= 0 when feasible
};

struct ChargeSolution {
  CMatrix directions;             // N x K, orthonormal columns
  Eigen::VectorXd powers;         // K, descending
  std::vector<double> harvested;  // E_h,i [J]
  double received = 0.0;          // sum of harvested [J]
  double charging = 0.0;          // E_c = T_c tr(W_q) [J]
  double charge_time = 0.0;
  int active_beams = 0;
  WcDuals duals;
  int iterations = 0;
  bool converged = false;
  std::vector<ChargeTraceRow> trace;

  CMatrix covariance() const;
  double trace_power() const { return powers.sum(); }
};

int count_active_beams(const Eigen::VectorXd& powers, double ap_power);

CMatrix build_c(const WcDuals& duals, const CMatrix& channels, std::span<const double> xi,
                double charge_time, CapWeighting weighting = CapWeighting::kPlus);

// Top `count` eigenvectors of the Hermitian matrix c, by descending eigenvalue.
CMatrix beam_directions(const CMatrix& c, int count);

// Same result for c = chi I + H diag(a) H^*, computed from a thin QR of H.
// Falls back to the full solve when some a_i is negative.
CMatrix beam_directions_low_rank(const WcDuals& duals, const CMatrix& channels,
                                 std::span<const double> xi, double charge_time,
                                 CapWeighting weighting = CapWeighting::kPlus);

// Beam-power LP: maximise sum_i xi_i T_c d_i^T lambda subject to
// sum lambda <= P, d_i^T lambda <= e_i / (xi_i T_c), lambda descending >= 0,
// with d_i the squared magnitudes of U^* h_i.
LpProblem build_pbp(const CMatrix& directions, const CMatrix& channels,
                    std::span<const UserRequest> requests, std::span<const double> xi,
                    double charge_time, double ap_power);

// Harvested energy per user for beams `directions` with powers `powers`.
std::vector<double> harvested_energy(const CMatrix& directions, const Eigen::VectorXd& powers,
                                     const CMatrix& channels, std::span<const double> xi,
                                     double charge_time);

// Fills harvested, received, charging and active_beams from directions and powers.
void finish_charge_solution(ChargeSolution& sol, const CMatrix& channels,
                            std::span<const double> xi, double ap_power);

ChargeSolution solve_pwc(const CMatrix& channels, std::span<const UserRequest> requests,
                         double charge_time, const SystemParams& params,
                         const ChargeOptions& options = {});

}  // namespace wptmec

#endif  // WPTMEC_CHARGE_HPP_
