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

// Energy-optimal partial offloading for one cell: an outer latency-aware
// Newton descent on the data partition s, and an inner primal-dual loop that
// recovers the transmission times from the dual variables in closed form.

#ifndef WPTMEC_OFFLOAD_HPP_
#define WPTMEC_OFFLOAD_HPP_

#include <span>
#include <string>
#include <vector>

#include "wptmec/model.hpp"

namespace wptmec {

/// Dual variables of the offloading problem, in W (J per second of the
/// constrained time). lambda1: latency budget; theta: per-user local+uplink
/// deadline; beta: t_u,i <= T1; phi: t_d,i <= T3.
struct CoDuals {
  double lambda1 = 0.0;
  std::vector<double> beta;
  std::vector<double> theta;
  std::vector<double> phi;

  static CoDuals zeros(size_t k);
};

struct OffloadOptions {
  double dual_tolerance = 1e-4;     // epsilon_2, on normalised subgradients
  double duality_gap_tolerance = 1e-6;  // relative, checked with epsilon_2
  double dual_step_scale = 3.0;
  int warm_start_offset = 0;         // step counter a warm start resumes from
  int max_dual_iterations = 20000;
  double newton_tolerance = 1e-3;   // epsilon_1, Newton decrement / |F|
  int max_newton_iterations = 50;
  double gradient_step = 1e-4;      // finite-difference step relative to u_i
  double hessian_step = 1e-3;
  bool enforce_power_cap = true;    // t_u,i >= time needed at p_max
  bool record_trace = false;
};

enum class SolveStatus { kConverged, kIterationCap, kInfeasible };

const char* to_string(SolveStatus status);

struct InnerResult {
  TimeAllocation times;
  CoDuals duals;      // last dual iterate
  CoDuals recovered;  // multipliers implied by the returned primal point
  double objective = 0.0;  // weighted energy at the returned primal point
  bool feasible = false;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double dual_value = 0.0;  // best dual bound found
};

struct OffloadTraceRow {
  int iteration = 0;
  double objective = 0.0;
  double dual_residual = 0.0;
  double t1 = 0.0;
  double t3 = 0.0;
  double t_charge = 0.0;
};

struct OffloadSolution {
  DataPartition partition;
  TimeAllocation times;
  std::vector<double> ul_power;     // p_i [W]
  std::vector<double> dl_fraction;  // eta_i
  EnergyBreakdown energy;
  CoDuals duals;
  SolveStatus status = SolveStatus::kInfeasible;
  std::string stop_reason;
  bool eta_sum_exceeds_one = false;
  bool inner_cap_hit = false;
  int outer_iterations = 0;
  long long dual_iterations = 0;  // all inner primal-dual steps
  std::vector<OffloadTraceRow> trace;

  bool feasible() const { return status != SolveStatus::kInfeasible; }
};

/// Smallest uplink time for s bits at the user's maximum transmit power.
double uplink_time_floor(double bits, const UserLink& link, const SystemParams& params);

/// Transmission times minimising the Lagrangian for fixed s and duals
/// (Lambert-W closed form), clamped to [max(t_min, floor), T_d]. Users with
/// s_i = 0 get zero times.
TimeAllocation inner_time_from_duals(const DataPartition& partition, const CoDuals& duals,
                                     std::span<const UserLink> links,
                                     const SystemParams& params,
                                     bool enforce_power_cap = true);

/// Subgradient [lambda1, beta_1..K, theta_1..K, phi_1..K] in seconds.
std::vector<double> co_subgradients(const DataPartition& partition,
                                    const TimeAllocation& times,
                                    const SystemParams& params);

/// Whether some time allocation makes this partition feasible.
bool partition_admissible(const DataPartition& partition, std::span<const UserLink> links,
                          const SystemParams& params, bool enforce_power_cap = true);

/// Pulls a time allocation back into the feasible set by shrinking T1 and T3
/// proportionally to the remaining budget. Returns false if impossible.
bool repair_times(const DataPartition& partition, std::span<const UserLink> links,
                  const SystemParams& params, bool enforce_power_cap, TimeAllocation& times);

/// Dual subgradient ascent for a fixed partition. `warm` seeds the duals.
InnerResult inner_primal_dual(const DataPartition& partition, std::span<const UserLink> links,
                              const SystemParams& params, const OffloadOptions& options = {},
                              const CoDuals* warm = nullptr);

/// Full solve: minimise the weighted energy over 0 <= s <= u.
OffloadSolution outer_descent(std::span<const UserLink> links,
                              std::span<const UserRequest> requests,
                              const SystemParams& params, const OffloadOptions& options = {});

/// Packs an inner result at partition s into a full solution record.
OffloadSolution make_solution(const DataPartition& partition, const InnerResult& inner,
                              std::span<const UserLink> links, const SystemParams& params);

}  // namespace wptmec

#endif  // WPTMEC_OFFLOAD_HPP_
