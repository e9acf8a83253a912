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

// Reference schemes: isotropic and equal-power K-beam charging, exhaustive
// binary offloading, and offloading at fixed transmit powers.

#ifndef WPTMEC_BASELINES_HPP_
#define WPTMEC_BASELINES_HPP_

#include <span>

#include "wptmec/charge.hpp"
#include "wptmec/offload.hpp"
#include "wptmec/parallel.hpp"

namespace wptmec {

// Largest s in [0, 1] with s * harvested_i <= e_i for every user.
double global_cap_scale(std::span<const double> harvested, std::span<const UserRequest> requests);

// W = s (P/N) I.
ChargeSolution isotropic_charging(const CMatrix& channels, std::span<const UserRequest> requests,
                                  double charge_time, const SystemParams& params);

// Directions from the unweighted direction matrix, P/K per beam, then the
// same global scaling as the isotropic scheme.
ChargeSolution equal_k_charging(const CMatrix& channels, std::span<const UserRequest> requests,
                                double charge_time, const SystemParams& params);

// Best of the 2^K all-or-nothing assignments, each solved by the inner
// primal-dual loop. Requires K <= 20.
OffloadSolution binary_offloading(std::span<const UserLink> links,
                                  std::span<const UserRequest> requests,
                                  const SystemParams& params, const OffloadOptions& options = {},
                                  Execution exec = Execution::kParallel);

// Every user transmits at its power cap and the AP gives each user P/K. The
// energy is then linear in s and the partition is solved exactly as an LP.
// When no partition meets the deadline, the partition minimising the
// completion time is returned with status kInfeasible so the overrun is
// visible.
OffloadSolution fixed_power_offloading(std::span<const UserLink> links,
                                       std::span<const UserRequest> requests,
                                       const SystemParams& params);

// Completion time of a solution as a fraction of T_d: the larger of
// T1 + T2 + T3 and the slowest user's local-plus-uplink time.
double latency_fraction(const OffloadSolution& sol, const SystemParams& params);

}  // namespace wptmec

#endif  // WPTMEC_BASELINES_HPP_
