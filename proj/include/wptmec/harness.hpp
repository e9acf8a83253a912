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


// Block-level experiment runner: the charging ledger that carries unmet
// energy requests across blocks, one block in each operating mode, and the
// multi-block profile.

#ifndef WPTMEC_HARNESS_HPP_
#define WPTMEC_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wptmec/channel.hpp"
#include "wptmec/charge.hpp"
#include "wptmec/config.hpp"
#include "wptmec/offload.hpp"
#include "wptmec/parallel.hpp"

namespace wptmec {

/// Per-user account of requested and received energy [J].
class ChargingLedger {
 public:
  explicit ChargingLedger(size_t users);

  size_t users() const { return requested_.size(); }
  /// Adds new demand; every value must be >= 0.
  void add_request(std::span<const double> energy);
  /// Books one block's deliveries. A delivery may exceed the outstanding
  /// amount only by rounding (1e-6 relative), which is clipped.
  void record(std::span<const double> received);

  double requested(size_t user) const { return requested_.at(user); }
  double received(size_t user) const { return received_.at(user); }
  double outstanding(size_t user) const;
  std::vector<double> outstanding() const;
  /// Received energy per block, per user.
  const std::vector<std::vector<double>>& history() const { return history_; }

 private:
  std::vector<double> requested_;
  std::vector<double> received_;
  std::vector<std::vector<double>> history_;
};

enum class OffloadScheme { kPartial, kBinary, kFixedPower };
enum class ChargeScheme { kOptimal, kEqualK, kIsotropic };

struct SolverSettings {
  OffloadScheme offload_scheme = OffloadScheme::kPartial;
  ChargeScheme charge_scheme = ChargeScheme::kOptimal;
  OffloadOptions offload;
  ChargeOptions charge;
  Execution enumeration = Execution::kSerial;  // binary scheme only
};

struct BlockResult {
  int block = 0;
  BlockMode mode = BlockMode::kDataAndCharging;
  std::optional<OffloadSolution> offload;
  std::optional<ChargeSolution> charge;
  std::vector<double> effective_request;  // outstanding at block start [J]
  std::vector<double> received;           // delivered this block [J]
  double charge_time = 0.0;
  std::optional<double> efficiency;       // percent
  double solve_seconds = 0.0;
  std::string note;                       // empty, or why charging was skipped
};

/// One block: offloading first in the data modes, then charging over the
/// remaining time T_c (T_d in charging-only mode) towards the outstanding
/// requests. An infeasible offload is recorded and charging is skipped.
BlockResult run_block(int block, BlockMode mode, std::span<const UserRequest> requests,
                      ChargingLedger& ledger, const CellChannel& cell,
                      const SystemParams& params, const SolverSettings& settings = {});

/// 100 * sum(received) / sum(outstanding); absent when nothing is outstanding.
std::optional<double> charging_efficiency(std::span<const double> received,
                                          std::span<const double> outstanding);
std::optional<double> charging_efficiency(const BlockResult& block);

/// Deterministic seed for an independent stream of a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

enum class SeedStream : std::uint64_t { kLayout = 1, kChannel = 2, kBlockChannel = 3 };

struct ProfileBlock {
  int block = 0;
  BlockMode mode = BlockMode::kDataAndCharging;
  double received = 0.0;             // this block, all users of the cell [J]
  double cumulative_received = 0.0;  // [J]
  double outstanding = 0.0;          // after the block [J]
  std::optional<double> efficiency;
  double charge_time = 0.0;
  bool offload_feasible = true;
};

struct ProfileRun {
  std::uint64_t seed = 0;
  std::vector<ProfileBlock> blocks;
};

/// Runs the schedule for `realizations` independent layouts, each block on
/// a fresh channel realization of cell 0. Results are ordered by realization
/// regardless of `exec`.
std::vector<ProfileRun> run_profile(const ExperimentConfig& config, int realizations,
                                    Execution exec = Execution::kParallel);

}  // namespace wptmec

#endif  // WPTMEC_HARNESS_HPP_
