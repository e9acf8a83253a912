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


#include "wptmec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "wptmec/baselines.hpp"

namespace wptmec {

ChargingLedger::ChargingLedger(size_t users) : requested_(users, 0.0), received_(users, 0.0) {}

void ChargingLedger::add_request(std::span<const double> energy) {
  if (energy.size() != users()) throw std::invalid_argument("ledger: one request per user");
  for (double e : energy)
    if (!(e >= 0.0)) throw std::invalid_argument("ledger: requests must be >= 0");
  for (size_t i = 0; i < users(); ++i) requested_[i] += energy[i];
}

void ChargingLedger::record(std::span<const double> received) {
  if (received.size() != users()) throw std::invalid_argument("ledger: one delivery per user");
  std::vector<double> booked(users());
  for (size_t i = 0; i < users(); ++i) {
    const double open = outstanding(i);
    if (!(received[i] >= 0.0)) throw std::invalid_argument("ledger: negative delivery");
    if (received[i] > open + 1e-6 * std::max(open, requested_[i]) + 1e-15)
      throw std::logic_error("ledger: delivery exceeds the outstanding request");
    booked[i] = std::min(received[i], open);
  }
  for (size_t i = 0; i < users(); ++i) received_[i] += booked[i];
  history_.push_back(std::move(booked));
}

double ChargingLedger::outstanding(size_t user) const {
  return std::max(0.0, requested_.at(user) - received_.at(user));
}

std::vector<double> ChargingLedger::outstanding() const {
  std::vector<double> out(users());
  for (size_t i = 0; i < users(); ++i) out[i] = outstanding(i);
  return out;
}

namespace {

OffloadSolution solve_offload(std::span<const UserLink> links,
                              std::span<const UserRequest> requests, const SystemParams& params,
                              const SolverSettings& settings) {
  switch (settings.offload_scheme) {
    case OffloadScheme::kPartial:
      return outer_descent(links, requests, params, settings.offload);
    case OffloadScheme::kBinary:
      return binary_offloading(links, requests, params, settings.offload, settings.enumeration);
    case OffloadScheme::kFixedPower:
      return fixed_power_offloading(links, requests, params);
  }
  throw std::invalid_argument("unknown offloading scheme");
}

ChargeSolution solve_charge(const CMatrix& h, std::span<const UserRequest> requests,
                            double charge_time, const SystemParams& params,
                            const SolverSettings& settings) {
  switch (settings.charge_scheme) {
    case ChargeScheme::kOptimal:
      return solve_pwc(h, requests, charge_time, params, settings.charge);
    case ChargeScheme::kEqualK:
      return equal_k_charging(h, requests, charge_time, params);
    case ChargeScheme::kIsotropic:
      return isotropic_charging(h, requests, charge_time, params);
  }
  throw std::invalid_argument("unknown charging scheme");
}

}  // namespace

BlockResult run_block(int block, BlockMode mode, std::span<const UserRequest> requests,
                      ChargingLedger& ledger, const CellChannel& cell,
                      const SystemParams& params, const SolverSettings& settings) {
  const size_t k = requests.size();
  if (cell.links.size() != k || ledger.users() != k)
    throw std::invalid_argument("run_block: requests, channel and ledger disagree on K");
  const auto start = std::chrono::steady_clock::now();
  BlockResult out;
  out.block = block;
  out.mode = mode;
  out.received.assign(k, 0.0);

  double charge_time = params.latency;
  if (mode != BlockMode::kChargingOnly) {
    out.offload = solve_offload(cell.links, requests, params, settings);
    charge_time = out.offload->feasible() ? out.offload->times.t_charge : 0.0;
    if (!out.offload->feasible()) out.note = "offload infeasible";
  }

  if (mode == BlockMode::kDataOnly) {
    out.effective_request = ledger.outstanding();
  } else {
    std::vector<double> fresh(k);
    for (size_t i = 0; i < k; ++i) fresh[i] = requests[i].energy_req;
    ledger.add_request(fresh);
    out.effective_request = ledger.outstanding();
    out.charge_time = charge_time;
    if (out.note.empty()) {
      std::vector<UserRequest> open(k);
      for (size_t i = 0; i < k; ++i) open[i] = {requests[i].data_bits, out.effective_request[i]};
      out.charge = solve_charge(cell.h, open, charge_time, params, settings);
      out.received = out.charge->harvested;
    }
  }
  ledger.record(out.received);
  out.received = ledger.history().back();
  if (mode != BlockMode::kDataOnly) out.efficiency = charging_efficiency(out);
  out.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::optional<double> charging_efficiency(std::span<const double> received,
                                          std::span<const double> outstanding) {
  if (received.size() != outstanding.size())
    throw std::invalid_argument("charging_efficiency: size mismatch");
  const double want = std::accumulate(outstanding.begin(), outstanding.end(), 0.0);
  if (!(want > 0.0)) return std::nullopt;
  return 100.0 * std::accumulate(received.begin(), received.end(), 0.0) / want;
}

std::optional<double> charging_efficiency(const BlockResult& block) {
  return charging_efficiency(block.received, block.effective_request);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 finaliser over a combination of the three inputs.
  std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + stream * 0xD1B54A32D192ED03ULL +
                    index * 0x8CB92BA72F3D8DD7ULL + 0x2545F4914F6CDD1DULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<ProfileRun> run_profile(const ExperimentConfig& config, int realizations,
                                    Execution exec) {
  if (realizations < 1) throw std::invalid_argument("run_profile: need at least one realization");
  const SystemParams& params = config.params;
  const int k = params.users_per_cell;
  SolverSettings settings;
  settings.offload = config.offload;
  settings.charge = config.charge;

  std::vector<ProfileRun> runs(static_cast<size_t>(realizations));
  for_each_index(realizations, exec, [&](std::int64_t r) {
    ProfileRun& run = runs[static_cast<size_t>(r)];
    run.seed = config.seed + static_cast<std::uint64_t>(r);
    const NetworkLayout layout =
        generate_layout(params, derive_seed(run.seed, static_cast<std::uint64_t>(SeedStream::kLayout), 0));
    ChargingLedger ledger(static_cast<size_t>(k));
    double cumulative = 0.0;
    int q = 0;
    for (const ScheduleEntry& entry : config.schedule) {
      const std::vector<UserRequest> requests(static_cast<size_t>(k),
                                              {entry.data_bits, entry.energy_req});
      for (int b = 0; b < entry.blocks; ++b, ++q) {
        const ChannelRealization ch = generate_channels(
            layout, params,
            derive_seed(run.seed, static_cast<std::uint64_t>(SeedStream::kBlockChannel),
                        static_cast<std::uint64_t>(q)));
        const BlockResult res = run_block(q, entry.mode, requests, ledger, ch.cell(0), params, settings);
        ProfileBlock pb;
        pb.block = q;
        pb.mode = entry.mode;
        pb.received = std::accumulate(res.received.begin(), res.received.end(), 0.0);
        cumulative += pb.received;
        pb.cumulative_received = cumulative;
        const std::vector<double> open = ledger.outstanding();
        pb.outstanding = std::accumulate(open.begin(), open.end(), 0.0);
        pb.efficiency = res.efficiency;
        pb.charge_time = res.charge_time;
        pb.offload_feasible = !res.offload || res.offload->feasible();
        run.blocks.push_back(pb);
      }
    }
  });
  return runs;
}

}  // namespace wptmec
