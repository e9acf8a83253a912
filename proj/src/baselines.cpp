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

#include "wptmec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wptmec/numerics/lp.hpp"

namespace wptmec {
namespace {

std::vector<double> conversion_efficiencies(const SystemParams& params, Eigen::Index k) {
  std::vector<double> xi(static_cast<size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) xi[static_cast<size_t>(i)] = params.xi(static_cast<int>(i));
  return xi;
}

ChargeSolution scaled_solution(CMatrix directions, Eigen::VectorXd powers, const CMatrix& channels,
                               std::span<const UserRequest> requests, double charge_time,
                               const SystemParams& params) {
  if (static_cast<Eigen::Index>(requests.size()) != channels.cols())
    throw std::invalid_argument("charging baseline: one request per user required");
  if (charge_time < 0.0) throw std::domain_error("charging baseline: negative charging time");
  const std::vector<double> xi = conversion_efficiencies(params, channels.cols());
  ChargeSolution sol;
  sol.charge_time = charge_time;
  sol.directions = std::move(directions);
  sol.powers = std::move(powers);
  sol.duals = WcDuals::zeros(requests.size());
  sol.converged = true;
  const std::vector<double> unscaled =
      harvested_energy(sol.directions, sol.powers, channels, xi, charge_time);
  sol.powers *= global_cap_scale(unscaled, requests);
  finish_charge_solution(sol, channels, xi, params.ap_power);
  return sol;
}

}  // namespace

double global_cap_scale(std::span<const double> harvested, std::span<const UserRequest> requests) {
  if (harvested.size() != requests.size())
    throw std::invalid_argument("global_cap_scale: size mismatch");
  double scale = 1.0;
  for (size_t i = 0; i < harvested.size(); ++i)
    if (harvested[i] > 0.0) scale = std::min(scale, requests[i].energy_req / harvested[i]);
  return std::max(0.0, scale);
}

ChargeSolution isotropic_charging(const CMatrix& channels, std::span<const UserRequest> requests,
                                  double charge_time, const SystemParams& params) {
  const Eigen::Index n = channels.rows();
  return scaled_solution(CMatrix::Identity(n, n),
                         Eigen::VectorXd::Constant(n, params.ap_power / static_cast<double>(n)),
                         channels, requests, charge_time, params);
}

ChargeSolution equal_k_charging(const CMatrix& channels, std::span<const UserRequest> requests,
                                double charge_time, const SystemParams& params) {
  const Eigen::Index k = channels.cols();
  const std::vector<double> xi = conversion_efficiencies(params, k);
  // The direction matrix with zero duals is T_c-independent up to scale.
  CMatrix u = beam_directions_low_rank(WcDuals::zeros(static_cast<size_t>(k)), channels, xi, 1.0);
  return scaled_solution(std::move(u),
                         Eigen::VectorXd::Constant(k, params.ap_power / static_cast<double>(k)),
                         channels, requests, charge_time, params);
}

OffloadSolution binary_offloading(std::span<const UserLink> links,
                                  std::span<const UserRequest> requests,
                                  const SystemParams& params, const OffloadOptions& options,
                                  Execution exec) {
  const size_t k = requests.size();
  if (links.size() != k) throw std::invalid_argument("binary_offloading: size mismatch");
  if (k > 20) throw std::invalid_argument("binary_offloading: at most 20 users");
  const std::int64_t count = std::int64_t{1} << k;

  struct Candidate {
    DataPartition partition;
    InnerResult inner;
    bool evaluated = false;
  };
  std::vector<Candidate> candidates(static_cast<size_t>(count));
  for_each_index(count, exec, [&](std::int64_t mask) {
    std::vector<double> s(k, 0.0);
    for (size_t i = 0; i < k; ++i)
      if ((mask >> i) & 1) s[i] = requests[i].data_bits;
    Candidate& c = candidates[static_cast<size_t>(mask)];
    c.partition = DataPartition::from_offloaded(s, requests);
    if (!partition_admissible(c.partition, links, params, options.enforce_power_cap)) return;
    c.inner = inner_primal_dual(c.partition, links, params, options);
    c.evaluated = c.inner.feasible;
  });

  // Serial reduction in mask order keeps the choice independent of scheduling.
  const Candidate* best = nullptr;
  long long dual_iterations = 0;
  for (const Candidate& c : candidates) {
    dual_iterations += c.inner.iterations;
    if (c.evaluated && (best == nullptr || c.inner.objective < best->inner.objective)) best = &c;
  }
  if (best == nullptr) {
    OffloadSolution sol;
    sol.partition = DataPartition::from_offloaded(std::vector<double>(k, 0.0), requests);
    sol.status = SolveStatus::kInfeasible;
    sol.stop_reason = "no admissible assignment";
    sol.dual_iterations = dual_iterations;
    return sol;
  }
  OffloadSolution sol = make_solution(best->partition, best->inner, links, params);
  sol.status = best->inner.converged ? SolveStatus::kConverged : SolveStatus::kIterationCap;
  sol.stop_reason = "exhaustive";
  sol.outer_iterations = static_cast<int>(count);
  sol.dual_iterations = dual_iterations;
  return sol;
}

OffloadSolution fixed_power_offloading(std::span<const UserLink> links,
                                       std::span<const UserRequest> requests,
                                       const SystemParams& params) {
  const size_t k = requests.size();
  if (links.size() != k) throw std::invalid_argument("fixed_power_offloading: size mismatch");
  const auto kk = static_cast<Eigen::Index>(k);
  const double td = params.latency;
  const double eta = 1.0 / static_cast<double>(k);
  const double p_user = params.user_power_max;
  const double fu2 = params.user_freq * params.user_freq;
  const double fm2 = params.mec_freq_per_user * params.mec_freq_per_user;
  const double w = params.energy_weight;

  // Per-user times per offloaded bit and net weighted energy per offloaded bit.
  std::vector<double> up(k), down(k), net(k), local(k);
  for (size_t i = 0; i < k; ++i) {
    up[i] = 1.0 / (params.bandwidth *
                   uplink_rate(p_user, links[i].gamma, links[i].sigma1_sq, params));
    down[i] = params.result_ratio /
              (params.bandwidth * downlink_rate(eta, links[i].gamma, links[i].sigma2_sq, params));
    local[i] = params.user_cycles_per_bit / params.user_freq;
    net[i] = (1.0 - w) * (p_user * up[i] - params.user_cap * params.user_cycles_per_bit * fu2) +
             w * (eta * params.ap_power * down[i] +
                  params.mec_cap * params.mec_cycles_per_bit * fm2);
  }

  // Variables: x_i = s_i / u_i, then T1, T2, T3 in units of T_d, then (for
  // the overrun fallback) the completion time Z in units of T_d.
  auto build = [&](bool overrun) {
    const Eigen::Index n = kk + 3 + (overrun ? 1 : 0);
    const Eigen::Index m = 5 * kk + 1;
    LpProblem lp;
    lp.objective = Eigen::VectorXd::Zero(n);
    lp.constraints = Eigen::MatrixXd::Zero(m, n);
    lp.bounds = Eigen::VectorXd::Zero(m);
    double scale = 0.0;
    for (size_t i = 0; i < k; ++i) scale = std::max(scale, std::abs(net[i]) * requests[i].data_bits);
    if (!(scale > 0.0)) scale = 1.0;
    for (Eigen::Index i = 0; i < kk; ++i) {
      const auto u = static_cast<size_t>(i);
      const double bits = requests[u].data_bits;
      if (!overrun) lp.objective(i) = -net[u] * bits / scale;
      lp.constraints(i, i) = up[u] * bits / td;
      lp.constraints(i, kk) = -1.0;
      lp.constraints(kk + i, i) = params.mec_cycles_per_bit * bits / (params.mec_freq_per_user * td);
      lp.constraints(kk + i, kk + 1) = -1.0;
      lp.constraints(2 * kk + i, i) = down[u] * bits / td;
      lp.constraints(2 * kk + i, kk + 2) = -1.0;
      lp.constraints(3 * kk + i, i) = (up[u] - local[u]) * bits / td;
      lp.bounds(3 * kk + i) = 1.0 - local[u] * bits / td;
      lp.constraints(4 * kk + i, i) = 1.0;
      lp.bounds(4 * kk + i) = 1.0;
    }
    lp.constraints(5 * kk, kk) = lp.constraints(5 * kk, kk + 1) = lp.constraints(5 * kk, kk + 2) = 1.0;
    lp.bounds(5 * kk) = 1.0;
    if (overrun) {
      const Eigen::Index z = kk + 3;
      lp.objective(z) = -1.0;
      lp.constraints(5 * kk, z) = -1.0;
      lp.bounds(5 * kk) = 0.0;
      for (Eigen::Index i = 0; i < kk; ++i) {
        lp.constraints(3 * kk + i, z) = -1.0;
        lp.bounds(3 * kk + i) -= 1.0;
      }
    }
    return lp;
  };

  bool met = true;
  LpSolution lp;
  try {
    lp = solve_lp(build(false));
  } catch (const LpInfeasible&) {
    met = false;
    lp = solve_lp(build(true));
  }

  std::vector<double> s(k);
  for (size_t i = 0; i < k; ++i)
    s[i] = std::clamp(lp.x(static_cast<Eigen::Index>(i)), 0.0, 1.0) * requests[i].data_bits;
  OffloadSolution sol;
  sol.partition = DataPartition::from_offloaded(s, requests);
  TimeAllocation& t = sol.times;
  t.t_up.assign(k, 0.0);
  t.t_down.assign(k, 0.0);
  sol.ul_power.assign(k, 0.0);
  sol.dl_fraction.assign(k, 0.0);
  for (size_t i = 0; i < k; ++i) {
    if (s[i] <= 0.0) continue;
    t.t_up[i] = up[i] * s[i];
    t.t_down[i] = down[i] * s[i];
    sol.ul_power[i] = p_user;
    sol.dl_fraction[i] = eta;
  }
  t.close(t2_closed_form(s, params), td);
  t.t_charge = std::max(0.0, t.t_charge);
  sol.energy = energy_breakdown(sol.partition, t, links, params);
  sol.duals = CoDuals::zeros(k);
  sol.status = met ? SolveStatus::kConverged : SolveStatus::kInfeasible;
  sol.stop_reason = met ? "linear program" : "deadline exceeded";
  return sol;
}

double latency_fraction(const OffloadSolution& sol, const SystemParams& params) {
  const TimeAllocation& t = sol.times;
  if (t.t_up.size() != sol.partition.size()) return std::numeric_limits<double>::quiet_NaN();
  double worst = t.t1 + t.t2 + t.t3;
  for (size_t i = 0; i < sol.partition.size(); ++i)
    worst = std::max(worst, local_compute_time(sol.partition.local[i], params) + t.t_up[i]);
  return worst / params.latency;
}

}  // namespace wptmec
