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

#include "wptmec/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wptmec {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SystemParams SystemParams::defaults(int users_per_cell) {
  SystemParams p;
  p.users_per_cell = users_per_cell;
  p.ap_power = dbm_to_watt(46.0);
  p.user_power_max = dbm_to_watt(23.0);
  p.noise_ul = dbm_to_watt(-127.0);
  p.noise_dl = dbm_to_watt(-122.0);
  p.rederive();
  return p;
}

void SystemParams::rederive() {
  // 24 cores at 3.4 GHz shared equally by the K users of a cell.
  mec_freq_per_user = 24.0 * 3400e6 / users_per_cell;
  coherence_len = bandwidth * latency;
  // tau_p = K pilot symbols per coherence interval.
  data_symbol_fraction = 1.0 - users_per_cell / coherence_len;
  const double xi = conv_eff.empty() ? 0.5 : conv_eff.front();
  conv_eff.assign(static_cast<size_t>(users_per_cell), xi);
}

void SystemParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid parameter: ") + what);
  };
  require(n_antennas > 0, "n_antennas must be positive");
  require(users_per_cell > 0, "users_per_cell must be positive");
  require(n_cells > 0, "n_cells must be positive");
  require(bandwidth > 0, "bandwidth must be positive");
  require(latency > 0, "latency must be positive");
  require(ap_power > 0, "ap_power must be positive");
  require(user_power_max > 0, "user_power_max must be positive");
  require(cap_gap_ul >= 1.0, "cap_gap_ul must be >= 1");
  require(cap_gap_dl >= 1.0, "cap_gap_dl must be >= 1");
  require(data_symbol_fraction > 0 && data_symbol_fraction <= 1.0,
          "data_symbol_fraction must lie in (0, 1]");
  require(result_ratio > 0, "result_ratio must be positive");
  require(energy_weight >= 0 && energy_weight <= 1, "energy_weight must lie in [0, 1]");
  require(user_cap >= 0 && mec_cap >= 0, "capacitance coefficients must be >= 0");
  require(user_cycles_per_bit > 0 && mec_cycles_per_bit > 0,
          "cycles per bit must be positive");
  require(user_freq > 0 && mec_freq_per_user > 0, "CPU frequencies must be positive");
  require(static_cast<int>(conv_eff.size()) == users_per_cell,
          "conv_eff must hold one value per user");
  for (double x : conv_eff) require(x >= 0 && x <= 1, "conv_eff must lie in [0, 1]");
  require(noise_ul > 0 && noise_dl > 0, "noise powers must be positive");
  require(pathloss_exp > 0, "pathloss_exp must be positive");
  require(shadow_std_db >= 0, "shadow_std_db must be >= 0");
  require(area_side > 0, "area_side must be positive");
}

DataPartition DataPartition::from_offloaded(std::span<const double> s,
                                            std::span<const UserRequest> requests) {
  if (s.size() != requests.size())
    throw std::invalid_argument("partition size does not match requests");
  DataPartition part;
  part.offloaded.assign(s.begin(), s.end());
  part.local.resize(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0 || s[i] > requests[i].data_bits * (1 + 1e-12))
      throw std::invalid_argument("offloaded bits outside [0, u_i]");
    part.local[i] = std::max(0.0, requests[i].data_bits - s[i]);
  }
  return part;
}

void TimeAllocation::close(double t2_value, double latency) {
  t1 = t_up.empty() ? 0.0 : *std::max_element(t_up.begin(), t_up.end());
  t3 = t_down.empty() ? 0.0 : *std::max_element(t_down.begin(), t_down.end());
  t2 = t2_value;
  t_charge = latency - t1 - t3;
}

double uplink_rate(double power, double gamma, double sigma1_sq,
                   const SystemParams& params) {
  if (!(sigma1_sq > 0) || !(gamma > 0))
    throw std::domain_error("uplink_rate: gamma and sigma1^2 must be positive");
  if (power < 0) throw std::domain_error("uplink_rate: negative power");
  const double sinr = params.n_antennas * gamma * power / sigma1_sq;
  return params.data_symbol_fraction * std::log2(1.0 + sinr / params.cap_gap_ul);
}

double downlink_rate(double fraction, double gamma, double sigma2_sq,
                     const SystemParams& params) {
  if (!(sigma2_sq > 0) || !(gamma > 0))
    throw std::domain_error("downlink_rate: gamma and sigma2^2 must be positive");
  if (fraction < 0 || fraction > 1)
    throw std::domain_error("downlink_rate: power fraction outside [0, 1]");
  const double sinr = params.n_antennas * params.ap_power * gamma * fraction / sigma2_sq;
  return std::log2(1.0 + sinr / params.cap_gap_dl);
}

double effective_noise(LinkDirection direction, const UserLink& link,
                       const SystemParams& params) {
  if (!(link.gamma > 0)) throw std::domain_error("effective_noise: gamma must be positive");
  if (direction == LinkDirection::kUplink) {
    if (!(link.sigma1_sq > 0)) throw std::domain_error("effective_noise: sigma1^2 <= 0");
    return params.cap_gap_ul * link.sigma1_sq / (params.n_antennas * link.gamma);
  }
  if (!(link.sigma2_sq > 0)) throw std::domain_error("effective_noise: sigma2^2 <= 0");
  return params.cap_gap_dl * link.sigma2_sq / (params.n_antennas * link.gamma);
}

namespace {

// Exponent k in 2^{k/t}: bits per Hz on the link.
double rate_exponent(double bits, LinkDirection direction, const SystemParams& params) {
  if (direction == LinkDirection::kUplink)
    return bits / (params.data_symbol_fraction * params.bandwidth);
  return params.result_ratio * bits / params.bandwidth;
}

}  // namespace

double power_from_time(double bits, double time, LinkDirection direction,
                       const UserLink& link, const SystemParams& params) {
  if (!(time > 0)) throw std::domain_error("power_from_time: time must be positive");
  if (bits < 0) throw std::domain_error("power_from_time: negative bits");
  const double k = rate_exponent(bits, direction, params);
  const double noise = effective_noise(direction, link, params);
  const double p = std::expm1(k / time * std::log(2.0)) * noise;
  return direction == LinkDirection::kUplink ? p : p / params.ap_power;
}

double transmit_energy(double bits, double time, LinkDirection direction,
                       const UserLink& link, const SystemParams& params) {
  if (bits <= 0) return 0.0;
  const double t = std::max(time, kMinTime);
  const double k = rate_exponent(bits, direction, params);
  return t * std::expm1(k / t * std::log(2.0)) * effective_noise(direction, link, params);
}

double energy_users(const DataPartition& partition, std::span<const double> t_up,
                    std::span<const UserLink> links, const SystemParams& params) {
  const double f2 = params.user_freq * params.user_freq;
  double total = 0.0;
  for (size_t i = 0; i < partition.size(); ++i) {
    total += transmit_energy(partition.offloaded[i], t_up[i], LinkDirection::kUplink,
                             links[i], params);
    total += params.user_cap * params.user_cycles_per_bit * partition.local[i] * f2;
  }
  return total;
}

double energy_mec(const DataPartition& partition, std::span<const double> t_down,
                  std::span<const UserLink> links, const SystemParams& params) {
  const double f2 = params.mec_freq_per_user * params.mec_freq_per_user;
  double total = 0.0;
  for (size_t i = 0; i < partition.size(); ++i) {
    total += transmit_energy(partition.offloaded[i], t_down[i], LinkDirection::kDownlink,
                             links[i], params);
    total += params.mec_cap * params.mec_cycles_per_bit * f2 * partition.offloaded[i];
  }
  return total;
}

double t2_closed_form(std::span<const double> offloaded, const SystemParams& params) {
  if (!(params.mec_freq_per_user > 0))
    throw std::domain_error("t2_closed_form: MEC frequency must be positive");
  double t2 = 0.0;
  for (double s : offloaded)
    t2 = std::max(t2, params.mec_cycles_per_bit * s / params.mec_freq_per_user);
  return t2;
}

double local_compute_time(double local_bits, const SystemParams& params) {
  if (!(params.user_freq > 0))
    throw std::domain_error("local_compute_time: user frequency must be positive");
  return params.user_cycles_per_bit * local_bits / params.user_freq;
}

double received_power(const CMatrix& covariance, const CVector& channel, double xi) {
  const auto n = covariance.rows();
  if (covariance.cols() != n || channel.size() != n)
    throw std::invalid_argument("received_power: dimension mismatch");
  const double scale = std::max(1.0, covariance.norm());
  if ((covariance - covariance.adjoint()).norm() > 1e-10 * scale)
    throw std::invalid_argument("received_power: covariance is not Hermitian");
  // W + eps*I must admit a Cholesky factor when W is PSD up to eps.
  const CMatrix shifted = covariance + 1e-9 * scale * CMatrix::Identity(n, n);
  if (Eigen::LLT<CMatrix>(shifted).info() != Eigen::Success)
    throw std::invalid_argument("received_power: covariance is not positive semidefinite");
  return xi * std::max(0.0, channel.dot(covariance * channel).real());
}

double charging_energy(const CMatrix& covariance, double charge_time) {
  if (charge_time < 0) throw std::domain_error("charging_energy: negative charging time");
  return charge_time * covariance.trace().real();
}

EnergyBreakdown energy_breakdown(const DataPartition& partition,
                                 const TimeAllocation& times,
                                 std::span<const UserLink> links,
                                 const SystemParams& params) {
  EnergyBreakdown e;
  const double fu2 = params.user_freq * params.user_freq;
  const double fm2 = params.mec_freq_per_user * params.mec_freq_per_user;
  for (size_t i = 0; i < partition.size(); ++i) {
    const double s = partition.offloaded[i];
    e.offload += transmit_energy(s, times.t_up[i], LinkDirection::kUplink, links[i], params);
    e.local += params.user_cap * params.user_cycles_per_bit * partition.local[i] * fu2;
    e.download += transmit_energy(s, times.t_down[i], LinkDirection::kDownlink, links[i],
                                  params);
    e.mec_compute += params.mec_cap * params.mec_cycles_per_bit * fm2 * s;
  }
  e.users = e.offload + e.local;
  e.mec = e.download + e.mec_compute;
  e.weighted_total = (1.0 - params.energy_weight) * e.users + params.energy_weight * e.mec;
  return e;
}

FeasibilityReport check_feasibility(const DataPartition& partition,
                                    const TimeAllocation& times,
                                    const SystemParams& params, double rel_tol) {
  const double slack = params.latency * rel_tol;
  auto fail = [](std::string what) { return FeasibilityReport{false, std::move(what)}; };
  if (times.t_up.size() != partition.size() || times.t_down.size() != partition.size())
    return fail("time allocation size mismatch");
  if (times.t1 < 0 || times.t2 < 0 || times.t3 < 0) return fail("negative phase duration");
  if (times.t1 + times.t2 + times.t3 > params.latency + slack)
    return fail("T1 + T2 + T3 exceeds T_d");
  if (times.t_charge < -slack) return fail("negative charging time");
  for (size_t i = 0; i < partition.size(); ++i) {
    const double tu = times.t_up[i];
    const double td = times.t_down[i];
    if (tu < 0 || td < 0) return fail("negative per-user time");
    if (partition.offloaded[i] < 0 || partition.local[i] < 0)
      return fail("negative data partition");
    if (partition.offloaded[i] > 0 && (tu <= 0 || td <= 0))
      return fail("offloaded bits with zero transfer time");
    if (local_compute_time(partition.local[i], params) + tu > params.latency + slack)
      return fail("local computation plus uplink exceeds T_d for user " + std::to_string(i));
    if (tu > times.t1 + slack) return fail("t_u,i exceeds T1");
    if (td > times.t3 + slack) return fail("t_d,i exceeds T3");
    if (params.mec_cycles_per_bit * partition.offloaded[i] / params.mec_freq_per_user >
        times.t2 + slack)
      return fail("MEC compute time exceeds T2");
  }
  return {};
}

}  // namespace wptmec
