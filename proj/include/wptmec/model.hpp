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

// System model of a massive-MIMO MEC access point serving K users with
// partial computation offloading and RF wireless charging. Every quantity is
// SI: W, J, s, Hz, bits. Conversions from dBm/dB happen at config parse time.

#ifndef WPTMEC_MODEL_HPP_
#define WPTMEC_MODEL_HPP_

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wptmec {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Smallest transmission time used wherever s > 0; the energy expressions
/// are singular at t = 0.
inline constexpr double kMinTime = 1e-9;

double dbm_to_watt(double dbm);
double db_to_linear(double db);

/// All fixed scalars of one scenario.
struct SystemParams {
  int n_antennas = 100;            // N
  int users_per_cell = 4;          // K
  int n_cells = 4;                 // L
  double bandwidth = 5e6;          // B [Hz]
  double latency = 20e-3;          // T_d [s]
  double ap_power = 0.0;           // P [W]
  double user_power_max = 0.0;     // [W]
  double cap_gap_ul = 1.25;        // Gamma_1
  double cap_gap_dl = 1.25;        // Gamma_2
  double data_symbol_fraction = 1.0;  // nu
  double result_ratio = 2.0;       // mu
  double energy_weight = 1e-3;     // w
  double user_cap = 5e-31;         // kappa_i, capacitance coefficient (f in Hz)
  double user_cycles_per_bit = 1000.0;  // c_i
  double mec_cap = 5e-30;          // kappa_m
  double mec_cycles_per_bit = 500.0;    // d_m
  double user_freq = 1.8e9;        // f_u [Hz]
  double mec_freq_per_user = 0.0;  // f_m [Hz]
  std::vector<double> conv_eff;    // xi_i, one per user in a cell
  double coherence_len = 0.0;      // tau_c [symbols]
  double noise_ul = 0.0;           // sigma_r^2 [W]
  double noise_dl = 0.0;           // sigma_k^2 [W]
  double pathloss_exp = 2.2;
  double shadow_std_db = 2.7;
  double area_side = 20.0;         // [m]

  /// Defaults of the reference scenario for K users per cell. Derived fields
  /// (f_m, nu, tau_c, xi) follow K.
  static SystemParams defaults(int users_per_cell = 4);

  /// Recomputes K-dependent derived fields after K, B or T_d changed.
  void rederive();

  double xi(int user) const { return conv_eff.at(static_cast<size_t>(user)); }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

struct UserRequest {
  double data_bits = 0.0;   // u_i
  double energy_req = 0.0;  // e_i [J]
};

/// Per-user link state seen by the offloading model: mean-square channel
/// estimate gamma and the uplink and downlink interference-plus-noise powers.
struct UserLink {
  double gamma = 0.0;
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
};

struct DataPartition {
  std::vector<double> offloaded;  // s_i
  std::vector<double> local;      // q_i = u_i - s_i

  static DataPartition from_offloaded(std::span<const double> s,
                                      std::span<const UserRequest> requests);
  size_t size() const { return offloaded.size(); }
};

struct TimeAllocation {
  std::vector<double> t_up;    // t_u,i
  std::vector<double> t_down;  // t_d,i
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t_charge = 0.0;       // T_c = T_d - T1 - T3

  /// Sets T1/T3 from the per-user maxima and T_c from T_d.
  void close(double t2_value, double latency);
};

struct EnergyBreakdown {
  double offload = 0.0;        // E_OFF
  double local = 0.0;          // E_LC
  double download = 0.0;       // E_DL
  double mec_compute = 0.0;    // E_OC
  double users = 0.0;          // E_u
  double mec = 0.0;            // E_m
  double weighted_total = 0.0; // (1-w) E_u + w E_m
  double charging = 0.0;       // E_c
  std::vector<double> harvested;  // E_h,i
};

enum class LinkDirection { kUplink, kDownlink };

// Rates in bits/s/Hz.
double uplink_rate(double power, double gamma, double sigma1_sq,
                   const SystemParams& params);
double downlink_rate(double fraction, double gamma, double sigma2_sq,
                     const SystemParams& params);

/// Inverse of the rate equations for a transfer of `bits` in `time`: uplink
/// transmit power [W] or downlink power fraction eta.
double power_from_time(double bits, double time, LinkDirection direction,
                       const UserLink& link, const SystemParams& params);

/// Gamma * sigma^2 / (N gamma_i): the "effective noise" multiplying
/// (2^rate - 1) in the transmit energy. Units of W.
double effective_noise(LinkDirection direction, const UserLink& link,
                       const SystemParams& params);

/// Transmit energy t * (2^{k/t} - 1) * noise for k = bits per Hz exponent.
double transmit_energy(double bits, double time, LinkDirection direction,
                       const UserLink& link, const SystemParams& params);

double energy_users(const DataPartition& partition,
                    std::span<const double> t_up,
                    std::span<const UserLink> links,
                    const SystemParams& params);
double energy_mec(const DataPartition& partition,
                  std::span<const double> t_down,
                  std::span<const UserLink> links,
                  const SystemParams& params);

double t2_closed_form(std::span<const double> offloaded,
                      const SystemParams& params);
double local_compute_time(double local_bits, const SystemParams& params);

/// xi * h^* W h. Throws std::invalid_argument when W is not Hermitian or has
/// an eigenvalue below -1e-9 * ||W||.
double received_power(const CMatrix& covariance, const CVector& channel,
                      double xi);
double charging_energy(const CMatrix& covariance, double charge_time);

EnergyBreakdown energy_breakdown(const DataPartition& partition,
                                 const TimeAllocation& times,
                                 std::span<const UserLink> links,
                                 const SystemParams& params);

struct FeasibilityReport {
  bool feasible = true;
  std::string violation;  // first violated constraint, empty when feasible
};

/// The single feasibility predicate for (s, t): latency budget, per-user
/// local+uplink deadline, phase maxima and the T2 closed form, with relative
/// tolerance `rel_tol` on the time constraints.
FeasibilityReport check_feasibility(const DataPartition& partition,
                                    const TimeAllocation& times,
                                    const SystemParams& params,
                                    double rel_tol = 1e-6);

}  // namespace wptmec

#endif  // WPTMEC_MODEL_HPP_
