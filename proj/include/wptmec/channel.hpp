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

// Network layouts and per-block channel realizations for L cells of K users
// served by N-antenna access points, with full pilot reuse across cells.

#ifndef WPTMEC_CHANNEL_HPP_
#define WPTMEC_CHANNEL_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wptmec/model.hpp"

namespace wptmec {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Users are grouped by cell: user index l*K + i is user i of cell l.
struct NetworkLayout {
  std::vector<Point> aps;
  std::vector<Point> users;
  std::vector<int> cell_of_user;
  int users_per_cell = 0;

  int n_cells() const { return static_cast<int>(aps.size()); }
  int n_users() const { return static_cast<int>(users.size()); }
};

/// The K users of one cell as seen by its serving AP.
struct CellChannel {
  CMatrix h;  // N x K, column i is the AP -> user i channel
  std::vector<UserLink> links;
};

struct ChannelRealization {
  int n_antennas = 0;
  int n_cells = 0;
  int users_per_cell = 0;
  std::vector<CMatrix> serving;  // per cell, N x K
  Eigen::MatrixXd beta;          // (AP, user) large-scale gain
  Eigen::MatrixXd gamma;         // (AP, user) mean-square channel estimate
  std::vector<double> sigma1_sq; // per user
  std::vector<double> sigma2_sq; // per user
  std::uint64_t seed = 0;

  CellChannel cell(int l) const;
  int user_index(int cell, int i) const { return cell * users_per_cell + i; }
};

/// APs on a regular grid over the square area, users uniform with exactly K
/// per nearest-AP cell (a draw landing in a full cell is redrawn). Throws
/// std::runtime_error if the retry budget is exhausted.
NetworkLayout generate_layout(const SystemParams& params, std::uint64_t seed);

/// Path loss d^-pl with log-normal shadowing, Rayleigh small-scale fading,
/// channel estimates and interference powers.
ChannelRealization generate_channels(const NetworkLayout& layout,
                                     const SystemParams& params, std::uint64_t seed);

/// Mean-square estimate at each AP of each user's channel from tau_p = K
/// pilot symbols sent at full power with pilot i reused in every cell.
Eigen::MatrixXd channel_estimates(const Eigen::MatrixXd& beta, int users_per_cell,
                                  const SystemParams& params);

struct InterferencePowers {
  std::vector<double> sigma1_sq;
  std::vector<double> sigma2_sq;
};

/// Worst-case interference-plus-noise powers: users at full power in the
/// uplink, APs with equal power 1/K per user in the downlink.
InterferencePowers interference_powers(const NetworkLayout& layout,
                                       const ChannelRealization& channels,
                                       const SystemParams& params);

void to_json(nlohmann::json& j, const ChannelRealization& r);
void from_json(const nlohmann::json& j, ChannelRealization& r);
void save_realization(const std::filesystem::path& path, const ChannelRealization& r);
ChannelRealization load_realization(const std::filesystem::path& path);

}  // namespace wptmec

#endif  // WPTMEC_CHANNEL_HPP_
