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

#include "wptmec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace wptmec {
namespace {

constexpr int kPlacementRetries = 100000;

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

int nearest_ap(const std::vector<Point>& aps, const Point& p) {
  int best = 0;
  double best_d = distance(aps[0], p);
  for (int l = 1; l < static_cast<int>(aps.size()); ++l) {
    const double d = distance(aps[static_cast<size_t>(l)], p);
    if (d < best_d) {
      best_d = d;
      best = l;
    }
  }
  return best;
}

}  // namespace

NetworkLayout generate_layout(const SystemParams& params, std::uint64_t seed) {
  const int n_cells = params.n_cells;
  const int k = params.users_per_cell;
  if (n_cells <= 0 || k <= 0) throw std::invalid_argument("generate_layout: L*K must be positive");

  NetworkLayout layout;
  layout.users_per_cell = k;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_cells))));
  const int rows = (n_cells + cols - 1) / cols;
  const double side = params.area_side;
  for (int l = 0; l < n_cells; ++l) {
    const int r = l / cols;
    const int c = l % cols;
    layout.aps.push_back({(c + 0.5) * side / cols, (r + 0.5) * side / rows});
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, side);
  std::vector<std::vector<Point>> per_cell(static_cast<size_t>(n_cells));
  int placed = 0;
  int attempts = 0;
  while (placed < n_cells * k) {
    if (++attempts > kPlacementRetries)
      throw std::runtime_error("generate_layout: could not balance users across cells");
    const Point p{coord(rng), coord(rng)};
    auto& cell = per_cell[static_cast<size_t>(nearest_ap(layout.aps, p))];
    if (static_cast<int>(cell.size()) >= k) continue;
    cell.push_back(p);
    ++placed;
  }
  for (int l = 0; l < n_cells; ++l) {
    for (const Point& p : per_cell[static_cast<size_t>(l)]) {
      layout.users.push_back(p);
      layout.cell_of_user.push_back(l);
    }
  }
  return layout;
}

Eigen::MatrixXd channel_estimates(const Eigen::MatrixXd& beta, int users_per_cell,
                                  const SystemParams& params) {
  const Eigen::Index n_aps = beta.rows();
  const Eigen::Index n_users = beta.cols();
  const double tau_p = users_per_cell;
  const double p = params.user_power_max;
  Eigen::MatrixXd gamma(n_aps, n_users);
  for (Eigen::Index ap = 0; ap < n_aps; ++ap) {
    for (Eigen::Index u = 0; u < n_users; ++u) {
      const Eigen::Index pilot = u % users_per_cell;
      double contaminated = 0.0;
      for (Eigen::Index v = pilot; v < n_users; v += users_per_cell) contaminated += beta(ap, v);
      gamma(ap, u) = tau_p * p * beta(ap, u) * beta(ap, u) /
                     (params.noise_ul + tau_p * p * contaminated);
    }
  }
  return gamma;
}

InterferencePowers interference_powers(const NetworkLayout& layout,
                                       const ChannelRealization& ch,
                                       const SystemParams& params) {
  const int n_users = layout.n_users();
  const int k = layout.users_per_cell;
  const double n = params.n_antennas;
  const double p_user = params.user_power_max;
  const double p_ap = params.ap_power;
  InterferencePowers out;
  out.sigma1_sq.resize(static_cast<size_t>(n_users));
  out.sigma2_sq.resize(static_cast<size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    const int l = layout.cell_of_user[static_cast<size_t>(u)];
    const int pilot = u % k;

    // Uplink at AP l: every other user non-coherently, plus the coherent
    // contamination of the same pilot from the other cells.
    double s1 = params.noise_ul;
    for (int v = 0; v < n_users; ++v)
      if (v != u) s1 += p_user * ch.beta(l, v);
    for (int v = pilot; v < n_users; v += k)
      if (layout.cell_of_user[static_cast<size_t>(v)] != l) s1 += n * p_user * ch.gamma(l, v);

    // Downlink at user u: all APs at power P split 1/K over their users,
    // excluding its own stream, plus coherent contamination of the other
    // APs' beams towards the pilot-sharing users.
    double s2 = params.noise_dl;
    for (int j = 0; j < layout.n_cells(); ++j) {
      const double streams = j == l ? k - 1 : k;
      s2 += p_ap / k * streams * ch.beta(j, u);
      if (j != l) s2 += n * p_ap / k * ch.gamma(j, u);
    }
    out.sigma1_sq[static_cast<size_t>(u)] = s1;
    out.sigma2_sq[static_cast<size_t>(u)] = s2;
  }
  return out;
}

ChannelRealization generate_channels(const NetworkLayout& layout, const SystemParams& params,
                                     std::uint64_t seed) {
  const int n_cells = layout.n_cells();
  const int n_users = layout.n_users();
  const int k = layout.users_per_cell;
  if (n_cells == 0 || n_users != n_cells * k)
    throw std::invalid_argument("generate_channels: layout is not balanced");

  ChannelRealization ch;
  ch.n_antennas = params.n_antennas;
  ch.n_cells = n_cells;
  ch.users_per_cell = k;
  ch.seed = seed;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> shadow(0.0, 1.0);
  std::normal_distribution<double> fading(0.0, std::sqrt(0.5));

  ch.beta.resize(n_cells, n_users);
  for (int l = 0; l < n_cells; ++l) {
    for (int u = 0; u < n_users; ++u) {
      const double d = std::max(1.0, distance(layout.aps[static_cast<size_t>(l)],
                                              layout.users[static_cast<size_t>(u)]));
      const double x_db = params.shadow_std_db * shadow(rng);
      ch.beta(l, u) = std::pow(d, -params.pathloss_exp) * db_to_linear(x_db);
    }
  }
  ch.gamma = channel_estimates(ch.beta, k, params);

  ch.serving.resize(static_cast<size_t>(n_cells));
  for (int l = 0; l < n_cells; ++l) {
    CMatrix h(params.n_antennas, k);
    for (int i = 0; i < k; ++i) {
      const double amp = std::sqrt(ch.beta(l, l * k + i));
      for (int a = 0; a < params.n_antennas; ++a) {
        const double re = fading(rng);
        const double im = fading(rng);
        h(a, i) = amp * Complex(re, im);
      }
    }
    ch.serving[static_cast<size_t>(l)] = std::move(h);
  }

  auto powers = interference_powers(layout, ch, params);
  ch.sigma1_sq = std::move(powers.sigma1_sq);
  ch.sigma2_sq = std::move(powers.sigma2_sq);
  return ch;
}

CellChannel ChannelRealization::cell(int l) const {
  if (l < 0 || l >= n_cells) throw std::out_of_range("ChannelRealization::cell: bad cell index");
  CellChannel c;
  c.h = serving[static_cast<size_t>(l)];
  for (int i = 0; i < users_per_cell; ++i) {
    const int u = user_index(l, i);
    c.links.push_back({gamma(l, u), sigma1_sq[static_cast<size_t>(u)],
                       sigma2_sq[static_cast<size_t>(u)]});
  }
  return c;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != cols)
      throw std::invalid_argument("ragged matrix in channel file");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

}  // namespace

void to_json(nlohmann::json& j, const ChannelRealization& r) {
  j = nlohmann::json::object();
  j["format"] = "wptmec-channel";
  j["version"] = 1;
  j["n_antennas"] = r.n_antennas;
  j["n_cells"] = r.n_cells;
  j["users_per_cell"] = r.users_per_cell;
  j["seed"] = r.seed;
  j["beta"] = matrix_to_json(r.beta);
  j["gamma"] = matrix_to_json(r.gamma);
  j["sigma1_sq"] = r.sigma1_sq;
  j["sigma2_sq"] = r.sigma2_sq;
  nlohmann::json cells = nlohmann::json::array();
  for (const CMatrix& h : r.serving) {
    nlohmann::json users = nlohmann::json::array();
    for (Eigen::Index i = 0; i < h.cols(); ++i) {
      nlohmann::json vec = nlohmann::json::array();
      for (Eigen::Index a = 0; a < h.rows(); ++a)
        vec.push_back({h(a, i).real(), h(a, i).imag()});
      users.push_back(std::move(vec));
    }
    cells.push_back(std::move(users));
  }
  j["serving"] = std::move(cells);
}

void from_json(const nlohmann::json& j, ChannelRealization& r) {
  if (j.value("format", "") != "wptmec-channel")
    throw std::invalid_argument("not a wptmec channel file");
  if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported channel file version");
  r.n_antennas = j.at("n_antennas").get<int>();
  r.n_cells = j.at("n_cells").get<int>();
  r.users_per_cell = j.at("users_per_cell").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.beta = matrix_from_json(j.at("beta"));
  r.gamma = matrix_from_json(j.at("gamma"));
  r.sigma1_sq = j.at("sigma1_sq").get<std::vector<double>>();
  r.sigma2_sq = j.at("sigma2_sq").get<std::vector<double>>();
  r.serving.clear();
  for (const auto& users : j.at("serving")) {
    CMatrix h(r.n_antennas, r.users_per_cell);
    if (static_cast<int>(users.size()) != r.users_per_cell)
      throw std::invalid_argument("channel file: wrong user count in cell");
    for (int i = 0; i < r.users_per_cell; ++i) {
      const auto& vec = users.at(static_cast<size_t>(i));
      if (static_cast<int>(vec.size()) != r.n_antennas)
        throw std::invalid_argument("channel file: wrong antenna count");
      for (int a = 0; a < r.n_antennas; ++a)
        h(a, i) = Complex(vec.at(static_cast<size_t>(a)).at(0).get<double>(),
                          vec.at(static_cast<size_t>(a)).at(1).get<double>());
    }
    r.serving.push_back(std::move(h));
  }
  const auto n_users = static_cast<size_t>(r.n_cells * r.users_per_cell);
  if (r.serving.size() != static_cast<size_t>(r.n_cells) || r.sigma1_sq.size() != n_users ||
      r.sigma2_sq.size() != n_users || r.beta.rows() != r.n_cells ||
      r.beta.cols() != static_cast<Eigen::Index>(n_users) || r.gamma.rows() != r.beta.rows() ||
      r.gamma.cols() != r.beta.cols())
    throw std::invalid_argument("channel file: inconsistent dimensions");
}

void save_realization(const std::filesystem::path& path, const ChannelRealization& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << nlohmann::json(r).dump(1) << '\n';
}

ChannelRealization load_realization(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in).get<ChannelRealization>();
}

}  // namespace wptmec
