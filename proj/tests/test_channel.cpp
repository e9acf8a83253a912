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

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <doctest.h>

#include "wptmec/channel.hpp"

using namespace wptmec;
using doctest::Approx;

namespace {

SystemParams small_params(int cells = 4, int k = 4) {
  SystemParams p = SystemParams::defaults(k);
  p.n_cells = cells;
  return p;
}

}  // namespace

TEST_CASE("a single cell has no inter-cell terms") {
  const SystemParams p = small_params(1, 3);
  const NetworkLayout layout = generate_layout(p, 7);
  CHECK(layout.n_users() == 3);
  const ChannelRealization ch = generate_channels(layout, p, 8);
  for (int u = 0; u < 3; ++u) {
    double expected = p.noise_ul;
    for (int v = 0; v < 3; ++v)
      if (v != u) expected += p.user_power_max * ch.beta(0, v);
    CHECK(ch.sigma1_sq[static_cast<size_t>(u)] == Approx(expected).epsilon(1e-12));
    const double dl = p.noise_dl + p.ap_power / 3.0 * 2.0 * ch.beta(0, u);
    CHECK(ch.sigma2_sq[static_cast<size_t>(u)] == Approx(dl).epsilon(1e-12));
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const SystemParams p = small_params();
  const NetworkLayout a = generate_layout(p, 42);
  const NetworkLayout b = generate_layout(p, 42);
  for (int u = 0; u < a.n_users(); ++u) {
    CHECK(a.users[static_cast<size_t>(u)].x == b.users[static_cast<size_t>(u)].x);
    CHECK(a.users[static_cast<size_t>(u)].y == b.users[static_cast<size_t>(u)].y);
  }
  const ChannelRealization ca = generate_channels(a, p, 43);
  const ChannelRealization cb = generate_channels(b, p, 43);
  CHECK(ca.beta == cb.beta);
  CHECK(ca.serving[2] == cb.serving[2]);
  const ChannelRealization cc = generate_channels(a, p, 44);
  CHECK_FALSE(ca.beta == cc.beta);
}

TEST_CASE("every cell holds exactly K users near its AP") {
  const SystemParams p = small_params();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const NetworkLayout layout = generate_layout(p, seed);
    std::vector<int> count(4, 0);
    for (int u = 0; u < layout.n_users(); ++u) {
      const int l = layout.cell_of_user[static_cast<size_t>(u)];
      ++count[static_cast<size_t>(l)];
      CHECK(l == u / 4);
      const Point& pt = layout.users[static_cast<size_t>(u)];
      for (const Point& ap : layout.aps)
        CHECK(std::hypot(pt.x - layout.aps[static_cast<size_t>(l)].x,
                         pt.y - layout.aps[static_cast<size_t>(l)].y) <=
              std::hypot(pt.x - ap.x, pt.y - ap.y) + 1e-12);
    }
    for (int c : count) CHECK(c == 4);
  }
}

TEST_CASE("serving channel norms harden around N beta") {
  SystemParams p = small_params(1, 2);
  p.n_antennas = 400;
  double ratio_sum = 0.0;
  int n = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NetworkLayout layout = generate_layout(p, seed);
    const ChannelRealization ch = generate_channels(layout, p, seed);
    for (int i = 0; i < 2; ++i) {
      const double norm2 = ch.serving[0].col(i).squaredNorm();
      const double ratio = norm2 / (p.n_antennas * ch.beta(0, i));
      CHECK(std::abs(ratio - 1.0) < 0.2);
      ratio_sum += ratio;
      ++n;
    }
  }
  CHECK(std::abs(ratio_sum / n - 1.0) < 0.05);
}

TEST_CASE("without shadowing the gain falls with distance") {
  SystemParams p = small_params();
  p.shadow_std_db = 0.0;
  const NetworkLayout layout = generate_layout(p, 3);
  const ChannelRealization ch = generate_channels(layout, p, 3);
  for (int l = 0; l < layout.n_cells(); ++l) {
    for (int u = 0; u < layout.n_users(); ++u) {
      for (int v = 0; v < layout.n_users(); ++v) {
        const Point& ap = layout.aps[static_cast<size_t>(l)];
        const double du = std::max(1.0, std::hypot(layout.users[static_cast<size_t>(u)].x - ap.x,
                                                   layout.users[static_cast<size_t>(u)].y - ap.y));
        const double dv = std::max(1.0, std::hypot(layout.users[static_cast<size_t>(v)].x - ap.x,
                                                   layout.users[static_cast<size_t>(v)].y - ap.y));
        if (du < dv) CHECK(ch.beta(l, u) >= ch.beta(l, v));
      }
    }
  }
}

TEST_CASE("interference floors and estimate quality") {
  const SystemParams p = small_params();
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const NetworkLayout layout = generate_layout(p, seed);
    const ChannelRealization ch = generate_channels(layout, p, seed);
    for (int u = 0; u < layout.n_users(); ++u) {
      CHECK(ch.sigma1_sq[static_cast<size_t>(u)] >= p.noise_ul);
      CHECK(ch.sigma2_sq[static_cast<size_t>(u)] >= p.noise_dl);
      for (int l = 0; l < layout.n_cells(); ++l) {
        CHECK(ch.gamma(l, u) > 0.0);
        CHECK(ch.gamma(l, u) < ch.beta(l, u));
      }
    }
  }
}

TEST_CASE("realizations round-trip through JSON") {
  const SystemParams p = small_params(2, 3);
  const NetworkLayout layout = generate_layout(p, 5);
  const ChannelRealization ch = generate_channels(layout, p, 6);
  const auto path = std::filesystem::temp_directory_path() / "wptmec_channel_roundtrip.json";
  save_realization(path, ch);
  const ChannelRealization back = load_realization(path);
  std::filesystem::remove(path);
  CHECK(back.seed == ch.seed);
  CHECK(back.beta == ch.beta);
  CHECK(back.gamma == ch.gamma);
  CHECK(back.sigma1_sq == ch.sigma1_sq);
  CHECK(back.sigma2_sq == ch.sigma2_sq);
  REQUIRE(back.serving.size() == ch.serving.size());
  for (size_t l = 0; l < ch.serving.size(); ++l) CHECK(back.serving[l] == ch.serving[l]);
  const CellChannel a = ch.cell(1);
  const CellChannel b = back.cell(1);
  CHECK(a.links[2].gamma == b.links[2].gamma);
  CHECK_THROWS_AS(ch.cell(2), std::out_of_range);
}

TEST_CASE("unbalanced input is rejected") {
  SystemParams p = small_params();
  p.users_per_cell = 0;
  CHECK_THROWS_AS(generate_layout(p, 1), std::invalid_argument);
  NetworkLayout empty;
  CHECK_THROWS_AS(generate_channels(empty, small_params(), 1), std::invalid_argument);
}
