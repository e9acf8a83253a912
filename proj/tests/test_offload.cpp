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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include <doctest.h>

#include "wptmec/channel.hpp"
#include "wptmec/offload.hpp"

using namespace wptmec;
using doctest::Approx;

namespace {

struct Instance {
  SystemParams params;
  std::vector<UserLink> links;
};

Instance make_instance(int k, std::uint64_t seed) {
  Instance in;
  in.params = SystemParams::defaults(k);
  const NetworkLayout layout = generate_layout(in.params, seed);
  const ChannelRealization ch = generate_channels(layout, in.params, seed + 100);
  in.links = ch.cell(0).links;
  return in;
}

double golden_min(const std::function<double(double)>& f, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 300 && b - a > 1e-15 * b; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double weighted(const DataPartition& part, std::span<const double> tu, std::span<const double> td,
                const Instance& in) {
  const double w = in.params.energy_weight;
  return (1.0 - w) * energy_users(part, tu, in.links, in.params) +
         w * energy_mec(part, td, in.links, in.params);
}

// Exact optimum of the time subproblem for fixed s: T1 is the only free
// scalar once every time budget is spent.
double time_oracle(const DataPartition& part, const Instance& in) {
  const SystemParams& p = in.params;
  const size_t k = part.size();
  const double t2 = t2_closed_form(part.offloaded, p);
  double lo = 0.0;
  for (size_t i = 0; i < k; ++i)
    if (part.offloaded[i] > 0.0)
      lo = std::max(lo, uplink_time_floor(part.offloaded[i], in.links[i], p));
  auto f = [&](double t1) {
    std::vector<double> tu(k, 0.0);
    std::vector<double> td(k, 0.0);
    for (size_t i = 0; i < k; ++i) {
      if (part.offloaded[i] <= 0.0) continue;
      tu[i] = std::max(uplink_time_floor(part.offloaded[i], in.links[i], p),
                       std::min(t1, p.latency - local_compute_time(part.local[i], p)));
      td[i] = p.latency - t2 - t1;
    }
    return weighted(part, tu, td, in);
  };
  if (lo == 0.0 && std::none_of(part.offloaded.begin(), part.offloaded.end(),
                                [](double s) { return s > 0.0; }))
    return f(0.0);
  return f(golden_min(f, lo, p.latency - t2 - 1e-12));
}

// K = 1 brute force over (t_u, t_d) with successive zooms.
double grid_2d(const DataPartition& part, const Instance& in) {
  const SystemParams& p = in.params;
  const double t2 = t2_closed_form(part.offloaded, p);
  const double floor_u = uplink_time_floor(part.offloaded[0], in.links[0], p);
  const double cap_u = p.latency - local_compute_time(part.local[0], p);
  double lo_u = floor_u;
  double hi_u = std::min(cap_u, p.latency - t2);
  double lo_d = 0.0;
  double hi_d = p.latency - t2;
  double best = std::numeric_limits<double>::infinity();
  double bu = 0.0;
  double bd = 0.0;
  const int n = 200;
  for (int zoom = 0; zoom < 8; ++zoom) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        const double tu = lo_u + (hi_u - lo_u) * a / n;
        const double td = lo_d + (hi_d - lo_d) * b / n;
        if (tu + t2 + td > p.latency || tu < floor_u || tu > cap_u || td <= 0.0) continue;
        const double e = weighted(part, std::vector<double>{tu}, std::vector<double>{td}, in);
        if (e < best) {
          best = e;
          bu = tu;
          bd = td;
        }
      }
    }
    const double su = (hi_u - lo_u) * 4.0 / n;
    const double sd = (hi_d - lo_d) * 4.0 / n;
    lo_u = std::max(floor_u, bu - su);
    hi_u = std::min(hi_u, bu + su);
    lo_d = std::max(0.0, bd - sd);
    hi_d = std::min(hi_d, bd + sd);
  }
  return best;
}

// Minimum of F over a uniform s grid for K = 1.
double s_grid_oracle(const Instance& in, double u, int points) {
  const std::vector<UserRequest> req{{u, 0.0}};
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < points; ++j) {
    const std::vector<double> s{u * j / (points - 1)};
    const DataPartition part = DataPartition::from_offloaded(s, req);
    if (!partition_admissible(part, in.links, in.params)) continue;
    best = std::min(best, time_oracle(part, in));
  }
  return best;
}

}  // namespace

TEST_CASE("users without offloaded bits get no airtime") {
  const Instance in = make_instance(4, 1);
  const std::vector<UserRequest> req(4, UserRequest{1e4, 0.0});
  const std::vector<double> s{0.0, 5e3, 0.0, 1e3};
  const DataPartition part = DataPartition::from_offloaded(s, req);
  CoDuals d = CoDuals::zeros(4);
  d.beta = {1.0, 1.0, 1.0, 1.0};
  d.phi = {2.0, 2.0, 2.0, 2.0};
  const TimeAllocation t = inner_time_from_duals(part, d, in.links, in.params);
  CHECK(t.t_up[0] == 0.0);
  CHECK(t.t_down[2] == 0.0);
  CHECK(t.t_up[1] > 0.0);
}

TEST_CASE("zero duals give the full deadline") {
  const Instance in = make_instance(4, 2);
  const std::vector<UserRequest> req(4, UserRequest{1e4, 0.0});
  const std::vector<double> s(4, 2e3);
  const DataPartition part = DataPartition::from_offloaded(s, req);
  const TimeAllocation t = inner_time_from_duals(part, CoDuals::zeros(4), in.links, in.params);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(t.t_up[i] == in.params.latency);
    CHECK(t.t_down[i] == in.params.latency);
  }
  CHECK(t.t_charge == Approx(in.params.latency - 2.0 * in.params.latency));
}

TEST_CASE("closed-form times are Lagrangian minimisers") {
  const Instance in = make_instance(4, 3);
  const SystemParams& p = in.params;
  const double w = p.energy_weight;
  const std::vector<UserRequest> req(4, UserRequest{2e4, 0.0});
  const std::vector<double> s{4e3, 1e4, 1.5e4, 2e4};
  const DataPartition part = DataPartition::from_offloaded(s, req);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> logu(-9.0, -3.0);
  int interior = 0;
  for (int trial = 0; trial < 10; ++trial) {
    CoDuals d = CoDuals::zeros(4);
    for (size_t i = 0; i < 4; ++i) {
      d.beta[i] = std::pow(10.0, logu(rng));
      d.theta[i] = std::pow(10.0, logu(rng));
      d.phi[i] = std::pow(10.0, logu(rng));
    }
    const TimeAllocation t = inner_time_from_duals(part, d, in.links, p);
    for (size_t i = 0; i < 4; ++i) {
      const UserLink& link = in.links[i];
      const double price_u = d.beta[i] + d.theta[i];
      auto lag_u = [&](double x) {
        return (1.0 - w) * transmit_energy(s[i], x, LinkDirection::kUplink, link, p) + price_u * x;
      };
      auto lag_d = [&](double x) {
        return w * transmit_energy(s[i], x, LinkDirection::kDownlink, link, p) +
               d.phi[i] * x;
      };
      const double floor_u = uplink_time_floor(s[i], link, p);
      const double gu = golden_min(lag_u, floor_u, p.latency);
      const double gd = golden_min(lag_d, kMinTime, p.latency);
      CHECK(t.t_up[i] == Approx(gu).epsilon(1e-6));
      CHECK(t.t_down[i] == Approx(gd).epsilon(1e-6));

      // Stationarity at interior points.
      const double tu = t.t_up[i];
      if (tu > floor_u * (1.0 + 1e-6) && tu < p.latency * (1.0 - 1e-6)) {
        const double h = 1e-6 * tu;
        const double deriv = (lag_u(tu + h) - lag_u(tu - h)) / (2.0 * h);
        CHECK(std::abs(deriv) <= 1e-4 * price_u);
        ++interior;
      }
    }
  }
  CHECK(interior > 0);
}

TEST_CASE("subgradients match their definitions") {
  const Instance in = make_instance(4, 4);
  const SystemParams& p = in.params;
  const std::vector<UserRequest> req(4, UserRequest{1e4, 0.0});
  const std::vector<double> s{1e3, 2e3, 3e3, 4e3};
  const DataPartition part = DataPartition::from_offloaded(s, req);
  CoDuals d = CoDuals::zeros(4);
  d.lambda1 = 1e-4;
  d.beta = {1e-4, 2e-4, 1e-5, 3e-4};
  d.theta = {0.0, 1e-5, 0.0, 0.0};
  d.phi = {1e-7, 1e-6, 2e-7, 1e-8};
  const TimeAllocation t = inner_time_from_duals(part, d, in.links, p);
  const std::vector<double> g = co_subgradients(part, t, p);
  REQUIRE(g.size() == 13);
  const double t1 = *std::max_element(t.t_up.begin(), t.t_up.end());
  const double t3 = *std::max_element(t.t_down.begin(), t.t_down.end());
  CHECK(g[0] == Approx(t1 + t2_closed_form(s, p) + t3 - p.latency));
  for (size_t i = 0; i < 4; ++i) {
    CHECK(g[1 + i] == Approx(t.t_up[i] - t1));
    const double local = p.user_cycles_per_bit * (1e4 - s[i]) / p.user_freq;
    CHECK(g[5 + i] == Approx(local + t.t_up[i] - p.latency));
    CHECK(g[9 + i] == Approx(t.t_down[i] - t3));
    CHECK(g[1 + i] <= 0.0);
    CHECK(g[9 + i] <= 0.0);
  }
  const auto arg = std::max_element(t.t_up.begin(), t.t_up.end()) - t.t_up.begin();
  CHECK(g[1 + static_cast<size_t>(arg)] == 0.0);

  // Strictly slack times give negative components everywhere.
  TimeAllocation slack;
  slack.t_up = {1e-4, 1e-4, 1e-4, 1e-4};
  slack.t_down = {1e-4, 1e-4, 1e-4, 1e-4};
  slack.t1 = 2e-4;
  slack.t3 = 2e-4;
  slack.t2 = t2_closed_form(s, p);
  for (double gi : co_subgradients(part, slack, p)) CHECK(gi < 0.0);
}

TEST_CASE("inner solve with nothing offloaded charges for the whole block") {
  const Instance in = make_instance(4, 5);
  const std::vector<UserRequest> req(4, UserRequest{0.0, 0.0});
  const std::vector<double> s(4, 0.0);
  const DataPartition part = DataPartition::from_offloaded(s, req);
  const InnerResult r = inner_primal_dual(part, in.links, in.params);
  CHECK(r.converged);
  CHECK(r.feasible);
  CHECK(r.times.t_charge == Approx(in.params.latency));
}

TEST_CASE("single-user inner solve matches a 2-D grid") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Instance in = make_instance(1, seed);
    const std::vector<UserRequest> req{{2e4, 0.0}};
    for (double frac : {0.3, 0.7, 1.0}) {
      const std::vector<double> s{2e4 * frac};
      const DataPartition part = DataPartition::from_offloaded(s, req);
      if (!partition_admissible(part, in.links, in.params)) continue;
      const InnerResult r = inner_primal_dual(part, in.links, in.params);
      CHECK(r.feasible);
      const double grid = grid_2d(part, in);
      CHECK(r.objective == Approx(grid).epsilon(1e-3));
      CHECK(r.objective <= grid * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("inner solutions respect the latency budget") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance in = make_instance(4, seed);
    const std::vector<UserRequest> req(4, UserRequest{2e4, 0.0});
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<double> s(4);
      for (double& v : s) v = 2e4 * frac(rng);
      const DataPartition part = DataPartition::from_offloaded(s, req);
      if (!partition_admissible(part, in.links, in.params)) continue;
      const InnerResult r = inner_primal_dual(part, in.links, in.params);
      REQUIRE(r.feasible);
      const TimeAllocation& t = r.times;
      CHECK(t.t1 + t.t2 + t.t3 <= in.params.latency * (1.0 + 1e-6));
      CHECK(check_feasibility(part, t, in.params).feasible);
      CHECK(r.objective == Approx(time_oracle(part, in)).epsilon(1e-6));
      CHECK(r.dual_value <= r.objective * (1.0 + 1e-9));
      ++checked;
    }
  }
  CHECK(checked > 5);
}

TEST_CASE("objective is convex in the time allocation") {
  const Instance in = make_instance(4, 8);
  const SystemParams& p = in.params;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<UserRequest> req(4, UserRequest{2e4, 0.0});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(4);
    for (double& v : s) v = 2e4 * (0.05 + 0.95 * unit(rng));
    const DataPartition part = DataPartition::from_offloaded(s, req);
    Eigen::VectorXd x(8);
    for (int i = 0; i < 4; ++i) {
      const double floor_u = uplink_time_floor(s[static_cast<size_t>(i)], in.links[static_cast<size_t>(i)], p);
      x(i) = floor_u + (p.latency / 3.0 - floor_u) * unit(rng);
      x(4 + i) = p.latency / 3.0 * (0.05 + 0.95 * unit(rng));
    }
    auto f = [&](const Eigen::VectorXd& v) {
      std::vector<double> tu(v.data(), v.data() + 4);
      std::vector<double> td(v.data() + 4, v.data() + 8);
      return weighted(part, tu, td, in);
    };
    Eigen::MatrixXd hess(8, 8);
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        const double ha = 1e-3 * x(a);
        const double hb = 1e-3 * x(b);
        Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
        pp(a) += ha; pp(b) += hb;
        pm(a) += ha; pm(b) -= hb;
        mp(a) -= ha; mp(b) += hb;
        mm(a) -= ha; mm(b) -= hb;
        hess(a, b) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * ha * hb);
      }
    }
    const Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues();
    CHECK(eig.minCoeff() >= -1e-6 * eig.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("single-user descent beats a 200-point grid in s") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance in = make_instance(1, seed);
    for (double u : {1e3, 1e4, 3e4}) {
      const std::vector<UserRequest> req{{u, 0.0}};
      const OffloadSolution sol = outer_descent(in.links, req, in.params);
      const double grid = s_grid_oracle(in, u, 200);
      if (!std::isfinite(grid)) {
        CHECK_FALSE(sol.feasible());
        continue;
      }
      REQUIRE(sol.feasible());
      CHECK(sol.energy.weighted_total <= grid * (1.0 + 1e-3));
    }
  }
}

TEST_CASE("tiny requests stay local") {
  int local = 0;
  int total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance in = make_instance(4, seed);
    const std::vector<UserRequest> req(4, UserRequest{1e3, 0.0});
    const OffloadSolution sol = outer_descent(in.links, req, in.params);
    REQUIRE(sol.feasible());
    for (size_t i = 0; i < 4; ++i) {
      ++total;
      if (sol.partition.offloaded[i] == 0.0) ++local;
    }
  }
  // Most users compute locally; strong links may still offload.
  CHECK(local * 4 >= total * 3);
}

TEST_CASE("descent output is feasible, monotone and deterministic") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Instance in = make_instance(4, seed);
    const std::vector<UserRequest> req(4, UserRequest{1e4, 0.0});
    const OffloadSolution a = outer_descent(in.links, req, in.params);
    const OffloadSolution b = outer_descent(in.links, req, in.params);
    REQUIRE(a.feasible());
    CHECK(a.partition.offloaded == b.partition.offloaded);
    CHECK(a.energy.weighted_total == b.energy.weighted_total);
    CHECK(check_feasibility(a.partition, a.times, in.params).feasible);
    for (size_t i = 0; i < 4; ++i) {
      CHECK(a.ul_power[i] <= in.params.user_power_max * (1.0 + 1e-9));
      CHECK(a.partition.offloaded[i] >= 0.0);
      CHECK(a.partition.offloaded[i] <= 1e4);
    }
    const std::vector<double> half(4, 5e3);
    const DataPartition start = DataPartition::from_offloaded(half, req);
    if (partition_admissible(start, in.links, in.params))
      CHECK(a.energy.weighted_total <= time_oracle(start, in) + 1e-9);
  }
}

TEST_CASE("an impossible deadline is reported as infeasible") {
  Instance in = make_instance(2, 1);
  in.params.latency = 1e-5;
  const std::vector<UserRequest> req(2, UserRequest{1e6, 0.0});
  const OffloadSolution sol = outer_descent(in.links, req, in.params);
  CHECK_FALSE(sol.feasible());
  CHECK(sol.status == SolveStatus::kInfeasible);
}
