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


#include "wptmec/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "wptmec/baselines.hpp"
#include "wptmec/channel.hpp"
#include "wptmec/charge.hpp"
#include "wptmec/harness.hpp"
#include "wptmec/numerics/lambert.hpp"
#include "wptmec/numerics/lp.hpp"
#include "wptmec/offload.hpp"
#include "wptmec/sweep.hpp"

namespace wptmec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

Check make_check(std::string name, CheckKind kind, bool passed, std::string detail) {
  return {std::move(name), kind, passed, std::move(detail)};
}

double mean(const std::vector<double>& v) {
  return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

CellChannel cell_for(const SystemParams& p, std::uint64_t seed) {
  const auto k = static_cast<std::uint64_t>(p.users_per_cell);
  const NetworkLayout layout =
      generate_layout(p, derive_seed(seed, static_cast<std::uint64_t>(SeedStream::kLayout), k));
  return generate_channels(layout, p, derive_seed(seed, static_cast<std::uint64_t>(SeedStream::kChannel), k))
      .cell(0);
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

// ---- Criterion 1: LP against a zooming grid -------------------------------

bool lp_admissible(const LpProblem& p, const Eigen::VectorXd& x, double tol) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < -tol) return false;
    if (p.ordered_descending && i > 0 && x(i) > x(i - 1) + tol) return false;
  }
  if (p.sum_bound && x.sum() > *p.sum_bound + tol) return false;
  if (p.constraints.rows() > 0 && ((p.constraints * x - p.bounds).array() > tol).any()) return false;
  return true;
}

// Leading coordinates on a grid zoomed around the incumbent; the last
// coordinate exactly, at the ends of its feasible interval.
double lp_grid_optimum(const LpProblem& p, double box) {
  const Eigen::Index n = p.n_vars();
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, box);
  double best = 0.0;
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(n);
  const int steps = n <= 2 ? 2000 : 120;
  const double tol = 1e-12 * std::max(1.0, box);
  for (int zoom = 0; zoom < 8; ++zoom) {
    Eigen::VectorXd x(n);
    std::function<void(Eigen::Index)> rec = [&](Eigen::Index d) {
      if (d == n - 1) {
        double top = box;
        if (p.ordered_descending && n > 1) top = std::min(top, x(n - 2));
        auto ok = [&](double v) {
          x(n - 1) = v;
          return lp_admissible(p, x, tol);
        };
        if (!ok(0.0)) return;
        double good = 0.0;
        double bad = top;
        if (ok(top)) {
          good = top;
        } else {
          for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (good + bad);
            (ok(mid) ? good : bad) = mid;
          }
        }
        for (double v : {0.0, good}) {
          x(n - 1) = v;
          const double f = p.objective.dot(x);
          if (f > best) {
            best = f;
            best_x = x;
          }
        }
        return;
      }
      for (int i = 0; i <= steps; ++i) {
        x(d) = lo(d) + (hi(d) - lo(d)) * i / steps;
        rec(d + 1);
      }
    };
    rec(0);
    for (Eigen::Index d = 0; d < n; ++d) {
      const double span = (hi(d) - lo(d)) * 4.0 / steps;
      lo(d) = std::max(0.0, best_x(d) - span);
      hi(d) = std::min(box, best_x(d) + span);
    }
  }
  return best;
}

CMatrix random_channels(std::mt19937_64& rng, int n, int k) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CMatrix h(n, k);
  for (int j = 0; j < k; ++j) {
    const double gain = std::pow(10.0, -1.0 - 2.0 * u(rng));
    for (int a = 0; a < n; ++a) h(a, j) = std::sqrt(gain) * Complex(g(rng), g(rng));
  }
  return h;
}

CriterionResult criterion_lp(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double power = SystemParams::defaults(4).ap_power;
  double worst = 0.0;
  int failures = 0;
  for (int trial = 0; trial < s.lp_instances; ++trial) {
    const int k = 1 + trial % 3;
    const int n = k + static_cast<int>(u(rng) * (9 - k));
    const CMatrix h = random_channels(rng, n, k);
    const std::vector<double> xi(static_cast<size_t>(k), 0.5);
    std::vector<UserRequest> req(static_cast<size_t>(k));
    for (auto& q : req) q.energy_req = std::pow(10.0, -3.0 + 1.7 * u(rng));
    WcDuals d = WcDuals::zeros(static_cast<size_t>(k));
    for (double& x : d.rho) x = 3.0 * u(rng);
    const double tc = 0.005 + 0.015 * u(rng);
    const CMatrix dirs = beam_directions_low_rank(d, h, xi, tc);
    const LpProblem lp = build_pbp(dirs, h, req, xi, tc, power);
    const LpSolution sol = solve_lp(lp);
    const double oracle = lp_grid_optimum(lp, power);
    const double rel = std::abs(sol.objective - oracle) / std::max(std::abs(oracle), 1e-300);
    worst = std::max(worst, oracle > 0.0 ? rel : std::abs(sol.objective));
    if (!(rel <= 1e-3 || std::abs(sol.objective - oracle) <= 1e-15) ||
        !lp_admissible(lp, sol.x, 1e-9 * power))
      ++failures;
  }
  r.checks.push_back(make_check("simplex matches grid within 1e-3", CheckKind::kProperty, failures == 0,
                                fmt("%g instances, K<=3, N<=8, worst relative gap %.2e", s.lp_instances, worst)));
  return r;
}

// ---- Criterion 2: single-user inner loop against a 2-D grid --------------

double weighted_energy(const DataPartition& part, std::span<const double> tu,
                       std::span<const double> td, std::span<const UserLink> links,
                       const SystemParams& p) {
  const double w = p.energy_weight;
  return (1.0 - w) * energy_users(part, tu, links, p) + w * energy_mec(part, td, links, p);
}

double inner_grid(const DataPartition& part, std::span<const UserLink> links, const SystemParams& p) {
  const double t2 = t2_closed_form(part.offloaded, p);
  const double floor_u = uplink_time_floor(part.offloaded[0], links[0], p);
  const double cap_u = p.latency - local_compute_time(part.local[0], p);
  double lo_u = floor_u;
  double hi_u = std::min(cap_u, p.latency - t2);
  double lo_d = 0.0;
  double hi_d = p.latency - t2;
  double best = kInf;
  double bu = 0.0;
  double bd = 0.0;
  const int n = 200;
  for (int zoom = 0; zoom < 8; ++zoom) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        const double tu = lo_u + (hi_u - lo_u) * a / n;
        const double td = lo_d + (hi_d - lo_d) * b / n;
        if (tu + t2 + td > p.latency || tu < floor_u || tu > cap_u || td <= 0.0) continue;
        const double e = weighted_energy(part, std::vector<double>{tu}, std::vector<double>{td}, links, p);
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

CriterionResult criterion_inner(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  const SystemParams p = SystemParams::defaults(1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  int failures = 0;
  double worst = 0.0;
  for (std::uint64_t trial = 0; done < s.co_instances && trial < 50ULL * static_cast<std::uint64_t>(s.co_instances);
       ++trial) {
    const CellChannel cell = cell_for(p, seed + trial);
    const double bits = 5e3 + 3e4 * u(rng);
    const double frac = 0.2 + 0.8 * u(rng);
    const std::vector<UserRequest> req{{bits, 0.0}};
    const DataPartition part = DataPartition::from_offloaded(std::vector<double>{bits * frac}, req);
    if (!partition_admissible(part, cell.links, p)) continue;
    const InnerResult res = inner_primal_dual(part, cell.links, p);
    const double grid = inner_grid(part, cell.links, p);
    const double rel = std::abs(res.objective - grid) / grid;
    worst = std::max(worst, rel);
    if (!res.feasible || rel > 1e-3) ++failures;
    ++done;
  }
  r.checks.push_back(make_check(
      "inner energy matches 2-D grid within 1e-3", CheckKind::kProperty,
      failures == 0 && done == s.co_instances,
      fmt("%g K=1 instances, worst relative gap %.2e", done, worst)));
  return r;
}

// ---- Criterion 3: closed-form times and Lambert residual ------------------

CriterionResult criterion_kkt(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  const SystemParams p = SystemParams::defaults(4);
  const double w = p.energy_weight;
  const CellChannel cell = cell_for(p, seed);
  const std::vector<UserRequest> req(4, {2e4, 0.0});
  const std::vector<double> bits{4e3, 1e4, 1.5e4, 2e4};
  const DataPartition part = DataPartition::from_offloaded(bits, req);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logu(-9.0, -3.0);
  double worst = 0.0;
  for (int trial = 0; trial < s.kkt_settings; ++trial) {
    CoDuals d = CoDuals::zeros(4);
    for (size_t i = 0; i < 4; ++i) {
      d.beta[i] = std::pow(10.0, logu(rng));
      d.theta[i] = std::pow(10.0, logu(rng));
      d.phi[i] = std::pow(10.0, logu(rng));
    }
    const TimeAllocation t = inner_time_from_duals(part, d, cell.links, p);
    for (size_t i = 0; i < 4; ++i) {
      const UserLink& link = cell.links[i];
      const double price_u = d.beta[i] + d.theta[i];
      auto lag_u = [&](double x) {
        return (1.0 - w) * transmit_energy(bits[i], x, LinkDirection::kUplink, link, p) + price_u * x;
      };
      auto lag_d = [&](double x) {
        return w * transmit_energy(bits[i], x, LinkDirection::kDownlink, link, p) + d.phi[i] * x;
      };
      const double gu = golden_min(lag_u, uplink_time_floor(bits[i], link, p), p.latency);
      const double gd = golden_min(lag_d, kMinTime, p.latency);
      worst = std::max({worst, std::abs(t.t_up[i] - gu) / gu, std::abs(t.t_down[i] - gd) / gd});
    }
  }
  r.checks.push_back(make_check("closed-form times match golden section within 1e-6", CheckKind::kProperty,
                                worst <= 1e-6,
                                fmt("%g dual settings x 4 users x 2 links, worst relative gap %.2e",
                                    s.kkt_settings, worst)));

  double worst_res = 0.0;
  const double branch = -std::exp(-1.0);
  for (int i = 0; i <= 2000; ++i) {
    const double x = i < 1000 ? branch + (0.0 - branch) * std::pow(i / 1000.0, 3.0)
                              : std::pow(10.0, -12.0 + 24.0 * (i - 1000) / 1000.0);
    const double wv = lambert_w0(x);
    const double res = std::abs(wv * std::exp(wv) - x) / std::max(1.0, std::abs(x));
    worst_res = std::max(worst_res, res);
  }
  r.checks.push_back(make_check("Lambert residual |w e^w - x| <= 1e-12 max(1,|x|)", CheckKind::kProperty,
                                worst_res <= 1e-12,
                                fmt("2001 points on [-1/e, 1e12], worst scaled residual %.2e", worst_res)));
  return r;
}

// ---- Criterion 4: feasibility of full blocks ------------------------------

CriterionResult criterion_feasibility(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  const ExperimentConfig config;
  const SystemParams& p = config.params;
  const int k = p.users_per_cell;
  const std::vector<UserRequest> req = config.requests(k);
  int violations = 0;
  int infeasible = 0;
  std::string first;
  for (int run = 0; run < s.feasibility_runs; ++run) {
    const CellChannel cell = cell_for(p, seed + static_cast<std::uint64_t>(run));
    ChargingLedger ledger(static_cast<size_t>(k));
    const BlockResult b = run_block(0, BlockMode::kDataAndCharging, req, ledger, cell, p);
    if (!b.offload->feasible()) {
      ++infeasible;
      continue;
    }
    const TimeAllocation& t = b.offload->times;
    auto fail = [&](const std::string& what) {
      ++violations;
      if (first.empty()) first = "run " + std::to_string(run) + ": " + what;
    };
    if (t.t1 + t.t2 + t.t3 > p.latency * (1 + 1e-6)) fail("latency budget");
    for (size_t i = 0; i < req.size(); ++i) {
      const double local = p.user_cycles_per_bit * b.offload->partition.local[i] / p.user_freq;
      if (local + t.t_up[i] > p.latency * (1 + 1e-6)) fail("local plus uplink deadline");
    }
    if (b.charge) {
      if (b.charge->trace_power() > p.ap_power + 1e-9) fail("power budget");
      for (size_t i = 0; i < req.size(); ++i)
        if (b.charge->harvested[i] > b.effective_request[i] + 1e-9) fail("energy cap");
    }
  }
  r.checks.push_back(make_check(
      "every returned solution is feasible", CheckKind::kProperty, violations == 0 && infeasible == 0,
      fmt("%g runs at defaults, %g violations, %g infeasible offloads", s.feasibility_runs, violations,
          infeasible) +
          (first.empty() ? "" : "; first: " + first)));
  return r;
}

// ---- Criteria 5 and 6: charging schemes and beam counts -------------------

CriterionResult criterion_ordering(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  ExperimentConfig config;
  config.seed = seed;
  bool ordered = true;
  bool margin = true;
  std::ostringstream detail;
  for (int k : {2, 4, 6, 8, 10}) {
    std::vector<double> opt;
    std::vector<double> eq;
    std::vector<double> iso;
    for (int rep = 0; rep < s.ordering_realizations; ++rep) {
      for (const SchemeOutcome& o : evaluate_point(config, SweepAxis::kScheme, k, rep)) {
        const double v = metric_value(o, "received_energy");
        if (std::isnan(v)) continue;
        (o.scheme == "optimal" ? opt : o.scheme == "equal-k" ? eq : iso).push_back(v);
      }
    }
    const double mo = mean(opt);
    const double me = mean(eq);
    const double mi = mean(iso);
    ordered = ordered && mo >= me && me >= mi;
    margin = margin && mo - me > 0.0;
    detail << (k == 2 ? "" : "; ") << "K=" << k << ": " << fmt("%.3g/%.3g/%.3g J", mo, me, mi);
  }
  r.checks.push_back(make_check("mean received optimal >= equal-K >= isotropic", CheckKind::kClaim, ordered,
                                detail.str()));
  r.checks.push_back(make_check("optimal exceeds equal-K in the mean", CheckKind::kClaim, margin, ""));
  return r;
}

CriterionResult criterion_sparsity(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  ExperimentConfig config;
  config.seed = seed;
  std::vector<double> beams;
  int over = 0;
  for (int rep = 0; rep < s.ordering_realizations; ++rep) {
    for (const SchemeOutcome& o : evaluate_point(config, SweepAxis::kScheme, 10, rep)) {
      if (o.scheme != "optimal") continue;
      const double v = metric_value(o, "active_beams");
      if (std::isnan(v)) continue;
      beams.push_back(v);
      if (v > 10) ++over;
    }
  }
  const double m = mean(beams);
  r.checks.push_back(make_check("active beams never exceed K", CheckKind::kProperty, over == 0 && !beams.empty(),
                                fmt("%g realizations at K=10, max %g", static_cast<double>(beams.size()),
                                    beams.empty() ? 0.0 : *std::max_element(beams.begin(), beams.end()))));
  r.checks.push_back(make_check("mean active beams below 10", CheckKind::kClaim, m < 10.0,
                                fmt("mean %.3g", m)));
  return r;
}

// ---- Criterion 7: partial against binary offloading -----------------------

CriterionResult criterion_dominance(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  ExperimentConfig config;
  config.seed = seed;
  int compared = 0;
  int violations = 0;
  int partial_missing = 0;
  double worst = 0.0;
  int coincide_fail = 0;
  int both_low = 0;
  int all_local = 0;
  int tc_cases = 0;
  int tc_fail = 0;
  double tc_p = 0.0;
  double tc_b = 0.0;
  for (double bits : {1e3, 1e4, 3e4, 6e4}) {
    for (int rep = 0; rep < s.dominance_realizations; ++rep) {
      const auto out = evaluate_point(config, SweepAxis::kData, bits, rep);
      const BlockResult& pb = out[0].cells.at(0);
      const BlockResult& bb = out[1].cells.at(0);
      if (!bb.offload->feasible()) continue;
      if (!pb.offload->feasible()) {
        ++partial_missing;
        continue;
      }
      ++compared;
      const double ep = pb.offload->energy.weighted_total;
      const double eb = bb.offload->energy.weighted_total;
      worst = std::max(worst, (ep - eb) / eb);
      if (ep > eb * (1 + 1e-9)) ++violations;
      if (bits == 1e3) {
        ++both_low;
        if (std::abs(ep - eb) > 1e-6 * eb) ++coincide_fail;
        const auto local = [](const OffloadSolution& sol) {
          return std::all_of(sol.partition.offloaded.begin(), sol.partition.offloaded.end(),
                             [](double x) { return x == 0.0; });
        };
        if (local(*pb.offload) && local(*bb.offload)) ++all_local;
      }
      if (bits == 6e4) {
        ++tc_cases;
        tc_p += pb.charge_time;
        tc_b += bb.charge_time;
        if (pb.charge_time < bb.charge_time) ++tc_fail;
      }
    }
  }
  r.checks.push_back(make_check(
      "E(partial) <= E(binary) on every realization", CheckKind::kProperty,
      violations == 0 && partial_missing == 0 && compared > 0,
      fmt("%g comparisons over u in {1,10,30,60} kbit, %g violations, %g partial-infeasible, "
          "max relative excess %.2e",
          compared, violations, partial_missing, worst)));
  r.checks.push_back(make_check("at 1 kbit the two coincide within 1e-6", CheckKind::kProperty,
                                coincide_fail == 0 && both_low > 0,
                                fmt("%g realizations, %g differ", both_low, coincide_fail)));
  r.checks.push_back(make_check("at 1 kbit both are all-local", CheckKind::kClaim, all_local == both_low,
                                fmt("%g of %g realizations all-local", all_local, both_low)));
  r.checks.push_back(make_check(
      "at 60 kbit T_c(partial) >= T_c(binary)", CheckKind::kClaim, tc_fail == 0 && tc_cases > 0,
      fmt("%g of %g realizations violate; mean T_c %.3g ms vs %.3g ms", tc_fail, tc_cases,
          tc_cases ? 1e3 * tc_p / tc_cases : 0.0, tc_cases ? 1e3 * tc_b / tc_cases : 0.0)));
  return r;
}

// ---- Criterion 8: convexity, eigen pairing and the LP data ----------------

CriterionResult criterion_appendix(const ValidationScale&, std::uint64_t seed) {
  CriterionResult r;
  int bad = 0;
  int points = 0;
  for (double lx = -6.0; lx <= 3.0; lx += 0.01, ++points) {
    const double x = std::pow(10.0, lx);
    const double h = 1e-3 * x;
    if (1.0 / x > 1000.0) {
      // Log-convexity where x 2^(1/x) overflows.
      auto lf = [](double y) { return std::log(y) + std::log(2.0) / y; };
      if (!(lf(x + h) - 2 * lf(x) + lf(x - h) > 0.0)) ++bad;
      continue;
    }
    auto f = [](double y) { return y * std::exp2(1.0 / y); };
    if (!(f(x + h) - 2 * f(x) + f(x - h) > 0.0)) ++bad;
  }
  r.checks.push_back(make_check("x 2^(1/x) has positive second differences", CheckKind::kProperty, bad == 0,
                                fmt("%g grid points on [1e-6, 1e3], %g non-positive", points, bad)));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int beaten = 0;
  const SystemParams p = SystemParams::defaults(4);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix h = random_channels(rng, 8, 4);
    const std::vector<double> xi(4, 0.5);
    const std::vector<UserRequest> req(4, {0.0, 0.05});
    WcDuals d = WcDuals::zeros(4);
    for (double& x : d.rho) x = 5.0 * u(rng);
    const CMatrix cm = build_c(d, h, xi, 0.015);
    const CMatrix dirs = beam_directions(cm, 4);
    const Eigen::VectorXd lambda = solve_lp(build_pbp(dirs, h, req, xi, 0.015, p.ap_power)).x;
    const Eigen::VectorXd mu = (dirs.adjoint() * cm * dirs).diagonal().real();
    const double sorted = mu.dot(lambda);
    std::vector<int> perm{0, 1, 2, 3};
    for (int k = 0; k < 1000; ++k) {
      std::shuffle(perm.begin(), perm.end(), rng);
      double permuted = 0.0;
      for (int j = 0; j < 4; ++j) permuted += mu(j) * lambda(perm[static_cast<size_t>(j)]);
      if (permuted > sorted * (1.0 + 1e-12)) ++beaten;
    }
  }
  r.checks.push_back(make_check("sorted eigen pairing beats 1000 random pairings", CheckKind::kProperty,
                                beaten == 0, fmt("5 instances, %g pairings did better", beaten)));

  CMatrix dirs(2, 2);
  dirs << 1.0, 1.0, 1.0, -1.0;
  dirs /= std::sqrt(2.0);
  CMatrix h(2, 2);
  h << 1.0, 2.0, 0.0, 1.0;
  const std::vector<double> xi{0.5, 0.25};
  const std::vector<UserRequest> req{{0.0, 0.5}, {0.0, 0.1}};
  const LpProblem lp = build_pbp(dirs, h, req, xi, 0.01, 40.0);
  // r_1 = (1, 1)/sqrt2 and r_2 = (3, 1)/sqrt2, so d_1 = (0.5, 0.5),
  // d_2 = (4.5, 0.5), pi = e / (xi T_c) = (100, 40).
  Eigen::Matrix2d dd;
  dd << 0.5, 0.5, 4.5, 0.5;
  const Eigen::Vector2d b(100.0, 40.0);
  const Eigen::Vector2d obj(0.5 * 0.01 * 0.5 + 0.25 * 0.01 * 4.5, 0.5 * 0.01 * 0.5 + 0.25 * 0.01 * 0.5);
  const double err = std::max({(lp.constraints - dd).cwiseAbs().maxCoeff(), (lp.bounds - b).cwiseAbs().maxCoeff(),
                               (lp.objective - obj).cwiseAbs().maxCoeff()});
  r.checks.push_back(make_check("beam-power LP data match the 2x2 hand computation", CheckKind::kProperty,
                                err <= 1e-12 && lp.sum_bound && *lp.sum_bound == 40.0 && lp.ordered_descending,
                                fmt("max abs error %.1e", err)));
  return r;
}

// ---- Criterion 9: ledger and profile --------------------------------------

CriterionResult criterion_profile(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  ExperimentConfig config;
  config.seed = seed;
  const auto runs = run_profile(config, s.profile_realizations);
  int data_only_gain = 0;
  int decreasing = 0;
  int ledger_bad = 0;
  for (const ProfileRun& run : runs) {
    double last = 0.0;
    double sum = 0.0;
    for (const ProfileBlock& b : run.blocks) {
      if (b.mode == BlockMode::kDataOnly && b.received != 0.0) ++data_only_gain;
      if (b.cumulative_received < last) ++decreasing;
      sum += b.received;
      if (std::abs(sum - b.cumulative_received) > 1e-12 * std::max(1.0, sum) || b.outstanding < 0.0)
        ++ledger_bad;
      last = b.cumulative_received;
    }
  }
  r.checks.push_back(make_check("data-only blocks add no energy", CheckKind::kProperty, data_only_gain == 0,
                                fmt("%g realizations of the default schedule", runs.size())));
  r.checks.push_back(make_check("cumulative received never decreases and matches the blocks",
                                CheckKind::kProperty, decreasing == 0 && ledger_bad == 0,
                                fmt("%g decreases, %g ledger mismatches", decreasing, ledger_bad)));
  const auto again = run_profile(config, s.profile_realizations, Execution::kSerial);
  bool replay = again.size() == runs.size();
  for (size_t i = 0; replay && i < runs.size(); ++i)
    for (size_t q = 0; q < runs[i].blocks.size(); ++q)
      replay = replay && runs[i].blocks[q].received == again[i].blocks[q].received;
  r.checks.push_back(make_check("profile replay is exact", CheckKind::kProperty, replay, ""));

  // Matched blocks: same layout, channel and outstanding request.
  const SystemParams& p = config.params;
  const int k = p.users_per_cell;
  std::vector<double> joint;
  std::vector<double> charging;
  for (int rep = 0; rep < s.profile_realizations; ++rep) {
    const std::uint64_t rs = realization_seed(config, rep);
    const NetworkLayout layout =
        generate_layout(p, derive_seed(rs, static_cast<std::uint64_t>(SeedStream::kLayout), 0));
    for (std::uint64_t q = 0; q < 10; ++q) {
      const CellChannel cell =
          generate_channels(layout, p, derive_seed(rs, static_cast<std::uint64_t>(SeedStream::kBlockChannel), q))
              .cell(0);
      ChargingLedger a(static_cast<size_t>(k));
      ChargingLedger b(static_cast<size_t>(k));
      const std::vector<UserRequest> req(static_cast<size_t>(k), {config.data_bits, config.energy_req});
      joint.push_back(total(run_block(0, BlockMode::kDataAndCharging, req, a, cell, p).received));
      charging.push_back(total(run_block(0, BlockMode::kChargingOnly, req, b, cell, p).received));
    }
  }
  r.checks.push_back(make_check("charging-only blocks deliver at least as much as joint blocks",
                                CheckKind::kClaim, mean(charging) >= mean(joint),
                                fmt("mean %.4g J vs %.4g J over %g matched blocks", mean(charging), mean(joint),
                                    static_cast<double>(joint.size()))));
  return r;
}

// ---- Criterion 10: latency sweep ------------------------------------------

CriterionResult criterion_latency(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  const double bits = 5e4;
  std::vector<double> means;
  std::ostringstream detail;
  for (double td : {20e-3, 30e-3, 40e-3}) {
    SystemParams p = SystemParams::defaults(4);
    p.latency = td;
    p.rederive();
    std::vector<double> got;
    for (int rep = 0; rep < s.latency_realizations; ++rep) {
      const CellChannel cell = cell_for(p, seed + static_cast<std::uint64_t>(rep));
      ChargingLedger ledger(4);
      const std::vector<UserRequest> req(4, {bits, 0.5});
      got.push_back(total(run_block(0, BlockMode::kDataAndCharging, req, ledger, cell, p).received));
    }
    means.push_back(mean(got));
    detail << (td == 20e-3 ? "" : ", ") << fmt("%.0f ms: %.4g J", 1e3 * td, means.back());
  }
  const bool monotone = means[0] <= means[1] && means[1] <= means[2];
  r.checks.push_back(make_check("mean received energy nondecreasing in T_d at 50 kbit", CheckKind::kClaim,
                                monotone, detail.str()));
  return r;
}

// ---- Criterion 11: convergence --------------------------------------------

CriterionResult criterion_convergence(const ValidationScale& s, std::uint64_t seed) {
  CriterionResult r;
  const ExperimentConfig config;
  const SystemParams& p = config.params;
  const int k = p.users_per_cell;
  const std::vector<UserRequest> req = config.requests(k);
  int co_ok = 0;
  int wc_ok = 0;
  int wc_runs = 0;
  std::vector<double> co_outer;
  std::vector<double> co_dual;
  std::vector<double> wc_outer;
  for (int run = 0; run < s.convergence_runs; ++run) {
    const CellChannel cell = cell_for(p, seed + static_cast<std::uint64_t>(run));
    const OffloadSolution co = outer_descent(cell.links, req, p);
    if (co.status == SolveStatus::kConverged && !co.inner_cap_hit) ++co_ok;
    co_outer.push_back(co.outer_iterations);
    co_dual.push_back(static_cast<double>(co.dual_iterations));
    if (!co.feasible()) continue;
    ++wc_runs;
    const ChargeSolution wc = solve_pwc(cell.h, req, co.times.t_charge, p);
    if (wc.converged) ++wc_ok;
    wc_outer.push_back(wc.iterations);
  }
  const double n = s.convergence_runs;
  r.checks.push_back(make_check("both solvers converge on >= 95% of runs", CheckKind::kProperty,
                                co_ok >= 0.95 * n && wc_ok >= 0.95 * n && wc_runs == s.convergence_runs,
                                fmt("P_CO %g/%g, P_WC %g/%g", co_ok, n, wc_ok, n)));
  r.checks.push_back(make_check(
      "P_WC needs fewer outer iterations than P_CO in the mean", CheckKind::kClaim,
      mean(wc_outer) < mean(co_outer),
      fmt("P_WC %.3g subgradient iterations, P_CO %.3g Newton iterations (%.4g inner dual steps)",
          mean(wc_outer), mean(co_outer), mean(co_dual))));
  return r;
}

// ---- Criterion 12: determinism --------------------------------------------

CriterionResult criterion_determinism(const ValidationScale&, std::uint64_t seed) {
  CriterionResult r;
  ExperimentConfig config;
  config.seed = seed;
  config.realizations = 3;
  config.sweep = SweepSpec{SweepAxis::kData, {1e3, 3e4}};
  auto csv = [](const std::vector<CsvRow>& rows) {
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
  };
  const std::string a = csv(run_sweep(config, Execution::kParallel));
  const std::string b = csv(run_sweep(config, Execution::kParallel));
  const std::string c = csv(run_sweep(config, Execution::kSerial));
  const std::string pa = csv(profile_rows(run_profile(config, 2)));
  const std::string pb = csv(profile_rows(run_profile(config, 2, Execution::kSerial)));
  r.checks.push_back(make_check("identical configuration gives byte-identical CSV", CheckKind::kProperty,
                                a == b && a == c && pa == pb,
                                fmt("sweep %g bytes, profile %g bytes; parallel and serial compared",
                                    static_cast<double>(a.size()), static_cast<double>(pa.size()))));
  return r;
}

}  // namespace

bool CriterionResult::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool CriterionResult::properties_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.kind == CheckKind::kClaim || c.passed; });
}

ValidationScale ValidationScale::quick() {
  ValidationScale s;
  s.lp_instances = 15;
  s.co_instances = 4;
  s.kkt_settings = 5;
  s.feasibility_runs = 20;
  s.ordering_realizations = 8;
  s.dominance_realizations = 4;
  s.profile_realizations = 3;
  s.latency_realizations = 8;
  s.convergence_runs = 20;
  return s;
}

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list = {
      {1, "LP matches grid oracle", criterion_lp},
      {2, "offloading inner loop matches grid oracle", criterion_inner},
      {3, "closed-form times and Lambert W", criterion_kkt},
      {4, "feasibility of returned solutions", criterion_feasibility},
      {5, "charging scheme ordering", criterion_ordering},
      {6, "energy beam sparsity", criterion_sparsity},
      {7, "partial versus binary offloading", criterion_dominance},
      {8, "convexity, eigen pairing, LP data", criterion_appendix},
      {9, "ledger and block profile", criterion_profile},
      {10, "received energy versus deadline", criterion_latency},
      {11, "solver convergence", criterion_convergence},
      {12, "determinism", criterion_determinism},
  };
  return list;
}

std::string summary_line(const CriterionResult& result) {
  std::ostringstream out;
  out << (result.passed() ? "[PASS] " : "[FAIL] ") << result.id << ' ' << result.title << ':';
  bool first = true;
  for (const Check& c : result.checks) {
    out << (first ? " " : " | ") << (c.passed ? "ok" : (c.kind == CheckKind::kClaim ? "CLAIM NOT MET" : "VIOLATED"))
        << ": " << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ')';
    first = false;
  }
  out << fmt(" [%.1fs]", result.seconds);
  return out.str();
}

}  // namespace wptmec
