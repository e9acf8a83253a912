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

#include "wptmec/offload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wptmec/numerics/lambert.hpp"
#include "wptmec/numerics/subgradient.hpp"

namespace wptmec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uplink_exponent(double bits, const SystemParams& p) {
  return bits / (p.data_symbol_fraction * p.bandwidth);
}

double downlink_exponent(double bits, const SystemParams& p) {
  return p.result_ratio * bits / p.bandwidth;
}

// argmin over t > 0 of  noise * t * (2^{k/t} - 1) + price * t.
double lagrangian_time(double k, double noise, double price, double t_max) {
  if (!(price > 0.0)) return t_max;
  const double z = lambert_w0_shifted(price / noise);
  if (!(z > 0.0)) return t_max;
  return std::min(t_max, k * std::log(2.0) / z);
}

// d/dt of noise * t * (2^{k/t} - 1), negated: the marginal energy saved per
// extra second of transmission.
double marginal_saving(double k, double noise, double t) {
  const double z = k * std::log(2.0) / t;
  return noise * (std::exp(z) * (z - 1.0) + 1.0);
}

struct UserBounds {
  std::vector<bool> active;
  std::vector<double> up_lo, up_hi, local_time;
  double t2 = 0.0;
};

UserBounds user_bounds(const DataPartition& partition, std::span<const UserLink> links,
                       const SystemParams& params, bool enforce_power_cap) {
  const size_t k = partition.size();
  UserBounds b;
  b.active.assign(k, false);
  b.up_lo.assign(k, 0.0);
  b.up_hi.assign(k, 0.0);
  b.local_time.assign(k, 0.0);
  b.t2 = t2_closed_form(partition.offloaded, params);
  for (size_t i = 0; i < k; ++i) {
    b.local_time[i] = local_compute_time(partition.local[i], params);
    b.up_hi[i] = params.latency - b.local_time[i];
    if (partition.offloaded[i] <= 0.0) continue;
    b.active[i] = true;
    b.up_lo[i] = kMinTime;
    if (enforce_power_cap)
      b.up_lo[i] = std::max(kMinTime, uplink_time_floor(partition.offloaded[i], links[i], params));
  }
  return b;
}

void check_sizes(const DataPartition& partition, std::span<const UserLink> links) {
  if (partition.local.size() != partition.size() || links.size() != partition.size())
    throw std::invalid_argument("offload: partition and link sizes differ");
}

// Fills every active user up to the common phase lengths, which is optimal
// for fixed (T1, T3) since transmit energy decreases in time.
void fill_to_phases(const UserBounds& b, double t1, double t3, TimeAllocation& times,
                    const SystemParams& params) {
  for (size_t i = 0; i < b.active.size(); ++i) {
    if (!b.active[i]) continue;
    times.t_up[i] = std::max(b.up_lo[i], std::min(t1, b.up_hi[i]));
    times.t_down[i] = t3;
  }
  times.close(b.t2, params.latency);
}

double weighted_energy(const DataPartition& partition, const TimeAllocation& times,
                       std::span<const UserLink> links, const SystemParams& params) {
  const double w = params.energy_weight;
  return (1.0 - w) * energy_users(partition, times.t_up, links, params) +
         w * energy_mec(partition, times.t_down, links, params);
}

std::vector<double> pack(const CoDuals& d) {
  std::vector<double> x;
  x.reserve(1 + 3 * d.beta.size());
  x.push_back(d.lambda1);
  x.insert(x.end(), d.beta.begin(), d.beta.end());
  x.insert(x.end(), d.theta.begin(), d.theta.end());
  x.insert(x.end(), d.phi.begin(), d.phi.end());
  return x;
}

CoDuals unpack(std::span<const double> x, std::span<const double> scale) {
  const size_t k = (x.size() - 1) / 3;
  CoDuals d = CoDuals::zeros(k);
  d.lambda1 = x[0] * scale[0];
  for (size_t i = 0; i < k; ++i) {
    d.beta[i] = x[1 + i] * scale[1 + i];
    d.theta[i] = x[1 + k + i] * scale[1 + k + i];
    d.phi[i] = x[1 + 2 * k + i] * scale[1 + 2 * k + i];
  }
  return d;
}

// Projection of v onto {x >= 0, sum(weight * x) = total}; returns the shift
// tau with x = max(v - tau * weight, 0).
double project_weighted_simplex(std::span<double> v, std::span<const double> weight,
                                double total) {
  std::vector<size_t> order(v.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return v[a] / weight[a] > v[b] / weight[b]; });
  double sum_vw = 0.0;
  double sum_ww = 0.0;
  double tau = 0.0;
  for (size_t j = 0; j < order.size(); ++j) {
    const size_t i = order[j];
    sum_vw += v[i] * weight[i];
    sum_ww += weight[i] * weight[i];
    const double candidate = (sum_vw - total) / sum_ww;
    if (j == 0 || v[i] / weight[i] > candidate) tau = candidate;
  }
  for (size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, v[i] - tau * weight[i]);
  return tau;
}

// Euclidean projection (in scaled coordinates) onto the cone
// sum(beta) = sum(phi) = lambda1 over the active users: the stationarity
// conditions of the Lagrangian in T1 and T3. x holds duals divided by scale.
void project_phase_duals(std::vector<double>& x, std::span<const double> scale,
                         const std::vector<bool>& active) {
  const size_t k = active.size();
  std::vector<double> vb, wb, vp, wp;
  for (size_t i = 0; i < k; ++i) {
    if (!active[i]) continue;
    vb.push_back(x[1 + i]);
    wb.push_back(scale[1 + i]);
    vp.push_back(x[1 + 2 * k + i]);
    wp.push_back(scale[1 + 2 * k + i]);
  }
  const double a = x[0];
  const double s0 = scale[0];
  std::vector<double> pb, pp;
  // Derivative of the squared distance in lambda (scaled), up to a factor 2.
  auto slope = [&](double lam) {
    pb = vb;
    pp = vp;
    const double tb = project_weighted_simplex(pb, wb, lam * s0);
    const double tp = project_weighted_simplex(pp, wp, lam * s0);
    return lam - a - s0 * (tb + tp);
  };
  double lam = 0.0;
  if (!vb.empty() && slope(0.0) < 0.0) {
    double hi = std::max(1.0, std::abs(a));
    while (slope(hi) < 0.0) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    lam = hi;
  }
  slope(lam);
  x[0] = vb.empty() ? 0.0 : lam;
  size_t j = 0;
  for (size_t i = 0; i < k; ++i) {
    const bool on = active[i];
    x[1 + i] = on && !pb.empty() && lam > 0.0 ? pb[j] : 0.0;
    x[1 + 2 * k + i] = on && !pp.empty() && lam > 0.0 ? pp[j] : 0.0;
    if (on) ++j;
  }
}

// The filled allocation depends on T1 alone once the latency budget is used
// up; its energy is convex in T1, so a golden-section search finishes the
// split the dual loop located.
TimeAllocation polish_phase_split(const UserBounds& b, const TimeAllocation& start,
                                  const DataPartition& partition,
                                  std::span<const UserLink> links, const SystemParams& params) {
  double t1_lo = 0.0;
  for (size_t i = 0; i < b.active.size(); ++i)
    if (b.active[i]) t1_lo = std::max(t1_lo, b.up_lo[i]);
  const double budget = params.latency - b.t2;
  const double t1_hi = budget - kMinTime;
  TimeAllocation times = start;
  auto energy_at = [&](double t1) {
    fill_to_phases(b, t1, budget - t1, times, params);
    return weighted_energy(partition, times, links, params);
  };
  const double e_start = weighted_energy(partition, start, links, params);
  if (!(t1_hi > t1_lo)) return start;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = t1_lo;
  double hi = t1_hi;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = energy_at(x1);
  double f2 = energy_at(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * params.latency; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = energy_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = energy_at(x2);
    }
  }
  const double best = f1 <= f2 ? x1 : x2;
  if (energy_at(best) <= e_start) return times;
  return start;
}

// KKT multipliers of a primal allocation: each user's marginal saving priced
// on the constraint that holds it.
CoDuals recover_duals(const UserBounds& b, const TimeAllocation& times,
                      const DataPartition& partition, std::span<const UserLink> links,
                      const SystemParams& params) {
  const size_t k = b.active.size();
  const double w = params.energy_weight;
  CoDuals d = CoDuals::zeros(k);
  for (size_t i = 0; i < k; ++i) {
    if (!b.active[i]) continue;
    const double s = partition.offloaded[i];
    const double mu = (1.0 - w) * marginal_saving(uplink_exponent(s, params),
                                                  effective_noise(LinkDirection::kUplink,
                                                                  links[i], params),
                                                  times.t_up[i]);
    const double md = w * marginal_saving(downlink_exponent(s, params),
                                          effective_noise(LinkDirection::kDownlink, links[i],
                                                          params),
                                          times.t_down[i]);
    if (times.t_up[i] >= times.t1 * (1.0 - 1e-12)) d.beta[i] = mu;
    else if (times.t_up[i] >= b.up_hi[i] * (1.0 - 1e-12)) d.theta[i] = mu;
    d.phi[i] = md;
  }
  const double sb = std::accumulate(d.beta.begin(), d.beta.end(), 0.0);
  const double sp = std::accumulate(d.phi.begin(), d.phi.end(), 0.0);
  d.lambda1 = 0.5 * (sb + sp);
  if (sb > 0.0)
    for (double& v : d.beta) v *= d.lambda1 / sb;
  if (sp > 0.0)
    for (double& v : d.phi) v *= d.lambda1 / sp;
  return d;
}

}  // namespace

CoDuals CoDuals::zeros(size_t k) {
  CoDuals d;
  d.beta.assign(k, 0.0);
  d.theta.assign(k, 0.0);
  d.phi.assign(k, 0.0);
  return d;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kIterationCap: return "iteration_cap";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

double uplink_time_floor(double bits, const UserLink& link, const SystemParams& params) {
  if (bits <= 0.0) return 0.0;
  const double rate = uplink_rate(params.user_power_max, link.gamma, link.sigma1_sq, params);
  if (!(rate > 0.0)) return kInf;
  return bits / (params.bandwidth * rate);
}

TimeAllocation inner_time_from_duals(const DataPartition& partition, const CoDuals& duals,
                                     std::span<const UserLink> links,
                                     const SystemParams& params, bool enforce_power_cap) {
  check_sizes(partition, links);
  const size_t k = partition.size();
  if (duals.beta.size() != k || duals.theta.size() != k || duals.phi.size() != k)
    throw std::invalid_argument("inner_time_from_duals: dual size mismatch");
  const double w = params.energy_weight;
  TimeAllocation t;
  t.t_up.assign(k, 0.0);
  t.t_down.assign(k, 0.0);
  for (size_t i = 0; i < k; ++i) {
    const double s = partition.offloaded[i];
    if (s <= 0.0) continue;
    const double nu = (1.0 - w) * effective_noise(LinkDirection::kUplink, links[i], params);
    const double nd = w * effective_noise(LinkDirection::kDownlink, links[i], params);
    double lo = kMinTime;
    if (enforce_power_cap) lo = std::max(lo, uplink_time_floor(s, links[i], params));
    const double tu = lagrangian_time(uplink_exponent(s, params), nu,
                                      duals.beta[i] + duals.theta[i], params.latency);
    const double td = lagrangian_time(downlink_exponent(s, params), nd, duals.phi[i],
                                      params.latency);
    t.t_up[i] = std::max(lo, tu);
    t.t_down[i] = std::max(kMinTime, td);
  }
  t.close(t2_closed_form(partition.offloaded, params), params.latency);
  return t;
}

std::vector<double> co_subgradients(const DataPartition& partition, const TimeAllocation& times,
                                    const SystemParams& params) {
  const size_t k = partition.size();
  if (times.t_up.size() != k || times.t_down.size() != k)
    throw std::invalid_argument("co_subgradients: size mismatch");
  std::vector<double> g(1 + 3 * k);
  g[0] = times.t1 + times.t2 + times.t3 - params.latency;
  for (size_t i = 0; i < k; ++i) {
    g[1 + i] = times.t_up[i] - times.t1;
    g[1 + k + i] = local_compute_time(partition.local[i], params) + times.t_up[i] - params.latency;
    g[1 + 2 * k + i] = times.t_down[i] - times.t3;
  }
  return g;
}

bool partition_admissible(const DataPartition& partition, std::span<const UserLink> links,
                          const SystemParams& params, bool enforce_power_cap) {
  check_sizes(partition, links);
  const UserBounds b = user_bounds(partition, links, params, enforce_power_cap);
  const double slack = params.latency * 1e-9;
  double t1 = 0.0;
  double t3 = 0.0;
  for (size_t i = 0; i < b.active.size(); ++i) {
    if (b.up_hi[i] < -slack) return false;
    if (!b.active[i]) continue;
    if (b.up_lo[i] > b.up_hi[i] + slack) return false;
    t1 = std::max(t1, b.up_lo[i]);
    t3 = kMinTime;
  }
  return t1 + b.t2 + t3 <= params.latency + slack;
}

bool repair_times(const DataPartition& partition, std::span<const UserLink> links,
                  const SystemParams& params, bool enforce_power_cap, TimeAllocation& times) {
  check_sizes(partition, links);
  const UserBounds b = user_bounds(partition, links, params, enforce_power_cap);
  const size_t k = partition.size();
  times.t_up.resize(k, 0.0);
  times.t_down.resize(k, 0.0);
  for (size_t i = 0; i < k; ++i) {
    if (b.up_hi[i] < -params.latency * 1e-9) return false;
    if (!b.active[i]) {
      times.t_up[i] = times.t_down[i] = 0.0;
      continue;
    }
    if (b.up_lo[i] > b.up_hi[i]) return false;
    times.t_up[i] = std::clamp(times.t_up[i], b.up_lo[i], b.up_hi[i]);
    times.t_down[i] = std::max(kMinTime, times.t_down[i]);
  }
  times.close(b.t2, params.latency);
  const double budget = params.latency - b.t2;
  const double t1_lo = [&] {
    double m = 0.0;
    for (size_t i = 0; i < k; ++i)
      if (b.active[i]) m = std::max(m, b.up_lo[i]);
    return m;
  }();
  const double t3_lo = times.t3 > 0.0 ? kMinTime : 0.0;
  if (t1_lo + t3_lo > budget * (1.0 + 1e-12)) return false;

  double t1 = times.t1;
  double t3 = times.t3;
  if (t1 + t3 > budget) {
    // Shrink both phases by a common factor, respecting their floors.
    auto length = [&](double a) {
      return std::max(t1_lo, a * times.t1) + std::max(t3_lo, a * times.t3);
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (length(mid) <= budget ? lo : hi) = mid;
    }
    t1 = std::max(t1_lo, lo * times.t1);
    t3 = std::max(t3_lo, lo * times.t3);
  }
  fill_to_phases(b, t1, t3, times, params);
  return true;
}

InnerResult inner_primal_dual(const DataPartition& partition, std::span<const UserLink> links,
                              const SystemParams& params, const OffloadOptions& options,
                              const CoDuals* warm) {
  check_sizes(partition, links);
  const size_t k = partition.size();
  InnerResult out;
  out.duals = CoDuals::zeros(k);

  const UserBounds b = user_bounds(partition, links, params, options.enforce_power_cap);
  const bool any_active = std::any_of(b.active.begin(), b.active.end(), [](bool a) { return a; });
  if (!partition_admissible(partition, links, params, options.enforce_power_cap)) {
    out.objective = kInf;
    out.dual_value = kInf;
    return out;
  }
  if (!any_active) {
    out.times.t_up.assign(k, 0.0);
    out.times.t_down.assign(k, 0.0);
    out.times.close(0.0, params.latency);
    out.objective = weighted_energy(partition, out.times, links, params);
    out.dual_value = out.objective;
    out.feasible = out.converged = true;
    out.residual = 0.0;
    return out;
  }

  // A feasible starting allocation, polished along T1: the upper bound the
  // dual loop has to meet, and the point whose marginals set the dual units.
  TimeAllocation primal;
  primal.t_up.assign(k, params.latency);
  primal.t_down.assign(k, params.latency);
  if (!repair_times(partition, links, params, options.enforce_power_cap, primal)) {
    out.objective = kInf;
    out.dual_value = kInf;
    return out;
  }
  primal = polish_phase_split(b, primal, partition, links, params);
  double upper = weighted_energy(partition, primal, links, params);

  // Per-variable dual units from the multipliers implied by that allocation.
  const CoDuals unit = recover_duals(b, primal, partition, links, params);
  const double w = params.energy_weight;
  std::vector<double> scale(1 + 3 * k, 1.0);
  double sum_up = 0.0;
  double sum_down = 0.0;
  for (size_t i = 0; i < k; ++i) {
    if (!b.active[i]) continue;
    const double s = partition.offloaded[i];
    const double mu = (1.0 - w) * marginal_saving(uplink_exponent(s, params),
                                                  effective_noise(LinkDirection::kUplink,
                                                                  links[i], params),
                                                  primal.t_up[i]);
    const double md = unit.phi[i];
    scale[1 + i] = scale[1 + k + i] = mu > 0.0 && std::isfinite(mu) ? mu : 1.0;
    scale[1 + 2 * k + i] = md > 0.0 && std::isfinite(md) ? md : 1.0;
    sum_up += scale[1 + i];
    sum_down += scale[1 + 2 * k + i];
  }
  // Both phase blocks share lambda1, so they are brought to a common total.
  for (size_t i = 0; i < k; ++i) scale[1 + 2 * k + i] *= sum_up / sum_down;
  scale[0] = sum_up;
  // Coordinates y = dual / sqrt(sigma_j sigma_0): a unit step in y moves each
  // dual in proportion to its own marginal, and the cone projection stays
  // Euclidean in y.
  for (size_t j = 1; j < scale.size(); ++j) scale[j] = std::sqrt(scale[j] * scale[0]);

  std::vector<double> x0(1 + 3 * k, 0.0);
  int offset = 0;
  if (warm && warm->beta.size() == k && warm->lambda1 > 0.0) {
    x0 = pack(*warm);
    for (size_t j = 0; j < x0.size(); ++j) x0[j] /= scale[j];
    offset = options.warm_start_offset;
  }
  project_phase_duals(x0, scale, b.active);
  SubgradientState state = SubgradientState::start(std::move(x0), DualSense::kMaximize);
  state.iteration = offset;
  const SubgradientOptions sg{options.dual_step_scale, options.dual_tolerance};

  for (int it = 0; it < options.max_dual_iterations; ++it) {
    const CoDuals duals = unpack(state.x, scale);
    TimeAllocation t = inner_time_from_duals(partition, duals, links, params,
                                             options.enforce_power_cap);
    std::vector<double> g = co_subgradients(partition, t, params);
    double value = weighted_energy(partition, t, links, params);
    for (size_t j = 0; j < g.size(); ++j) value += state.x[j] * scale[j] * g[j];
    for (size_t i = 0; i < k; ++i) {
      if (b.active[i]) continue;
      g[1 + i] = g[1 + k + i] = g[1 + 2 * k + i] = 0.0;
    }

    if (repair_times(partition, links, params, options.enforce_power_cap, t)) {
      const double e = weighted_energy(partition, t, links, params);
      if (e < upper) {
        upper = e;
        primal = std::move(t);
      }
    }

    // Gradient with respect to the scaled duals, in units of lambda1's scale.
    for (size_t j = 0; j < g.size(); ++j) g[j] *= scale[j] / (scale[0] * params.latency);
    state = subgradient_step(std::move(state), g, value, sg);
    project_phase_duals(state.x, scale, b.active);
    out.iterations = it + 1;
    out.residual = state.residual;
    const double gap = upper - state.best_value;
    if (state.converged && gap <= options.duality_gap_tolerance * std::abs(upper)) {
      out.converged = true;
      break;
    }
  }

  out.duals = unpack(state.x, scale);
  out.dual_value = state.best_value;
  out.feasible = true;
  out.times = polish_phase_split(b, primal, partition, links, params);
  out.objective = weighted_energy(partition, out.times, links, params);
  out.recovered = recover_duals(b, out.times, partition, links, params);
  return out;
}

OffloadSolution make_solution(const DataPartition& partition, const InnerResult& inner,
                              std::span<const UserLink> links, const SystemParams& params) {
  OffloadSolution sol;
  sol.partition = partition;
  sol.duals = inner.duals;
  if (!inner.feasible) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  sol.times = inner.times;
  sol.energy = energy_breakdown(partition, inner.times, links, params);
  const size_t k = partition.size();
  sol.ul_power.assign(k, 0.0);
  sol.dl_fraction.assign(k, 0.0);
  double eta_sum = 0.0;
  for (size_t i = 0; i < k; ++i) {
    if (partition.offloaded[i] <= 0.0) continue;
    sol.ul_power[i] = power_from_time(partition.offloaded[i], inner.times.t_up[i],
                                      LinkDirection::kUplink, links[i], params);
    sol.dl_fraction[i] = power_from_time(partition.offloaded[i], inner.times.t_down[i],
                                         LinkDirection::kDownlink, links[i], params);
    eta_sum += sol.dl_fraction[i];
  }
  sol.eta_sum_exceeds_one = eta_sum > 1.0 + 1e-9;
  sol.inner_cap_hit = !inner.converged;
  sol.dual_iterations = inner.iterations;
  sol.status = SolveStatus::kConverged;
  return sol;
}

namespace {

class Descent {
 public:
  Descent(std::span<const UserLink> links, std::span<const UserRequest> requests,
          const SystemParams& params, const OffloadOptions& options)
      : links_(links), requests_(requests), params_(params), options_(options) {}

  struct Point {
    std::vector<double> s;
    InnerResult inner;
    double f() const { return inner.feasible ? inner.objective : kInf; }
  };

  // Probes only need F(s); the dual loop runs at accepted iterates.
  Point probe(std::vector<double> s) {
    Point p;
    const DataPartition part = DataPartition::from_offloaded(s, requests_);
    OffloadOptions primal_only = options_;
    primal_only.max_dual_iterations = 0;
    p.inner = inner_primal_dual(part, links_, params_, primal_only);
    p.s = std::move(s);
    return p;
  }

  void certify(Point& p) {
    const DataPartition part = DataPartition::from_offloaded(p.s, requests_);
    p.inner = inner_primal_dual(part, links_, params_, options_);
    dual_iterations_ += p.inner.iterations;
    inner_capped_ = p.inner.feasible && !p.inner.converged;
  }

  long long dual_iterations() const { return dual_iterations_; }
  bool inner_capped() const { return inner_capped_; }

 private:
  std::span<const UserLink> links_;
  std::span<const UserRequest> requests_;
  const SystemParams& params_;
  const OffloadOptions& options_;
  long long dual_iterations_ = 0;
  bool inner_capped_ = false;
};

}  // namespace

OffloadSolution outer_descent(std::span<const UserLink> links,
                              std::span<const UserRequest> requests,
                              const SystemParams& params, const OffloadOptions& options) {
  const size_t k = requests.size();
  if (links.size() != k) throw std::invalid_argument("outer_descent: links/requests size mismatch");
  for (const auto& r : requests)
    if (!(r.data_bits >= 0.0) || !std::isfinite(r.data_bits))
      throw std::invalid_argument("outer_descent: data request must be finite and >= 0");

  Descent descent(links, requests, params, options);
  std::vector<double> u(k);
  for (size_t i = 0; i < k; ++i) u[i] = requests[i].data_bits;

  auto admissible = [&](const std::vector<double>& s) {
    return partition_admissible(DataPartition::from_offloaded(s, requests), links, params,
                                options.enforce_power_cap);
  };

  // Start at u/2; otherwise walk a grid between the least offload that meets
  // every local deadline and full offload.
  std::vector<double> s0(k);
  for (size_t i = 0; i < k; ++i) s0[i] = 0.5 * u[i];
  if (!admissible(s0)) {
    std::vector<double> floor_s(k);
    for (size_t i = 0; i < k; ++i) {
      const double local_cap =
          params.user_freq * params.latency / params.user_cycles_per_bit;
      floor_s[i] = std::clamp(u[i] - local_cap, 0.0, u[i]);
    }
    bool found = false;
    for (int j = 0; j <= 20 && !found; ++j) {
      const double a = j / 20.0;
      for (size_t i = 0; i < k; ++i) s0[i] = floor_s[i] + a * (u[i] - floor_s[i]);
      found = admissible(s0);
    }
    if (!found) {
      OffloadSolution sol;
      sol.partition = DataPartition::from_offloaded(s0, requests);
      sol.status = SolveStatus::kInfeasible;
      sol.stop_reason = "no admissible partition";
      return sol;
    }
  }

  Descent::Point cur = descent.probe(s0);
  descent.certify(cur);
  const double f_init = cur.f();
  std::vector<OffloadTraceRow> trace;
  auto record = [&](int iter) {
    if (!options.record_trace) return;
    const auto& t = cur.inner.times;
    trace.push_back({iter, cur.f(), cur.inner.residual, t.t1, t.t3, t.t_charge});
  };
  record(0);

  std::string reason = "iteration cap";
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_newton_iterations; ++iter) {
    auto probe = [&](size_t i, double delta) {
      std::vector<double> s = cur.s;
      s[i] += delta;
      return descent.probe(std::move(s)).f();
    };

    // Finite-difference gradient, one-sided next to the box edges or where
    // the probe leaves the admissible set.
    std::vector<double> grad(k, 0.0);
    std::vector<bool> free_var(k, false);
    for (size_t i = 0; i < k; ++i) {
      if (u[i] <= 0.0) continue;
      const double h = options.gradient_step * u[i];
      const double fp = cur.s[i] + h <= u[i] ? probe(i, h) : kInf;
      const double fm = cur.s[i] - h >= 0.0 ? probe(i, -h) : kInf;
      if (std::isfinite(fp) && std::isfinite(fm)) grad[i] = (fp - fm) / (2 * h);
      else if (std::isfinite(fp)) grad[i] = (fp - cur.f()) / h;
      else if (std::isfinite(fm)) grad[i] = (cur.f() - fm) / h;
      else continue;
      const bool at_lo = cur.s[i] <= 0.0 && grad[i] > 0.0;
      const bool at_hi = cur.s[i] >= u[i] && grad[i] < 0.0;
      const bool blocked_up = !std::isfinite(fp) && grad[i] < 0.0;
      const bool blocked_down = !std::isfinite(fm) && grad[i] > 0.0;
      free_var[i] = !(at_lo || at_hi || blocked_up || blocked_down);
    }
    std::vector<size_t> idx;
    for (size_t i = 0; i < k; ++i)
      if (free_var[i]) idx.push_back(i);
    if (idx.empty()) {
      const bool blocked = std::any_of(u.begin(), u.end(), [](double v) { return v > 0; }) &&
                           [&] {
                             for (size_t i = 0; i < k; ++i)
                               if (u[i] > 0 && cur.s[i] > 0 && cur.s[i] < u[i]) return true;
                             return false;
                           }();
      reason = blocked ? "latency tight" : "bound optimal";
      converged = true;
      break;
    }

    // Hessian on the free set from a shifted stencil kept inside [0, u].
    const size_t m = idx.size();
    Eigen::MatrixXd hess(m, m);
    Eigen::VectorXd g(m);
    std::vector<double> step(m), center(m);
    for (size_t a = 0; a < m; ++a) {
      const size_t i = idx[a];
      g(a) = grad[i];
      step[a] = options.hessian_step * u[i];
      center[a] = std::clamp(cur.s[i], step[a], u[i] - step[a]);
    }
    auto eval_at = [&](std::initializer_list<std::pair<size_t, double>> moves) {
      std::vector<double> s = cur.s;
      for (size_t a = 0; a < m; ++a) s[idx[a]] = center[a];
      for (auto [a, d] : moves) s[idx[a]] += d;
      return descent.probe(std::move(s)).f();
    };
    const double f0 = eval_at({});
    bool hess_ok = std::isfinite(f0);
    for (size_t a = 0; a < m && hess_ok; ++a) {
      const double fp = eval_at({{a, step[a]}});
      const double fm = eval_at({{a, -step[a]}});
      hess(a, a) = (fp - 2 * f0 + fm) / (step[a] * step[a]);
      hess_ok = std::isfinite(hess(a, a));
      for (size_t b = 0; b < a && hess_ok; ++b) {
        const double fpp = eval_at({{a, step[a]}, {b, step[b]}});
        const double fpm = eval_at({{a, step[a]}, {b, -step[b]}});
        const double fmp = eval_at({{a, -step[a]}, {b, step[b]}});
        const double fmm = eval_at({{a, -step[a]}, {b, -step[b]}});
        hess(a, b) = hess(b, a) = (fpp - fpm - fmp + fmm) / (4 * step[a] * step[b]);
        hess_ok = std::isfinite(hess(a, b));
      }
    }

    Eigen::VectorXd dir(m);
    bool newton = false;
    if (hess_ok) {
      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      if (llt.info() == Eigen::Success) {
        dir = -llt.solve(g);
        newton = dir.allFinite();
      }
    }
    if (!newton) {
      // Diagonal scaling where curvature is positive, plain gradient elsewhere.
      for (size_t a = 0; a < m; ++a) {
        const double c = hess_ok ? hess(a, a) : 0.0;
        dir(a) = c > 0.0 ? -g(a) / c : -g(a) * u[idx[a]] * u[idx[a]] / std::max(1e-300, std::abs(cur.f()));
      }
    }
    // A small decrement still takes its step when that step lowers F; the
    // loop then ends.
    const double decrement = -g.dot(dir);
    const bool small_decrement =
        newton && decrement * 0.5 <= options.newton_tolerance * std::abs(cur.f());

    // Backtracking line search inside the box and the admissible set.
    double t = 1.0;
    bool accepted = false;
    bool hit_latency = false;
    for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
      std::vector<double> s = cur.s;
      double predicted = 0.0;
      for (size_t a = 0; a < m; ++a) {
        const size_t i = idx[a];
        s[i] = std::clamp(cur.s[i] + t * dir(a), 0.0, u[i]);
        predicted += g(a) * (s[i] - cur.s[i]);
      }
      if (!admissible(s)) {
        hit_latency = true;
        continue;
      }
      Descent::Point trial = descent.probe(std::move(s));
      if (trial.f() <= cur.f() + 1e-4 * predicted && trial.f() < cur.f()) {
        descent.certify(trial);
        cur = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (small_decrement) {
      if (accepted) {
        record(iter + 1);
        ++iter;
      }
      reason = "newton decrement";
      converged = true;
      break;
    }
    if (!accepted) {
      reason = hit_latency ? "latency tight" : "no progress";
      converged = true;
      break;
    }
    record(iter + 1);
  }

  OffloadSolution sol = make_solution(DataPartition::from_offloaded(cur.s, requests), cur.inner,
                                      links, params);
  sol.outer_iterations = iter;
  sol.dual_iterations = descent.dual_iterations();
  sol.inner_cap_hit = descent.inner_capped();
  sol.stop_reason = reason;
  sol.trace = std::move(trace);
  if (sol.feasible()) {
    sol.status = converged ? SolveStatus::kConverged : SolveStatus::kIterationCap;
    if (cur.f() > f_init + 1e-9) throw std::logic_error("outer_descent: objective increased");
  }
  return sol;
}

}  // namespace wptmec
