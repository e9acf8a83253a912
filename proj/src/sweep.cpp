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


#include "wptmec/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "wptmec/baselines.hpp"

namespace wptmec {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Scenario {
  std::string name;
  BlockMode mode = BlockMode::kDataAndCharging;
  OffloadScheme offload = OffloadScheme::kPartial;
  ChargeScheme charge = ChargeScheme::kOptimal;
  double data_bits = 0.0;
  double energy_req = 0.0;
  double latency = 0.0;  // 0 keeps the configured T_d
};

bool varies_users(SweepAxis axis) {
  return axis == SweepAxis::kNetworkSize || axis == SweepAxis::kScheme;
}

std::vector<Scenario> scenarios(const ExperimentConfig& c, SweepAxis axis, double value) {
  const double u = c.data_bits;
  const double e = c.energy_req;
  using B = BlockMode;
  using O = OffloadScheme;
  using C = ChargeScheme;
  switch (axis) {
    case SweepAxis::kData:
      return {{"partial", B::kDataAndCharging, O::kPartial, C::kOptimal, value, e, 0.0},
              {"binary", B::kDataAndCharging, O::kBinary, C::kOptimal, value, e, 0.0}};
    case SweepAxis::kLatency:
      return {{"partial", B::kDataAndCharging, O::kPartial, C::kOptimal, u, e, value},
              {"binary", B::kDataAndCharging, O::kBinary, C::kOptimal, u, e, value},
              {"charging-only", B::kChargingOnly, O::kPartial, C::kOptimal, 0.0, e, value}};
    case SweepAxis::kEnergy:
      return {{"70kbit-20ms", B::kDataAndCharging, O::kPartial, C::kOptimal, 7e4, value, 20e-3},
              {"70kbit-40ms", B::kDataAndCharging, O::kPartial, C::kOptimal, 7e4, value, 40e-3},
              {"30kbit-20ms", B::kDataAndCharging, O::kPartial, C::kOptimal, 3e4, value, 20e-3}};
    case SweepAxis::kNetworkSize:
      return {{"charging-only", B::kChargingOnly, O::kPartial, C::kOptimal, 0.0, e, 0.0},
              {"charging-relaxed", B::kChargingOnly, O::kPartial, C::kOptimal, 0.0, e, 40e-3},
              {"joint-70kbit", B::kDataAndCharging, O::kPartial, C::kOptimal, 7e4, e, 0.0},
              {"power-control-40kbit", B::kDataAndCharging, O::kPartial, C::kOptimal, 4e4, e, 0.0},
              {"fixed-power-40kbit", B::kDataAndCharging, O::kFixedPower, C::kOptimal, 4e4, e, 0.0}};
    case SweepAxis::kScheme:
      return {{"optimal", B::kDataAndCharging, O::kPartial, C::kOptimal, u, e, 0.0},
              {"equal-k", B::kDataAndCharging, O::kPartial, C::kEqualK, u, e, 0.0},
              {"isotropic", B::kDataAndCharging, O::kPartial, C::kIsotropic, u, e, 0.0}};
  }
  return {};
}

template <class F>
double sum_cells(const SchemeOutcome& o, F&& f) {
  double s = 0.0;
  for (const BlockResult& b : o.cells) {
    const double v = f(b);
    if (std::isnan(v)) return kNaN;
    s += v;
  }
  return s;
}

template <class F>
double mean_cells(const SchemeOutcome& o, F&& f) {
  if (o.cells.empty()) return kNaN;
  return sum_cells(o, f) / static_cast<double>(o.cells.size());
}

double feasible_offload(const BlockResult& b, double (*get)(const OffloadSolution&)) {
  if (!b.offload || !b.offload->feasible()) return kNaN;
  return get(*b.offload);
}

std::string axis_name(SweepAxis axis) { return to_string(axis); }

void append_rows(std::vector<CsvRow>& rows, const std::string& axis, double value,
                 std::uint64_t seed, const std::vector<SchemeOutcome>& outcomes) {
  for (const SchemeOutcome& o : outcomes) {
    bool infeasible = false;
    for (const BlockResult& b : o.cells)
      if (b.offload && !b.offload->feasible()) infeasible = true;
    for (const std::string& metric : sweep_metrics()) {
      CsvRow row{axis, value, seed, o.scheme, metric, kNaN, "ok"};
      if (!o.error.empty()) {
        row.status = "error: " + o.error;
      } else {
        row.value = metric_value(o, metric);
        if (std::isnan(row.value)) row.status = infeasible ? "offload infeasible" : "n/a";
      }
      rows.push_back(std::move(row));
    }
  }
}

SystemParams point_params(const ExperimentConfig& config, SweepAxis axis, double value) {
  SystemParams p = config.params;
  if (varies_users(axis)) {
    p.users_per_cell = static_cast<int>(value);
    p.rederive();
  }
  return p;
}

}  // namespace

const std::vector<std::string>& sweep_metrics() {
  static const std::vector<std::string> names = {
      "feasible",        "weighted_energy",   "user_energy",       "mec_energy",
      "t1",              "t2",                "t3",                "charge_time",
      "offloaded_fraction", "latency_fraction", "requested_energy", "received_energy",
      "transmitted_energy", "charging_efficiency", "active_beams", "pco_iterations",
      "dual_iterations", "pco_converged",     "pwc_iterations",    "pwc_converged"};
  return names;
}

std::vector<std::string> axis_schemes(SweepAxis axis) {
  std::vector<std::string> names;
  for (const Scenario& s : scenarios(ExperimentConfig{}, axis, 1.0)) names.push_back(s.name);
  return names;
}

double metric_value(const SchemeOutcome& o, std::string_view metric) {
  auto has_offload = [&] {
    return std::all_of(o.cells.begin(), o.cells.end(),
                       [](const BlockResult& b) { return b.offload.has_value(); });
  };
  auto has_charge = [&] {
    return !o.cells.empty() && std::all_of(o.cells.begin(), o.cells.end(), [](const BlockResult& b) {
      return b.charge.has_value();
    });
  };
  if (metric == "feasible") {
    if (!has_offload()) return kNaN;
    return std::all_of(o.cells.begin(), o.cells.end(),
                       [](const BlockResult& b) { return b.offload->feasible(); })
               ? 1.0
               : 0.0;
  }
  if (metric == "weighted_energy")
    return sum_cells(o, [](const BlockResult& b) {
      return feasible_offload(b, [](const OffloadSolution& s) { return s.energy.weighted_total; });
    });
  if (metric == "user_energy")
    return sum_cells(o, [](const BlockResult& b) {
      return feasible_offload(b, [](const OffloadSolution& s) { return s.energy.users; });
    });
  if (metric == "mec_energy")
    return sum_cells(o, [](const BlockResult& b) {
      return feasible_offload(b, [](const OffloadSolution& s) { return s.energy.mec; });
    });
  if (metric == "t1")
    return mean_cells(o, [](const BlockResult& b) {
      return feasible_offload(b, [](const OffloadSolution& s) { return s.times.t1; });
    });
  if (metric == "t2")
    return mean_cells(o, [](const BlockResult& b) {
      return feasible_offload(b, [](const OffloadSolution& s) { return s.times.t2; });
    });
  if (metric == "t3")
    return mean_cells(o, [](const BlockResult& b) {
      return feasible_offload(b, [](const OffloadSolution& s) { return s.times.t3; });
    });
  if (metric == "charge_time")
    return mean_cells(o, [](const BlockResult& b) { return b.charge_time; });
  if (metric == "offloaded_fraction") {
    if (!has_offload()) return kNaN;
    double s = 0.0;
    double u = 0.0;
    for (const BlockResult& b : o.cells) {
      if (!b.offload->feasible()) return kNaN;
      for (size_t i = 0; i < b.offload->partition.size(); ++i) {
        s += b.offload->partition.offloaded[i];
        u += b.offload->partition.offloaded[i] + b.offload->partition.local[i];
      }
    }
    return u > 0.0 ? s / u : kNaN;
  }
  if (metric == "latency_fraction") {
    if (!has_offload()) return kNaN;
    double worst = 0.0;
    for (const BlockResult& b : o.cells) worst = std::max(worst, latency_fraction(*b.offload, o.params));
    return worst;
  }
  auto total = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  if (metric == "requested_energy")
    return sum_cells(o, [&](const BlockResult& b) { return total(b.effective_request); });
  if (metric == "received_energy")
    return sum_cells(o, [&](const BlockResult& b) { return total(b.received); });
  if (metric == "transmitted_energy")
    return sum_cells(o, [](const BlockResult& b) { return b.charge ? b.charge->charging : 0.0; });
  if (metric == "charging_efficiency") {
    const double want = sum_cells(o, [&](const BlockResult& b) { return total(b.effective_request); });
    const double got = sum_cells(o, [&](const BlockResult& b) { return total(b.received); });
    return want > 0.0 ? 100.0 * got / want : kNaN;
  }
  if (metric == "active_beams") {
    if (!has_charge()) return kNaN;
    return mean_cells(o, [](const BlockResult& b) { return static_cast<double>(b.charge->active_beams); });
  }
  if (metric == "pco_iterations") {
    if (!has_offload()) return kNaN;
    return mean_cells(o, [](const BlockResult& b) { return static_cast<double>(b.offload->outer_iterations); });
  }
  if (metric == "dual_iterations") {
    if (!has_offload()) return kNaN;
    return mean_cells(o, [](const BlockResult& b) { return static_cast<double>(b.offload->dual_iterations); });
  }
  if (metric == "pco_converged") {
    if (!has_offload()) return kNaN;
    return mean_cells(o, [](const BlockResult& b) {
      return b.offload->status == SolveStatus::kConverged && !b.offload->inner_cap_hit ? 1.0 : 0.0;
    });
  }
  if (metric == "pwc_iterations") {
    if (!has_charge()) return kNaN;
    return mean_cells(o, [](const BlockResult& b) { return static_cast<double>(b.charge->iterations); });
  }
  if (metric == "pwc_converged") {
    if (!has_charge()) return kNaN;
    return mean_cells(o, [](const BlockResult& b) { return b.charge->converged ? 1.0 : 0.0; });
  }
  throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

int axis_realizations(const ExperimentConfig& config, SweepAxis axis) {
  return axis == SweepAxis::kNetworkSize ? config.spatial_realizations : config.realizations;
}

std::vector<SchemeOutcome> evaluate_point(const ExperimentConfig& config, SweepAxis axis,
                                          double value, int realization) {
  const SystemParams base = point_params(config, axis, value);
  const auto k = static_cast<std::uint64_t>(base.users_per_cell);
  const std::uint64_t seed = realization_seed(config, realization);
  SolverSettings settings;
  settings.offload = config.offload;
  settings.charge = config.charge;

  std::vector<SchemeOutcome> out;
  for (const Scenario& sc : scenarios(config, axis, value)) {
    SchemeOutcome o;
    o.scheme = sc.name;
    o.params = base;
    try {
      if (sc.latency > 0.0) {
        o.params.latency = sc.latency;
        o.params.rederive();
        o.params.conv_eff = base.conv_eff;
      }
      o.params.validate();
      const NetworkLayout layout =
          generate_layout(o.params, derive_seed(seed, static_cast<std::uint64_t>(SeedStream::kLayout), k));
      const ChannelRealization ch = generate_channels(
          layout, o.params, derive_seed(seed, static_cast<std::uint64_t>(SeedStream::kChannel), k));
      settings.offload_scheme = sc.offload;
      settings.charge_scheme = sc.charge;
      const std::vector<UserRequest> requests(k, {sc.data_bits, sc.energy_req});
      const int cells = axis == SweepAxis::kNetworkSize ? o.params.n_cells : 1;
      for (int l = 0; l < cells; ++l) {
        ChargingLedger ledger(k);
        o.cells.push_back(run_block(0, sc.mode, requests, ledger, ch.cell(l), o.params, settings));
      }
    } catch (const std::exception& e) {
      o.cells.clear();
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<CsvRow> point_rows(SweepAxis axis, double value, std::uint64_t seed,
                               const std::vector<SchemeOutcome>& outcomes) {
  std::vector<CsvRow> rows;
  append_rows(rows, axis_name(axis), value, seed, outcomes);
  return rows;
}

std::vector<CsvRow> run_sweep(const ExperimentConfig& config, Execution exec) {
  if (!config.sweep) throw std::invalid_argument("run_sweep: the configuration has no sweep");
  const SweepSpec& spec = *config.sweep;
  if (spec.values.empty()) throw std::invalid_argument("run_sweep: no axis values");
  const int reps = axis_realizations(config, spec.axis);
  const auto points = static_cast<std::int64_t>(spec.values.size()) * reps;
  std::vector<std::vector<CsvRow>> chunks(static_cast<size_t>(points));
  for_each_index(points, exec, [&](std::int64_t idx) {
    const double value = spec.values[static_cast<size_t>(idx / reps)];
    const int r = static_cast<int>(idx % reps);
    chunks[static_cast<size_t>(idx)] = point_rows(
        spec.axis, value, realization_seed(config, r), evaluate_point(config, spec.axis, value, r));
  });
  std::vector<CsvRow> rows;
  for (auto& c : chunks) rows.insert(rows.end(), std::make_move_iterator(c.begin()),
                                     std::make_move_iterator(c.end()));
  return rows;
}

RunOutput run_single(const ExperimentConfig& config, Execution exec) {
  const SystemParams& params = config.params;
  params.validate();
  const int k = params.users_per_cell;
  const std::vector<UserRequest> requests = config.requests(k);
  struct Chunk {
    std::vector<CsvRow> rows;
    std::vector<CsvRow> timing;
  };
  std::vector<Chunk> chunks(static_cast<size_t>(config.realizations));
  for_each_index(config.realizations, exec, [&](std::int64_t r) {
    Chunk& chunk = chunks[static_cast<size_t>(r)];
    const std::uint64_t seed = realization_seed(config, static_cast<int>(r));
    const auto kk = static_cast<std::uint64_t>(k);
    SchemeOutcome o;
    o.scheme = "partial";
    o.params = params;
    try {
      const NetworkLayout layout =
          generate_layout(params, derive_seed(seed, static_cast<std::uint64_t>(SeedStream::kLayout), kk));
      const ChannelRealization ch = generate_channels(
          layout, params, derive_seed(seed, static_cast<std::uint64_t>(SeedStream::kChannel), kk));
      const CellChannel cell = ch.cell(0);
      OffloadOptions co = config.offload;
      co.record_trace = true;
      ChargeOptions wc = config.charge;
      wc.record_trace = true;

      using Clock = std::chrono::steady_clock;
      BlockResult block;
      const auto t0 = Clock::now();
      block.offload = outer_descent(cell.links, requests, params, co);
      const auto t1 = Clock::now();
      for (const UserRequest& q : requests) block.effective_request.push_back(q.energy_req);
      block.received.assign(static_cast<size_t>(k), 0.0);
      if (block.offload->feasible()) {
        block.charge_time = block.offload->times.t_charge;
        block.charge = solve_pwc(cell.h, requests, block.charge_time, params, wc);
        block.received = block.charge->harvested;
      } else {
        block.note = "offload infeasible";
      }
      const auto t2 = Clock::now();
      block.efficiency = charging_efficiency(block);

      const double co_s = std::chrono::duration<double>(t1 - t0).count();
      const double wc_s = std::chrono::duration<double>(t2 - t1).count();
      auto timing = [&](const char* solver, double seconds, double iterations) {
        chunk.timing.push_back({"run", 0.0, seed, solver, "seconds", seconds, "ok"});
        chunk.timing.push_back({"run", 0.0, seed, solver, "iterations", iterations, "ok"});
        chunk.timing.push_back({"run", 0.0, seed, solver, "seconds_per_iteration",
                                iterations > 0 ? seconds / iterations : kNaN,
                                iterations > 0 ? "ok" : "n/a"});
      };
      timing("pco", co_s, block.offload->outer_iterations);
      if (block.charge) timing("pwc", wc_s, block.charge->iterations);

      for (const OffloadTraceRow& t : block.offload->trace) {
        const double it = t.iteration;
        chunk.rows.push_back({"iteration", it, seed, "pco", "objective", t.objective, "ok"});
        chunk.rows.push_back({"iteration", it, seed, "pco", "dual_residual", t.dual_residual, "ok"});
        chunk.rows.push_back({"iteration", it, seed, "pco", "charge_time", t.t_charge, "ok"});
      }
      if (block.charge) {
        for (const ChargeTraceRow& t : block.charge->trace) {
          const double it = t.iteration;
          chunk.rows.push_back({"iteration", it, seed, "pwc", "dual_value", t.dual_value, "ok"});
          chunk.rows.push_back({"iteration", it, seed, "pwc", "trace_power", t.trace_power, "ok"});
          chunk.rows.push_back(
              {"iteration", it, seed, "pwc", "max_cap_violation", t.max_cap_violation, "ok"});
        }
      }
      o.cells.push_back(std::move(block));
    } catch (const std::exception& e) {
      o.cells.clear();
      o.error = e.what();
    }
    std::vector<CsvRow> summary;
    append_rows(summary, "run", 0.0, seed, {o});
    chunk.rows.insert(chunk.rows.begin(), summary.begin(), summary.end());
  });
  RunOutput out;
  for (Chunk& c : chunks) {
    out.rows.insert(out.rows.end(), c.rows.begin(), c.rows.end());
    out.timing.insert(out.timing.end(), c.timing.begin(), c.timing.end());
  }
  return out;
}

std::vector<CsvRow> profile_rows(const std::vector<ProfileRun>& runs) {
  std::vector<CsvRow> rows;
  for (const ProfileRun& run : runs) {
    for (const ProfileBlock& b : run.blocks) {
      const double q = b.block;
      const std::string mode = to_string(b.mode);
      rows.push_back({"block", q, run.seed, mode, "received_energy", b.received, "ok"});
      rows.push_back({"block", q, run.seed, mode, "cumulative_received", b.cumulative_received, "ok"});
      rows.push_back({"block", q, run.seed, mode, "outstanding_energy", b.outstanding, "ok"});
      rows.push_back({"block", q, run.seed, mode, "charging_efficiency",
                      b.efficiency ? *b.efficiency : kNaN, b.efficiency ? "ok" : "n/a"});
      rows.push_back({"block", q, run.seed, mode, "charge_time", b.charge_time, "ok"});
      rows.push_back({"block", q, run.seed, mode, "offload_feasible", b.offload_feasible ? 1.0 : 0.0, "ok"});
    }
  }
  return rows;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_number: buffer too small");
  return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << "axis,axis_value,seed,scheme,metric,value,status\r\n";
  for (const CsvRow& r : rows) {
    out << csv_field(r.axis) << ',' << format_number(r.axis_value) << ',' << r.seed << ','
        << csv_field(r.scheme) << ',' << csv_field(r.metric) << ',' << format_number(r.value)
        << ',' << csv_field(r.status) << "\r\n";
  }
}

}  // namespace wptmec
