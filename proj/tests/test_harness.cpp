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
#include <numeric>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "wptmec/harness.hpp"
#include "wptmec/sweep.hpp"

using namespace wptmec;
using doctest::Approx;

namespace {

CellChannel make_cell(const SystemParams& params, std::uint64_t seed) {
  const NetworkLayout layout = generate_layout(params, seed);
  return generate_channels(layout, params, seed + 100).cell(0);
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.params = SystemParams::defaults(2);
  c.params.n_antennas = 16;
  c.params.rederive();
  c.realizations = 2;
  c.spatial_realizations = 2;
  return c;
}

}  // namespace

TEST_CASE("ledger books requests and deliveries") {
  ChargingLedger ledger(2);
  ledger.add_request(std::vector<double>{1.0, 0.5});
  ledger.record(std::vector<double>{0.25, 0.5});
  CHECK(ledger.requested(0) == 1.0);
  CHECK(ledger.received(0) == 0.25);
  CHECK(ledger.outstanding(0) == Approx(0.75));
  CHECK(ledger.outstanding(1) == 0.0);
  ledger.add_request(std::vector<double>{0.0, 0.5});
  ledger.record(std::vector<double>{0.75, 0.1});
  CHECK(ledger.outstanding(0) == 0.0);
  CHECK(ledger.outstanding(1) == Approx(0.4));
  REQUIRE(ledger.history().size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    double booked = 0.0;
    for (const auto& block : ledger.history()) booked += block[i];
    CHECK(booked == Approx(ledger.received(i)));
  }
}

TEST_CASE("ledger clips rounding and rejects over-delivery") {
  ChargingLedger ledger(1);
  ledger.add_request(std::vector<double>{1.0});
  ledger.record(std::vector<double>{1.0 + 1e-12});
  CHECK(ledger.received(0) == 1.0);
  CHECK(ledger.outstanding(0) == 0.0);
  ledger.add_request(std::vector<double>{1.0});
  CHECK_THROWS_AS(ledger.record(std::vector<double>{1.5}), std::logic_error);
  CHECK_THROWS_AS(ledger.record(std::vector<double>{-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(ledger.add_request(std::vector<double>{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ledger.add_request(std::vector<double>{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("charging efficiency over the outstanding request") {
  CHECK(*charging_efficiency(std::vector<double>(4, 0.25), std::vector<double>(4, 0.5)) ==
        Approx(50.0));
  CHECK(*charging_efficiency(std::vector<double>(4, 0.5), std::vector<double>(4, 0.5)) ==
        Approx(100.0));
  CHECK(*charging_efficiency(std::vector<double>(4, 0.0), std::vector<double>(4, 0.5)) == 0.0);
  CHECK_FALSE(charging_efficiency(std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)));
  CHECK_THROWS_AS(charging_efficiency(std::vector<double>(3, 0.0), std::vector<double>(4, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("data-only blocks leave the ledger unchanged") {
  const SystemParams p = SystemParams::defaults(4);
  const CellChannel cell = make_cell(p, 3);
  ChargingLedger ledger(4);
  ledger.add_request(std::vector<double>(4, 0.5));
  const std::vector<UserRequest> req(4, {1e4, 0.5});
  const BlockResult b = run_block(0, BlockMode::kDataOnly, req, ledger, cell, p);
  CHECK(b.offload.has_value());
  CHECK_FALSE(b.charge.has_value());
  CHECK_FALSE(b.efficiency.has_value());
  CHECK(sum(b.received) == 0.0);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(ledger.requested(i) == 0.5);
    CHECK(ledger.received(i) == 0.0);
  }
}

TEST_CASE("charging-only blocks charge for the whole deadline") {
  const SystemParams p = SystemParams::defaults(4);
  const CellChannel cell = make_cell(p, 5);
  ChargingLedger ledger(4);
  const std::vector<UserRequest> req(4, {1e4, 0.5});
  const BlockResult b = run_block(0, BlockMode::kChargingOnly, req, ledger, cell, p);
  CHECK_FALSE(b.offload.has_value());
  REQUIRE(b.charge.has_value());
  CHECK(b.charge_time == p.latency);
  CHECK(b.charge->charge_time == p.latency);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(b.effective_request[i] == Approx(0.5));
    CHECK(b.received[i] <= b.effective_request[i] * (1 + 1e-9));
    CHECK(ledger.received(i) == Approx(b.received[i]));
  }
  CHECK(*b.efficiency == Approx(100.0 * sum(b.received) / 2.0));
}

TEST_CASE("joint blocks charge over the time left by offloading") {
  const SystemParams p = SystemParams::defaults(4);
  const CellChannel cell = make_cell(p, 7);
  ChargingLedger ledger(4);
  const std::vector<UserRequest> req(4, {1e4, 0.5});
  const BlockResult b = run_block(0, BlockMode::kDataAndCharging, req, ledger, cell, p);
  REQUIRE(b.offload.has_value());
  REQUIRE(b.offload->feasible());
  REQUIRE(b.charge.has_value());
  CHECK(b.charge_time == b.offload->times.t_charge);
  CHECK(b.charge_time == Approx(p.latency - b.offload->times.t1 - b.offload->times.t3));
}

TEST_CASE("infeasible offloading skips charging but keeps the request") {
  SystemParams p = SystemParams::defaults(2);
  p.latency = 1e-4;
  p.rederive();
  const CellChannel cell = make_cell(p, 9);
  ChargingLedger ledger(2);
  const std::vector<UserRequest> req(2, {7e4, 0.5});
  const BlockResult b = run_block(0, BlockMode::kDataAndCharging, req, ledger, cell, p);
  CHECK_FALSE(b.offload->feasible());
  CHECK(b.note == "offload infeasible");
  CHECK_FALSE(b.charge.has_value());
  CHECK(b.charge_time == 0.0);
  CHECK(*b.efficiency == 0.0);
  CHECK(ledger.outstanding(0) == Approx(0.5));
}

TEST_CASE("long charging-only blocks fulfil a modest request") {
  SystemParams p = SystemParams::defaults(4);
  p.latency = 1.0;
  p.rederive();
  const NetworkLayout layout = generate_layout(p, 11);
  ChargingLedger ledger(4);
  std::vector<UserRequest> req(4, {0.0, 0.5});
  for (int q = 0; q < 10; ++q) {
    const CellChannel cell = generate_channels(layout, p, 200 + static_cast<std::uint64_t>(q)).cell(0);
    const double before = sum(ledger.outstanding()) + (q == 0 ? 2.0 : 0.0);
    const BlockResult b = run_block(q, BlockMode::kChargingOnly, req, ledger, cell, p);
    CHECK(sum(b.received) <= before * (1 + 1e-9));
    for (auto& r : req) r.energy_req = 0.0;
  }
  CHECK(sum(ledger.outstanding()) < 0.02 * 2.0);
}

TEST_CASE("run_block checks its inputs") {
  const SystemParams p = SystemParams::defaults(2);
  const CellChannel cell = make_cell(p, 1);
  ChargingLedger ledger(3);
  const std::vector<UserRequest> req(2, {1e3, 0.5});
  CHECK_THROWS_AS(run_block(0, BlockMode::kChargingOnly, req, ledger, cell, p), std::invalid_argument);
}

TEST_CASE("derived seeds are stable and separate streams") {
  CHECK(derive_seed(1, 1, 0) == derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 1, 0) != derive_seed(1, 2, 0));
  CHECK(derive_seed(1, 1, 0) != derive_seed(2, 1, 0));
  CHECK(derive_seed(1, 1, 0) != derive_seed(1, 1, 1));
}

TEST_CASE("profile invariants and replay") {
  ExperimentConfig c = small_config();
  c.schedule = {{BlockMode::kDataAndCharging, 3, 1e4, 0.5},
                {BlockMode::kDataOnly, 2, 1e4, 0.0},
                {BlockMode::kChargingOnly, 3, 0.0, 0.5}};
  const auto runs = run_profile(c, 3, Execution::kParallel);
  REQUIRE(runs.size() == 3);
  for (const ProfileRun& run : runs) {
    REQUIRE(run.blocks.size() == 8);
    double last = 0.0;
    for (const ProfileBlock& b : run.blocks) {
      CHECK(b.cumulative_received >= last);
      CHECK(b.cumulative_received == Approx(last + b.received));
      if (b.mode == BlockMode::kDataOnly) {
        CHECK(b.received == 0.0);
        CHECK_FALSE(b.efficiency.has_value());
      }
      CHECK(b.outstanding >= 0.0);
      last = b.cumulative_received;
    }
  }
  const auto serial = run_profile(c, 3, Execution::kSerial);
  for (size_t r = 0; r < 3; ++r) {
    CHECK(serial[r].seed == runs[r].seed);
    for (size_t q = 0; q < 8; ++q) CHECK(serial[r].blocks[q].received == runs[r].blocks[q].received);
  }
  std::ostringstream a;
  std::ostringstream b;
  write_csv(a, profile_rows(runs));
  write_csv(b, profile_rows(run_profile(c, 3, Execution::kParallel)));
  CHECK(a.str() == b.str());
}

TEST_CASE("one value and one seed give schemes x metrics rows") {
  ExperimentConfig c = small_config();
  c.realizations = 1;
  for (SweepAxis axis : {SweepAxis::kData, SweepAxis::kLatency, SweepAxis::kScheme}) {
    c.sweep = SweepSpec{axis, {axis == SweepAxis::kData      ? 1e4
                               : axis == SweepAxis::kLatency ? 0.03
                                                             : 2.0}};
    const auto rows = run_sweep(c);
    CHECK(rows.size() == axis_schemes(axis).size() * sweep_metrics().size());
    for (const CsvRow& r : rows) CHECK(r.status.rfind("error", 0) != 0);
  }
}

TEST_CASE("identical configurations give identical CSV bytes") {
  ExperimentConfig c = small_config();
  c.sweep = SweepSpec{SweepAxis::kData, {1e3, 3e4}};
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream s;
  write_csv(a, run_sweep(c, Execution::kParallel));
  write_csv(b, run_sweep(c, Execution::kParallel));
  write_csv(s, run_sweep(c, Execution::kSerial));
  CHECK(a.str() == b.str());
  CHECK(a.str() == s.str());
  c.seed += 1;
  std::ostringstream other;
  write_csv(other, run_sweep(c));
  CHECK(other.str() != a.str());
}

TEST_CASE("emitted metrics are recomputable from the stored solutions") {
  ExperimentConfig c = small_config();
  c.realizations = 3;
  c.sweep = SweepSpec{SweepAxis::kLatency, {0.02, 0.04}};
  const auto rows = run_sweep(c);
  // Every 97th row, about 1%, plus the first.
  int checked = 0;
  for (size_t idx = 0; idx < rows.size(); idx += 97) {
    const CsvRow& row = rows[idx];
    const int r = static_cast<int>(row.seed - c.seed);
    const auto outcomes = evaluate_point(c, SweepAxis::kLatency, row.axis_value, r);
    const auto it = std::find_if(outcomes.begin(), outcomes.end(),
                                 [&](const SchemeOutcome& o) { return o.scheme == row.scheme; });
    REQUIRE(it != outcomes.end());
    REQUIRE(it->cells.size() == 1);
    const BlockResult& b = it->cells[0];
    double expect = std::nan("");
    if (row.metric == "received_energy") expect = sum(b.received);
    else if (row.metric == "requested_energy") expect = sum(b.effective_request);
    else if (row.metric == "charge_time") expect = b.charge_time;
    else if (row.metric == "transmitted_energy") expect = b.charge ? b.charge->trace_power() * b.charge_time : 0.0;
    else if (row.metric == "charging_efficiency") expect = 100.0 * sum(b.received) / sum(b.effective_request);
    else if (row.metric == "active_beams" && b.charge) expect = b.charge->active_beams;
    else if (row.metric == "weighted_energy" && b.offload && b.offload->feasible())
      expect = b.offload->energy.weighted_total;
    else if (row.metric == "t1" && b.offload && b.offload->feasible()) expect = b.offload->times.t1;
    else expect = metric_value(*it, row.metric);
    if (std::isnan(expect)) {
      CHECK(std::isnan(row.value));
    } else {
      CHECK(row.value == Approx(expect).epsilon(1e-9));
    }
    ++checked;
  }
  CHECK(checked >= 2);
}

TEST_CASE("partial never costs more than binary in the data sweep") {
  ExperimentConfig c = small_config();
  c.params = SystemParams::defaults(4);
  c.realizations = 3;
  c.sweep = SweepSpec{SweepAxis::kData, {6e4}};
  const auto rows = run_sweep(c);
  for (std::uint64_t seed = c.seed; seed < c.seed + 3; ++seed) {
    double partial = std::nan("");
    double binary = std::nan("");
    for (const CsvRow& r : rows) {
      if (r.seed != seed || r.metric != "weighted_energy") continue;
      (r.scheme == "partial" ? partial : binary) = r.value;
    }
    if (!std::isnan(binary)) {
      REQUIRE_FALSE(std::isnan(partial));
      CHECK(partial <= binary * (1 + 1e-9));
    }
  }
}

TEST_CASE("CSV output follows RFC 4180") {
  std::vector<CsvRow> rows = {{"data", 1000, 3, "a,b", "m\"x", std::nan(""), "n/a"},
                              {"data", 0.1, 4, "s", "m", 1.0 / 3.0, "ok"}};
  std::ostringstream out;
  write_csv(out, rows);
  CHECK(out.str() ==
        "axis,axis_value,seed,scheme,metric,value,status\r\n"
        "data,1000,3,\"a,b\",\"m\"\"x\",,n/a\r\n"
        "data,0.1,4,s,m,0.3333333333333333,ok\r\n");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(1e-300) == "1e-300");
}
