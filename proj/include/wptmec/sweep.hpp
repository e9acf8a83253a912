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


// Monte-Carlo parameter sweeps emitted as long-format CSV rows
// (axis, axis_value, seed, scheme, metric, value, status).

#ifndef WPTMEC_SWEEP_HPP_
#define WPTMEC_SWEEP_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wptmec/config.hpp"
#include "wptmec/harness.hpp"

namespace wptmec {

struct CsvRow {
  std::string axis;
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  std::string scheme;
  std::string metric;
  double value = 0.0;      // NaN is written as an empty field
  std::string status;      // "ok", "n/a", "offload infeasible" or "error: ..."
};

/// One scheme evaluated at one sweep point: a block per evaluated cell.
struct SchemeOutcome {
  std::string scheme;
  SystemParams params;
  std::vector<BlockResult> cells;
  std::string error;  // set when the evaluation threw
};

/// Metric names emitted for every scheme, in output order.
const std::vector<std::string>& sweep_metrics();

/// Schemes evaluated on an axis, in output order.
std::vector<std::string> axis_schemes(SweepAxis axis);

/// Metric of an outcome; NaN when it does not apply. Energies are summed
/// over the evaluated cells, times averaged.
double metric_value(const SchemeOutcome& outcome, std::string_view metric);

/// Seed of Monte-Carlo realization r.
inline std::uint64_t realization_seed(const ExperimentConfig& config, int r) {
  return config.seed + static_cast<std::uint64_t>(r);
}

/// Realization count of an axis: spatial realizations for network size.
int axis_realizations(const ExperimentConfig& config, SweepAxis axis);

/// All schemes of an axis at one value and one realization.
std::vector<SchemeOutcome> evaluate_point(const ExperimentConfig& config, SweepAxis axis,
                                          double value, int realization);

/// Rows of one evaluated point: schemes x metrics.
std::vector<CsvRow> point_rows(SweepAxis axis, double value, std::uint64_t seed,
                               const std::vector<SchemeOutcome>& outcomes);

/// Runs config.sweep over every value and realization. Rows are ordered by
/// (value, realization, scheme, metric) whatever the execution policy.
std::vector<CsvRow> run_sweep(const ExperimentConfig& config, Execution exec = Execution::kParallel);

/// Single-block run at the configured requests with convergence traces of
/// both solvers. Timing rows are returned separately since they are not
/// reproducible.
struct RunOutput {
  std::vector<CsvRow> rows;
  std::vector<CsvRow> timing;
};
RunOutput run_single(const ExperimentConfig& config, Execution exec = Execution::kParallel);

/// Profile rows: axis "block", scheme = block mode.
std::vector<CsvRow> profile_rows(const std::vector<ProfileRun>& runs);

/// RFC-4180 CSV with a header line and CRLF line ends; numbers in shortest
/// round-trip form, independent of the locale.
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::string format_number(double value);

}  // namespace wptmec

#endif  // WPTMEC_SWEEP_HPP_
