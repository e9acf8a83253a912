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


// Command-line front end: single runs, sweeps, scheme comparison, block
// profiles and a quick-scale validation.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wptmec/config.hpp"
#include "wptmec/harness.hpp"
#include "wptmec/sweep.hpp"
#include "wptmec/validation.hpp"

namespace {

using wptmec::CsvRow;
using wptmec::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Thrown for command-line values the parser cannot check on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> realizations;
  bool quiet = false;
  bool strict = false;
  bool serial = false;
};

ExperimentConfig load(const CommonOptions& opts) {
  ExperimentConfig config;
  if (!opts.config_path.empty()) config = wptmec::load_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out_dir) config.out_dir = *opts.out_dir;
  if (opts.realizations) {
    if (*opts.realizations < 1) throw UsageError("--realizations must be at least 1");
    config.realizations = *opts.realizations;
    config.spatial_realizations = *opts.realizations;
  }
  if (opts.strict) config.strict = true;
  return config;
}

wptmec::Execution execution(const CommonOptions& opts) {
  return opts.serial ? wptmec::Execution::kSerial : wptmec::Execution::kParallel;
}

std::filesystem::path write_rows(const ExperimentConfig& config, const std::string& name,
                                 const std::vector<CsvRow>& rows) {
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path path = config.out_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  wptmec::write_csv(out, rows);
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return path;
}

int infeasible_count(const std::vector<CsvRow>& rows) {
  int n = 0;
  for (const CsvRow& row : rows)
    if (row.metric == "feasible" && row.status == "offload infeasible") ++n;
  return n;
}

int errored_count(const std::vector<CsvRow>& rows) {
  int n = 0;
  for (const CsvRow& row : rows)
    if (row.metric == "feasible" && row.status.rfind("error", 0) == 0) ++n;
  return n;
}

/// Reports the output and applies strict mode.
int finish(const CommonOptions& opts, const ExperimentConfig& config, const std::filesystem::path& path,
           const std::vector<CsvRow>& rows) {
  const int infeasible = infeasible_count(rows);
  const int errors = errored_count(rows);
  if (!opts.quiet) {
    std::cout << "wrote " << rows.size() << " rows to " << path.string() << '\n';
    if (infeasible > 0) std::cout << infeasible << " evaluations with infeasible offloading\n";
    if (errors > 0) std::cout << errors << " evaluations raised errors\n";
  }
  if (errors > 0) return kExitFailure;
  if (config.strict && infeasible > 0) {
    std::cerr << "strict mode: " << infeasible << " infeasible evaluations\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_run(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const wptmec::RunOutput out = wptmec::run_single(config, execution(opts));
  const auto path = write_rows(config, "run.csv", out.rows);
  write_rows(config, "run_timing.csv", out.timing);
  return finish(opts, config, path, out.rows);
}

int cmd_sweep(const CommonOptions& opts, const std::string& axis_name, const std::vector<std::string>& values) {
  ExperimentConfig config = load(opts);
  wptmec::SweepSpec spec = config.sweep.value_or(wptmec::SweepSpec{});
  if (!axis_name.empty()) {
    try {
      spec.axis = wptmec::parse_sweep_axis(axis_name);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    if (!config.sweep || config.sweep->axis != spec.axis) spec.values.clear();
  } else if (!config.sweep) {
    throw UsageError("sweep needs --axis or a sweep section in the configuration");
  }
  if (!values.empty()) {
    spec.values.clear();
    for (const std::string& v : values) {
      try {
        spec.values.push_back(std::stod(v));
      } catch (const std::exception&) {
        throw UsageError("bad --values entry: " + v);
      }
    }
  }
  if (spec.values.empty()) spec.values = wptmec::default_axis_values(spec.axis);
  config.sweep = spec;
  const auto rows = wptmec::run_sweep(config, execution(opts));
  const auto path = write_rows(config, std::string("sweep_") + wptmec::to_string(spec.axis) + ".csv", rows);
  return finish(opts, config, path, rows);
}

int cmd_compare(const CommonOptions& opts) {
  ExperimentConfig config = load(opts);
  config.sweep = wptmec::SweepSpec{wptmec::SweepAxis::kScheme,
                                   wptmec::default_axis_values(wptmec::SweepAxis::kScheme)};
  const auto rows = wptmec::run_sweep(config, execution(opts));
  const auto path = write_rows(config, "compare_schemes.csv", rows);
  return finish(opts, config, path, rows);
}

int cmd_profile(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const auto runs = wptmec::run_profile(config, config.realizations, execution(opts));
  const auto rows = wptmec::profile_rows(runs);
  const auto path = write_rows(config, "profile.csv", rows);
  return finish(opts, config, path, rows);
}

int cmd_validate(const CommonOptions& opts, bool full) {
  const ExperimentConfig config = load(opts);
  const wptmec::ValidationScale scale = full ? wptmec::ValidationScale::full() : wptmec::ValidationScale::quick();
  bool properties = true;
  for (const wptmec::Criterion& c : wptmec::acceptance_criteria()) {
    const auto start = std::chrono::steady_clock::now();
    wptmec::CriterionResult result = c.run(scale, config.seed);
    result.id = c.id;
    result.title = c.title;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    properties = properties && result.properties_passed();
    if (!opts.quiet) std::cout << wptmec::summary_line(result) << std::endl;
  }
  if (!opts.quiet)
    std::cout << (properties ? "all property checks hold" : "property check violated") << '\n';
  return properties ? kExitOk : kExitFailure;
}

void add_common(CLI::App* app, CommonOptions& opts) {
  app->add_option("--config", opts.config_path, "JSON configuration file");
  app->add_option("--seed", opts.seed, "Base seed");
  app->add_option("--out", opts.out_dir, "Output directory");
  app->add_option("--realizations", opts.realizations, "Monte-Carlo and spatial realization count");
  app->add_flag("--quiet", opts.quiet, "Suppress progress output");
  app->add_flag("--strict", opts.strict, "Exit non-zero when any evaluation is infeasible");
  app->add_flag("--serial", opts.serial, "Run the serial reference instead of the parallel kernels");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint wireless power transfer and partial MEC offloading"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string axis;
  std::vector<std::string> values;
  bool full = false;

  auto* run = app.add_subcommand("run", "Single block with solver traces");
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep along one axis");
  auto* compare = app.add_subcommand("compare-schemes", "Charging schemes across network sizes");
  auto* profile = app.add_subcommand("profile", "Multi-block charging profile");
  auto* validate = app.add_subcommand("validate", "Acceptance checks at reduced scale");
  for (CLI::App* sub : {run, sweep, compare, profile, validate}) add_common(sub, opts);
  sweep->add_option("--axis", axis, "data, latency, energy, network-size or scheme");
  sweep->add_option("--values", values, "Axis values in SI units")->delimiter(',');
  validate->add_flag("--full", full, "Use the full acceptance scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(opts);
    if (*sweep) return cmd_sweep(opts, axis, values);
    if (*compare) return cmd_compare(opts);
    if (*profile) return cmd_profile(opts);
    return cmd_validate(opts, full);
  } catch (const wptmec::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
