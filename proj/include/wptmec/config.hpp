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

// Experiment configuration: a versioned JSON document whose physical
// quantities are SI numbers or unit-annotated strings such as "23 dBm".

#ifndef WPTMEC_CONFIG_HPP_
#define WPTMEC_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wptmec/charge.hpp"
#include "wptmec/model.hpp"
#include "wptmec/offload.hpp"

namespace wptmec {

inline constexpr int kConfigSchemaVersion = 1;

/// A rejected configuration. line() is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

enum class Dimension { kPower, kTime, kFrequency, kBits, kEnergy, kCapacitance, kDecibel };

/// SI value of a quantity: a bare number is taken as SI; a string is
/// "<number> <unit>". Capacitance in pF follows the GHz convention used by
/// the model (1 pF -> 1e-30). Throws std::invalid_argument.
double parse_quantity(std::string_view text, Dimension dimension);

enum class BlockMode { kDataAndCharging, kDataOnly, kChargingOnly };
const char* to_string(BlockMode mode);
BlockMode parse_block_mode(std::string_view name);

enum class SweepAxis { kData, kLatency, kEnergy, kNetworkSize, kScheme };
const char* to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

/// Values a sweep visits when the configuration lists none, in SI units
/// (bits, s, J) or users per cell.
std::vector<double> default_axis_values(SweepAxis axis);

/// A run of consecutive blocks in one mode. Every block adds energy_req to
/// each user's outstanding request.
struct ScheduleEntry {
  BlockMode mode = BlockMode::kDataAndCharging;
  int blocks = 1;
  double data_bits = 0.0;
  double energy_req = 0.0;
};

/// Illustrative profile: joint, data-only, charging-only, joint.
std::vector<ScheduleEntry> default_schedule();

struct SweepSpec {
  SweepAxis axis = SweepAxis::kData;
  std::vector<double> values;
};

struct ExperimentConfig {
  SystemParams params = SystemParams::defaults(4);
  std::uint64_t seed = 1;
  int realizations = 100;
  int spatial_realizations = 200;
  double data_bits = 1e4;
  double energy_req = 0.5;
  std::vector<UserRequest> per_user;  // overrides the uniform request when set
  std::vector<ScheduleEntry> schedule = default_schedule();
  std::optional<SweepSpec> sweep;
  std::filesystem::path out_dir = "out";
  bool strict = false;
  OffloadOptions offload;
  ChargeOptions charge;

  /// One request per user of a cell with K users.
  std::vector<UserRequest> requests(int users_per_cell) const;
};

/// Parses a configuration document. Unknown keys, bad units and violated
/// parameter invariants raise ConfigError with the offending line.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads and parses a file. A missing file raises ConfigError with line 0.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace wptmec

#endif  // WPTMEC_CONFIG_HPP_
