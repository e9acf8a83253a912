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

#include "wptmec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

namespace wptmec {
namespace {

using nlohmann::json;

struct Unit {
  std::string_view name;
  Dimension dimension;
  std::function<double(double)> to_si;
};

const std::vector<Unit>& units() {
  auto scale = [](double f) { return [f](double v) { return v * f; }; };
  static const std::vector<Unit> table = {
      {"W", Dimension::kPower, scale(1.0)},
      {"mW", Dimension::kPower, scale(1e-3)},
      {"uW", Dimension::kPower, scale(1e-6)},
      {"dBm", Dimension::kPower, [](double v) { return dbm_to_watt(v); }},
      {"dBW", Dimension::kPower, [](double v) { return db_to_linear(v); }},
      {"s", Dimension::kTime, scale(1.0)},
      {"ms", Dimension::kTime, scale(1e-3)},
      {"us", Dimension::kTime, scale(1e-6)},
      {"Hz", Dimension::kFrequency, scale(1.0)},
      {"kHz", Dimension::kFrequency, scale(1e3)},
      {"MHz", Dimension::kFrequency, scale(1e6)},
      {"GHz", Dimension::kFrequency, scale(1e9)},
      {"bit", Dimension::kBits, scale(1.0)},
      {"bits", Dimension::kBits, scale(1.0)},
      {"kbit", Dimension::kBits, scale(1e3)},
      {"kbits", Dimension::kBits, scale(1e3)},
      {"Mbit", Dimension::kBits, scale(1e6)},
      {"Mbits", Dimension::kBits, scale(1e6)},
      {"J", Dimension::kEnergy, scale(1.0)},
      {"mJ", Dimension::kEnergy, scale(1e-3)},
      {"uJ", Dimension::kEnergy, scale(1e-6)},
      {"pF", Dimension::kCapacitance, scale(1e-30)},
      {"dB", Dimension::kDecibel, scale(1.0)},
  };
  return table;
}

int line_of_offset(std::string_view text, size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Best-effort source line of a key path: each key is searched as a quoted
// name followed by ':' after the previous match.
int line_of_path(std::string_view text, const std::vector<std::string>& path) {
  size_t pos = 0;
  size_t found = std::string_view::npos;
  for (const std::string& key : path) {
    const std::string quoted = "\"" + key + "\"";
    size_t at = pos;
    for (;;) {
      at = text.find(quoted, at);
      if (at == std::string_view::npos) break;
      size_t after = at + quoted.size();
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (after < text.size() && text[after] == ':') break;
      at += quoted.size();
    }
    if (at == std::string_view::npos) break;
    found = at;
    pos = at + quoted.size();
  }
  return found == std::string_view::npos ? 0 : line_of_offset(text, found);
}

class Reader {
 public:
  Reader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    std::string where;
    for (const std::string& p : path) where += (where.empty() ? "" : ".") + p;
    throw ConfigError(source_, line_of_path(text_, path),
                      where.empty() ? message : where + ": " + message);
  }

  void require_object(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_object()) fail(path, "expected an object");
  }

  void reject_unknown(const json& j, const std::vector<std::string>& path,
                      const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : j.items()) {
      if (!allowed.count(key)) {
        std::vector<std::string> p = path;
        p.push_back(key);
        fail(p, "unknown key");
      }
    }
  }

  double quantity(const json& j, const std::vector<std::string>& path, Dimension dim) const {
    try {
      if (j.is_number()) return j.get<double>();
      if (j.is_string()) return parse_quantity(j.get<std::string>(), dim);
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
    fail(path, "expected a number or a quantity string");
  }

  double number(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  long long integer(const json& j, const std::vector<std::string>& path, long long lo,
                    long long hi) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const long long v = j.get<long long>();
    if (v < lo || v > hi)
      fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::string string(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

 private:
  std::string_view text_;
  std::string source_;
};

std::vector<std::string> join(std::vector<std::string> path, const std::string& key) {
  path.push_back(key);
  return path;
}

void read_system(const Reader& r, const json& j, SystemParams& p) {
  const std::vector<std::string> base = {"system"};
  r.require_object(j, base);
  r.reject_unknown(j, base,
                   {"antennas", "users_per_cell", "cells", "bandwidth", "latency", "ap_power",
                    "user_power", "cap_gap_ul", "cap_gap_dl", "result_ratio", "energy_weight",
                    "user_cap", "mec_cap", "user_cycles_per_bit", "mec_cycles_per_bit",
                    "user_freq", "mec_freq_per_user", "conv_eff", "noise_ul", "noise_dl",
                    "pathloss_exp", "shadow_std", "area_side"});
  auto at = [&](const char* key) { return join(base, key); };
  auto has = [&](const char* key) { return j.contains(key); };
  if (has("antennas")) p.n_antennas = static_cast<int>(r.integer(j["antennas"], at("antennas"), 1, 4096));
  if (has("users_per_cell"))
    p.users_per_cell = static_cast<int>(r.integer(j["users_per_cell"], at("users_per_cell"), 1, 64));
  if (has("cells")) p.n_cells = static_cast<int>(r.integer(j["cells"], at("cells"), 1, 64));
  if (has("bandwidth")) p.bandwidth = r.quantity(j["bandwidth"], at("bandwidth"), Dimension::kFrequency);
  if (has("latency")) p.latency = r.quantity(j["latency"], at("latency"), Dimension::kTime);
  if (has("ap_power")) p.ap_power = r.quantity(j["ap_power"], at("ap_power"), Dimension::kPower);
  if (has("user_power"))
    p.user_power_max = r.quantity(j["user_power"], at("user_power"), Dimension::kPower);
  if (has("cap_gap_ul")) p.cap_gap_ul = r.number(j["cap_gap_ul"], at("cap_gap_ul"));
  if (has("cap_gap_dl")) p.cap_gap_dl = r.number(j["cap_gap_dl"], at("cap_gap_dl"));
  if (has("result_ratio")) p.result_ratio = r.number(j["result_ratio"], at("result_ratio"));
  if (has("energy_weight")) p.energy_weight = r.number(j["energy_weight"], at("energy_weight"));
  if (has("user_cap")) p.user_cap = r.quantity(j["user_cap"], at("user_cap"), Dimension::kCapacitance);
  if (has("mec_cap")) p.mec_cap = r.quantity(j["mec_cap"], at("mec_cap"), Dimension::kCapacitance);
  if (has("user_cycles_per_bit"))
    p.user_cycles_per_bit = r.number(j["user_cycles_per_bit"], at("user_cycles_per_bit"));
  if (has("mec_cycles_per_bit"))
    p.mec_cycles_per_bit = r.number(j["mec_cycles_per_bit"], at("mec_cycles_per_bit"));
  if (has("user_freq")) p.user_freq = r.quantity(j["user_freq"], at("user_freq"), Dimension::kFrequency);
  if (has("noise_ul")) p.noise_ul = r.quantity(j["noise_ul"], at("noise_ul"), Dimension::kPower);
  if (has("noise_dl")) p.noise_dl = r.quantity(j["noise_dl"], at("noise_dl"), Dimension::kPower);
  if (has("pathloss_exp")) p.pathloss_exp = r.number(j["pathloss_exp"], at("pathloss_exp"));
  if (has("shadow_std")) p.shadow_std_db = r.quantity(j["shadow_std"], at("shadow_std"), Dimension::kDecibel);
  if (has("area_side")) p.area_side = r.number(j["area_side"], at("area_side"));

  // Derived fields follow K, B and T_d; explicit overrides come after.
  p.rederive();
  if (has("mec_freq_per_user"))
    p.mec_freq_per_user =
        r.quantity(j["mec_freq_per_user"], at("mec_freq_per_user"), Dimension::kFrequency);
  if (has("conv_eff")) {
    const json& c = j["conv_eff"];
    if (c.is_number()) {
      p.conv_eff.assign(static_cast<size_t>(p.users_per_cell), c.get<double>());
    } else if (c.is_array()) {
      p.conv_eff.clear();
      for (const json& x : c) p.conv_eff.push_back(r.number(x, at("conv_eff")));
    } else {
      r.fail(at("conv_eff"), "expected a number or an array of numbers");
    }
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(base, e.what());
  }
}

UserRequest read_request(const Reader& r, const json& j, const std::vector<std::string>& path) {
  r.require_object(j, path);
  r.reject_unknown(j, path, {"data", "energy"});
  UserRequest q;
  if (j.contains("data")) q.data_bits = r.quantity(j["data"], join(path, "data"), Dimension::kBits);
  if (j.contains("energy"))
    q.energy_req = r.quantity(j["energy"], join(path, "energy"), Dimension::kEnergy);
  if (q.data_bits < 0) r.fail(join(path, "data"), "must be >= 0");
  if (q.energy_req < 0) r.fail(join(path, "energy"), "must be >= 0");
  return q;
}

ScheduleEntry read_schedule_entry(const Reader& r, const json& j) {
  const std::vector<std::string> path = {"schedule"};
  r.require_object(j, path);
  r.reject_unknown(j, path, {"mode", "blocks", "data", "energy"});
  ScheduleEntry e;
  if (!j.contains("mode")) r.fail(path, "every entry needs a mode");
  try {
    e.mode = parse_block_mode(r.string(j["mode"], join(path, "mode")));
  } catch (const std::invalid_argument& ex) {
    r.fail(join(path, "mode"), ex.what());
  }
  if (j.contains("blocks")) e.blocks = static_cast<int>(r.integer(j["blocks"], join(path, "blocks"), 1, 1000000));
  if (j.contains("data")) e.data_bits = r.quantity(j["data"], join(path, "data"), Dimension::kBits);
  if (j.contains("energy")) e.energy_req = r.quantity(j["energy"], join(path, "energy"), Dimension::kEnergy);
  if (e.data_bits < 0 || e.energy_req < 0) r.fail(path, "requests must be >= 0");
  if (e.mode == BlockMode::kDataOnly && e.energy_req != 0.0)
    r.fail(join(path, "energy"), "data-only blocks carry no energy request");
  if (e.mode == BlockMode::kChargingOnly && e.data_bits != 0.0)
    r.fail(join(path, "data"), "charging-only blocks carry no data");
  return e;
}

SweepSpec read_sweep(const Reader& r, const json& j) {
  const std::vector<std::string> path = {"sweep"};
  r.require_object(j, path);
  r.reject_unknown(j, path, {"axis", "values"});
  if (!j.contains("axis")) r.fail(path, "axis is required");
  SweepSpec s;
  try {
    s.axis = parse_sweep_axis(r.string(j["axis"], join(path, "axis")));
  } catch (const std::invalid_argument& ex) {
    r.fail(join(path, "axis"), ex.what());
  }
  if (!j.contains("values")) {
    s.values = default_axis_values(s.axis);
    return s;
  }
  const json& v = j["values"];
  if (!v.is_array() || v.empty()) r.fail(join(path, "values"), "expected a non-empty array");
  for (const json& x : v) {
    switch (s.axis) {
      case SweepAxis::kData:
        s.values.push_back(r.quantity(x, join(path, "values"), Dimension::kBits));
        break;
      case SweepAxis::kLatency:
        s.values.push_back(r.quantity(x, join(path, "values"), Dimension::kTime));
        break;
      case SweepAxis::kEnergy:
        s.values.push_back(r.quantity(x, join(path, "values"), Dimension::kEnergy));
        break;
      case SweepAxis::kNetworkSize:
      case SweepAxis::kScheme:
        s.values.push_back(static_cast<double>(r.integer(x, join(path, "values"), 1, 20)));
        break;
    }
    if (!(s.values.back() > 0.0)) r.fail(join(path, "values"), "values must be positive");
  }
  return s;
}

void read_solver(const Reader& r, const json& j, ExperimentConfig& c) {
  const std::vector<std::string> path = {"solver"};
  r.require_object(j, path);
  r.reject_unknown(j, path,
                   {"newton_tolerance", "max_newton_iterations", "dual_tolerance",
                    "max_dual_iterations", "dual_step_scale", "charge_tolerance",
                    "max_charge_iterations", "charge_step_scale"});
  auto positive = [&](const char* key) {
    const double v = r.number(j[key], join(path, key));
    if (!(v > 0.0)) r.fail(join(path, key), "must be positive");
    return v;
  };
  auto count = [&](const char* key) {
    return static_cast<int>(r.integer(j[key], join(path, key), 1, 100000000));
  };
  if (j.contains("newton_tolerance")) c.offload.newton_tolerance = positive("newton_tolerance");
  if (j.contains("max_newton_iterations")) c.offload.max_newton_iterations = count("max_newton_iterations");
  if (j.contains("dual_tolerance")) c.offload.dual_tolerance = positive("dual_tolerance");
  if (j.contains("max_dual_iterations")) c.offload.max_dual_iterations = count("max_dual_iterations");
  if (j.contains("dual_step_scale")) c.offload.dual_step_scale = positive("dual_step_scale");
  if (j.contains("charge_tolerance")) c.charge.tolerance = positive("charge_tolerance");
  if (j.contains("max_charge_iterations")) c.charge.max_iterations = count("max_charge_iterations");
  if (j.contains("charge_step_scale")) c.charge.step_scale = positive("charge_step_scale");
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         message),
      line_(line) {}

double parse_quantity(std::string_view text, Dimension dimension) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || !std::isfinite(value))
    throw std::invalid_argument("cannot read a number from '" + std::string(text) + "'");
  std::string_view unit(ptr, static_cast<size_t>(end - ptr));
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.front()))) unit.remove_prefix(1);
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) unit.remove_suffix(1);
  if (unit.empty()) return value;
  for (const Unit& u : units())
    if (u.name == unit && u.dimension == dimension) return u.to_si(value);
  throw std::invalid_argument("unit '" + std::string(unit) + "' does not fit this quantity");
}

const char* to_string(BlockMode mode) {
  switch (mode) {
    case BlockMode::kDataAndCharging:
      return "data+charging";
    case BlockMode::kDataOnly:
      return "data-only";
    case BlockMode::kChargingOnly:
      return "charging-only";
  }
  return "?";
}

BlockMode parse_block_mode(std::string_view name) {
  for (BlockMode m : {BlockMode::kDataAndCharging, BlockMode::kDataOnly, BlockMode::kChargingOnly})
    if (name == to_string(m)) return m;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (data+charging, data-only, charging-only)");
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kData:
      return "data";
    case SweepAxis::kLatency:
      return "latency";
    case SweepAxis::kEnergy:
      return "energy";
    case SweepAxis::kNetworkSize:
      return "network-size";
    case SweepAxis::kScheme:
      return "scheme";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::kData, SweepAxis::kLatency, SweepAxis::kEnergy,
                      SweepAxis::kNetworkSize, SweepAxis::kScheme})
    if (name == to_string(a)) return a;
  throw std::invalid_argument("unknown axis '" + std::string(name) +
                              "' (data, latency, energy, network-size, scheme)");
}

std::vector<double> default_axis_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kData:
      return {1e3, 1e4, 2e4, 3e4, 4e4, 5e4, 6e4, 7e4};
    case SweepAxis::kLatency:
      return {20e-3, 30e-3, 40e-3, 50e-3, 60e-3};
    case SweepAxis::kEnergy:
      return {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    case SweepAxis::kNetworkSize:
      return {1, 2, 4, 6, 8, 10};
    case SweepAxis::kScheme:
      return {2, 4, 6, 8, 10};
  }
  return {};
}

std::vector<ScheduleEntry> default_schedule() {
  return {{BlockMode::kDataAndCharging, 10, 1e4, 0.5},
          {BlockMode::kDataOnly, 10, 1e4, 0.0},
          {BlockMode::kChargingOnly, 10, 0.0, 0.5},
          {BlockMode::kDataAndCharging, 10, 1e4, 0.5}};
}

std::vector<UserRequest> ExperimentConfig::requests(int users_per_cell) const {
  if (!per_user.empty()) {
    if (static_cast<int>(per_user.size()) != users_per_cell)
      throw std::invalid_argument("per-user requests do not match the users per cell");
    return per_user;
  }
  return std::vector<UserRequest>(static_cast<size_t>(users_per_cell), {data_bits, energy_req});
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                      "malformed JSON");
  }
  const Reader r(text, source);
  r.require_object(doc, {});
  r.reject_unknown(doc, {},
                   {"schema_version", "system", "seed", "realizations", "spatial_realizations",
                    "requests", "schedule", "sweep", "output", "strict", "solver"});
  if (!doc.contains("schema_version")) r.fail({}, "schema_version is required");
  if (r.integer(doc["schema_version"], {"schema_version"}, 0, 1000) != kConfigSchemaVersion)
    r.fail({"schema_version"}, "unsupported version (expected " +
                                   std::to_string(kConfigSchemaVersion) + ")");

  ExperimentConfig c;
  if (doc.contains("system")) read_system(r, doc["system"], c.params);
  if (doc.contains("seed"))
    c.seed = static_cast<std::uint64_t>(r.integer(doc["seed"], {"seed"}, 0, (1LL << 62)));
  if (doc.contains("realizations"))
    c.realizations = static_cast<int>(r.integer(doc["realizations"], {"realizations"}, 1, 1000000));
  if (doc.contains("spatial_realizations"))
    c.spatial_realizations = static_cast<int>(
        r.integer(doc["spatial_realizations"], {"spatial_realizations"}, 1, 1000000));
  if (doc.contains("requests")) {
    const json& q = doc["requests"];
    const std::vector<std::string> path = {"requests"};
    r.require_object(q, path);
    r.reject_unknown(q, path, {"data", "energy", "per_user"});
    json uniform = json::object();
    for (const char* key : {"data", "energy"})
      if (q.contains(key)) uniform[key] = q[key];
    const UserRequest u = read_request(r, uniform, path);
    if (q.contains("data")) c.data_bits = u.data_bits;
    if (q.contains("energy")) c.energy_req = u.energy_req;
    if (q.contains("per_user")) {
      const json& list = q["per_user"];
      if (!list.is_array()) r.fail(join(path, "per_user"), "expected an array");
      for (const json& item : list) c.per_user.push_back(read_request(r, item, join(path, "per_user")));
      if (static_cast<int>(c.per_user.size()) != c.params.users_per_cell)
        r.fail(join(path, "per_user"), "needs one entry per user of a cell");
    }
  }
  if (doc.contains("schedule")) {
    const json& s = doc["schedule"];
    if (!s.is_array() || s.empty()) r.fail({"schedule"}, "expected a non-empty array");
    c.schedule.clear();
    for (const json& e : s) c.schedule.push_back(read_schedule_entry(r, e));
  }
  if (doc.contains("sweep")) c.sweep = read_sweep(r, doc["sweep"]);
  if (doc.contains("output")) c.out_dir = r.string(doc["output"], {"output"});
  if (doc.contains("strict")) {
    if (!doc["strict"].is_boolean()) r.fail({"strict"}, "expected true or false");
    c.strict = doc["strict"].get<bool>();
  }
  if (doc.contains("solver")) read_solver(r, doc["solver"], c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace wptmec
