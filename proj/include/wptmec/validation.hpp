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


// The acceptance suite: oracle equivalence, invariants and the directional
// behaviour of every experiment, each as a named criterion made of checks.

#ifndef WPTMEC_VALIDATION_HPP_
#define WPTMEC_VALIDATION_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wptmec {

enum class CheckKind {
  kProperty,  // must hold for a correct implementation
  kClaim,     // a directional experimental result
};

struct Check {
  std::string name;
  CheckKind kind = CheckKind::kProperty;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
  bool properties_passed() const;
};

/// Sample sizes of the suite.
struct ValidationScale {
  int lp_instances = 100;
  int co_instances = 20;
  int kkt_settings = 10;
  int feasibility_runs = 100;
  int ordering_realizations = 50;
  int dominance_realizations = 30;
  int profile_realizations = 20;
  int latency_realizations = 50;
  int convergence_runs = 100;

  static ValidationScale full() { return {}; }
  static ValidationScale quick();
};

struct Criterion {
  int id;
  std::string title;
  std::function<CriterionResult(const ValidationScale&, std::uint64_t seed)> run;
};

/// Criteria 1 to 12 in order.
const std::vector<Criterion>& acceptance_criteria();

/// One line per criterion: "[PASS] 3 title: detail" or "[FAIL] ...".
std::string summary_line(const CriterionResult& result);

}  // namespace wptmec

#endif  // WPTMEC_VALIDATION_HPP_
