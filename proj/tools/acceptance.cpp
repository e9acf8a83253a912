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


// Acceptance run at full scale: one pass/fail line per criterion. The exit
// status is non-zero when a property check fails; unmet claims are
// reported on their line.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "wptmec/validation.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 20260101;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--quick") {
      quick = true;
    } else if (arg == "--seed" && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::cerr << "usage: acceptance [--quick] [--seed N]\n";
      return 2;
    }
  }
  const wptmec::ValidationScale scale = quick ? wptmec::ValidationScale::quick() : wptmec::ValidationScale::full();
  int passed = 0;
  int total = 0;
  bool properties = true;
  for (const wptmec::Criterion& c : wptmec::acceptance_criteria()) {
    ++total;
    wptmec::CriterionResult result;
    const auto start = std::chrono::steady_clock::now();
    try {
      result = c.run(scale, seed);
    } catch (const std::exception& e) {
      result.checks.push_back({"criterion ran to completion", wptmec::CheckKind::kProperty, false, e.what()});
    }
    result.id = c.id;
    result.title = c.title;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (result.passed()) ++passed;
    properties = properties && result.properties_passed();
    std::cout << wptmec::summary_line(result) << std::endl;
  }
  std::cout << passed << '/' << total << " criteria pass; property checks "
            << (properties ? "all hold" : "VIOLATED") << std::endl;
  return properties ? 0 : 1;
}
