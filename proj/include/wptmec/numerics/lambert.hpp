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

#ifndef WPTMEC_NUMERICS_LAMBERT_HPP_
#define WPTMEC_NUMERICS_LAMBERT_HPP_

namespace wptmec {

/// Principal branch W_0 of the Lambert function: the w >= -1 with
/// w * exp(w) = x. Throws std::domain_error for x < -1/e - 1e-15; inputs in
/// [-1/e - 1e-15, -1/e] map to the branch point -1.
double lambert_w0(double x);

/// 1 + W_0((r - 1) / e) for r >= 0, accurate to full relative precision as
/// r -> 0 where the direct argument loses digits to cancellation. This is the
/// form in which W_0 enters the closed-form transmission times.
double lambert_w0_shifted(double r);

}  // namespace wptmec

#endif  // WPTMEC_NUMERICS_LAMBERT_HPP_
