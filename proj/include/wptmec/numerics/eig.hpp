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

#ifndef WPTMEC_NUMERICS_EIG_HPP_
#define WPTMEC_NUMERICS_EIG_HPP_

#include "wptmec/model.hpp"

namespace wptmec {

struct HermitianEigen {
  CMatrix vectors;        // columns are orthonormal eigenvectors
  Eigen::VectorXd values; // real, sorted descending
};

/// Eigendecomposition C = U diag(lambda) U^* of a Hermitian matrix by cyclic
/// complex Jacobi rotations, eigenvalues sorted in descending order.
/// Throws std::invalid_argument if C deviates from Hermitian by more than
/// 1e-10 * max(1, ||C||_F).
HermitianEigen hermitian_eig_desc(const CMatrix& c);

}  // namespace wptmec

#endif  // WPTMEC_NUMERICS_EIG_HPP_
