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

#include "wptmec/numerics/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace wptmec {
namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm_sq(const CMatrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += std::norm(a(i, j));
  return sum;
}

}  // namespace

HermitianEigen hermitian_eig_desc(const CMatrix& c) {
  const Eigen::Index n = c.rows();
  if (c.cols() != n) throw std::invalid_argument("hermitian_eig_desc: matrix is not square");
  const double scale = std::max(1.0, c.norm());
  if ((c - c.adjoint()).norm() > 1e-10 * scale)
    throw std::invalid_argument("hermitian_eig_desc: matrix is not Hermitian");

  // Work on the exactly Hermitian part.
  CMatrix a = 0.5 * (c + c.adjoint());
  CMatrix v = CMatrix::Identity(n, n);
  const double target = std::pow(1e-15 * std::max(a.norm(), 1e-300), 2);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm_sq(a) <= target) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Rotate the phase of index q so that a(p, q) becomes real and
        // positive, then apply a real Jacobi rotation.
        const Complex phase = apq / mag;  // e^{i phi}
        const Complex conj_phase = std::conj(phase);
        a.col(q) *= conj_phase;
        a.row(q) *= phase;
        v.col(q) *= conj_phase;

        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;

        for (Eigen::Index r = 0; r < n; ++r) {
          const Complex arp = a(r, p);
          const Complex arq = a(r, q);
          a(r, p) = cs * arp - sn * arq;
          a(r, q) = sn * arp + cs * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const Complex apr = a(p, r);
          const Complex aqr = a(q, r);
          a(p, r) = cs * apr - sn * aqr;
          a(q, r) = sn * apr + cs * aqr;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        for (Eigen::Index r = 0; r < n; ++r) {
          const Complex vrp = v(r, p);
          const Complex vrq = v(r, q);
          v(r, p) = cs * vrp - sn * vrq;
          v(r, q) = sn * vrp + cs * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() > a(j, j).real();
  });
  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<size_t>(k)]);
  }
  return out;
}

}  // namespace wptmec
