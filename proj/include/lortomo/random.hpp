// Copyright 2026 The lortomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lortomo/linalg.hpp"
#include "lortomo/qstate.hpp"

namespace lortomo {

/// SplitMix64 finalizer; used to derive independent per-task seeds from a
/// master seed and a counter.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename Rng>
ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    g.data()[i] = Complex(re, im);
  }
  return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the R-diagonal
/// phases divided out).
template <typename Rng>
ComplexMatrix random_unitary(std::size_t s, Rng& rng) {
  const ComplexMatrix g = random_ginibre(s, s, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * identity(s);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

/// Trace-one state U diag(weights) U^+ with Haar U.
template <typename Rng>
DensityMatrix random_state_with_spectrum(const std::vector<double>& weights, Rng& rng) {
  const std::size_t s = weights.size();
  const ComplexMatrix u = random_unitary(s, rng);
  RealVector w(static_cast<Eigen::Index>(s));
  double total = 0.0;
  for (std::size_t k = 0; k < s; ++k) total += weights[k];
  for (std::size_t k = 0; k < s; ++k) w[static_cast<Eigen::Index>(k)] = weights[k] / total;
  return DensityMatrix(u * w.cast<Complex>().asDiagonal() * u.adjoint());
}

/// Random trace-one state of the given rank (induced Hilbert-Schmidt measure).
template <typename Rng>
DensityMatrix random_state(std::size_t s, std::size_t rank, Rng& rng) {
  const ComplexMatrix g = random_ginibre(s, rank, rng);
  const ComplexMatrix m = g * g.adjoint();
  return DensityMatrix(m / real_trace(m));
}

}  // namespace lortomo
