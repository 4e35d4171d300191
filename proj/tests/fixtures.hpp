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

// Reference values and independent oracles used across the test
// suites. Nothing here calls into the library's numerics except for the
// basic matrix types.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lortomo/lortomo.hpp"

namespace fixtures {

using lortomo::Complex;
using lortomo::ComplexMatrix;
using lortomo::ComplexRow;
using lortomo::ComplexVector;
using lortomo::DensityMatrix;
using lortomo::kPi;

// ---------------------------------------------------------------------------
// Reference values

// Almost-pure example state: principal component at theta = pi/4,
// phi = 5 pi/3 with weight 0.99, orthogonal complement with weight 0.01.
inline constexpr double kPrincipalTheta = kPi / 4;
inline constexpr double kPrincipalPhi = 5 * kPi / 3;
inline constexpr double kPrincipalWeight = 0.99;

inline ComplexVector principal_component() {
  ComplexVector c0(2);
  c0 << std::polar(std::cos(kPrincipalTheta / 2), -kPrincipalPhi / 2),
      std::polar(std::sin(kPrincipalTheta / 2), kPrincipalPhi / 2);
  return c0;
}

inline DensityMatrix example_state() {
  const ComplexVector c0 = principal_component();
  ComplexVector c1(2);
  c1 << -std::conj(c0[1]), std::conj(c0[0]);
  return DensityMatrix(kPrincipalWeight * c0 * c0.adjoint() + (1 - kPrincipalWeight) * c1 * c1.adjoint());
}

// The same state as printed to five decimals.
inline ComplexMatrix example_state_printed() {
  ComplexMatrix m(2, 2);
  m << 0.84648, Complex(0.17324, 0.30006), Complex(0.17324, -0.30006), 0.15351;
  return m;
}

inline std::vector<ComplexRow> rows_from(const std::vector<std::array<Complex, 2>>& v) {
  std::vector<ComplexRow> out;
  for (const auto& r : v) {
    ComplexRow row(2);
    row << r[0], r[1];
    out.push_back(row);
  }
  return out;
}

// Tetrahedron instrumental matrix, printed to five decimals.
inline std::vector<ComplexRow> tetrahedron_rows_printed() {
  return rows_from({{Complex(0.82047, 0.33985), Complex(0.42471, -0.17592)},
                    {Complex(-0.42471, 0.17592), Complex(-0.82047, -0.33985)},
                    {Complex(0.17592, 0.42471), Complex(0.33985, -0.82047)},
                    {Complex(-0.33985, 0.82047), Complex(-0.17592, -0.42471)}});
}

// Tetrahedron boosted to the example state's rest frame.
inline std::vector<ComplexRow> boosted_tetrahedron_rows_printed() {
  return rows_from({{Complex(0.27927, 0.36463), Complex(0.54059, -0.70486)},
                    {Complex(0.19104, -0.19964), Complex(-0.90837, -0.31388)},
                    {Complex(0.2146, 0.32545), Complex(0.38736, -0.83545)},
                    {Complex(0.13795, 0.43802), Complex(0.26592, -0.84758)}});
}

inline const std::vector<double> kBoostedTetrahedronWeights = {3.7506, 4.2893, 9.7821, 2.2788};
inline constexpr double kBoostedTetrahedronWeightSum = 20.1008;

// Post-measurement fidelity of each outcome (completion outcome last).
inline const std::vector<double> kTetrahedronFidelityColumn = {0.026529, 0.023197, 0.010172, 0.043663, 0.99};
inline const std::vector<double> kCubeFidelityColumn = {0.064488, 0.011695, 0.030298, 0.014705,
                                                        0.012374, 0.049515, 0.99};

inline constexpr double kQubitSuperefficiency = 25.25;
inline constexpr double kTwoQubitSuperefficiency = 47.032;
inline const std::vector<double> kTwoQubitSpectrum = {0.99, 1.0 / 300, 1.0 / 300, 1.0 / 300};

// Two-qubit state with the spectrum above in a fixed Haar-random basis.
inline DensityMatrix two_qubit_state(std::uint64_t seed = 2024) {
  std::mt19937_64 rng(seed);
  return lortomo::random_state_with_spectrum(kTwoQubitSpectrum, rng);
}

// ---------------------------------------------------------------------------
// Oracles

inline const std::array<ComplexMatrix, 4>& paulis() {
  static const std::array<ComplexMatrix, 4> s = [] {
    std::array<ComplexMatrix, 4> m;
    for (auto& x : m) x = ComplexMatrix::Zero(2, 2);
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  return s;
}

// P_k = Tr(rho sigma_k).
inline std::array<double, 4> stokes_oracle(const ComplexMatrix& rho) {
  std::array<double, 4> p{};
  for (int k = 0; k < 4; ++k) p[k] = (rho * paulis()[k]).trace().real();
  return p;
}

// Qubit fidelity of trace-normalized states: Tr(a b) + 2 sqrt(det a det b).
inline double qubit_fidelity_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix an = a / a.trace().real();
  const ComplexMatrix bn = b / b.trace().real();
  // det at rounding level means rank one; its sqrt would be pure noise.
  auto det = [](const ComplexMatrix& m) {
    const double d = m.determinant().real();
    return d > 64 * std::numeric_limits<double>::epsilon() ? d : 0.0;
  };
  const double da = det(an);
  const double db = det(bn);
  return (an * bn).trace().real() + 2.0 * std::sqrt(da * db);
}

// Minkowski metric diag(1, -1, -1, -1).
inline Eigen::Matrix4d minkowski() { return Eigen::Vector4d(1, -1, -1, -1).asDiagonal(); }

// Random 2 x 2 complex matrix rescaled to unit determinant; the entries'
// spread makes strong boosts common.
template <typename Rng>
ComplexMatrix random_unit_det(Rng& rng, double spread = 1.0) {
  std::normal_distribution<double> normal(0.0, spread);
  for (;;) {
    ComplexMatrix m(2, 2);
    for (int i = 0; i < 4; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m.data()[i] = Complex(re, im);
    }
    const Complex det = m.determinant();
    if (std::abs(det) < 1e-3) continue;
    return m / std::sqrt(det);
  }
}

// Random full-rank qubit state with Bloch radius in [0.05, 0.95].
template <typename Rng>
DensityMatrix random_qubit_state(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::array<double, 3> d{normal(rng), normal(rng), normal(rng)};
  const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  const double r = unit(rng);
  ComplexMatrix m = 0.5 * paulis()[0];
  for (int k = 0; k < 3; ++k) m += 0.5 * r * d[k] / len * paulis()[k + 1];
  return DensityMatrix(m);
}

// Full-rank state with Haar eigenvectors and eigenvalues 0.7 Dirichlet(1)
// + 0.3 / s, so every eigenvalue is at least 0.3 / s.
template <typename Rng>
DensityMatrix random_full_rank_state(std::size_t s, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(s);
  double total = 0.0;
  for (auto& x : w) total += (x = expo(rng));
  for (auto& x : w) x = 0.7 * x / total + 0.3 / static_cast<double>(s);
  return lortomo::random_state_with_spectrum(w, rng);
}

// Largest |entry| difference between two rows lists.
inline double max_row_difference(const std::vector<ComplexRow>& a, const std::vector<ComplexRow>& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, (a[j] - b[j]).cwiseAbs().maxCoeff());
  return worst;
}


// ---------------------------------------------------------------------------
// Reconstruction fixtures: protocol, true state and reconstruction rank.

inline lortomo::Protocol boosted_tetrahedron() {
  return lortomo::boost_protocol(lortomo::tetrahedron_protocol(), lortomo::center_of_mass_boost(example_state()));
}

struct MleFixture {
  std::string name;
  lortomo::Protocol protocol;
  DensityMatrix state;
  std::size_t rank;
};

inline std::vector<MleFixture> mle_fixtures() {
  std::mt19937_64 rng(99);
  const DensityMatrix example = example_state();
  const DensityMatrix two_qubit = two_qubit_state();
  std::vector<MleFixture> out = {
      {"tetrahedron/example", lortomo::tetrahedron_protocol(), example, 2},
      {"boosted tetrahedron/example", boosted_tetrahedron(), example, 2},
      {"cube/example", lortomo::cube_protocol(), example, 2},
      {"boosted cube/example",
       lortomo::boost_protocol(lortomo::cube_protocol(), lortomo::center_of_mass_boost(example)), example, 2},
      {"mub2/mixed", lortomo::mub_protocol(2), DensityMatrix::maximally_mixed(2).normalized(), 2},
      {"mub4/two-qubit", lortomo::mub_protocol(4), two_qubit, 4},
      {"boosted mub4/two-qubit",
       lortomo::boost_protocol(lortomo::mub_protocol(4), lortomo::center_of_mass_boost(two_qubit)), two_qubit, 4},
  };
  for (int i = 0; i < 3; ++i) {
    out.push_back({"mub4/random", lortomo::mub_protocol(4), random_full_rank_state(4, rng), 4});
    out.push_back({"tetrahedron/random", lortomo::tetrahedron_protocol(), random_qubit_state(rng), 2});
  }
  // Pure qubit state at rank 1.
  const ComplexVector c0 = principal_component();
  out.push_back({"tetrahedron/pure", lortomo::tetrahedron_protocol(), DensityMatrix(c0 * c0.adjoint()), 1});
  out.push_back({"mub4/rank-2", lortomo::mub_protocol(4), lortomo::random_state(4, 2, rng), 2});
  return out;
}

}  // namespace fixtures
