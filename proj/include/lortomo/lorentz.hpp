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

// Spinor Lorentz transforms: boosts, their 4x4 tensor form on Stokes
// vectors, and the s-dimensional transform to a state's center-of-mass frame.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "lortomo/errors.hpp"
#include "lortomo/linalg.hpp"
#include "lortomo/qstate.hpp"

namespace lortomo {

/// Square complex matrix with unit determinant.
class LorentzTransform {
 public:
  static constexpr double kDeterminantTolerance = 1e-10;

  explicit LorentzTransform(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      throw DomainError("LorentzTransform: matrix must be square and non-empty");
    }
    if (!all_finite(m_)) throw DomainError("LorentzTransform: non-finite entry");
    // Tolerance is scaled by the Hadamard bound (product of column norms),
    // the natural size of the rounding error in det for strong boosts.
    double hadamard = 1.0;
    for (Eigen::Index k = 0; k < m_.cols(); ++k) hadamard *= m_.col(k).norm();
    const Complex det = m_.determinant();
    if (std::abs(det - 1.0) > kDeterminantTolerance * std::max(1.0, hadamard)) {
      throw DomainError("LorentzTransform: det(L) = 1 violated (|det - 1| = " +
                        std::to_string(std::abs(det - 1.0)) + ")");
    }
  }

  static LorentzTransform identity_transform(std::size_t s) {
    return LorentzTransform(identity(s));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

  LorentzTransform inverse() const { return LorentzTransform(m_.inverse()); }

  friend LorentzTransform operator*(const LorentzTransform& a, const LorentzTransform& b) {
    if (a.dim() != b.dim()) throw DomainError("LorentzTransform: dimension mismatch");
    return LorentzTransform(a.m_ * b.m_);
  }

 private:
  ComplexMatrix m_;
};

/// Qubit boost: rapidity theta >= 0 along unit direction n.
class Boost {
 public:
  Boost(double rapidity, std::array<double, 3> direction)
      : rapidity_(rapidity), direction_(direction) {
    if (!std::isfinite(rapidity) || rapidity < 0.0) {
      throw DomainError("Boost: rapidity must be finite and >= 0");
    }
    const double norm = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] +
                                  direction[2] * direction[2]);
    if (std::abs(norm - 1.0) > 1e-12) {
      throw DomainError("Boost: direction must be a unit vector (|n| = " +
                        std::to_string(norm) + ")");
    }
  }

  double rapidity() const { return rapidity_; }
  const std::array<double, 3>& direction() const { return direction_; }
  double velocity() const { return std::tanh(rapidity_); }
  double gamma() const { return std::cosh(rapidity_); }

 private:
  double rapidity_;
  std::array<double, 3> direction_;
};

inline double rapidity_from_velocity(double v) {
  if (!(v >= 0.0 && v < 1.0)) {
    throw DomainError("rapidity_from_velocity: velocity must lie in [0, 1)");
  }
  return std::atanh(v);
}

inline double velocity_from_rapidity(double theta) { return std::tanh(theta); }

inline double gamma_from_velocity(double v) {
  if (!(v >= 0.0 && v < 1.0)) {
    throw DomainError("gamma_from_velocity: velocity must lie in [0, 1)");
  }
  return 1.0 / std::sqrt(1.0 - v * v);
}

/// L = cosh(theta/2) I - sinh(theta/2) (sigma . n).
inline LorentzTransform boost_operator(const Boost& b) {
  const auto& sigma = pauli_matrices();
  const auto& n = b.direction();
  const ComplexMatrix sn = n[0] * sigma[1] + n[1] * sigma[2] + n[2] * sigma[3];
  const double half = 0.5 * b.rapidity();
  return LorentzTransform(std::cosh(half) * sigma[0] - std::sinh(half) * sn);
}

/// rho -> L rho L^+.
inline DensityMatrix apply_transform(const LorentzTransform& l, const DensityMatrix& rho) {
  if (l.dim() != rho.dim()) {
    throw DomainError("apply_transform: dimension mismatch (L is " + std::to_string(l.dim()) +
                      ", rho is " + std::to_string(rho.dim()) + ")");
  }
  return DensityMatrix(l.matrix() * rho.matrix() * l.matrix().adjoint());
}

/// Real 4x4 G with stokes(L rho L^+) = G stokes(rho), written in terms of the
/// entries alpha, beta, gamma, delta of L.
inline Eigen::Matrix4d tensor_representation(const LorentzTransform& l) {
  if (l.dim() != 2) {
    throw DomainError("tensor_representation: only defined for qubit transforms (dim 2)");
  }
  const Complex a = l.matrix()(0, 0);
  const Complex b = l.matrix()(0, 1);
  const Complex g = l.matrix()(1, 0);
  const Complex d = l.matrix()(1, 1);
  const Complex ac = std::conj(a), bc = std::conj(b), gc = std::conj(g), dc = std::conj(d);
  const Complex i(0.0, 1.0);

  Eigen::Matrix<Complex, 4, 4> m;
  m(0, 0) = ac * a + bc * b + gc * g + dc * d;
  m(0, 1) = ac * b + bc * a + gc * d + dc * g;
  m(0, 2) = i * (ac * b - bc * a + gc * d - dc * g);
  m(0, 3) = ac * a - bc * b + gc * g - dc * d;

  m(1, 0) = ac * g + bc * d + gc * a + dc * b;
  m(1, 1) = ac * d + bc * g + gc * b + dc * a;
  m(1, 2) = i * (ac * d - bc * g + gc * b - dc * a);
  m(1, 3) = ac * g - bc * d + gc * a - dc * b;

  m(2, 0) = -i * (ac * g + bc * d - gc * a - dc * b);
  m(2, 1) = -i * (ac * d + bc * g - gc * b - dc * a);
  m(2, 2) = ac * d - bc * g - gc * b + dc * a;
  m(2, 3) = -i * (ac * g - bc * d - gc * a + dc * b);

  m(3, 0) = ac * a + bc * b - gc * g - dc * d;
  m(3, 1) = ac * b + bc * a - gc * d - dc * g;
  m(3, 2) = i * (ac * b - bc * a - gc * d + dc * g);
  m(3, 3) = ac * a - bc * b - gc * g + dc * d;

  // Every entry is real by construction; drop the rounding-level imaginary part.
  return 0.5 * m.real();
}

inline constexpr double kRestFrameMinEigenvalue = 1e-10;

namespace detail {

// L = c * rho^{-1/2} with c fixing det L = 1, from the (trace-normalized)
// spectrum. Equivalent to (1/sqrt(s)) psi^{-1} rescaled by det^{1/s} with
// psi the Hermitian square root.
inline LorentzTransform rest_frame_from_spectrum(const HermitianEigen& eig) {
  const auto s = static_cast<double>(eig.values.size());
  double log_det = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) log_det += std::log(eig.values[k]);
  const double scale = std::exp(log_det / (2.0 * s));
  ComplexMatrix l = hermitian_function(eig, [&](double x) { return scale / std::sqrt(x); });
  // Remove the residual determinant drift so det L = 1 to rounding.
  const Complex det = l.determinant();
  l /= std::pow(det, 1.0 / s);
  return LorentzTransform(std::move(l));
}

}  // namespace detail

/// Transform taking rho to its center-of-mass frame: L rho L^+ =
/// (det rho)^{1/s} I. L is Hermitian positive definite (a boost without
/// rotation). Near-pure states have no rest frame and are rejected.
inline LorentzTransform center_of_mass_boost(const DensityMatrix& rho) {
  if (!rho.is_physical()) {
    throw DomainError("center_of_mass_boost: state is not positive semidefinite");
  }
  const DensityMatrix unit = rho.normalized();
  if (unit.min_eigenvalue() <= kRestFrameMinEigenvalue) {
    throw PureStateError(
        "center_of_mass_boost: no rest frame for pure state (min eigenvalue " +
        std::to_string(unit.min_eigenvalue()) +
        "); like a photon, a pure state cannot be brought to rest");
  }
  return detail::rest_frame_from_spectrum(rho.eigen());
}

/// Rest-frame transform of rho after raising every trace-normalized
/// eigenvalue to at least `floor` (then renormalizing).
inline LorentzTransform center_of_mass_boost_floored(const DensityMatrix& rho, double floor) {
  if (!(floor > 0.0) || floor * static_cast<double>(rho.dim()) >= 1.0) {
    throw DomainError("center_of_mass_boost_floored: floor must lie in (0, 1/s)");
  }
  HermitianEigen eig = rho.normalized().eigen();
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    eig.values[k] = std::max(eig.values[k], floor);
  }
  eig.values /= eig.values.sum();
  return detail::rest_frame_from_spectrum(eig);
}

}  // namespace lortomo
