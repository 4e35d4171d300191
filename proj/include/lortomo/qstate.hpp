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

// Density matrices normalized to intensity, Minkowski-Stokes vectors,
// purification and Uhlmann fidelity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "lortomo/errors.hpp"
#include "lortomo/linalg.hpp"

namespace lortomo {

/// Hermitian, intensity-normalized density matrix (trace = P0, not
/// necessarily 1). Construction symmetrizes the input; positivity is checked
/// and recorded but not enforced, so non-physical probes can still be built.
class DensityMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;
  static constexpr double kPsdTolerance = 1e-10;

  explicit DensityMatrix(const ComplexMatrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw DomainError("DensityMatrix: matrix must be square and non-empty");
    }
    if (!all_finite(m)) throw DomainError("DensityMatrix: non-finite entry");
    const double asym = max_abs(m - m.adjoint());
    if (asym > 1e-8 * std::max(1.0, max_abs(m))) {
      throw DomainError("DensityMatrix: matrix is not Hermitian (max |m - m^+| = " +
                        std::to_string(asym) + ")");
    }
    matrix_ = hermitian_part(m);
    eigen_ = hermitian_eigen(matrix_);
  }

  /// Same as the constructor but rejects matrices that are not PSD.
  static DensityMatrix physical(const ComplexMatrix& m) {
    DensityMatrix rho(m);
    if (!rho.is_physical()) {
      throw DomainError("DensityMatrix: not positive semidefinite (min eigenvalue " +
                        std::to_string(rho.min_eigenvalue()) + ")");
    }
    return rho;
  }

  static DensityMatrix maximally_mixed(std::size_t s) {
    return DensityMatrix(identity(s) / static_cast<double>(s));
  }

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double intensity() const { return real_trace(matrix_); }
  const HermitianEigen& eigen() const { return eigen_; }
  double max_eigenvalue() const { return eigen_.values[0]; }
  double min_eigenvalue() const { return eigen_.values[eigen_.values.size() - 1]; }

  bool is_physical() const {
    return min_eigenvalue() >= -kPsdTolerance * std::max(1.0, std::abs(intensity()));
  }

  /// Number of eigenvalues above `tol` times the intensity.
  std::size_t numerical_rank(double tol = 1e-10) const {
    const double cut = tol * std::max(intensity(), 0.0);
    std::size_t r = 0;
    for (Eigen::Index k = 0; k < eigen_.values.size(); ++k) {
      if (eigen_.values[k] > cut) ++r;
    }
    return r;
  }

  DensityMatrix normalized() const {
    const double p0 = intensity();
    if (!(p0 > 0.0)) throw DomainError("DensityMatrix: cannot normalize zero-trace matrix");
    return DensityMatrix(matrix_ / p0);
  }

 private:
  ComplexMatrix matrix_;
  HermitianEigen eigen_;
};

/// (P0, P1, P2, P3); P0 is the intensity, Pk = Tr(rho sigma_k).
struct StokesVector {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;

  std::array<double, 4> components() const { return {p0, p1, p2, p3}; }
  double bloch_length() const { return std::sqrt(p1 * p1 + p2 * p2 + p3 * p3); }
  // Squared interval P0^2 - |P|^2; the squared "mass" of the effective particle.
  double interval() const { return p0 * p0 - (p1 * p1 + p2 * p2 + p3 * p3); }
};

/// s x r matrix psi with psi psi^+ = rho.
class AmplitudeMatrix {
 public:
  explicit AmplitudeMatrix(ComplexMatrix psi) : psi_(std::move(psi)) {
    if (psi_.cols() < 1 || psi_.cols() > psi_.rows()) {
      throw DomainError("AmplitudeMatrix: rank must satisfy 1 <= r <= s");
    }
    if (!all_finite(psi_)) throw DomainError("AmplitudeMatrix: non-finite entry");
  }
  std::size_t dim() const { return static_cast<std::size_t>(psi_.rows()); }
  std::size_t rank() const { return static_cast<std::size_t>(psi_.cols()); }
  const ComplexMatrix& matrix() const { return psi_; }
  DensityMatrix density() const { return DensityMatrix(psi_ * psi_.adjoint()); }

 private:
  ComplexMatrix psi_;
};

inline const std::array<ComplexMatrix, 4>& pauli_matrices() {
  static const std::array<ComplexMatrix, 4> sigma = [] {
    const Complex i(0.0, 1.0);
    std::array<ComplexMatrix, 4> out;
    for (auto& m : out) m = ComplexMatrix::Zero(2, 2);
    out[0] << 1.0, 0.0, 0.0, 1.0;
    out[1] << 0.0, 1.0, 1.0, 0.0;
    out[2] << 0.0, -i, i, 0.0;
    out[3] << 1.0, 0.0, 0.0, -1.0;
    return out;
  }();
  return sigma;
}

/// rho = 1/2 [[P0+P3, P1-iP2], [P1+iP2, P0-P3]]. The result may be
/// non-physical when |P| > P0; check `is_physical()`.
inline DensityMatrix density_from_stokes(const StokesVector& p) {
  for (double v : p.components()) {
    if (!std::isfinite(v)) throw DomainError("density_from_stokes: non-finite component");
  }
  ComplexMatrix m(2, 2);
  m << Complex(p.p0 + p.p3, 0.0), Complex(p.p1, -p.p2),
       Complex(p.p1, p.p2), Complex(p.p0 - p.p3, 0.0);
  return DensityMatrix(m * 0.5);
}

inline StokesVector stokes_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw DomainError("stokes_from_density: Stokes parameters need a qubit (dim 2), got dim " +
                      std::to_string(rho.dim()));
  }
  const ComplexMatrix& m = rho.matrix();
  // Closed forms of Tr(rho sigma_k) for Hermitian m.
  return StokesVector{m(0, 0).real() + m(1, 1).real(), 2.0 * m(1, 0).real(),
                      2.0 * m(1, 0).imag(), m(0, 0).real() - m(1, 1).real()};
}

/// Lorentz-invariant of a state: P0^2 - |P|^2 = 4 det(rho) for qubits,
/// det(rho) for s > 2.
inline double interval(const DensityMatrix& rho) {
  const double det = rho.matrix().determinant().real();
  return rho.dim() == 2 ? 4.0 * det : det;
}

/// Canonical purification: columns sqrt(lambda_k) v_k for the r largest
/// eigenpairs, each eigenvector phased so its first nonzero entry is real
/// positive.
inline AmplitudeMatrix purify(const DensityMatrix& rho, std::size_t r) {
  const std::size_t s = rho.dim();
  if (r < 1 || r > s) throw DomainError("purify: rank must satisfy 1 <= r <= s");
  const double cut = DensityMatrix::kPsdTolerance * std::max(1.0, rho.intensity());
  const HermitianEigen& eig = rho.eigen();
  for (std::size_t k = r; k < s; ++k) {
    if (eig.values[static_cast<Eigen::Index>(k)] > cut) {
      throw DomainError("purify: rank " + std::to_string(r) +
                        " discards eigenvalue " +
                        std::to_string(eig.values[static_cast<Eigen::Index>(k)]));
    }
  }
  ComplexMatrix psi(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(r));
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(r); ++k) {
    psi.col(k) = eig.vectors.col(k) * std::sqrt(std::max(eig.values[k], 0.0));
  }
  return AmplitudeMatrix(std::move(psi));
}

struct FidelityReport {
  double value = 0.0;
  double first_scale = 1.0;   // intensity of the first argument before renormalizing
  double second_scale = 1.0;
  bool renormalized = false;  // true when either intensity differed from 1
};

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) rho0 sqrt(rho)))^2 of the
/// trace-normalized arguments.
inline FidelityReport fidelity_report(const DensityMatrix& rho, const DensityMatrix& rho0) {
  if (rho.dim() != rho0.dim()) {
    throw DomainError("fidelity: dimension mismatch (" + std::to_string(rho.dim()) + " vs " +
                      std::to_string(rho0.dim()) + ")");
  }
  FidelityReport out;
  out.first_scale = rho.intensity();
  out.second_scale = rho0.intensity();
  if (!(out.first_scale > 0.0) || !(out.second_scale > 0.0)) {
    throw DomainError("fidelity: states must have positive trace");
  }
  out.renormalized = std::abs(out.first_scale - 1.0) > 1e-12 ||
                     std::abs(out.second_scale - 1.0) > 1e-12;
  // sqrt(F) is the trace norm of sqrt(rho) sqrt(rho0). Eigenvalues at the
  // rounding level are zeroed first: their square roots (~1e-8) would
  // otherwise dominate the error for rank-deficient states.
  auto root = [](const DensityMatrix& m, double scale) {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(m.max_eigenvalue(), 0.0);
    return hermitian_function(m.eigen(), [&](double x) { return x > floor ? std::sqrt(x / scale) : 0.0; });
  };
  const ComplexMatrix product = root(rho, out.first_scale) * root(rho0, out.second_scale);
  const double tr = Eigen::JacobiSVD<ComplexMatrix>(product).singularValues().sum();
  out.value = std::clamp(tr * tr, 0.0, 1.0);
  return out;
}

inline double fidelity(const DensityMatrix& rho, const DensityMatrix& rho0) {
  return fidelity_report(rho, rho0).value;
}

/// 1/2 ||a - b||_1 of the raw matrices.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("trace_distance: dimension mismatch");
  const HermitianEigen eig = hermitian_eigen(a.matrix() - b.matrix());
  return 0.5 * eig.values.cwiseAbs().sum();
}

}  // namespace lortomo
