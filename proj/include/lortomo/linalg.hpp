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

// Dense complex linear algebra shared by every module. Dimensions here are
// tiny (s <= 16), so everything is dynamic-size Eigen and favors clarity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "lortomo/errors.hpp"

namespace lortomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRow = Eigen::RowVectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;  // columns
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex z = m(r, c);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

// Multiplies a vector by a phase so that its first entry with modulus above
// `cutoff` is real and positive.
inline void fix_phase(Eigen::Ref<ComplexVector> v, double cutoff = 1e-12) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cutoff) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      v[i] = Complex(std::abs(v[i]), 0.0);
      return;
    }
  }
}

inline HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw DomainError("hermitian_eigen: eigensolver did not converge");
  }
  const Eigen::Index n = m.rows();
  HermitianEigen out{RealVector(n), ComplexMatrix(n, n)};
  // Eigen returns ascending order; a stable sort keeps its order among ties.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return solver.eigenvalues()[a] > solver.eigenvalues()[b];
  });
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values[k] = solver.eigenvalues()[src];
    out.vectors.col(k) = solver.eigenvectors().col(src);
    fix_phase(out.vectors.col(k));
  }
  return out;
}

template <typename F>
ComplexMatrix hermitian_function(const HermitianEigen& eig, F&& f) {
  RealVector mapped(eig.values.size());
  for (Eigen::Index k = 0; k < mapped.size(); ++k) mapped[k] = f(eig.values[k]);
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& m, F&& f) {
  return hermitian_function(hermitian_eigen(m), std::forward<F>(f));
}

/// Principal square root of a PSD matrix; negative rounding noise is clipped.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  return hermitian_function(m, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

inline double real_trace(const ComplexMatrix& m) { return m.trace().real(); }

inline ComplexMatrix identity(std::size_t s) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(s),
                                 static_cast<Eigen::Index>(s));
}

/// Real coordinates of a Hermitian matrix in the basis
/// {E_aa} ∪ {E_ab + E_ba} ∪ {i(E_ab - E_ba)} (a < b); the map is linear and
/// injective, so it is used for real span/rank computations.
inline RealVector hermitian_coordinates(const ComplexMatrix& h) {
  const Eigen::Index s = h.rows();
  RealVector x(s * s);
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < s; ++a) x[k++] = h(a, a).real();
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = a + 1; b < s; ++b) {
      x[k++] = h(a, b).real();
      x[k++] = h(a, b).imag();
    }
  }
  return x;
}

inline ComplexMatrix hermitian_from_coordinates(const RealVector& x, Eigen::Index s) {
  ComplexMatrix h = ComplexMatrix::Zero(s, s);
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < s; ++a) h(a, a) = x[k++];
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = a + 1; b < s; ++b) {
      const Complex z(x[k], x[k + 1]);
      k += 2;
      h(a, b) = z;
      h(b, a) = std::conj(z);
    }
  }
  return h;
}

/// Numerical rank from singular values, relative cutoff.
inline std::size_t numerical_rank(const RealMatrix& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<RealMatrix> svd(m);
  const RealVector& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * sv[0]) ++r;
  }
  return r;
}

}  // namespace lortomo
