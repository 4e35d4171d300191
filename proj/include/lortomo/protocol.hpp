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

// Measurement protocols as weighted instrumental matrices: standard
// constructions, Lorentz boosting, completion to a POVM, and what the
// completed POVM does to a state.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lortomo/errors.hpp"
#include "lortomo/linalg.hpp"
#include "lortomo/lorentz.hpp"
#include "lortomo/qstate.hpp"

namespace lortomo {

/// Completion operator Lambda0 = I - (1/a0) sum_j t_j Lambda_j.
struct Completion {
  double a0 = 1.0;
  ComplexMatrix lambda0;
};

/// Rows X_j (unit-norm bras) with weights t_j > 0; measurement operator of
/// row j is t_j Lambda_j, Lambda_j = X_j^+ X_j.
class Protocol {
 public:
  static constexpr double kRowNormTolerance = 1e-12;
  static constexpr double kUnityTolerance = 1e-10;

  Protocol(std::size_t dim, std::vector<ComplexRow> rows, std::vector<double> weights,
           std::optional<Completion> completion = std::nullopt)
      : dim_(dim), rows_(std::move(rows)), weights_(std::move(weights)),
        completion_(std::move(completion)) {
    if (dim_ == 0) throw DomainError("Protocol: dimension must be positive");
    if (rows_.empty()) throw DomainError("Protocol: at least one row is required");
    if (rows_.size() != weights_.size()) {
      throw DomainError("Protocol: row count (" + std::to_string(rows_.size()) +
                        ") differs from weight count (" + std::to_string(weights_.size()) + ")");
    }
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      if (static_cast<std::size_t>(rows_[j].size()) != dim_) {
        throw DomainError("Protocol: row " + std::to_string(j) + " has length " +
                          std::to_string(rows_[j].size()) + ", expected " + std::to_string(dim_));
      }
      if (!all_finite(rows_[j])) throw DomainError("Protocol: row " + std::to_string(j) + " is not finite");
      const double norm2 = rows_[j].squaredNorm();
      if (std::abs(norm2 - 1.0) > kRowNormTolerance) {
        throw DomainError("Protocol: row " + std::to_string(j) +
                          " is not unit-norm (|X_j|^2 = " + std::to_string(norm2) + ")");
      }
      if (!std::isfinite(weights_[j]) || !(weights_[j] > 0.0)) {
        throw DomainError("Protocol: weight " + std::to_string(j) + " must be finite and positive");
      }
    }
    if (completion_) validate_completion(*completion_);
  }

  /// Rows given unnormalized; each row's squared norm is folded into its weight.
  static Protocol from_raw_rows(std::size_t dim, const std::vector<ComplexRow>& raw,
                                const std::vector<double>& base_weights) {
    if (raw.size() != base_weights.size()) {
      throw DomainError("Protocol::from_raw_rows: row/weight count mismatch");
    }
    std::vector<ComplexRow> rows;
    std::vector<double> weights;
    rows.reserve(raw.size());
    weights.reserve(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j) {
      const double norm2 = raw[j].squaredNorm();
      if (!(norm2 > 0.0)) throw DomainError("Protocol::from_raw_rows: zero row " + std::to_string(j));
      rows.push_back(raw[j] / std::sqrt(norm2));
      weights.push_back(base_weights[j] * norm2);
    }
    return Protocol(dim, std::move(rows), std::move(weights));
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<ComplexRow>& rows() const { return rows_; }
  const std::vector<double>& weights() const { return weights_; }
  const ComplexRow& row(std::size_t j) const { return rows_.at(j); }
  double weight(std::size_t j) const { return weights_.at(j); }
  const std::optional<Completion>& completion() const { return completion_; }
  bool has_completion() const { return completion_.has_value(); }

  ComplexMatrix projector(std::size_t j) const { return rows_.at(j).adjoint() * rows_.at(j); }

  /// Unit-norm rows stacked into an m x s matrix.
  ComplexMatrix row_matrix() const {
    ComplexMatrix x(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t j = 0; j < size(); ++j) x.row(static_cast<Eigen::Index>(j)) = rows_[j];
    return x;
  }

  /// sqrt(t_j) X_j stacked; X^+ X equals the frame operator.
  ComplexMatrix instrumental_matrix() const {
    ComplexMatrix x = row_matrix();
    for (std::size_t j = 0; j < size(); ++j) x.row(static_cast<Eigen::Index>(j)) *= std::sqrt(weights_[j]);
    return x;
  }

  /// sum_j t_j Lambda_j.
  ComplexMatrix frame_operator() const {
    const ComplexMatrix x = instrumental_matrix();
    return hermitian_part(x.adjoint() * x);
  }

  double total_weight() const {
    double t = 0.0;
    for (double w : weights_) t += w;
    return t;
  }

  Protocol with_completion(Completion c) const { return Protocol(dim_, rows_, weights_, std::move(c)); }
  Protocol without_completion() const { return Protocol(dim_, rows_, weights_); }

 private:
  void validate_completion(const Completion& c) const {
    const auto s = static_cast<Eigen::Index>(dim_);
    if (!std::isfinite(c.a0) || !(c.a0 > 0.0)) {
      throw DomainError("Protocol: completion scale a0 must be finite and positive");
    }
    if (c.lambda0.rows() != s || c.lambda0.cols() != s) {
      throw DomainError("Protocol: completion operator has wrong shape");
    }
    if (!all_finite(c.lambda0)) throw DomainError("Protocol: completion operator is not finite");
    if (max_abs(c.lambda0 - c.lambda0.adjoint()) > kUnityTolerance) {
      throw DomainError("Protocol: completion operator is not Hermitian");
    }
    const double min_eig = hermitian_eigen(c.lambda0).values[s - 1];
    if (min_eig < -kUnityTolerance) {
      throw DomainError("Protocol: completion operator is not PSD (min eigenvalue " +
                        std::to_string(min_eig) + ")");
    }
    const double defect = max_abs(c.lambda0 + frame_operator() / c.a0 - identity(dim_));
    if (defect > kUnityTolerance) {
      throw DomainError("Protocol: Lambda0 + (1/a0) sum t_j Lambda_j = I violated (defect " +
                        std::to_string(defect) + ")");
    }
  }

  std::size_t dim_;
  std::vector<ComplexRow> rows_;
  std::vector<double> weights_;
  std::optional<Completion> completion_;
};

/// PSD operators summing to the identity.
class MeasurementOperatorSet {
 public:
  explicit MeasurementOperatorSet(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw DomainError("MeasurementOperatorSet: empty");
    const Eigen::Index s = ops_.front().rows();
    ComplexMatrix sum = ComplexMatrix::Zero(s, s);
    for (const auto& e : ops_) {
      if (e.rows() != s || e.cols() != s) throw DomainError("MeasurementOperatorSet: shape mismatch");
      sum += e;
    }
    defect_ = max_abs(sum - ComplexMatrix::Identity(s, s));
    if (defect_ > Protocol::kUnityTolerance) {
      throw DomainError("MeasurementOperatorSet: operators do not sum to the identity (defect " +
                        std::to_string(defect_) + ")");
    }
  }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  double unity_defect() const { return defect_; }

 private:
  std::vector<ComplexMatrix> ops_;
  double defect_ = 0.0;
};

/// POVM view of a completed protocol: (t_j/a0) Lambda_j for each row, then
/// Lambda0 last.
inline MeasurementOperatorSet measurement_operators(const Protocol& p) {
  if (!p.has_completion()) throw DomainError("measurement_operators: protocol has no completion");
  const Completion& c = *p.completion();
  std::vector<ComplexMatrix> ops;
  ops.reserve(p.size() + 1);
  for (std::size_t j = 0; j < p.size(); ++j) ops.push_back(p.projector(j) * (p.weight(j) / c.a0));
  ops.push_back(c.lambda0);
  return MeasurementOperatorSet(std::move(ops));
}

/// Four-outcome qubit protocol whose Bloch vectors form a regular
/// tetrahedron; all weights 1, sum t_j Lambda_j = 2 I.
inline Protocol tetrahedron_protocol() {
  const double a = std::sqrt((1.0 + 1.0 / std::sqrt(3.0)) / 2.0);
  const double b = std::sqrt((1.0 - 1.0 / std::sqrt(3.0)) / 2.0);
  const auto e = [](double angle) { return std::polar(1.0, angle); };
  const double q = kPi / 8.0;
  std::vector<ComplexRow> rows(4, ComplexRow(2));
  rows[0] << a * e(q), b * e(-q);
  rows[1] << -b * e(-q), -a * e(q);
  rows[2] << b * e(3 * q), a * e(-3 * q);
  rows[3] << -a * e(-3 * q), -b * e(3 * q);
  return Protocol(2, std::move(rows), std::vector<double>(4, 1.0));
}

/// Six eigenstates of sigma3, sigma1, sigma2 (rows of I, U1, U2), weights 1.
inline Protocol cube_protocol() {
  const double h = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  std::vector<ComplexRow> rows(6, ComplexRow(2));
  rows[0] << 1.0, 0.0;
  rows[1] << 0.0, 1.0;
  rows[2] << h, h;
  rows[3] << h, -h;
  rows[4] << h, -i * h;
  rows[5] << h, i * h;
  return Protocol(2, std::move(rows), std::vector<double>(6, 1.0));
}

namespace detail {

inline ComplexMatrix pauli_string(const std::string& word) {
  const auto& sigma = pauli_matrices();
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char c : word) {
    const ComplexMatrix* f = nullptr;
    switch (c) {
      case 'I': f = &sigma[0]; break;
      case 'X': f = &sigma[1]; break;
      case 'Y': f = &sigma[2]; break;
      case 'Z': f = &sigma[3]; break;
      default: throw DomainError("pauli_string: bad letter");
    }
    ComplexMatrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index col = 0; col < out.cols(); ++col) {
        next.block(2 * r, 2 * col, 2, 2) = out(r, col) * (*f);
      }
    }
    out = std::move(next);
  }
  return out;
}

// Common eigenbasis of a commuting pair (A, B) of Pauli strings, read off
// from A + pi B whose joint eigenvalues +-1 +- pi are distinct.
inline ComplexMatrix joint_eigenbasis(const std::string& a, const std::string& b) {
  const ComplexMatrix m = pauli_string(a) + kPi * pauli_string(b);
  return hermitian_eigen(m).vectors;
}

}  // namespace detail

/// Complete set of s+1 mutually unbiased bases from a partition of the
/// nonidentity Pauli strings into commuting classes. Supported: s = 2, 4.
inline Protocol mub_protocol(std::size_t s) {
  std::vector<ComplexMatrix> bases;
  if (s == 2) {
    for (const char* p : {"Z", "X", "Y"}) bases.push_back(hermitian_eigen(detail::pauli_string(p)).vectors);
  } else if (s == 4) {
    const std::pair<const char*, const char*> classes[] = {
        {"ZI", "IZ"}, {"XI", "IX"}, {"YI", "IY"}, {"XY", "YZ"}, {"YX", "ZY"}};
    for (const auto& [a, b] : classes) bases.push_back(detail::joint_eigenbasis(a, b));
  } else {
    throw DomainError("mub_protocol: unsupported dimension " + std::to_string(s) +
                      " (supported: 2, 4)");
  }
  std::vector<ComplexRow> rows;
  for (const auto& basis : bases) {
    for (Eigen::Index k = 0; k < basis.cols(); ++k) rows.push_back(basis.col(k).adjoint());
  }
  const std::size_t m = rows.size();
  return Protocol(s, std::move(rows), std::vector<double>(m, 1.0));
}

/// X_j -> X_j L, with |X_j L|^2 folded into the weight. The input's
/// completion (if any) no longer applies and is dropped.
inline Protocol boost_protocol(const Protocol& p, const LorentzTransform& l) {
  if (p.dim() != l.dim()) {
    throw DomainError("boost_protocol: dimension mismatch (protocol " + std::to_string(p.dim()) +
                      ", transform " + std::to_string(l.dim()) + ")");
  }
  std::vector<ComplexRow> raw;
  raw.reserve(p.size());
  for (const auto& row : p.rows()) raw.push_back(row * l.matrix());
  return Protocol::from_raw_rows(p.dim(), raw, p.weights());
}

/// a0 = largest eigenvalue of sum t_j Lambda_j, Lambda0 = I - that sum / a0.
inline Protocol complete_to_povm(const Protocol& p) {
  const ComplexMatrix frame = p.frame_operator();
  const double a0 = hermitian_eigen(frame).values[0];
  ComplexMatrix lambda0 = hermitian_part(identity(p.dim()) - frame / a0);
  return p.with_completion(Completion{a0, std::move(lambda0)});
}

/// (p_1, ..., p_m, p_0): row outcome probabilities Tr(rho t_j Lambda_j / a0)
/// followed by the completion outcome Tr(rho Lambda0). rho is
/// trace-normalized first.
inline std::vector<double> outcome_probabilities(const Protocol& p, const DensityMatrix& rho) {
  if (!p.has_completion()) throw DomainError("outcome_probabilities: protocol has no completion");
  if (rho.dim() != p.dim()) throw DomainError("outcome_probabilities: dimension mismatch");
  const DensityMatrix unit = rho.normalized();
  const Completion& c = *p.completion();
  std::vector<double> out;
  out.reserve(p.size() + 1);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const Complex amp = (p.row(j) * unit.matrix() * p.row(j).adjoint())(0, 0);
    out.push_back(amp.real() * p.weight(j) / c.a0);
  }
  out.push_back(real_trace(unit.matrix() * c.lambda0));
  return out;
}

/// Fidelity between rho and its Luders-reduced state sqrt(E) rho sqrt(E) /
/// Tr(E rho) for each POVM element, ordered like outcome_probabilities.
/// Elements that (almost) never fire give std::nullopt.
inline std::vector<std::optional<double>> post_measurement_fidelity(const Protocol& p,
                                                                    const DensityMatrix& rho) {
  const MeasurementOperatorSet povm = measurement_operators(p);
  if (rho.dim() != p.dim()) throw DomainError("post_measurement_fidelity: dimension mismatch");
  const DensityMatrix unit = rho.normalized();
  std::vector<std::optional<double>> out;
  out.reserve(povm.size());
  for (const auto& e : povm.operators()) {
    const double prob = real_trace(e * unit.matrix());
    if (prob < 1e-14) {
      out.emplace_back(std::nullopt);
      continue;
    }
    const ComplexMatrix root = psd_sqrt(e);
    const DensityMatrix reduced(root * unit.matrix() * root / prob);
    out.emplace_back(fidelity(unit, reduced));
  }
  return out;
}

/// The state a protocol is tuned to: (sum t_j Lambda_j)^{-1}, trace-normalized.
/// For a 2-design boosted to the rest frame of rho this is rho itself; for an
/// unboosted 2-design it is the maximally mixed state.
inline DensityMatrix frame_center(const Protocol& p) {
  const ComplexMatrix frame = p.frame_operator();
  const HermitianEigen eig = hermitian_eigen(frame);
  if (!(eig.values[eig.values.size() - 1] > 0.0)) {
    throw CompletenessError("frame_center: frame operator is singular");
  }
  return DensityMatrix(hermitian_function(eig, [](double x) { return 1.0 / x; })).normalized();
}

}  // namespace lortomo
