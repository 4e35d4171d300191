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

// Maximum-likelihood reconstruction over rank-r states rho = c c^+ (c is an
// s x r amplitude matrix) for Poisson counts with a free overall intensity.
//
// Stationarity of the likelihood in c reads  J(c) c = S c  with
//   S    = sum_j t_j Lambda_j                  (frame operator)
//   J(c) = sum_j (k_j / lambda_j(c)) Lambda_j, lambda_j(c) = |X_j c|^2,
// and is solved by the relaxed fixed-point iteration
//   c <- (1 - alpha) c + alpha S^{-1} J(c) c,
// with alpha halved until the likelihood does not decrease and grown again
// after every accepted step, and c rescaled after each step to the intensity that maximizes the
// likelihood along that ray (sum_j t_j lambda_j = sum_j k_j).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lortomo/counts.hpp"
#include "lortomo/errors.hpp"
#include "lortomo/linalg.hpp"
#include "lortomo/protocol.hpp"
#include "lortomo/qstate.hpp"

namespace lortomo {

enum class Initializer { mixed_plus_noise, linear_inversion };

struct ReconstructionOptions {
  std::size_t rank = 0;  // 0 means full rank (r = s)
  std::size_t max_iterations = 10000;
  double tolerance = 1e-10;           // relative log-likelihood change
  double residual_tolerance = 1e-8;   // ||J c - S c|| / ||c||
  double damping = 0.6;         // initial step length alpha
  double max_step = 8.0;        // alpha grows after accepted steps up to this (over-relaxation)
  Initializer initializer = Initializer::linear_inversion;
  bool record_trace = false;  // keep the log-likelihood of every accepted step
};

struct ReconstructionResult {
  DensityMatrix estimate;  // trace 1
  ComplexMatrix amplitudes;  // c at the fitted intensity, estimate ~ c c^+
  std::size_t iterations = 0;
  double log_likelihood = 0.0;
  double residual = 0.0;  // stationarity ||J c - S c|| / ||c|| at the estimate
  bool converged = false;
  std::vector<double> trace;  // with record_trace: start point, then each accepted step
};

struct CompletenessReport {
  bool complete = false;
  std::size_t span_dimension = 0;
  std::size_t required = 0;  // (2s - r) r
};

/// Real dimension of span{t_j Lambda_j} against the (2s - r) r parameters of
/// a rank-r state.
inline CompletenessReport completeness_check(const Protocol& p, std::size_t r) {
  const std::size_t s = p.dim();
  if (r < 1 || r > s) throw DomainError("completeness_check: rank must satisfy 1 <= r <= s");
  RealMatrix gram(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(s * s));
  for (std::size_t j = 0; j < p.size(); ++j) {
    gram.row(static_cast<Eigen::Index>(j)) =
        hermitian_coordinates(p.projector(j) * p.weight(j)).transpose();
  }
  CompletenessReport rep;
  rep.span_dimension = numerical_rank(gram);
  rep.required = (2 * s - r) * r;
  rep.complete = rep.span_dimension >= rep.required;
  return rep;
}

/// Poisson log-likelihood sum_j [k_j ln mu_j - mu_j] with intensities
/// mu_j = n t_j lambda_j(rho) / sum_i t_i lambda_i(rho), n taken from the
/// record. Returns -infinity when a row with counts has mu_j = 0.
inline double log_likelihood(const Protocol& p, const CountRecord& counts, const DensityMatrix& rho) {
  if (counts.counts.size() != p.size()) throw DomainError("log_likelihood: count/row mismatch");
  if (rho.dim() != p.dim()) throw DomainError("log_likelihood: dimension mismatch");
  std::vector<double> mu(p.size());
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double lambda = (p.row(j) * rho.matrix() * p.row(j).adjoint())(0, 0).real();
    mu[j] = p.weight(j) * std::max(lambda, 0.0);
    total += mu[j];
  }
  if (!(total > 0.0)) throw DomainError("log_likelihood: all intensities vanish");
  double ll = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    mu[j] *= counts.n / total;
    if (counts.counts[j] > 0.0) {
      if (mu[j] <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += counts.counts[j] * std::log(mu[j]);
    }
    ll -= mu[j];
  }
  return ll;
}

namespace detail {

// Working data of one reconstruction: everything is matrix-shaped so a
// single iteration is a handful of small dense products.
class MleProblem {
 public:
  MleProblem(const Protocol& p, const CountRecord& counts)
      : x_(p.row_matrix()), t_(static_cast<Eigen::Index>(p.size())),
        k_(static_cast<Eigen::Index>(p.size())) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      t_[static_cast<Eigen::Index>(j)] = p.weight(j);
      k_[static_cast<Eigen::Index>(j)] = counts.counts[j];
    }
    total_counts_ = k_.sum();
    const ComplexMatrix frame = p.frame_operator();
    const HermitianEigen eig = hermitian_eigen(frame);
    frame_ = frame;
    const double cut = 1e-12 * eig.values[0];
    frame_inverse_ = hermitian_function(eig, [&](double v) { return v > cut ? 1.0 / v : 0.0; });
  }

  double total_counts() const { return total_counts_; }

  RealVector lambdas(const ComplexMatrix& c) const { return (x_ * c).rowwise().squaredNorm(); }

  // Rescales c so that sum_j t_j lambda_j = sum_j k_j.
  void rescale(ComplexMatrix& c) const {
    const double predicted = t_.dot(lambdas(c));
    if (predicted > 0.0) c *= std::sqrt(total_counts_ / predicted);
  }

  // Log-likelihood up to a c-independent constant, at c's own intensity.
  double log_likelihood(const ComplexMatrix& c) const {
    const RealVector lam = lambdas(c);
    double ll = 0.0;
    for (Eigen::Index j = 0; j < lam.size(); ++j) {
      const double mu = t_[j] * std::max(lam[j], 1e-300);
      if (k_[j] > 0.0) ll += k_[j] * std::log(mu);
      ll -= mu;
    }
    return ll;
  }

  // log_likelihood(next) - log_likelihood(c) evaluated term by term, so it
  // stays accurate when the difference is far below the likelihood's ulp.
  double log_likelihood_change(const ComplexMatrix& c, const ComplexMatrix& next) const {
    const RealVector a = lambdas(c);
    const RealVector b = lambdas(next);
    double d = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      const double la = std::max(a[j], 1e-300);
      const double lb = std::max(b[j], 1e-300);
      if (k_[j] > 0.0) d += k_[j] * std::log1p((lb - la) / la);
      d -= t_[j] * (lb - la);
    }
    return d;
  }

  // J(c) c.
  ComplexMatrix likelihood_operator(const ComplexMatrix& c) const {
    const ComplexMatrix xc = x_ * c;
    RealVector ratio = xc.rowwise().squaredNorm();
    for (Eigen::Index j = 0; j < ratio.size(); ++j) ratio[j] = k_[j] / std::max(ratio[j], 1e-300);
    const ComplexMatrix weighted = ratio.cast<Complex>().asDiagonal() * xc;
    return x_.adjoint() * weighted;
  }

  // S^{-1} J(c) c.
  ComplexMatrix update(const ComplexMatrix& c) const { return frame_inverse_ * likelihood_operator(c); }

  // ||J(c) c - S c|| / ||c||.
  double stationarity(const ComplexMatrix& c) const {
    return (likelihood_operator(c) - frame_ * c).norm() / c.norm();
  }

  // Unconstrained least-squares fit of the intensity-scaled state.
  ComplexMatrix linear_inversion() const {
    const Eigen::Index s = x_.cols();
    const Eigen::Index m = x_.rows();
    RealMatrix design(m, s * s);
    for (Eigen::Index p = 0; p < s * s; ++p) {
      RealVector unit = RealVector::Zero(s * s);
      unit[p] = 1.0;
      const ComplexMatrix basis = hermitian_from_coordinates(unit, s);
      design.col(p) = t_.cwiseProduct((x_ * basis * x_.adjoint()).diagonal().real());
    }
    const RealVector coords = design.completeOrthogonalDecomposition().solve(k_);
    return hermitian_from_coordinates(coords, s);
  }

 private:
  ComplexMatrix x_;
  RealVector t_;
  RealVector k_;
  double total_counts_ = 0.0;
  ComplexMatrix frame_;
  ComplexMatrix frame_inverse_;
};

inline ComplexMatrix initial_amplitudes(const MleProblem& prob, std::size_t s, std::size_t r,
                                        Initializer init) {
  const auto si = static_cast<Eigen::Index>(s);
  const auto ri = static_cast<Eigen::Index>(r);
  if (init == Initializer::linear_inversion) {
    HermitianEigen eig = hermitian_eigen(prob.linear_inversion());
    const double top = eig.values[0];
    if (top > 0.0) {
      // Zero columns of c are fixed points of the update, so keep every
      // retained eigenvalue away from zero.
      ComplexMatrix c(si, ri);
      for (Eigen::Index k = 0; k < ri; ++k) {
        c.col(k) = eig.vectors.col(k) * std::sqrt(std::max(eig.values[k], 1e-3 * top));
      }
      return c;
    }
  }
  // Maximally mixed start plus a small fixed perturbation.
  std::mt19937_64 rng(0x5EEDu);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix c = ComplexMatrix::Zero(si, ri);
  for (Eigen::Index k = 0; k < ri; ++k) c(k, k) = 1.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    c.data()[i] += 0.05 * Complex(re, im);
  }
  return c;
}

}  // namespace detail

/// Maximum-likelihood estimate of a rank-r state from protocol counts.
/// Throws CompletenessError when the protocol cannot determine a rank-r
/// state; a run that hits max_iterations is returned with converged = false.
inline ReconstructionResult mle_reconstruct(const Protocol& p, const CountRecord& counts,
                                            const ReconstructionOptions& opts = {}) {
  const std::size_t s = p.dim();
  const std::size_t r = opts.rank == 0 ? s : opts.rank;
  if (r > s) throw DomainError("mle_reconstruct: rank exceeds dimension");
  if (counts.counts.size() != p.size()) {
    throw DomainError("mle_reconstruct: " + std::to_string(counts.counts.size()) +
                      " counts for " + std::to_string(p.size()) + " protocol rows");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw DomainError("mle_reconstruct: damping must lie in (0, 1]");
  }
  if (!(opts.max_step >= opts.damping)) throw DomainError("mle_reconstruct: max_step must be >= damping");
  for (double k : counts.counts) {
    if (!std::isfinite(k) || k < 0.0) throw DomainError("mle_reconstruct: counts must be finite and >= 0");
  }
  const CompletenessReport comp = completeness_check(p, r);
  if (!comp.complete) {
    throw CompletenessError("mle_reconstruct: protocol is not informationally complete for rank " +
                            std::to_string(r) + " (span dimension " +
                            std::to_string(comp.span_dimension) + " < " +
                            std::to_string(comp.required) + ")");
  }

  const detail::MleProblem prob(p, counts);
  if (!(prob.total_counts() > 0.0)) {
    throw DomainError("mle_reconstruct: no counts registered");
  }

  ComplexMatrix c = detail::initial_amplitudes(prob, s, r, opts.initializer);
  prob.rescale(c);
  double ll = prob.log_likelihood(c);
  double alpha = opts.damping;

  ReconstructionResult res{DensityMatrix::maximally_mixed(s), c, 0, 0.0, 0.0, false, {}};
  if (opts.record_trace) res.trace.push_back(ll);
  double change = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (;; ++it) {
    res.residual = prob.stationarity(c);
    if (change <= opts.tolerance * std::max(std::abs(ll), 1.0) && res.residual <= opts.residual_tolerance) {
      res.converged = true;
      break;
    }
    if (it == opts.max_iterations) break;
    const ComplexMatrix target = prob.update(c);
    ComplexMatrix next;
    double gain = 0.0;
    bool accepted = false;
    // Halve the step until the likelihood does not decrease.
    for (int halvings = 0; halvings < 40; ++halvings) {
      next = (1.0 - alpha) * c + alpha * target;
      prob.rescale(next);
      gain = prob.log_likelihood_change(c, next);
      if (gain >= 0.0) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // No ascent direction left at working precision.
      res.converged = res.residual <= opts.residual_tolerance;
      break;
    }
    alpha = std::min(alpha * 1.5, opts.max_step);
    c = std::move(next);
    ll += gain;
    change = gain;
    if (opts.record_trace) res.trace.push_back(ll);
  }

  res.iterations = it;
  res.amplitudes = c;
  const ComplexMatrix rho = c * c.adjoint();
  res.estimate = DensityMatrix(rho / real_trace(rho));
  res.log_likelihood = log_likelihood(p, counts, res.estimate);
  return res;
}

}  // namespace lortomo
