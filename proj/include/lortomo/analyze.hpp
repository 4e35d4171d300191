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

// Fidelity-loss statistics: the POVM lower bound on the mean loss, protocol
// efficiency, Bloch-sphere efficiency maps, histograms, and an asymptotic
// (Fisher-information) description of the loss distribution.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lortomo/errors.hpp"
#include "lortomo/linalg.hpp"
#include "lortomo/loss.hpp"
#include "lortomo/protocol.hpp"
#include "lortomo/qstate.hpp"
#include "lortomo/random.hpp"
#include "lortomo/reconstruct.hpp"
#include "lortomo/simulate.hpp"

namespace lortomo {

/// f = (2s - r) r - 1 free real parameters of a trace-one rank-r state.
inline std::size_t degrees_of_freedom(std::size_t s, std::size_t r) {
  if (s < 2 || r < 1 || r > s) throw DomainError("degrees_of_freedom: need s >= 2 and 1 <= r <= s");
  return (2 * s - r) * r - 1;
}

/// Lower bound f^2 / (4 n (s - 1)) on the mean loss <1 - F> of any POVM
/// protocol with sample size n.
inline double min_loss_bound(double n, std::size_t s, std::size_t r) {
  if (!(n >= 1.0)) throw DomainError("min_loss_bound: n must be >= 1");
  const auto f = static_cast<double>(degrees_of_freedom(s, r));
  return f * f / (4.0 * n * static_cast<double>(s - 1));
}

struct EfficiencyReport {
  double mean_loss = 0.0;
  double mean_loss_se = 0.0;  // standard error of the mean
  double relative_se = 0.0;   // mean_loss_se / mean_loss
  double bound = 0.0;
  double efficiency = 0.0;    // bound / mean_loss
  double efficiency_se = 0.0; // efficiency * relative_se
  double n = 0.0;
  std::size_t s = 0;
  std::size_t r = 0;
  std::size_t experiments = 0;
};

inline EfficiencyReport efficiency(const std::vector<LossSample>& samples, double n, std::size_t s,
                                   std::size_t r) {
  if (samples.empty()) throw EmptyInputError("efficiency: no loss samples");
  EfficiencyReport rep;
  rep.n = n;
  rep.s = s;
  rep.r = r;
  rep.experiments = samples.size();
  rep.bound = min_loss_bound(n, s, r);
  double sum = 0.0;
  for (const auto& x : samples) sum += x.loss;
  const auto count = static_cast<double>(samples.size());
  rep.mean_loss = sum / count;
  if (!(rep.mean_loss > 0.0)) {
    throw DomainError("efficiency: mean loss is zero (degenerate samples, e.g. expected-mode data)");
  }
  double ss = 0.0;
  for (const auto& x : samples) ss += (x.loss - rep.mean_loss) * (x.loss - rep.mean_loss);
  const double var = samples.size() > 1 ? ss / (count - 1.0) : 0.0;
  rep.mean_loss_se = std::sqrt(var / count);
  rep.relative_se = rep.mean_loss_se / rep.mean_loss;
  rep.efficiency = rep.bound / rep.mean_loss;
  rep.efficiency_se = rep.efficiency * rep.relative_se;
  return rep;
}

// ---------------------------------------------------------------------------
// Efficiency map

/// `count` nearly uniform unit vectors (golden-angle spiral).
inline std::vector<std::array<double, 3>> fibonacci_sphere(std::size_t count) {
  std::vector<std::array<double, 3>> out;
  out.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    out.push_back({rad * std::cos(phi), rad * std::sin(phi), z});
  }
  return out;
}

/// Unit Bloch direction of a qubit state, or nullopt at the sphere center.
inline std::optional<std::array<double, 3>> bloch_direction(const DensityMatrix& rho) {
  const StokesVector p = stokes_from_density(rho);
  const double len = p.bloch_length();
  if (len < 1e-9 * std::max(p.p0, 1e-300)) return std::nullopt;
  return std::array<double, 3>{p.p1 / len, p.p2 / len, p.p3 / len};
}

struct MapConfig {
  double radius = 0.98;
  std::size_t grid = 200;
  double n = 100000;
  std::size_t experiments = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool include_target = true;  // append the protocol's target direction and its antipode
  ReconstructionOptions reconstruction{};
};

struct MapPoint {
  std::array<double, 3> direction{};
  double efficiency = 0.0;
  double relative_se = 0.0;
  double mean_loss = 0.0;
  std::string tag;  // "grid", "target" or "antipode"
};

struct EfficiencyMap {
  std::vector<MapPoint> points;
  std::size_t argmax = 0;
  std::size_t argmin = 0;
  std::optional<std::size_t> target_index;
  std::optional<std::size_t> antipode_index;

  double max() const { return points.at(argmax).efficiency; }
  double min() const { return points.at(argmin).efficiency; }
};

/// Efficiency of a qubit protocol at states of Bloch radius `radius` over a
/// grid of directions; each point is a full campaign with its own seed.
inline EfficiencyMap efficiency_map(const Protocol& p, const MapConfig& cfg) {
  if (p.dim() != 2) throw DomainError("efficiency_map: qubit protocols only");
  if (!(cfg.radius >= 0.0 && cfg.radius <= 1.0)) throw DomainError("efficiency_map: radius must lie in [0, 1]");
  EfficiencyMap map;
  for (const auto& d : fibonacci_sphere(cfg.grid)) map.points.push_back({d, 0, 0, 0, "grid"});
  if (cfg.include_target) {
    if (const auto target = bloch_direction(frame_center(p))) {
      const auto& t = *target;
      map.target_index = map.points.size();
      map.points.push_back({t, 0, 0, 0, "target"});
      map.antipode_index = map.points.size();
      map.points.push_back({{-t[0], -t[1], -t[2]}, 0, 0, 0, "antipode"});
    }
  }
  if (map.points.empty()) throw DomainError("efficiency_map: empty direction grid");
  const std::size_t rank = cfg.radius < 1.0 ? 2 : 1;
  for (std::size_t k = 0; k < map.points.size(); ++k) {
    MapPoint& pt = map.points[k];
    const auto& d = pt.direction;
    const DensityMatrix truth = density_from_stokes(
        {1.0, cfg.radius * d[0], cfg.radius * d[1], cfg.radius * d[2]});
    CampaignConfig cc(p, truth);
    cc.n = cfg.n;
    cc.experiments = cfg.experiments;
    cc.seed = mix_seed(cfg.seed, k);
    cc.rank = rank;
    cc.workers = cfg.workers;
    cc.reconstruction = cfg.reconstruction;
    const CampaignResult res = run_campaign(cc);
    const EfficiencyReport rep = efficiency(res.samples, res.effective_n, 2, rank);
    pt.efficiency = rep.efficiency;
    pt.relative_se = rep.relative_se;
    pt.mean_loss = rep.mean_loss;
  }
  for (std::size_t k = 0; k < map.points.size(); ++k) {
    if (map.points[k].efficiency > map.points[map.argmax].efficiency) map.argmax = k;
    if (map.points[k].efficiency < map.points[map.argmin].efficiency) map.argmin = k;
  }
  return map;
}

// ---------------------------------------------------------------------------
// Histogram

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (probability, value)
};

/// Sample quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> sorted, double prob) {
  if (sorted.empty()) throw EmptyInputError("quantile: no samples");
  std::sort(sorted.begin(), sorted.end());
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Equal-width bins over [min, max]; identical samples give a single bin.
inline Histogram loss_histogram(const std::vector<LossSample>& samples, std::size_t bins) {
  if (samples.empty()) throw EmptyInputError("loss_histogram: no loss samples");
  if (bins < 1) throw DomainError("loss_histogram: need at least one bin");
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.loss);
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  Histogram h;
  if (hi <= lo) {
    h.edges = {lo, hi};
    h.counts = {v.size()};
  } else {
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
      h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0);
    for (double x : v) {
      auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
      h.counts[std::min(b, bins - 1)]++;
    }
  }
  const auto count = static_cast<double>(v.size());
  h.mean = std::accumulate(v.begin(), v.end(), 0.0) / count;
  double ss = 0.0;
  for (double x : v) ss += (x - h.mean) * (x - h.mean);
  h.variance = v.size() > 1 ? ss / (count - 1.0) : 0.0;
  for (double prob : {0.05, 0.25, 0.5, 0.75, 0.95}) h.quantiles.emplace_back(prob, quantile(v, prob));
  return h;
}

// ---------------------------------------------------------------------------
// Asymptotic loss distribution

/// loss ~ sum_k d_k xi_k^2 / (4 n), xi_k independent standard normals.
struct LossCurve {
  std::vector<double> coefficients;  // d_k > 0, descending
  double n = 1.0;

  double mean() const {
    return std::accumulate(coefficients.begin(), coefficients.end(), 0.0) / (4.0 * n);
  }

  template <typename Rng>
  double sample(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    double acc = 0.0;
    for (double d : coefficients) {
      const double xi = normal(rng);
      acc += d * xi * xi;
    }
    return acc / (4.0 * n);
  }

  std::vector<double> draws(std::size_t count, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::vector<double> out(count);
    for (auto& x : out) x = sample(rng);
    return out;
  }

  /// Probability density averaged over each bin, estimated from `count` draws.
  std::vector<double> bin_density(const std::vector<double>& edges, std::size_t count,
                                  std::uint64_t seed) const {
    if (edges.size() < 2) return {};
    std::vector<double> dens(edges.size() - 1, 0.0);
    for (double x : draws(count, seed)) {
      const auto it = std::upper_bound(edges.begin(), edges.end(), x);
      if (it == edges.begin() || it == edges.end()) continue;
      dens[static_cast<std::size_t>(it - edges.begin()) - 1] += 1.0;
    }
    for (std::size_t b = 0; b < dens.size(); ++b) {
      const double width = edges[b + 1] - edges[b];
      dens[b] = width > 0.0 ? dens[b] / (static_cast<double>(count) * width) : 0.0;
    }
    return dens;
  }
};

namespace detail {

// Real parameter a of an s x r amplitude matrix: entry (a / 2) column-major,
// real part for even a, imaginary part for odd a.
inline ComplexMatrix amplitude_direction(Eigen::Index a, Eigen::Index s, Eigen::Index r) {
  ComplexMatrix e = ComplexMatrix::Zero(s, r);
  e.data()[a / 2] = (a % 2 == 0) ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
  return e;
}

}  // namespace detail

/// Per-unit-n Fisher information of the Poisson row intensities with respect
/// to the real parameters of c, at c c^+ = rho0 (free overall intensity).
inline RealMatrix amplitude_fisher_information(const Protocol& p, const ComplexMatrix& c) {
  const Eigen::Index s = c.rows();
  const Eigen::Index r = c.cols();
  const Eigen::Index params = 2 * s * r;
  const ComplexMatrix xc = p.row_matrix() * c;
  double norm = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) norm += p.weight(j) * xc.row(static_cast<Eigen::Index>(j)).squaredNorm();
  RealMatrix info = RealMatrix::Zero(params, params);
  RealVector grad(params);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double mu = p.weight(j) * xc.row(jj).squaredNorm() / norm;
    if (!(mu > 0.0)) continue;
    const ComplexMatrix lc = p.projector(j) * c;  // Lambda_j c
    for (Eigen::Index a = 0; a < params; ++a) {
      const Complex z = lc.data()[a / 2];
      grad[a] = 2.0 * p.weight(j) * (a % 2 == 0 ? z.real() : z.imag()) / norm;
    }
    info += grad * grad.transpose() / mu;
  }
  return info;
}

/// Quadratic form B of the loss, 1 - F(rho(c0 + dtheta), rho0) ~ dtheta^T B
/// dtheta, from the Bures metric 1/2 sum_ij |drho_ij|^2 / (l_i + l_j) in the
/// eigenbasis of rho0, with rho(c) = c c^+ / Tr(c c^+).
inline RealMatrix amplitude_loss_form(const DensityMatrix& rho0, const ComplexMatrix& c) {
  const Eigen::Index s = c.rows();
  const Eigen::Index r = c.cols();
  const Eigen::Index params = 2 * s * r;
  const HermitianEigen eig = rho0.normalized().eigen();
  const double cut = 1e-14;
  std::vector<ComplexMatrix> tangents;
  tangents.reserve(static_cast<std::size_t>(params));
  const ComplexMatrix rho = c * c.adjoint();
  for (Eigen::Index a = 0; a < params; ++a) {
    const ComplexMatrix e = detail::amplitude_direction(a, s, r);
    const ComplexMatrix d = e * c.adjoint() + c * e.adjoint();
    const ComplexMatrix drho = d - rho * real_trace(d);
    tangents.push_back(eig.vectors.adjoint() * drho * eig.vectors);
  }
  RealMatrix form = RealMatrix::Zero(params, params);
  for (Eigen::Index a = 0; a < params; ++a) {
    for (Eigen::Index b = a; b < params; ++b) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index k = 0; k < s; ++k) {
          const double denom = eig.values[i] + eig.values[k];
          if (denom <= cut) continue;
          acc += (std::conj(tangents[a](i, k)) * tangents[b](i, k)).real() / denom;
        }
      }
      form(a, b) = form(b, a) = 0.5 * acc;
    }
  }
  return form;
}

/// Coefficients d_k of the asymptotic loss distribution of the rank-r MLE at
/// rho0: 4 x eigenvalues of I^{+1/2} B I^{+1/2}, where I is the per-unit-n
/// Fisher information and B the loss form. Gauge directions (c -> c U) lie
/// in the kernel of I and drop out. Coefficients below 1e-9 of the largest
/// are discarded.
inline std::vector<double> loss_coefficients(const Protocol& p, const DensityMatrix& rho0,
                                             std::size_t r) {
  if (p.dim() != rho0.dim()) throw DomainError("loss_coefficients: dimension mismatch");
  const CompletenessReport comp = completeness_check(p, r);
  if (!comp.complete) {
    throw CompletenessError("loss_coefficients: protocol is not informationally complete for rank " +
                            std::to_string(r));
  }
  const ComplexMatrix c = purify(rho0.normalized(), r).matrix();
  const RealMatrix info = amplitude_fisher_information(p, c);
  const RealMatrix form = amplitude_loss_form(rho0, c);

  Eigen::SelfAdjointEigenSolver<RealMatrix> info_eig(info);
  const RealVector& iv = info_eig.eigenvalues();
  const double cut = 1e-10 * iv.cwiseAbs().maxCoeff();
  RealVector inv_sqrt(iv.size());
  for (Eigen::Index k = 0; k < iv.size(); ++k) inv_sqrt[k] = iv[k] > cut ? 1.0 / std::sqrt(iv[k]) : 0.0;
  const RealMatrix root = info_eig.eigenvectors() * inv_sqrt.asDiagonal() * info_eig.eigenvectors().transpose();
  const RealMatrix k = root * form * root;
  Eigen::SelfAdjointEigenSolver<RealMatrix> k_eig(0.5 * (k + k.transpose()));
  std::vector<double> d;
  for (Eigen::Index i = 0; i < k_eig.eigenvalues().size(); ++i) d.push_back(4.0 * k_eig.eigenvalues()[i]);
  std::sort(d.begin(), d.end(), std::greater<>());
  const double top = d.empty() ? 0.0 : d.front();
  std::erase_if(d, [&](double x) { return !(x > 1e-9 * top); });
  return d;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution (small-sample corrected effective size).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptyInputError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double q = 0.0;
  if (lambda < 1e-3) {
    q = 1.0;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
      const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::abs(term) < 1e-16) break;
      sign = -sign;
    }
    q = std::clamp(2.0 * q, 0.0, 1.0);
  }
  return {d, q};
}

struct CurveValidation {
  std::size_t experiments = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t draws = 20000;
  double alpha = 0.01;
};

/// `curve` is populated only when the descriptor survived the KS test.
struct CurveOutcome {
  std::optional<LossCurve> curve;
  std::vector<double> candidate_coefficients;
  double predicted_mean = 0.0;
  double campaign_mean = 0.0;
  KsResult ks;
  std::string status;  // "validated" or "curve unavailable: ..."
};

/// Asymptotic loss distribution for the rank-r MLE under Poisson sampling
/// with sample size n, validated by a two-sample KS test against a fresh
/// campaign. Never returns an unvalidated curve.
inline CurveOutcome theoretical_loss_curve(const Protocol& p, const DensityMatrix& rho0, double n,
                                           std::size_t r, const CurveValidation& v = {}) {
  CurveOutcome out;
  LossCurve candidate{loss_coefficients(p, rho0, r), n};
  out.candidate_coefficients = candidate.coefficients;
  out.predicted_mean = candidate.mean();

  CampaignConfig cc(p, rho0);
  cc.n = n;
  cc.experiments = v.experiments;
  cc.seed = v.seed;
  cc.rank = r;
  cc.workers = v.workers;
  const CampaignResult res = run_campaign(cc);
  const std::vector<double> mc = res.losses();
  out.campaign_mean = std::accumulate(mc.begin(), mc.end(), 0.0) / static_cast<double>(mc.size());

  out.ks = ks_two_sample(mc, candidate.draws(v.draws, mix_seed(v.seed, 0xD15CULL)));
  if (out.ks.p_value >= v.alpha) {
    out.curve = std::move(candidate);
    out.status = "validated";
  } else {
    out.status = "curve unavailable: KS test rejected the asymptotic curve (D = " +
                 std::to_string(out.ks.statistic) + ", p = " + std::to_string(out.ks.p_value) + ")";
  }
  return out;
}

}  // namespace lortomo
