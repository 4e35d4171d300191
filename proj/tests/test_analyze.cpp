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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"

using namespace lortomo;

namespace {

std::vector<LossSample> as_samples(const std::vector<double>& v) {
  std::vector<LossSample> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({v[i], i});
  return out;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Poisson row intensities t_j |X_j c|^2 / scale, computed straight from the
// rows. The overall intensity is free, so scale stays fixed under perturbation.
std::vector<double> row_intensities(const Protocol& p, const ComplexMatrix& c, double scale) {
  std::vector<double> mu;
  for (std::size_t j = 0; j < p.size(); ++j) mu.push_back(p.weight(j) * (p.row(j) * c).squaredNorm() / scale);
  return mu;
}

ComplexMatrix perturbed(const ComplexMatrix& c, const RealVector& theta, double eps) {
  ComplexMatrix out = c;
  for (Eigen::Index a = 0; a < theta.size(); ++a) {
    out.data()[a / 2] += eps * theta[a] * (a % 2 == 0 ? Complex(1, 0) : Complex(0, 1));
  }
  return out;
}

EfficiencyReport campaign_efficiency(const Protocol& p, const DensityMatrix& truth, double n,
                                     std::size_t experiments, std::uint64_t seed) {
  CampaignConfig cfg(p, truth);
  cfg.n = n;
  cfg.experiments = experiments;
  cfg.seed = seed;
  cfg.workers = 4;
  const CampaignResult res = run_campaign(cfg);
  return efficiency(res.samples, res.effective_n, truth.dim(), res.rank);
}

}  // namespace

TEST(Bound, DirectSubstitution) {
  for (std::size_t s = 2; s <= 5; ++s) {
    for (std::size_t r = 1; r <= s; ++r) {
      const double f = static_cast<double>((2 * s - r) * r) - 1.0;
      EXPECT_EQ(degrees_of_freedom(s, r), static_cast<std::size_t>(f));
      EXPECT_NEAR(min_loss_bound(1e5, s, r), f * f / (4e5 * static_cast<double>(s - 1)), 1e-20);
    }
  }
  EXPECT_NEAR(min_loss_bound(1e5, 2, 2), 2.25e-5, 1e-20);
  EXPECT_NEAR(min_loss_bound(1e3, 2, 1), 1e-3, 1e-18);
  EXPECT_NEAR(min_loss_bound(1e5, 4, 4), 18.75 / 1e5, 1e-18);
  EXPECT_THROW(min_loss_bound(0.5, 2, 2), DomainError);
  EXPECT_THROW(min_loss_bound(1e5, 2, 3), DomainError);
  EXPECT_THROW(min_loss_bound(1e5, 1, 1), DomainError);
  EXPECT_THROW(min_loss_bound(1e5, 2, 0), DomainError);
}

TEST(Efficiency, SamplesAtTheBoundGiveUnitEfficiency) {
  const double bound = min_loss_bound(1e5, 2, 2);
  const EfficiencyReport rep = efficiency(as_samples(std::vector<double>(50, bound)), 1e5, 2, 2);
  EXPECT_NEAR(rep.efficiency, 1.0, 1e-14);
  EXPECT_LE(rep.mean_loss_se, 1e-12 * bound);
  EXPECT_EQ(rep.experiments, 50u);
}

TEST(Efficiency, RatioAndStandardError) {
  const std::vector<double> v = {1e-5, 2e-5, 3e-5, 6e-5};
  const EfficiencyReport rep = efficiency(as_samples(v), 1e5, 2, 2);
  EXPECT_NEAR(rep.mean_loss, 3e-5, 1e-20);
  // Sample variance 14/3 e-10, standard error sqrt(var / 4).
  EXPECT_NEAR(rep.mean_loss_se, std::sqrt(14.0 / 3.0 * 1e-10 / 4.0), 1e-18);
  EXPECT_NEAR(rep.efficiency, rep.bound / rep.mean_loss, 1e-15);
  EXPECT_NEAR(rep.efficiency_se, rep.efficiency * rep.relative_se, 1e-15);
}

TEST(Efficiency, DegenerateInputs) {
  EXPECT_THROW(efficiency({}, 1e5, 2, 2), EmptyInputError);
  EXPECT_THROW(efficiency(as_samples({0.0, 0.0}), 1e5, 2, 2), DomainError);
}

TEST(Histogram, CountsSumToSampleSize) {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> expo(1e5);
  std::vector<double> v(200);
  for (double& x : v) x = expo(rng);
  const Histogram h = loss_histogram(as_samples(v), 17);
  ASSERT_EQ(h.counts.size(), 17u);
  ASSERT_EQ(h.edges.size(), 18u);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 200u);
  EXPECT_EQ(h.edges.front(), *std::min_element(v.begin(), v.end()));
  EXPECT_EQ(h.edges.back(), *std::max_element(v.begin(), v.end()));
  EXPECT_NEAR(h.mean, sum(v) / 200.0, 1e-18);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [prob, value] : h.quantiles) {
    EXPECT_GE(value, sorted.front());
    EXPECT_LE(value, sorted.back());
  }
  EXPECT_NEAR(h.quantiles[2].second, 0.5 * (sorted[99] + sorted[100]), 1e-18);
}

TEST(Histogram, IdenticalSamplesCollapseToOneBin) {
  const Histogram h = loss_histogram(as_samples(std::vector<double>(7, 0.0)), 30);
  ASSERT_EQ(h.counts.size(), 1u);
  EXPECT_EQ(h.counts[0], 7u);
  EXPECT_EQ(h.variance, 0.0);
  EXPECT_THROW(loss_histogram({}, 10), EmptyInputError);
}

TEST(FibonacciSphere, UnitVectorsCoveringBothHemispheres) {
  const auto dirs = fibonacci_sphere(200);
  ASSERT_EQ(dirs.size(), 200u);
  std::array<double, 3> mean{};
  for (const auto& d : dirs) {
    EXPECT_NEAR(d[0] * d[0] + d[1] * d[1] + d[2] * d[2], 1.0, 1e-14);
    for (int k = 0; k < 3; ++k) mean[k] += d[k] / 200.0;
  }
  for (double m : mean) EXPECT_LT(std::abs(m), 0.02);
}

TEST(BlochDirection, ExampleStateAndCenter) {
  const auto d = bloch_direction(fixtures::example_state());
  ASSERT_TRUE(d.has_value());
  const auto p = fixtures::stokes_oracle(fixtures::example_state().matrix());
  const double len = std::sqrt(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR((*d)[k], p[k + 1] / len, 1e-12);
  EXPECT_FALSE(bloch_direction(DensityMatrix::maximally_mixed(2)).has_value());
}

TEST(LossForm, MatchesFiniteDifferenceOfFidelity) {
  // 1 - F(rho(c + eps theta), rho0) ~ eps^2 theta^T B theta.
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const DensityMatrix rho0 = fixtures::random_qubit_state(rng);
    const ComplexMatrix c = purify(rho0.normalized(), 2).matrix();
    const RealMatrix form = amplitude_loss_form(rho0, c);
    RealVector theta(8);
    for (auto& x : theta) x = normal(rng);
    const double eps = 1e-4;
    const ComplexMatrix moved = perturbed(c, theta, eps);
    const double loss = 1.0 - fixtures::qubit_fidelity_oracle(moved * moved.adjoint(), rho0.matrix());
    const double predicted = eps * eps * theta.dot(form * theta);
    EXPECT_NEAR(loss, predicted, 1e-3 * predicted + 1e-13) << "sample " << i;
  }
}

TEST(FisherInformation, MatchesFiniteDifferenceOfOutcomeDistribution) {
  // Poisson information I = sum_j d mu_j d mu_j^T / mu_j, unit total intensity at c.
  std::mt19937_64 rng(22);
  const Protocol p = fixtures::boosted_tetrahedron();
  for (int i = 0; i < 5; ++i) {
    const DensityMatrix rho0 = fixtures::random_qubit_state(rng);
    const ComplexMatrix c = purify(rho0.normalized(), 2).matrix();
    const RealMatrix info = amplitude_fisher_information(p, c);
    const double scale = sum(row_intensities(p, c, 1.0));
    const std::vector<double> mu = row_intensities(p, c, scale);
    const double h = 1e-6;
    std::vector<RealVector> grads(p.size(), RealVector(8));
    for (Eigen::Index a = 0; a < 8; ++a) {
      const RealVector e = RealVector::Unit(8, a);
      const auto plus = row_intensities(p, perturbed(c, e, h), scale);
      const auto minus = row_intensities(p, perturbed(c, e, -h), scale);
      for (std::size_t j = 0; j < p.size(); ++j) grads[j][a] = (plus[j] - minus[j]) / (2 * h);
    }
    RealMatrix oracle = RealMatrix::Zero(8, 8);
    for (std::size_t j = 0; j < p.size(); ++j) oracle += grads[j] * grads[j].transpose() / mu[j];
    EXPECT_LE((info - oracle).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
  }
}

TEST(LossCoefficients, PureStateHasTwoDirections) {
  const ComplexVector c0 = fixtures::principal_component();
  const DensityMatrix pure(c0 * c0.adjoint());
  EXPECT_EQ(loss_coefficients(tetrahedron_protocol(), pure, 1).size(), degrees_of_freedom(2, 1));
  EXPECT_EQ(loss_coefficients(tetrahedron_protocol(), fixtures::example_state(), 2).size(),
            degrees_of_freedom(2, 2));
  ComplexRow h(2);
  h << 1, 0;
  EXPECT_THROW(loss_coefficients(Protocol(2, {h}, {1.0}), pure, 1), CompletenessError);
}

TEST(LossCoefficients, PredictedMeanRespectsBoundForPovmProtocols) {
  std::mt19937_64 rng(23);
  const double n = 1e5;
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix q = fixtures::random_qubit_state(rng);
    for (const Protocol& p : {tetrahedron_protocol(), cube_protocol()}) {
      const LossCurve curve{loss_coefficients(p, q, 2), n};
      EXPECT_GE(curve.mean(), min_loss_bound(n, 2, 2) * (1 - 1e-9));
    }
    const DensityMatrix two = fixtures::random_full_rank_state(4, rng);
    const LossCurve curve{loss_coefficients(mub_protocol(4), two, 4), n};
    EXPECT_GE(curve.mean(), min_loss_bound(n, 4, 4) * (1 - 1e-9));
  }
}

TEST(LossCoefficients, SuperefficiencyOfBoostedProtocols) {
  const LossCurve qubit{loss_coefficients(fixtures::boosted_tetrahedron(), fixtures::example_state(), 2), 1e5};
  EXPECT_NEAR(min_loss_bound(1e5, 2, 2) / qubit.mean(), fixtures::kQubitSuperefficiency, 0.01);
  const DensityMatrix two = fixtures::two_qubit_state();
  const Protocol bmub = boost_protocol(mub_protocol(4), center_of_mass_boost(two));
  const LossCurve pair{loss_coefficients(bmub, two, 4), 1e5};
  EXPECT_NEAR(min_loss_bound(1e5, 4, 4) / pair.mean(), fixtures::kTwoQubitSuperefficiency, 1e-3);
}

TEST(LossCurve, DrawsHaveTheDescribedMean) {
  const LossCurve curve{{3.0, 1.0, 0.5}, 10.0};
  EXPECT_NEAR(curve.mean(), 4.5 / 40.0, 1e-15);
  const auto d = curve.draws(200000, 5);
  // Variance of sum d_k xi_k^2 / (4n) is 2 sum d_k^2 / (4n)^2.
  const double se = std::sqrt(2.0 * (9.0 + 1.0 + 0.25) / 1600.0 / 200000.0);
  EXPECT_NEAR(sum(d) / 200000.0, curve.mean(), 4.0 * se);
  EXPECT_EQ(curve.draws(10, 5), curve.draws(10, 5));
  const auto dens = curve.bin_density({0.0, 0.05, 0.1, 1e9}, 1000, 1);
  double mass = 0.0;
  const std::vector<double> widths = {0.05, 0.05, 1e9 - 0.1};
  for (std::size_t b = 0; b < dens.size(); ++b) mass += dens[b] * widths[b];
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(LossCurve, MeanMatchesLargeCampaign) {
  // 2500 experiments put three standard errors of the mean under 5 %.
  const DensityMatrix rho = fixtures::example_state();
  const LossCurve curve{loss_coefficients(fixtures::boosted_tetrahedron(), rho, 2), 1e5};
  CampaignConfig cfg(fixtures::boosted_tetrahedron(), rho);
  cfg.experiments = 2500;
  cfg.seed = 31;
  cfg.workers = 4;
  const std::vector<double> losses = run_campaign(cfg).losses();
  EXPECT_NEAR(sum(losses) / losses.size(), curve.mean(), 0.05 * curve.mean());
}

TEST(KsTest, SanityChecks) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(500), b(500), shifted(500);
  for (double& x : a) x = normal(rng);
  for (double& x : b) x = normal(rng);
  for (double& x : shifted) x = normal(rng) + 1.0;
  EXPECT_EQ(ks_two_sample(a, a).statistic, 0.0);
  EXPECT_NEAR(ks_two_sample(a, a).p_value, 1.0, 1e-12);
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(ks_two_sample(a, shifted).p_value, 1e-10);
  EXPECT_EQ(ks_two_sample({0.0, 0.1}, {5.0, 6.0}).statistic, 1.0);
  EXPECT_THROW(ks_two_sample({}, a), EmptyInputError);
}

TEST(KsTest, UniformNullRejectsAtNominalRate) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int rejected = 0;
  for (int t = 0; t < 400; ++t) {
    std::vector<double> a(200), b(400);
    for (double& x : a) x = unit(rng);
    for (double& x : b) x = unit(rng);
    rejected += ks_two_sample(a, b).p_value < 0.05 ? 1 : 0;
  }
  // Binomial(400, 0.05): mean 20, sd 4.4.
  EXPECT_GE(rejected, 5);
  EXPECT_LE(rejected, 36);
}

TEST(TheoreticalCurve, NeverEmitsAnUnvalidatedCurve) {
  const DensityMatrix rho = fixtures::example_state();
  CurveValidation v;
  v.workers = 4;
  for (double n : {1e5, 30.0}) {
    const CurveOutcome out = theoretical_loss_curve(fixtures::boosted_tetrahedron(), rho, n, 2, v);
    EXPECT_EQ(out.curve.has_value(), out.ks.p_value >= v.alpha) << n;
    EXPECT_EQ(out.status == "validated", out.curve.has_value()) << out.status;
    if (!out.curve) {
      EXPECT_EQ(out.status.rfind("curve unavailable", 0), 0u);
    }
    EXPECT_EQ(out.candidate_coefficients.size(), 3u);
  }
}

TEST(EfficiencyCampaigns, BoostedProtocolIsSignificantlySuperefficient) {
  const EfficiencyReport rep = campaign_efficiency(fixtures::boosted_tetrahedron(), fixtures::example_state(), 1e5, 200, 41);
  EXPECT_GT(rep.efficiency, 1.0 + 5.0 * rep.efficiency_se);
}

TEST(EfficiencyCampaigns, DoublingSampleSizeLeavesEfficiencyInvariant) {
  const DensityMatrix rho = fixtures::example_state();
  const EfficiencyReport a = campaign_efficiency(fixtures::boosted_tetrahedron(), rho, 1e5, 300, 42);
  const EfficiencyReport b = campaign_efficiency(fixtures::boosted_tetrahedron(), rho, 2e5, 300, 43);
  EXPECT_NEAR(a.efficiency, b.efficiency, 3.0 * std::hypot(a.efficiency_se, b.efficiency_se));
}

TEST(EfficiencyMap, BoostedTetrahedronPeaksAtItsTarget) {
  MapConfig cfg;
  cfg.grid = 12;
  cfg.experiments = 40;
  cfg.workers = 4;
  const EfficiencyMap map = efficiency_map(fixtures::boosted_tetrahedron(), cfg);
  ASSERT_EQ(map.points.size(), 14u);
  ASSERT_TRUE(map.target_index && map.antipode_index);
  EXPECT_EQ(map.points[map.argmax].tag, "target");
  EXPECT_LT(map.points[*map.antipode_index].efficiency, 1e-3);
  const auto target = bloch_direction(fixtures::example_state());
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(map.points[*map.target_index].direction[k], (*target)[k], 1e-9);
}

TEST(EfficiencyMap, UntransformedTetrahedronNeverBeatsTheBound) {
  MapConfig cfg;
  cfg.grid = 8;
  cfg.experiments = 100;
  cfg.workers = 4;
  const EfficiencyMap map = efficiency_map(tetrahedron_protocol(), cfg);
  EXPECT_FALSE(map.target_index.has_value());  // frame center is the sphere center
  for (const MapPoint& pt : map.points) EXPECT_LE(pt.efficiency, 1.0 + 3.0 * pt.relative_se);
  EXPECT_THROW(efficiency_map(mub_protocol(4), cfg), DomainError);
}
