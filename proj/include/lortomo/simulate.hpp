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

// Monte Carlo tomography campaigns: sample counts, reconstruct, score the
// estimate against the true state. Experiment i draws from its own RNG
// stream mix_seed(seed, i), so results do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lortomo/counts.hpp"
#include "lortomo/errors.hpp"
#include "lortomo/lorentz.hpp"
#include "lortomo/loss.hpp"
#include "lortomo/parallel.hpp"
#include "lortomo/protocol.hpp"
#include "lortomo/qstate.hpp"
#include "lortomo/random.hpp"
#include "lortomo/reconstruct.hpp"

namespace lortomo {

/// Which sample size enters the efficiency in multinomial mode: only the
/// registered (row) events or every representative sent in.
enum class SampleSizeConvention { registered, total };

inline const char* to_string(SampleSizeConvention c) {
  return c == SampleSizeConvention::registered ? "registered" : "total";
}

struct CampaignConfig {
  CampaignConfig(Protocol p, DensityMatrix t) : protocol(std::move(p)), truth(std::move(t)) {}

  Protocol protocol;
  DensityMatrix truth;
  double n = 100000;
  std::size_t experiments = 200;
  std::uint64_t seed = 1;
  SamplingMode mode = SamplingMode::poisson;
  std::optional<double> adaptive_split;
  std::size_t rank = 0;  // 0: numerical rank of `truth`
  SampleSizeConvention convention = SampleSizeConvention::registered;
  std::size_t workers = 1;
  ReconstructionOptions reconstruction{};

  std::size_t effective_rank() const { return rank == 0 ? truth.numerical_rank() : rank; }

  void validate() const {
    if (!(n >= 1.0)) throw DomainError("CampaignConfig: n must be >= 1");
    if (experiments < 1) throw DomainError("CampaignConfig: at least one experiment is required");
    if (truth.dim() != protocol.dim()) throw DomainError("CampaignConfig: state/protocol dimension mismatch");
    if (!truth.is_physical()) throw DomainError("CampaignConfig: true state is not PSD");
    if (adaptive_split && !(*adaptive_split > 0.0 && *adaptive_split < 1.0)) {
      throw DomainError("CampaignConfig: adaptive split fraction must lie in (0, 1)");
    }
    const std::size_t r = effective_rank();
    if (r < 1 || r > protocol.dim()) throw DomainError("CampaignConfig: rank must satisfy 1 <= r <= s");
  }
};

struct CampaignResult {
  std::vector<LossSample> samples;
  std::vector<double> counts_total;  // registered counts per experiment
  double effective_n = 0.0;          // sample size for the efficiency bound
  std::size_t rank = 0;
  std::size_t non_converged = 0;
  std::size_t floored = 0;  // adaptive: stage-1 estimates that needed the eigenvalue floor
  std::vector<std::string> notes;

  std::vector<double> losses() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.loss);
    return out;
  }
};

namespace detail {

// sum_j t_j Tr(Lambda_j rho) for trace-normalized rho.
inline double weighted_overlap(const Protocol& p, const DensityMatrix& rho) {
  const DensityMatrix unit = rho.normalized();
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    total += p.weight(j) * (p.row(j) * unit.matrix() * p.row(j).adjoint())(0, 0).real();
  }
  return total;
}

inline double loss_against(const DensityMatrix& estimate, const DensityMatrix& truth) {
  return std::max(0.0, 1.0 - fidelity(estimate, truth));
}

inline void require_complete(const Protocol& p, std::size_t r) {
  const CompletenessReport rep = completeness_check(p, r);
  if (!rep.complete) {
    throw CompletenessError("protocol is not informationally complete for rank " +
                            std::to_string(r) + " (span dimension " +
                            std::to_string(rep.span_dimension) + " < " +
                            std::to_string(rep.required) + ")");
  }
}

template <typename Experiment>
void run_experiments(const CampaignConfig& cfg, CampaignResult& out, Experiment&& experiment) {
  out.samples.resize(cfg.experiments);
  out.counts_total.resize(cfg.experiments);
  std::vector<char> converged(cfg.experiments, 1);
  std::vector<char> floored(cfg.experiments, 0);
  try {
    parallel_for(cfg.experiments, cfg.workers, [&](std::size_t i) {
      bool conv = true;
      bool floor_used = false;
      double registered = 0.0;
      const double loss = experiment(i, registered, conv, floor_used);
      out.samples[i] = LossSample{loss, i};
      out.counts_total[i] = registered;
      converged[i] = conv ? 1 : 0;
      floored[i] = floor_used ? 1 : 0;
    });
  } catch (const CompletenessError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(std::string("campaign experiment failed: ") + e.what());
  }
  for (std::size_t i = 0; i < cfg.experiments; ++i) {
    out.non_converged += converged[i] ? 0 : 1;
    out.floored += floored[i] ? 1 : 0;
  }
  if (out.non_converged > 0) {
    out.notes.push_back(std::to_string(out.non_converged) +
                        " reconstruction(s) stopped before meeting the convergence tolerance");
  }
}

}  // namespace detail

/// N_exp independent experiments: sample counts, reconstruct at the
/// configured rank, record 1 - F against the true state.
inline CampaignResult run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  CampaignResult out;
  out.rank = cfg.effective_rank();
  detail::require_complete(cfg.protocol, out.rank);
  ReconstructionOptions opts = cfg.reconstruction;
  opts.rank = out.rank;

  out.effective_n = cfg.n;
  if (cfg.mode == SamplingMode::multinomial && cfg.convention == SampleSizeConvention::registered) {
    if (!cfg.protocol.has_completion()) {
      throw DomainError("run_campaign: multinomial mode needs a completed protocol");
    }
    const std::vector<double> probs = outcome_probabilities(cfg.protocol, cfg.truth);
    out.effective_n = cfg.n * (1.0 - probs.back());
  }

  detail::run_experiments(cfg, out, [&](std::size_t i, double& registered, bool& conv, bool&) {
    const CountRecord rec =
        sample_counts(cfg.protocol, cfg.truth, cfg.n, mix_seed(cfg.seed, i), cfg.mode);
    registered = rec.total();
    const ReconstructionResult fit = mle_reconstruct(cfg.protocol, rec, opts);
    conv = fit.converged;
    return detail::loss_against(fit.estimate, cfg.truth);
  });
  return out;
}

struct AdaptiveStage {
  Protocol protocol;
  bool floored = false;
};

inline constexpr double kAdaptiveEigenvalueFloor = 1e-4;

/// The standard protocol boosted to the rest frame of `estimate`; estimates
/// with a trace-normalized eigenvalue below `floor` are floored first.
inline AdaptiveStage adaptive_stage_two_protocol(const Protocol& standard,
                                                 const DensityMatrix& estimate,
                                                 double floor = kAdaptiveEigenvalueFloor) {
  const DensityMatrix unit = estimate.normalized();
  if (unit.min_eigenvalue() >= floor) {
    return {boost_protocol(standard, center_of_mass_boost(unit)), false};
  }
  return {boost_protocol(standard, center_of_mass_boost_floored(unit, floor)), true};
}

/// Two-stage adaptive campaign. Stage 1 spends split * n on `cfg.protocol`
/// (the standard protocol) and reconstructs; stage 2 boosts that protocol to
/// the stage-1 estimate's rest frame and spends the remainder, with its
/// exposure set from the stage-1 intensity estimate. The final estimate
/// fits both stages jointly under one source intensity. Supports poisson and
/// expected modes.
inline CampaignResult run_adaptive(const CampaignConfig& cfg) {
  cfg.validate();
  if (!cfg.adaptive_split) throw DomainError("run_adaptive: adaptive split fraction is not set");
  if (cfg.mode == SamplingMode::multinomial) {
    throw DomainError("run_adaptive: multinomial mode is not supported");
  }
  const Protocol& standard = cfg.protocol;
  CampaignResult out;
  out.rank = cfg.effective_rank();
  detail::require_complete(standard, out.rank);
  out.effective_n = cfg.n;
  ReconstructionOptions opts = cfg.reconstruction;
  opts.rank = out.rank;

  const double n1 = *cfg.adaptive_split * cfg.n;
  const double n2 = cfg.n - n1;
  // Source intensity with the stage-1 exposure set to 1.
  const double source = n1 / detail::weighted_overlap(standard, cfg.truth);

  detail::run_experiments(cfg, out, [&](std::size_t i, double& registered, bool& conv, bool& floored) {
    const std::uint64_t stream = mix_seed(cfg.seed, i);
    const CountRecord first = sample_counts(standard, cfg.truth, n1, mix_seed(stream, 1), cfg.mode);
    const ReconstructionResult fit1 = mle_reconstruct(standard, first, opts);
    const AdaptiveStage stage = adaptive_stage_two_protocol(standard, fit1.estimate);
    floored = stage.floored;

    const double source_estimate = first.total() / detail::weighted_overlap(standard, fit1.estimate);
    const double exposure = n2 / (source_estimate * detail::weighted_overlap(stage.protocol, fit1.estimate));
    const double n2_true = source * exposure * detail::weighted_overlap(stage.protocol, cfg.truth);
    const CountRecord second =
        sample_counts(stage.protocol, cfg.truth, n2_true, mix_seed(stream, 2), cfg.mode);

    std::vector<ComplexRow> rows = standard.rows();
    std::vector<double> weights = standard.weights();
    for (std::size_t j = 0; j < stage.protocol.size(); ++j) {
      rows.push_back(stage.protocol.row(j));
      weights.push_back(stage.protocol.weight(j) * exposure);
    }
    const Protocol joint(standard.dim(), std::move(rows), std::move(weights));
    CountRecord all = first;
    all.counts.insert(all.counts.end(), second.counts.begin(), second.counts.end());
    all.expected.insert(all.expected.end(), second.expected.begin(), second.expected.end());
    all.n = first.n + second.n;
    all.representatives = first.representatives + second.representatives;

    registered = all.total();
    const ReconstructionResult fit = mle_reconstruct(joint, all, opts);
    conv = fit.converged && fit1.converged;
    return detail::loss_against(fit.estimate, cfg.truth);
  });
  if (out.floored > 0) {
    out.notes.push_back(std::to_string(out.floored) + " stage-1 estimate(s) raised to eigenvalue floor " +
                        std::to_string(kAdaptiveEigenvalueFloor) + " before boosting");
  }
  return out;
}

/// run_adaptive with `standard` in place of cfg.protocol.
inline CampaignResult run_adaptive(const CampaignConfig& cfg, const Protocol& standard) {
  CampaignConfig copy = cfg;
  copy.protocol = standard;
  return run_adaptive(copy);
}

}  // namespace lortomo
