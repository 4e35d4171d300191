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

// Expected intensities under a protocol and the count-sampling models.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lortomo/errors.hpp"
#include "lortomo/protocol.hpp"
#include "lortomo/qstate.hpp"

namespace lortomo {

enum class SamplingMode { poisson, multinomial, expected };

inline const char* to_string(SamplingMode m) {
  switch (m) {
    case SamplingMode::poisson: return "poisson";
    case SamplingMode::multinomial: return "multinomial";
    case SamplingMode::expected: return "expected";
  }
  return "?";
}

inline SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "poisson") return SamplingMode::poisson;
  if (s == "multinomial") return SamplingMode::multinomial;
  if (s == "expected") return SamplingMode::expected;
  throw DomainError("unknown sampling mode '" + s + "' (expected poisson|multinomial|expected)");
}

/// Counts of one simulated run, one entry per protocol row.
struct CountRecord {
  std::vector<double> counts;    // k_j; integral except in expected mode
  std::vector<double> expected;  // t_j lambda_j after normalization
  double n = 0.0;                // sum of `expected`
  double representatives = 0.0;  // multinomial: all draws incl. undetected ones; else n
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::expected;

  double total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }
};

/// c t_j Tr(Lambda_j rho) with c chosen so the entries sum to n.
inline std::vector<double> expected_intensities(const Protocol& p, const DensityMatrix& rho,
                                                double n) {
  if (rho.dim() != p.dim()) throw DomainError("expected_intensities: dimension mismatch");
  if (!(n > 0.0)) throw DomainError("expected_intensities: n must be positive");
  const DensityMatrix unit = rho.normalized();
  std::vector<double> out(p.size());
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double lambda = (p.row(j) * unit.matrix() * p.row(j).adjoint())(0, 0).real();
    out[j] = p.weight(j) * std::max(lambda, 0.0);
    total += out[j];
  }
  if (!(total > 0.0)) {
    throw DomainError("expected_intensities: state is orthogonal to every protocol row");
  }
  for (double& v : out) v *= n / total;
  return out;
}

/// Draws one CountRecord.
///  poisson     - k_j ~ Poisson(expected_j) independently.
///  multinomial - n draws over the m+1 outcomes of the completed protocol;
///                completion outcomes are discarded (undetected).
///  expected    - k_j = expected_j exactly.
inline CountRecord sample_counts(const Protocol& p, const DensityMatrix& rho, double n,
                                 std::uint64_t seed, SamplingMode mode) {
  CountRecord rec;
  rec.seed = seed;
  rec.mode = mode;
  std::mt19937_64 rng(seed);
  switch (mode) {
    case SamplingMode::expected:
      rec.expected = expected_intensities(p, rho, n);
      rec.counts = rec.expected;
      rec.representatives = n;
      break;
    case SamplingMode::poisson: {
      rec.expected = expected_intensities(p, rho, n);
      rec.counts.resize(rec.expected.size());
      for (std::size_t j = 0; j < rec.expected.size(); ++j) {
        const double mean = rec.expected[j];
        if (mean > 0.0) {
          std::poisson_distribution<long long> draw(mean);
          rec.counts[j] = static_cast<double>(draw(rng));
        } else {
          rec.counts[j] = 0.0;
        }
      }
      rec.representatives = n;
      break;
    }
    case SamplingMode::multinomial: {
      if (!p.has_completion()) {
        throw DomainError("sample_counts: multinomial mode needs a completed protocol");
      }
      const std::vector<double> probs = outcome_probabilities(p, rho);
      const auto draws = static_cast<long long>(std::llround(n));
      const std::size_t m = p.size();
      rec.expected.resize(m);
      rec.counts.assign(m, 0.0);
      long long remaining = draws;
      double mass_left = 1.0;
      // Sequential conditional binomials over rows; the completion outcome
      // (last) takes whatever is left.
      for (std::size_t j = 0; j < m; ++j) {
        const double pj = std::max(probs[j], 0.0);
        rec.expected[j] = static_cast<double>(draws) * pj;
        if (remaining > 0 && mass_left > 0.0) {
          const double q = std::clamp(pj / mass_left, 0.0, 1.0);
          std::binomial_distribution<long long> draw(remaining, q);
          const long long k = draw(rng);
          rec.counts[j] = static_cast<double>(k);
          remaining -= k;
        }
        mass_left -= pj;
      }
      rec.representatives = static_cast<double>(draws);
      break;
    }
  }
  rec.n = std::accumulate(rec.expected.begin(), rec.expected.end(), 0.0);
  return rec;
}

}  // namespace lortomo
