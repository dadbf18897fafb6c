// Copyright 2026 The mgdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgdp/mechanisms.hpp"
#include "mgdp/random.hpp"
#include "mgdp/root.hpp"

namespace mgdp {

/// Privacy loss random variable of a Gaussian mechanism at
/// sensitivity-to-noise ratio s: the loss is N(eta, 2*eta) with
/// eta = s^2 / 2 — the variance is always twice the mean.
struct PlrvSpec {
  double eta = 0.0;

  static PlrvSpec from_ratio(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("PlrvSpec: ratio must be positive and finite");
    }
    return {0.5 * s * s};
  }

  double mean() const { return eta; }
  double variance() const { return 2.0 * eta; }

  double sample(RandomStream& stream) const {
    return eta + std::sqrt(2.0 * eta) * stream.standard_normal();
  }
};

struct PlrvTails {
  double upper = 0.0;  ///< Pr[L >= eps]
  double lower = 0.0;  ///< Pr[L' <= -eps]
};

/// Closed-form tail probabilities of the Gaussian privacy loss at ratio s:
/// Pr[L >= eps] = Phi(s/2 - eps/s) and Pr[L' <= -eps] = Phi(-s/2 - eps/s).
/// They recombine as upper - e^eps * lower = privacy_curve(s, eps).
inline PlrvTails plrv_tail_probabilities(double s, double eps) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("plrv_tail_probabilities: ratio must be positive");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("plrv_tail_probabilities: epsilon must be >= 0");
  }
  return {std_normal_cdf(0.5 * s - eps / s), std_normal_cdf(-0.5 * s - eps / s)};
}

/// Exact worst-case delta of a Gaussian mechanism with scale sigma and
/// sensitivity s2 at privacy level eps.
inline double delta_for_epsilon(double sigma, double s2, double eps) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("delta_for_epsilon: sigma must be positive");
  }
  if (!(s2 > 0.0) || !std::isfinite(s2)) {
    throw std::invalid_argument("delta_for_epsilon: sensitivity must be positive");
  }
  return privacy_curve(s2 / sigma, eps);
}

/// Smallest eps such that delta_for_epsilon(sigma, s2, eps) <= delta,
/// located by monotone inversion of the curve in eps. Returns 0 when even
/// eps = 0 already meets the target.
inline double epsilon_for_delta(double sigma, double s2, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("epsilon_for_delta: delta must lie in (0, 1)");
  }
  const double s = s2 / sigma;
  if (delta_for_epsilon(sigma, s2, 0.0) <= delta) return 0.0;
  double hi = 1.0;
  while (privacy_curve(s, hi) > delta) {
    hi *= 2.0;
    if (hi > 1e18) {
      throw SolverError("epsilon_for_delta: could not bracket the target delta");
    }
  }
  return solve_monotone([s](double eps) { return privacy_curve(s, eps); }, delta, 0.0, hi,
                        1e-12);
}

/// Overall eps of k releases of the same Gaussian mechanism on the same
/// input. The k-fold sum of independent N(eta, 2*eta) losses is
/// N(k*eta, 2*k*eta), i.e. a single mechanism at ratio sqrt(k) * s2 / sigma,
/// so the composition is exact rather than a numerical approximation.
inline double compose_gaussian_self(int k, double sigma, double s2, double delta) {
  if (k < 1) throw std::invalid_argument("compose_gaussian_self: k must be >= 1");
  return epsilon_for_delta(sigma / std::sqrt(static_cast<double>(k)), s2, delta);
}

/// One accounted mechanism invocation. delta = 0 is legal here (pure-DP
/// mechanisms such as randomized response), unlike in calibration budgets.
struct LedgerEntry {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("LedgerEntry: epsilon must be finite and >= 0");
    }
    if (!(delta >= 0.0 && delta < 1.0)) {
      throw std::invalid_argument("LedgerEntry: delta must lie in [0, 1)");
    }
  }
};

struct CompositionLedger {
  std::vector<LedgerEntry> entries;
};

/// Composed overall budget. delta may be 0 (all entries pure) and is capped
/// at 1, where the guarantee is vacuous.
struct ComposedBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

/// Basic sequential composition: budgets add in both coordinates.
inline ComposedBudget compose_basic(const CompositionLedger& ledger) {
  if (ledger.entries.empty()) {
    throw std::invalid_argument("compose_basic: empty ledger");
  }
  ComposedBudget total;
  for (const LedgerEntry& entry : ledger.entries) {
    entry.validate();
    total.epsilon += entry.epsilon;
    total.delta += entry.delta;
  }
  total.delta = std::min(total.delta, 1.0);
  return total;
}

/// Parses the ledger file format: one entry per line,
/// "<mechanism-tag> <epsilon> <delta>". Blank lines are skipped.
inline CompositionLedger parse_ledger(std::istream& in) {
  CompositionLedger ledger;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    LedgerEntry entry;
    std::string trailing;
    if (!(fields >> entry.mechanism >> entry.epsilon >> entry.delta) || (fields >> trailing)) {
      throw std::invalid_argument("parse_ledger: malformed line: " + line);
    }
    entry.validate();
    ledger.entries.push_back(entry);
  }
  return ledger;
}

struct DeltaEstimate {
  double delta_hat = 0.0;
  double std_err = 0.0;
};

/// Monte-Carlo estimate of Pr[L >= eps] - e^eps * Pr[L' <= -eps] by sampling
/// the privacy loss L ~ N(eta, 2*eta) at eta = (s2/sigma)^2 / 2. Each trial
/// contributes d = 1[L >= eps] - e^eps * 1[L <= -eps] (the two events are
/// disjoint); the standard error is the empirical deviation of d over
/// sqrt(trials).
inline DeltaEstimate monte_carlo_delta_estimate(double sigma, double s2, double eps,
                                                std::int64_t trials, RandomStream& stream) {
  if (trials < 10000) {
    throw std::invalid_argument("monte_carlo_delta_estimate: need at least 1e4 trials");
  }
  if (!(sigma > 0.0) || !(s2 > 0.0)) {
    throw std::invalid_argument("monte_carlo_delta_estimate: sigma and s2 must be positive");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("monte_carlo_delta_estimate: epsilon must be >= 0");
  }
  const PlrvSpec plrv = PlrvSpec::from_ratio(s2 / sigma);
  const double amplification = std::exp(eps);
  std::int64_t count_upper = 0;
  std::int64_t count_lower = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const double loss = plrv.sample(stream);
    if (loss >= eps) {
      ++count_upper;
    } else if (loss <= -eps) {
      ++count_lower;
    }
  }
  const double n = static_cast<double>(trials);
  const double mean = (static_cast<double>(count_upper) -
                       amplification * static_cast<double>(count_lower)) /
                      n;
  const double second_moment = (static_cast<double>(count_upper) +
                                amplification * amplification *
                                    static_cast<double>(count_lower)) /
                               n;
  const double variance = std::max(0.0, second_moment - mean * mean);
  return {mean, std::sqrt(variance / n)};
}

}  // namespace mgdp
