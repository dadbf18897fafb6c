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

#include "mgdp/accounting.hpp"

#include <cmath>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace mgdp {
namespace {

TEST(PlrvTails, ZeroEpsilonAlgebra) {
  const double s = 1.7;
  const PlrvTails tails = plrv_tail_probabilities(s, 0.0);
  EXPECT_NEAR(tails.upper, std_normal_cdf(0.5 * s), 1e-15);
  EXPECT_NEAR(tails.lower, std_normal_cdf(-0.5 * s), 1e-15);
  EXPECT_NEAR(tails.upper - tails.lower, 2.0 * std_normal_cdf(0.5 * s) - 1.0, 1e-14);
}

TEST(PlrvTails, PivotAnchor) {
  const PlrvTails tails = plrv_tail_probabilities(std::sqrt(2.0), 1.0);
  const double delta0 = std_normal_cdf(0.0) - std::exp(1.0) * std_normal_cdf(-std::sqrt(2.0));
  EXPECT_NEAR(tails.upper - std::exp(1.0) * tails.lower, delta0, 1e-14);
}

TEST(PlrvTails, TinyRatioVanishes) {
  const PlrvTails tails = plrv_tail_probabilities(1e-9, 2.0);
  EXPECT_LT(tails.upper, 1e-300);
  EXPECT_LT(tails.lower, 1e-300);
}

TEST(PlrvTails, RecombineToPrivacyCurve) {
  // 100-point (s, eps) grid: upper - e^eps * lower matches the curve.
  for (double s = 0.2; s <= 4.0; s += 0.38) {
    for (double eps : {0.0, 0.3, 1.0, 2.5, 5.0, 9.0, 12.0, 16.0, 20.0, 25.0}) {
      const PlrvTails tails = plrv_tail_probabilities(s, eps);
      const double recombined = tails.upper - std::exp(eps) * tails.lower;
      EXPECT_NEAR(privacy_curve(s, eps), std::max(0.0, recombined), 1e-12)
          << "s=" << s << " eps=" << eps;
    }
  }
}

TEST(PlrvSpec, VarianceIsTwiceMean) {
  const PlrvSpec plrv = PlrvSpec::from_ratio(1.3);
  EXPECT_DOUBLE_EQ(plrv.mean(), 0.5 * 1.3 * 1.3);
  EXPECT_DOUBLE_EQ(plrv.variance(), 2.0 * plrv.mean());
}

TEST(DeltaForEpsilon, ClosedFormAnchor) {
  // sigma = s2 = 1, eps = 1: Phi(-1/2) - e * Phi(-3/2).
  const double expected =
      std_normal_cdf(-0.5) - std::exp(1.0) * std_normal_cdf(-1.5);
  EXPECT_NEAR(delta_for_epsilon(1.0, 1.0, 1.0), expected, 1e-14);
}

TEST(DeltaForEpsilon, CalibratedRoundTrip) {
  for (double eps : {0.5, 2.0, 8.0}) {
    for (double delta : {1e-6, 1e-3}) {
      const GaussianCalibration c =
          amgm_calibrate({2.0, PrivacyNotion::kSequenceLevel, ""}, {eps, delta});
      EXPECT_NEAR(delta_for_epsilon(c.sigma, 2.0, eps), delta, 1e-9);
    }
  }
}

TEST(DeltaForEpsilon, HugeSigmaGivesZero) {
  EXPECT_NEAR(delta_for_epsilon(1e9, 1.0, 1.0), 0.0, 1e-300);
}

TEST(DeltaForEpsilon, MonotoneGridCheck) {
  // Nonincreasing in eps, nondecreasing in the sensitivity-to-noise ratio.
  double prev = 1.0;
  for (double eps = 0.0; eps <= 6.0; eps += 0.5) {
    const double d = delta_for_epsilon(1.0, 1.5, eps);
    EXPECT_LE(d, prev + 1e-15);
    prev = d;
  }
  prev = 0.0;
  for (double s2 = 0.25; s2 <= 6.0; s2 += 0.25) {
    const double d = delta_for_epsilon(1.0, s2, 1.0);
    EXPECT_GE(d, prev - 1e-15);
    prev = d;
  }
}

TEST(EpsilonForDelta, InverseOfDeltaForEpsilon) {
  for (double eps : {0.3, 1.0, 4.0}) {
    const double sigma = 1.2, s2 = 2.0;
    const double delta = delta_for_epsilon(sigma, s2, eps);
    if (delta <= 0.0 || delta >= 1.0) continue;
    EXPECT_NEAR(epsilon_for_delta(sigma, s2, delta), eps, 1e-6);
  }
}

TEST(EpsilonForDelta, HugeSigmaNeedsNoEpsilon) {
  EXPECT_DOUBLE_EQ(epsilon_for_delta(1e6, 1.0, 1e-5), 0.0);
}

TEST(EpsilonForDelta, MatchesDenseGridScan) {
  const double sigma = 1.0, s2 = 1.0, delta = 1e-5;
  const double eps = epsilon_for_delta(sigma, s2, delta);
  const auto bracket = testing::grid_scan_bracket(
      [](double e) { return delta_for_epsilon(1.0, 1.0, e); }, delta, 1e-4, 50.0, 1e-4);
  ASSERT_TRUE(bracket.found);
  EXPECT_GE(eps, bracket.lo - 1e-9);
  EXPECT_LE(eps, bracket.hi + 1e-9);
}

TEST(ComposeGaussianSelf, SingleFoldMatchesInverse) {
  EXPECT_DOUBLE_EQ(compose_gaussian_self(1, 1.3, 2.0, 1e-4),
                   epsilon_for_delta(1.3, 2.0, 1e-4));
}

TEST(ComposeGaussianSelf, SqrtKScaling) {
  // Four releases cost exactly as much as one release at half the noise.
  const double four = compose_gaussian_self(4, 1.0, 1.0, 1e-5);
  const double one_at_half = compose_gaussian_self(1, 0.5, 1.0, 1e-5);
  EXPECT_NEAR(four, one_at_half, 1e-9 * std::max(1.0, one_at_half));
}

TEST(ComposeGaussianSelf, ExactnessInvariant) {
  // k^2 releases at noise k*sigma equal one release at sigma.
  RandomStream stream(314);
  for (int trial = 0; trial < 5; ++trial) {
    const double sigma = 0.5 + stream.uniform() * 2.0;
    const double s2 = 0.5 + stream.uniform() * 3.0;
    const double delta = std::pow(10.0, -2.0 - 3.0 * stream.uniform());
    const double reference = compose_gaussian_self(1, sigma, s2, delta);
    for (int k = 1; k <= 3; ++k) {
      EXPECT_NEAR(compose_gaussian_self(k * k, sigma * k, s2, delta), reference, 1e-6);
    }
  }
}

TEST(ComposeGaussianSelf, ThreeEpochsAgainstGridScan) {
  const GaussianCalibration c =
      amgm_calibrate({2.0, PrivacyNotion::kSequenceLevel, ""}, {8.0, 1e-5});
  const double eps_total = compose_gaussian_self(3, c.sigma, 2.0, 1e-5);
  EXPECT_GT(eps_total, 8.0);
  const double s = std::sqrt(3.0) * 2.0 / c.sigma;
  const auto bracket = testing::grid_scan_bracket(
      [s](double e) { return privacy_curve(s, e); }, 1e-5, 1e-3, 100.0, 1e-4);
  ASSERT_TRUE(bracket.found);
  EXPECT_GE(eps_total, bracket.lo - 1e-9);
  EXPECT_LE(eps_total, bracket.hi + 1e-9);
}

TEST(ComposeBasic, AddsBudgets) {
  const CompositionLedger ledger{{{"amgm", 1.0, 1e-5}, {"rr", 0.03, 0.0}}};
  const ComposedBudget total = compose_basic(ledger);
  EXPECT_NEAR(total.epsilon, 1.03, 1e-12);
  EXPECT_NEAR(total.delta, 1e-5, 1e-18);
}

TEST(ComposeBasic, SingletonAndRepeats) {
  const CompositionLedger single{{{"amgm", 0.7, 1e-6}}};
  EXPECT_DOUBLE_EQ(compose_basic(single).epsilon, 0.7);
  EXPECT_DOUBLE_EQ(compose_basic(single).delta, 1e-6);

  CompositionLedger repeated;
  for (int i = 0; i < 5; ++i) repeated.entries.push_back({"gm", 0.5, 1e-4});
  EXPECT_NEAR(compose_basic(repeated).epsilon, 2.5, 1e-12);
  EXPECT_NEAR(compose_basic(repeated).delta, 5e-4, 1e-15);
}

TEST(ComposeBasic, CapsDeltaAtOne) {
  CompositionLedger heavy;
  for (int i = 0; i < 5; ++i) heavy.entries.push_back({"gm", 1.0, 0.4});
  EXPECT_DOUBLE_EQ(compose_basic(heavy).delta, 1.0);
}

TEST(ComposeBasic, RejectsEmptyLedger) {
  EXPECT_THROW(compose_basic({}), std::invalid_argument);
}

TEST(ParseLedger, ReadsEntriesAndRejectsGarbage) {
  std::stringstream good("amgm 1.0 1e-5\n\nrr 0.03 0\n");
  const CompositionLedger ledger = parse_ledger(good);
  ASSERT_EQ(ledger.entries.size(), 2u);
  EXPECT_EQ(ledger.entries[0].mechanism, "amgm");
  EXPECT_DOUBLE_EQ(ledger.entries[1].epsilon, 0.03);
  EXPECT_DOUBLE_EQ(ledger.entries[1].delta, 0.0);

  std::stringstream missing_field("amgm 1.0\n");
  EXPECT_THROW(parse_ledger(missing_field), std::invalid_argument);
  std::stringstream extra_field("amgm 1.0 1e-5 surplus\n");
  EXPECT_THROW(parse_ledger(extra_field), std::invalid_argument);
  std::stringstream bad_delta("amgm 1.0 1.5\n");
  EXPECT_THROW(parse_ledger(bad_delta), std::invalid_argument);
}

TEST(MonteCarloDelta, AgreesWithClosedForm) {
  const double sigma = 0.9, s2 = 1.0, eps = 1.0;
  const double closed_form = delta_for_epsilon(sigma, s2, eps);
  RandomStream stream(90210);
  const DeltaEstimate estimate = monte_carlo_delta_estimate(sigma, s2, eps, 1000000, stream);
  EXPECT_GT(estimate.std_err, 0.0);
  EXPECT_NEAR(estimate.delta_hat, closed_form, 4.0 * estimate.std_err);
}

TEST(MonteCarloDelta, HugeSigmaEstimatesZero) {
  RandomStream stream(4);
  const DeltaEstimate estimate = monte_carlo_delta_estimate(1000.0, 1.0, 1.0, 10000, stream);
  EXPECT_DOUBLE_EQ(estimate.delta_hat, 0.0);
}

TEST(MonteCarloDelta, DeterministicPerSeed) {
  RandomStream a(55), b(55);
  const DeltaEstimate first = monte_carlo_delta_estimate(1.0, 1.0, 1.0, 20000, a);
  const DeltaEstimate second = monte_carlo_delta_estimate(1.0, 1.0, 1.0, 20000, b);
  EXPECT_DOUBLE_EQ(first.delta_hat, second.delta_hat);
  EXPECT_DOUBLE_EQ(first.std_err, second.std_err);
}

TEST(MonteCarloDelta, RejectsTooFewTrials) {
  RandomStream stream(1);
  EXPECT_THROW(monte_carlo_delta_estimate(1.0, 1.0, 1.0, 9999, stream),
               std::invalid_argument);
}

}  // namespace
}  // namespace mgdp
