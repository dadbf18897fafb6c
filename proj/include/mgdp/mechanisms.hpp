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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgdp/matrix.hpp"
#include "mgdp/normal.hpp"
#include "mgdp/random.hpp"
#include "mgdp/root.hpp"
#include "mgdp/sensitivity.hpp"

namespace mgdp {

/// An (epsilon, delta) target. delta is kept strictly inside (0, 1): the
/// Gaussian privacy curve has no root at delta = 0 and is vacuous at
/// delta = 1, so neither endpoint is calibratable.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("PrivacyBudget: epsilon must be finite and >= 0");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("PrivacyBudget: delta must lie in (0, 1)");
    }
  }
};

namespace detail {

// e^eps * Phi(t), evaluated in log space. The product never exceeds the
// matching upper-tail term for a valid curve, so no overflow; a zero tail
// short-circuits to avoid log(0).
inline double exp_scaled_cdf(double eps, double t) {
  const double p = std_normal_cdf(t);
  if (p == 0.0) return 0.0;
  return std::exp(eps + std::log(p));
}

}  // namespace detail

/// Exact (epsilon, delta)-DP curve of a Gaussian mechanism at
/// sensitivity-to-noise ratio s:
///
///   g(s) = Phi(s/2 - eps/s) - e^eps * Phi(-s/2 - eps/s).
///
/// g(s) <= delta is necessary and sufficient for (eps, delta)-DP. The value
/// is clamped at 0 against floating-point cancellation of the two tails.
inline double privacy_curve(double s, double eps) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("privacy_curve: ratio must be positive and finite");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("privacy_curve: epsilon must be finite and >= 0");
  }
  const double g = std_normal_cdf(0.5 * s - eps / s) -
                   detail::exp_scaled_cdf(eps, -0.5 * s - eps / s);
  return g < 0.0 ? 0.0 : g;
}

namespace detail {

// Residual tolerance for the calibration root solves. Contracts advertise
// 1e-9; solving to 1e-12 leaves headroom for CDF rounding.
inline constexpr double kCurveSolveTol = 1e-12;
inline constexpr double kBracketStart = 1e6;

template <typename F>
double expand_and_solve(F&& g, auto&& dg, double target, bool increasing) {
  double hi = kBracketStart;
  const auto above = [&](double v) { return increasing ? g(v) < target : g(v) > target; };
  while (above(hi)) {
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw SolverError("calibration: could not bracket the privacy-curve root");
    }
  }
  return solve_monotone(g, dg, target, 0.0, hi, kCurveSolveTol);
}

}  // namespace detail

/// Largest admissible sensitivity-to-noise ratio for the budget: the s with
/// privacy_curve(s, eps) = delta, located by a bracketed Newton/bisection
/// solve (following the analytic Gaussian mechanism calibration of Balle &
/// Wang, https://arxiv.org/abs/1805.06530).
///
/// The curve is reparameterized around its sign change at s = sqrt(2 eps):
/// with s = sqrt(2 eps)/a, substituting v = (1/a - a)^2 / 2 (ratio above the
/// pivot, a <= 1) or u = (a - 1/a)^2 / 2 (below, a > 1) turns both branches
/// into one-sided root problems on [0, inf). At eps = 0 the curve reduces to
/// 2 Phi(s/2) - 1 and inverts in closed form.
inline double noise_ratio_bound(const PrivacyBudget& budget) {
  budget.validate();
  const double eps = budget.epsilon;
  const double delta = budget.delta;
  if (eps == 0.0) {
    return 2.0 * inv_std_normal_cdf(0.5 * (1.0 + delta));
  }

  const auto g_plus = [eps](double v) {
    return std_normal_cdf(std::sqrt(eps * v)) -
           detail::exp_scaled_cdf(eps, -std::sqrt(eps * (v + 2.0)));
  };
  const auto g_minus = [eps](double u) {
    return std_normal_cdf(-std::sqrt(eps * u)) -
           detail::exp_scaled_cdf(eps, -std::sqrt(eps * (u + 2.0)));
  };
  // Both derivatives collapse through e^eps * pdf(sqrt(eps (x+2))) =
  // pdf(sqrt(eps x)).
  const auto dg_plus = [eps](double v) {
    return std_normal_pdf(std::sqrt(eps * v)) * 0.5 * eps *
           (1.0 / std::sqrt(eps * v) + 1.0 / std::sqrt(eps * (v + 2.0)));
  };
  const auto dg_minus = [eps](double u) {
    return -std_normal_pdf(std::sqrt(eps * u)) * 0.5 * eps *
           (1.0 / std::sqrt(eps * u) - 1.0 / std::sqrt(eps * (u + 2.0)));
  };

  const double delta_pivot = g_plus(0.0);  // curve value at s = sqrt(2 eps)
  double a;                                // s = sqrt(2 eps) / a
  if (delta >= delta_pivot) {
    const double v = detail::expand_and_solve(g_plus, dg_plus, delta, /*increasing=*/true);
    a = 1.0 / (std::sqrt(1.0 + 0.5 * v) + std::sqrt(0.5 * v));
  } else {
    const double u = detail::expand_and_solve(g_minus, dg_minus, delta, /*increasing=*/false);
    a = std::sqrt(1.0 + 0.5 * u) + std::sqrt(0.5 * u);
  }
  return std::sqrt(2.0 * eps) / a;
}

/// Result of calibrating i.i.d. matrix Gaussian noise against a budget.
/// Covariance factors are fixed to the degenerate equal-singular-value
/// choice (scaled identities on both sides), so only their product — the
/// per-entry scale sigma — is observable in the output distribution.
struct GaussianCalibration {
  double ratio_bound = 0.0;  ///< largest admissible sensitivity-to-noise ratio
  double sigma = 0.0;        ///< per-entry noise standard deviation = S2 / ratio_bound
  SensitivityBound sensitivity;
  PrivacyBudget budget;
};

/// Analytic matrix Gaussian calibration: sigma = S2 / noise_ratio_bound.
inline GaussianCalibration amgm_calibrate(const SensitivityBound& sensitivity,
                                          const PrivacyBudget& budget) {
  sensitivity.validate();
  const double ratio = noise_ratio_bound(budget);
  return {ratio, sensitivity.value / ratio, sensitivity, budget};
}

/// Draws sigma * Z with Z an n x d matrix of i.i.d. standard normals.
inline Matrix amgm_sample(const GaussianCalibration& calibration, int n, int d,
                          RandomStream& stream) {
  return scale(sample_std_normal_matrix(stream, n, d), calibration.sigma);
}

inline constexpr const char* kClassicalGmWarning =
    "classical GM variance formula only certifies DP for epsilon <= 1 in a "
    "single release; value reported for empirical comparison";

inline bool classical_gm_out_of_range(const PrivacyBudget& budget) {
  return budget.epsilon > 1.0;
}

/// Per-entry noise scale of the classical Gaussian mechanism,
/// sigma = S2 * sqrt(2 ln(1.25/delta)) / epsilon. Requires epsilon > 0; see
/// kClassicalGmWarning for epsilon > 1, where the formula is heuristic only.
inline double classical_gm_sigma(double s2, const PrivacyBudget& budget) {
  budget.validate();
  if (!(s2 > 0.0) || !std::isfinite(s2)) {
    throw std::invalid_argument("classical_gm_sigma: sensitivity must be positive");
  }
  if (budget.epsilon == 0.0) {
    throw std::invalid_argument("classical_gm_sigma: epsilon must be positive");
  }
  return s2 * std::sqrt(2.0 * std::log(1.25 / budget.delta)) / budget.epsilon;
}

/// H_r = sum_{k=1}^{r} 1/k.
inline double harmonic_number(int r) {
  if (r < 1) throw std::invalid_argument("harmonic_number: r must be >= 1");
  double h = 0.0;
  for (int k = 1; k <= r; ++k) h += 1.0 / k;
  return h;
}

/// H_{r,1/2} = sum_{k=1}^{r} 1/sqrt(k).
inline double harmonic_number_half(int r) {
  if (r < 1) throw std::invalid_argument("harmonic_number_half: r must be >= 1");
  double h = 0.0;
  for (int k = 1; k <= r; ++k) h += 1.0 / std::sqrt(static_cast<double>(k));
  return h;
}

/// Inputs of the matrix-variate Gaussian (MVG) mechanism budget bound
/// (Chanyaswad et al., CCS 2018): output shape, the Frobenius-norm ceiling
/// gamma on the query, its L2-sensitivity, and the privacy budget.
struct MvgParams {
  int n = 0;
  int d = 0;
  double gamma = 0.0;  ///< sup over inputs of ||f||_F
  double s2 = 0.0;
  PrivacyBudget budget;

  int r() const { return std::min(n, d); }

  void validate() const {
    if (n < 1 || d < 1) throw std::invalid_argument("MvgParams: dimensions must be positive");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw std::invalid_argument("MvgParams: gamma must be positive");
    }
    if (!(s2 > 0.0) || !std::isfinite(s2)) {
      throw std::invalid_argument("MvgParams: s2 must be positive");
    }
    budget.validate();
    if (budget.epsilon == 0.0) {
      throw std::invalid_argument("MvgParams: epsilon must be positive");
    }
  }
};

/// MVG precision budget: upper bound on
/// ||sigma(Sigma^-1)||_2 * ||sigma(Psi^-1)||_2, namely
/// (-beta + sqrt(beta^2 + 8 alpha eps))^2 / (4 alpha^2) with
///   alpha = (H_r + H_{r,1/2}) gamma^2 + 2 H_r gamma S2,
///   beta  = 2 (nd)^{1/4} H_r S2 zeta(delta),
///   zeta(delta) = 2 sqrt(-nd ln delta) - 2 ln delta + nd.
/// The root gap is evaluated as x / (beta + sqrt(beta^2 + x)) because
/// 8 alpha eps is many orders below beta^2 at realistic sizes and the direct
/// difference would cancel.
inline double mvg_product_bound(const MvgParams& p) {
  p.validate();
  const double hr = harmonic_number(p.r());
  const double hr_half = harmonic_number_half(p.r());
  const double alpha = (hr + hr_half) * p.gamma * p.gamma + 2.0 * hr * p.gamma * p.s2;
  const double nd = static_cast<double>(p.n) * static_cast<double>(p.d);
  const double log_delta = std::log(p.budget.delta);
  const double zeta = 2.0 * std::sqrt(-nd * log_delta) - 2.0 * log_delta + nd;
  const double beta = 2.0 * std::pow(nd, 0.25) * hr * p.s2 * zeta;
  const double x = 8.0 * alpha * p.budget.epsilon;
  const double root_gap = x / (beta + std::sqrt(beta * beta + x));
  return root_gap * root_gap / (4.0 * alpha * alpha);
}

/// Per-entry noise standard deviation of the MVG mechanism under the equal
/// i.i.d. allocation that saturates mvg_product_bound.
///
/// With factors U = u I_n, V = u I_d the per-entry deviation is u^2 and the
/// constrained product is sqrt(nd) / u^4, so saturation gives a per-entry
/// variance of sqrt(nd) / bound.
inline double mvg_iid_sigma(const MvgParams& p) {
  const double bound = mvg_product_bound(p);
  const double nd = static_cast<double>(p.n) * static_cast<double>(p.d);
  return std::sqrt(std::sqrt(nd) / bound);
}

/// Probability that randomized response keeps the true label:
/// e^eps / (e^eps + |Y| - 1), evaluated as 1 / (1 + (|Y|-1) e^-eps) so large
/// epsilon saturates to 1 instead of overflowing.
inline double rr_keep_probability(int label_count, double epsilon) {
  if (label_count < 2) {
    throw std::invalid_argument("rr_keep_probability: need at least two labels");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("rr_keep_probability: epsilon must be positive");
  }
  return 1.0 / (1.0 + (label_count - 1.0) * std::exp(-epsilon));
}

/// Randomized response over label indices [0, label_count): keeps y with
/// probability e^eps / (e^eps + |Y| - 1), otherwise flips to one of the
/// other labels uniformly. Pure epsilon-LDP; deterministic per seed.
inline int rr_perturb(int y, int label_count, double epsilon, RandomStream& stream) {
  const double keep = rr_keep_probability(label_count, epsilon);
  if (y < 0 || y >= label_count) {
    throw std::domain_error("rr_perturb: label out of range");
  }
  if (stream.uniform() < keep) return y;
  int other = static_cast<int>(stream.uniform() * (label_count - 1));
  if (other > label_count - 2) other = label_count - 2;
  return other >= y ? other + 1 : other;
}

/// Formats a real with 12 significant digits for reports.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Flat key-value calibration report; serialized field names and order are a
/// stable external contract.
struct CalibrationReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double sensitivity = 0.0;
  std::string notion;
  double ratio_bound = 0.0;  ///< serialized under the key "B"
  double sigma = 0.0;
  std::string mechanism;
  std::vector<std::string> warnings;

  std::string to_json() const {
    std::string out = "{\n";
    out += "  \"epsilon\": " + format_real(epsilon) + ",\n";
    out += "  \"delta\": " + format_real(delta) + ",\n";
    out += "  \"sensitivity\": " + format_real(sensitivity) + ",\n";
    out += "  \"notion\": \"" + detail::json_escape(notion) + "\",\n";
    out += "  \"B\": " + format_real(ratio_bound) + ",\n";
    out += "  \"sigma\": " + format_real(sigma) + ",\n";
    out += "  \"mechanism\": \"" + detail::json_escape(mechanism) + "\",\n";
    out += "  \"warnings\": [";
    for (std::size_t i = 0; i < warnings.size(); ++i) {
      if (i > 0) out += ", ";
      out += "\"" + detail::json_escape(warnings[i]) + "\"";
    }
    out += "]\n}\n";
    return out;
  }
};

inline CalibrationReport make_report(const GaussianCalibration& c, const std::string& mechanism) {
  return {c.budget.epsilon, c.budget.delta,   c.sensitivity.value,
          to_string(c.sensitivity.notion),    c.ratio_bound,
          c.sigma,          mechanism,        {}};
}

}  // namespace mgdp
