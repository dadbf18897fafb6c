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
#include <functional>
#include <stdexcept>
#include <vector>

#include "mgdp/errors.hpp"
#include "mgdp/matrix.hpp"

namespace mgdp {

/// Desk-scale cap on singular value decompositions.
inline constexpr int kMaxSvdDim = 512;

/// Ordered singular values of a, largest first, length min(rows, cols).
///
/// One-sided Jacobi: cyclic sweeps rotate column pairs until all pairs are
/// numerically orthogonal, then the singular values are the column norms.
/// Jacobi keeps full relative accuracy even for the small singular values,
/// which the noise-calibration certificates rely on.
inline std::vector<double> singular_values(const Matrix& a) {
  if (a.rows() > kMaxSvdDim || a.cols() > kMaxSvdDim) {
    throw std::invalid_argument("singular_values: dimensions exceed the 512 cap");
  }
  // Work on the tall orientation so columns are the shorter index.
  Matrix w = a.rows() >= a.cols() ? a : transpose(a);
  const int m = w.rows();
  const int n = w.cols();
  constexpr double kOrthTol = 1e-14;
  constexpr int kMaxSweeps = 64;

  bool rotated = true;
  for (int sweep = 0; sweep < kMaxSweeps && rotated; ++sweep) {
    rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += w(i, p) * w(i, p);
          aqq += w(i, q) * w(i, q);
          apq += w(i, p) * w(i, q);
        }
        if (std::abs(apq) <= kOrthTol * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double vp = w(i, p);
          const double vq = w(i, q);
          w(i, p) = c * vp - s * vq;
          w(i, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (rotated) {
    throw SolverError("singular_values: Jacobi sweeps did not converge");
  }

  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(sum);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

/// Largest singular value by power iteration on A^T A, iterated until the
/// estimate's relative change drops below tol. Returns 0 for the zero
/// matrix (documented special case, not an error).
inline double spectral_norm(const Matrix& a, double tol = 1e-12) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("spectral_norm: tolerance must be positive");
  }
  if (frobenius_norm(a) == 0.0) return 0.0;

  const int n = a.cols();
  // Deterministic quasi-random start; a fixed vector such as all-ones can be
  // orthogonal to the dominant singular direction.
  std::uint64_t state = 0x853c49e6748fea9bull;
  auto reseed = [&state](std::vector<double>& x) {
    double norm = 0.0;
    for (double& e : x) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      e = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
      norm += e * e;
    }
    norm = std::sqrt(norm);
    for (double& e : x) e /= norm;
  };
  std::vector<double> v(n);
  reseed(v);

  std::vector<double> av(a.rows());
  double estimate = 0.0;
  constexpr int kMaxIterations = 200000;
  for (int it = 0; it < kMaxIterations; ++it) {
    for (int i = 0; i < a.rows(); ++i) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j) sum += a(i, j) * v[j];
      av[i] = sum;
    }
    double av_norm = 0.0;
    for (double x : av) av_norm += x * x;
    av_norm = std::sqrt(av_norm);
    if (av_norm == 0.0) {  // start landed in the null space; restart
      reseed(v);
      estimate = 0.0;
      continue;
    }
    const double previous = estimate;
    estimate = av_norm;  // v stays unit length, so |Av| is the Rayleigh estimate
    if (it > 0 && previous > 0.0 &&
        std::abs(estimate - previous) <= 0.1 * tol * estimate) {
      return estimate;
    }
    double u_norm = 0.0;
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int i = 0; i < a.rows(); ++i) sum += a(i, j) * av[i];
      v[j] = sum;
      u_norm += sum * sum;
    }
    u_norm = std::sqrt(u_norm);
    for (double& x : v) x /= u_norm;
  }
  return estimate;
}

}  // namespace mgdp
