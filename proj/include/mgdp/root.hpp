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
#include <limits>
#include <stdexcept>
#include <utility>

#include "mgdp/errors.hpp"

namespace mgdp {

inline constexpr int kRootMaxIterations = 200;

namespace detail {

// Safeguarded root search for monotone f on [lo, hi]: bisection keeps the
// bracket valid, a Newton step replaces the midpoint whenever the derivative
// is usable and the step lands strictly inside the current bracket.
// NewtonStep(x, fx) returns the proposed iterate or NaN to decline.
template <typename F, typename NewtonStep>
double solve_monotone_impl(F&& f, NewtonStep&& newton, double target, double lo,
                           double hi, double tol) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("solve_monotone: invalid bracket");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("solve_monotone: tolerance must be positive");
  }
  double flo = f(lo) - target;
  if (std::abs(flo) <= tol) return lo;
  double fhi = f(hi) - target;
  if (std::abs(fhi) <= tol) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw std::invalid_argument("solve_monotone: endpoints do not straddle target");
  }

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < kRootMaxIterations; ++it) {
    const double fx = f(x) - target;
    if (std::abs(fx) <= tol) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    const double width = hi - lo;
    if (width <= std::numeric_limits<double>::epsilon() *
                     std::max({1.0, std::abs(lo), std::abs(hi)})) {
      throw SolverError("solve_monotone: bracket collapsed before reaching tolerance");
    }
    double next = newton(x, fx);
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = lo + 0.5 * width;
    }
    x = next;
  }
  throw SolverError("solve_monotone: no convergence after iteration cap");
}

}  // namespace detail

/// Finds x in [lo, hi] with |f(x) - target| <= tol for monotone f whose
/// endpoint values straddle the target. Pure bisection; never leaves the
/// bracket. Throws std::invalid_argument on a bad bracket and SolverError
/// after the iteration cap.
template <typename F>
double solve_monotone(F&& f, double target, double lo, double hi, double tol) {
  return detail::solve_monotone_impl(
      std::forward<F>(f), [](double, double) { return std::numeric_limits<double>::quiet_NaN(); },
      target, lo, hi, tol);
}

/// Newton-accelerated variant: df supplies f'. Newton proposals are taken
/// only while they stay strictly inside the live bracket, so convergence is
/// still guaranteed by bisection.
template <typename F, typename DF>
double solve_monotone(F&& f, DF&& df, double target, double lo, double hi, double tol) {
  return detail::solve_monotone_impl(
      std::forward<F>(f),
      [&df](double x, double fx) {
        const double d = df(x);
        if (!std::isfinite(d) || d == 0.0) return std::numeric_limits<double>::quiet_NaN();
        return x - fx / d;
      },
      target, lo, hi, tol);
}

}  // namespace mgdp
