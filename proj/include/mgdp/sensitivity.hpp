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
#include <span>
#include <stdexcept>
#include <string>

#include "mgdp/matrix.hpp"
#include "mgdp/svd.hpp"

namespace mgdp {

enum class ClipMode { kNormalize, kClip };
enum class ClipGranularity { kFullMatrix, kPerRow };

/// Neighboring relation an L2-sensitivity bound certifies: any two whole
/// sequences (labels fixed), or sequences differing in a single token.
enum class PrivacyNotion { kSequenceLevel, kTokenLevel };

inline const char* to_string(PrivacyNotion n) {
  return n == PrivacyNotion::kSequenceLevel ? "sequence-level" : "token-level";
}

inline PrivacyNotion notion_from_string(const std::string& s) {
  if (s == "sequence-level") return PrivacyNotion::kSequenceLevel;
  if (s == "token-level") return PrivacyNotion::kTokenLevel;
  throw std::invalid_argument("unknown privacy notion: " + s);
}

/// Output normalization/clipping rule. Mode and granularity fully determine
/// the transformation; c is the norm target (normalize) or cap (clip).
struct ClipSpec {
  ClipMode mode = ClipMode::kNormalize;
  ClipGranularity granularity = ClipGranularity::kFullMatrix;
  double c = 1.0;

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("ClipSpec: c must be positive and finite");
    }
  }
};

/// A certified L2-sensitivity together with the neighboring relation it is
/// valid for and a provenance note.
struct SensitivityBound {
  double value = 0.0;
  PrivacyNotion notion = PrivacyNotion::kSequenceLevel;
  std::string derivation;

  void validate() const {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("SensitivityBound: value must be positive and finite");
    }
  }
};

namespace detail {

// Clip comparisons tolerate a few ULP above c so that clipping is idempotent
// bit for bit: rescaling can leave the recomputed norm one rounding step
// above the cap.
inline bool within_cap(double norm, double c) {
  return norm <= c * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
}

}  // namespace detail

/// Normalizes or clips x according to spec. Normalize scales to norm
/// exactly c (Frobenius, or each row's 2-norm for per-row granularity) and
/// rejects zero inputs; clip leaves inputs already within the cap unchanged.
inline Matrix apply_clip(const Matrix& x, const ClipSpec& spec) {
  spec.validate();
  if (spec.granularity == ClipGranularity::kFullMatrix) {
    const double norm = frobenius_norm(x);
    if (!std::isfinite(norm)) {
      throw std::invalid_argument("apply_clip: norm overflow");
    }
    if (spec.mode == ClipMode::kNormalize) {
      if (norm == 0.0) {
        throw std::invalid_argument("apply_clip: cannot normalize a zero matrix");
      }
      return scale(x, spec.c / norm);
    }
    if (detail::within_cap(norm, spec.c)) return x;
    return scale(x, spec.c / norm);
  }

  Matrix out = x;
  for (int i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < x.cols(); ++j) sum += x(i, j) * x(i, j);
    const double norm = std::sqrt(sum);
    if (!std::isfinite(norm)) {
      throw std::invalid_argument("apply_clip: row norm overflow");
    }
    if (spec.mode == ClipMode::kNormalize) {
      if (norm == 0.0) {
        throw std::invalid_argument("apply_clip: cannot normalize a zero row");
      }
    } else if (detail::within_cap(norm, spec.c)) {
      continue;
    }
    const double factor = spec.c / norm;
    for (int j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * factor;
  }
  return out;
}

/// L2-sensitivity certified by an output normalization/clipping rule:
/// bounding the whole matrix at c gives 2c for any two sequences; bounding
/// each row at c gives c for a one-token change (the changed token
/// contributes a single row of norm at most c).
inline SensitivityBound sensitivity_from_clip(const ClipSpec& spec) {
  spec.validate();
  if (spec.granularity == ClipGranularity::kFullMatrix) {
    return {2.0 * spec.c, PrivacyNotion::kSequenceLevel, "full-matrix norm bound c: S2 = 2c"};
  }
  return {spec.c, PrivacyNotion::kTokenLevel, "per-row norm bound c: S2 = c"};
}

/// L2-sensitivity of x -> xW on per-row-normalized inputs differing in one
/// token: the row that changes is bounded by c, and a linear map stretches
/// it by at most its largest singular value.
inline SensitivityBound linear_map_sensitivity(const Matrix& w, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("linear_map_sensitivity: c must be positive and finite");
  }
  if (frobenius_norm(w) == 0.0) {
    throw std::invalid_argument("linear_map_sensitivity: zero weight matrix");
  }
  const double sigma_max = spectral_norm(w, 1e-12);
  return {c * sigma_max, PrivacyNotion::kTokenLevel, "linear map: S2 = c * sigma_max(W)"};
}

/// Sensitivity of a composition: the product of the parts' bounds. All
/// parts must certify the same neighboring notion.
inline SensitivityBound chain_sensitivity(std::span<const SensitivityBound> parts) {
  if (parts.empty()) {
    throw std::invalid_argument("chain_sensitivity: empty chain");
  }
  double product = 1.0;
  std::string derivation = "chain:";
  for (const SensitivityBound& part : parts) {
    part.validate();
    if (part.notion != parts.front().notion) {
      throw std::invalid_argument("chain_sensitivity: mixed privacy notions");
    }
    product *= part.value;
    derivation += " * (" + (part.derivation.empty() ? "unlabeled" : part.derivation) + ")";
  }
  return {product, parts.front().notion, derivation};
}

}  // namespace mgdp
