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
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mgdp/matrix.hpp"
#include "mgdp/mechanisms.hpp"
#include "mgdp/random.hpp"
#include "mgdp/sensitivity.hpp"

namespace mgdp {

// Demo-scale caps; the embedding perturbation and inversion math are
// scale-free, so nothing here depends on production-sized tables.
inline constexpr int kMaxVocab = 10000;
inline constexpr int kMaxEmbeddingDim = 64;
inline constexpr int kMaxSequenceLength = 128;

/// Token indices of a sequence, all within [0, vocab).
struct TokenSequence {
  std::vector<int> tokens;

  void validate(int vocab_size) const {
    if (tokens.empty()) {
      throw std::invalid_argument("TokenSequence: must contain at least one token");
    }
    for (int t : tokens) {
      if (t < 0 || t >= vocab_size) {
        throw std::domain_error("TokenSequence: token index out of range");
      }
    }
  }
};

/// Vocabulary lookup table, one embedding row per token. Duplicate rows are
/// rejected so that nearest-neighbor inversion is well posed.
class EmbeddingTable {
 public:
  EmbeddingTable(int vocab_size, int dim, Matrix table)
      : vocab_size_(vocab_size), dim_(dim), table_(std::move(table)) {
    if (vocab_size < 1 || vocab_size > kMaxVocab) {
      throw std::invalid_argument("EmbeddingTable: vocab size out of range");
    }
    if (dim < 1 || dim > kMaxEmbeddingDim) {
      throw std::invalid_argument("EmbeddingTable: embedding dim out of range");
    }
    if (table_.rows() != vocab_size || table_.cols() != dim) {
      throw std::invalid_argument("EmbeddingTable: table shape mismatch");
    }
    check_rows_distinct();
  }

  int vocab_size() const { return vocab_size_; }
  int dim() const { return dim_; }
  const Matrix& table() const { return table_; }

 private:
  void check_rows_distinct() const {
    std::vector<int> order(vocab_size_);
    std::iota(order.begin(), order.end(), 0);
    const auto row_less = [this](int a, int b) {
      for (int j = 0; j < dim_; ++j) {
        if (table_(a, j) != table_(b, j)) return table_(a, j) < table_(b, j);
      }
      return false;
    };
    std::sort(order.begin(), order.end(), row_less);
    for (int i = 0; i + 1 < vocab_size_; ++i) {
      if (!row_less(order[i], order[i + 1]) && !row_less(order[i + 1], order[i])) {
        throw std::invalid_argument("EmbeddingTable: duplicate rows");
      }
    }
  }

  int vocab_size_;
  int dim_;
  Matrix table_;
};

/// An embedding matrix together with the clip rule that produced it; the
/// rule decides which sensitivity notion a perturbation may be calibrated
/// against.
struct ClippedEmbedding {
  Matrix values;
  ClipSpec clip;
};

/// Looks up each token's row and applies the clip rule.
inline ClippedEmbedding embed(const TokenSequence& seq, const EmbeddingTable& table,
                              const ClipSpec& clip) {
  seq.validate(table.vocab_size());
  Matrix gathered(static_cast<int>(seq.tokens.size()), table.dim());
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    for (int j = 0; j < table.dim(); ++j) {
      gathered(static_cast<int>(i), j) = table.table()(seq.tokens[i], j);
    }
  }
  return {apply_clip(gathered, clip), clip};
}

inline PrivacyNotion notion_for_granularity(ClipGranularity g) {
  return g == ClipGranularity::kPerRow ? PrivacyNotion::kTokenLevel
                                       : PrivacyNotion::kSequenceLevel;
}

/// Adds calibrated matrix Gaussian noise to a clipped embedding. The
/// calibration's sensitivity notion must match the clip granularity that
/// produced the embedding (per-row <-> token-level, full-matrix <->
/// sequence-level); anything else voids the certificate and is rejected.
inline Matrix perturb_embedding(const ClippedEmbedding& emb,
                                const GaussianCalibration& calibration,
                                RandomStream& stream) {
  if (calibration.sensitivity.notion != notion_for_granularity(emb.clip.granularity)) {
    throw std::invalid_argument(
        "perturb_embedding: calibration notion does not match clip granularity");
  }
  return add(emb.values, amgm_sample(calibration, emb.values.rows(), emb.values.cols(), stream));
}

/// Computes X*W + Z with Z calibrated against the linear map's sensitivity
/// c * sigma_max(W) on per-row-normalized inputs.
inline Matrix noisy_linear_projection(const ClippedEmbedding& emb, const Matrix& w, double c,
                                      const PrivacyBudget& budget, RandomStream& stream) {
  if (emb.clip.mode != ClipMode::kNormalize ||
      emb.clip.granularity != ClipGranularity::kPerRow || emb.clip.c != c) {
    throw std::invalid_argument(
        "noisy_linear_projection: input must be per-row normalized at c");
  }
  if (emb.values.cols() != w.rows()) {
    throw std::invalid_argument("noisy_linear_projection: shapes are not conformable");
  }
  const GaussianCalibration calibration =
      amgm_calibrate(linear_map_sensitivity(w, c), budget);
  return add(multiply(emb.values, w),
             amgm_sample(calibration, emb.values.rows(), w.cols(), stream));
}

/// Token-wise nearest-neighbor inversion: for every row of the observed
/// matrix, the vocabulary index whose (clipped) embedding minimizes the
/// 2-norm distance; ties break to the lowest index. Consumes only the noisy
/// matrix and the public table, never the clean embedding.
inline TokenSequence invert_nearest_neighbor(const Matrix& noisy, const EmbeddingTable& table,
                                             const ClipSpec& clip) {
  if (noisy.cols() != table.dim()) {
    throw std::invalid_argument("invert_nearest_neighbor: dimension mismatch");
  }
  const Matrix reference = apply_clip(table.table(), clip);
  TokenSequence out;
  out.tokens.reserve(noisy.rows());
  for (int i = 0; i < noisy.rows(); ++i) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int v = 0; v < table.vocab_size(); ++v) {
      double dist = 0.0;
      for (int j = 0; j < table.dim(); ++j) {
        const double diff = noisy(i, j) - reference(v, j);
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = v;
      }
    }
    out.tokens.push_back(best);
  }
  return out;
}

/// Fraction of positions recovered correctly.
inline double inversion_recall(const TokenSequence& predicted, const TokenSequence& truth) {
  if (predicted.tokens.size() != truth.tokens.size()) {
    throw std::invalid_argument("inversion_recall: length mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.tokens.size(); ++i) {
    if (predicted.tokens[i] == truth.tokens[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.tokens.size());
}

/// One row of the inversion demo output table.
struct RecallRow {
  double epsilon = 0.0;  ///< +inf encodes the noiseless baseline
  double mean_recall = 0.0;
  double std_err = 0.0;
  int n_seeds = 0;
};

struct InversionDemoConfig {
  int vocab = 1000;
  int dim = 32;
  int len = 16;
  std::vector<double> epsilons;  ///< may contain +inf for the noiseless row
  int n_seeds = 100;
  double delta = 1e-5;
  double clip_c = 1.0;
  std::uint64_t seed = 42;

  void validate() const {
    if (vocab < 2 || vocab > kMaxVocab) {
      throw std::invalid_argument("InversionDemoConfig: vocab out of range");
    }
    if (dim < 1 || dim > kMaxEmbeddingDim) {
      throw std::invalid_argument("InversionDemoConfig: dim out of range");
    }
    if (len < 1 || len > kMaxSequenceLength) {
      throw std::invalid_argument("InversionDemoConfig: len out of range");
    }
    if (n_seeds < 1) {
      throw std::invalid_argument("InversionDemoConfig: need at least one seed");
    }
    if (epsilons.empty()) {
      throw std::invalid_argument("InversionDemoConfig: need at least one epsilon");
    }
    for (double e : epsilons) {
      if (std::isnan(e) || e < 0.0) {
        throw std::invalid_argument("InversionDemoConfig: epsilons must be >= 0");
      }
    }
  }
};

/// Runs the perturb-then-invert experiment: per seed a fresh random table
/// (i.i.d. standard normal rows, per-row normalized) and a random sequence;
/// per epsilon, calibrated noise, nearest-neighbor inversion, recall. Rows
/// come back ordered by descending epsilon with the noiseless row first.
inline std::vector<RecallRow> run_inversion_experiment(const InversionDemoConfig& config) {
  config.validate();
  std::vector<double> epsilons = config.epsilons;
  std::sort(epsilons.begin(), epsilons.end(), std::greater<double>());

  const ClipSpec clip{ClipMode::kNormalize, ClipGranularity::kPerRow, config.clip_c};
  const SensitivityBound sensitivity = sensitivity_from_clip(clip);

  std::vector<GaussianCalibration> calibrations;
  calibrations.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (std::isinf(eps)) {
      calibrations.push_back({});  // placeholder; the noiseless row skips sampling
    } else {
      calibrations.push_back(amgm_calibrate(sensitivity, PrivacyBudget{eps, config.delta}));
    }
  }

  std::vector<std::vector<double>> recalls(epsilons.size());
  for (int s = 0; s < config.n_seeds; ++s) {
    RandomStream table_stream =
        RandomStream::derive(config.seed, 3ull * static_cast<std::uint64_t>(s));
    Matrix raw = sample_std_normal_matrix(table_stream, config.vocab, config.dim);
    EmbeddingTable table(config.vocab, config.dim, apply_clip(raw, clip));

    RandomStream sequence_stream =
        RandomStream::derive(config.seed, 3ull * static_cast<std::uint64_t>(s) + 1);
    TokenSequence truth;
    truth.tokens.reserve(config.len);
    for (int i = 0; i < config.len; ++i) {
      int token = static_cast<int>(sequence_stream.uniform() * config.vocab);
      truth.tokens.push_back(std::min(token, config.vocab - 1));
    }

    const ClippedEmbedding emb = embed(truth, table, clip);
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      Matrix noisy = emb.values;
      if (!std::isinf(epsilons[e])) {
        RandomStream noise_stream = RandomStream::derive(
            config.seed,
            3ull * static_cast<std::uint64_t>(s) + 2 +
                1000ull * (static_cast<std::uint64_t>(e) + 1));
        noisy = perturb_embedding(emb, calibrations[e], noise_stream);
      }
      const TokenSequence predicted = invert_nearest_neighbor(noisy, table, clip);
      recalls[e].push_back(inversion_recall(predicted, truth));
    }
  }

  std::vector<RecallRow> rows;
  rows.reserve(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    const double n = static_cast<double>(recalls[e].size());
    double mean = 0.0;
    for (double r : recalls[e]) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : recalls[e]) var += (r - mean) * (r - mean);
    const double std_err = n > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    rows.push_back({epsilons[e], mean, std_err, static_cast<int>(n)});
  }
  return rows;
}

/// Plain-text results table: one "epsilon mean_recall stderr n_seeds" line
/// per row.
inline std::string format_recall_table(const std::vector<RecallRow>& rows) {
  std::string out;
  for (const RecallRow& row : rows) {
    out += std::isinf(row.epsilon) ? "inf" : format_real(row.epsilon);
    out += ' ';
    out += format_real(row.mean_recall);
    out += ' ';
    out += format_real(row.std_err);
    out += ' ';
    out += std::to_string(row.n_seeds);
    out += '\n';
  }
  return out;
}

}  // namespace mgdp
