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

#include <cstdint>
#include <random>

#include "mgdp/matrix.hpp"
#include "mgdp/normal.hpp"

namespace mgdp {

/// Seedable deterministic deviate source.
///
/// The engine is std::mt19937_64, whose output sequence is pinned by the
/// C++ standard, and normal deviates are produced by inverse-CDF transform
/// of one 53-bit uniform each (std::normal_distribution is implementation
/// defined and would break cross-platform reproducibility). This choice is
/// fixed; identical seeds give identical sequences everywhere.
///
/// A stream is owned by one execution context at a time. Parallel work uses
/// independently derived streams, one per shard.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, shard) pairs, decorrelated with a
  /// splitmix64 finalizer.
  static RandomStream derive(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return RandomStream(z ^ (z >> 31));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform deviate on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double standard_normal() { return inv_std_normal_cdf(uniform()); }

 private:
  std::mt19937_64 engine_;
};

/// Matrix with i.i.d. standard normal entries drawn row-major from the
/// stream; deterministic per seed.
inline Matrix sample_std_normal_matrix(RandomStream& stream, int rows, int cols) {
  Matrix z(rows, cols);
  for (double& v : z.data()) v = stream.standard_normal();
  return z;
}

}  // namespace mgdp
