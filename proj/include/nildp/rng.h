//
// Copyright 2026 The nildp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef NILDP_RNG_H_
#define NILDP_RNG_H_

#include <cstdint>
#include <random>

namespace nildp {

// What a random stream is used for. Occupies the top byte of a stream id, so
// streams of different purposes never collide.
enum class StreamPurpose : uint8_t {
  kProjection = 1,
  kReport = 2,
  kLabel = 3,
  kSynopsisDirection = 4,
  kSynopsisLabel = 5,
  kSynopsisCopy = 6,
  kFourierFeatures = 7,
  kData = 8,
  kOptimizer = 9,
  kTest = 250,
};

// Stream ids follow a fixed counter layout:
//
//   bits 63..56  purpose
//   bits 55..16  user index (40 bits)
//   bits 15..0   copy index within the user (16 bits)
//
// Every fresh private copy a user emits therefore owns its own stream, and the
// mapping from (purpose, user, copy) to noise is reproducible from the root
// seed alone.
constexpr uint64_t MakeStreamId(StreamPurpose purpose, uint64_t user,
                                uint64_t copy = 0) {
  return (static_cast<uint64_t>(purpose) << 56) |
         ((user & 0xFFFFFFFFFFull) << 16) | (copy & 0xFFFFull);
}

// Mixes two 64-bit words into one (splitmix64 finalizer). Used to derive child
// seeds, e.g. one per experiment cell and replication.
uint64_t MixSeed(uint64_t seed, uint64_t salt);

// A deterministic random source identified by (seed, stream id). Two instances
// constructed with the same pair produce identical sequences.
class SeededRng {
 public:
  SeededRng(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  double Gaussian() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace nildp

#endif  // NILDP_RNG_H_
