// Copyright 2026 The Duofuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded random source whose output sequence is identical across standard
// library implementations. The <random> distributions are
// implementation-defined, so bounded integers and unit reals are derived
// here directly from the raw engine output.
#ifndef DUOFUZZ_RNG_H_
#define DUOFUZZ_RNG_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace duofuzz {

class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  uint64_t Uniform(uint64_t bound);

  // Uniform in [0, 1) with 53 bits of precision.
  double UnitReal() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return UnitReal() < p; }

  // Text form of the full engine state, for persistence.
  std::string SaveState() const;
  // Throws std::invalid_argument on malformed state text.
  void LoadState(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

// Stable 64-bit hash of a string (FNV-1a).
uint64_t StableHash(std::string_view text);

// Mixes two 64-bit values into a well-distributed seed (splitmix64 finalizer).
uint64_t MixSeed(uint64_t a, uint64_t b);

// Fisher-Yates shuffle driven by Rng.
template <typename Container>
void Shuffle(Container& items, Rng& rng) {
  if (items.size() < 2) return;
  for (size_t i = items.size() - 1; i > 0; --i) {
    size_t j = static_cast<size_t>(rng.Uniform(i + 1));
    using std::swap;
    swap(items[i], items[j]);
  }
}

}  // namespace duofuzz

#endif  // DUOFUZZ_RNG_H_
