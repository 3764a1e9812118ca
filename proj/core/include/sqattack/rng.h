// Copyright 2026 The sqattack Authors
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

#ifndef SQATTACK_RNG_H_
#define SQATTACK_RNG_H_

#include <array>
#include <cstdint>
#include <string_view>

namespace sqattack {

// SplitMix64 output function.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 64-bit FNV-1a.
constexpr std::uint64_t HashName(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = Rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = Rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }
  // Uniform on (0, 1).
  double UniformOpen() {
    return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
  }
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t Below(std::uint64_t bound);
  bool Bernoulli(double p) { return Uniform() < p; }
  // Standard normal (polar method, no cached spare).
  double Normal();
  // Laplace with unit scale.
  double Laplace();

 private:
  static constexpr std::uint64_t Rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

// Named, indexed substreams derived from one base seed. Drawing from one
// substream never shifts another.
class SeedStreams {
 public:
  explicit SeedStreams(std::uint64_t base) : base_(base) {}

  std::uint64_t base() const { return base_; }
  std::uint64_t Seed(std::string_view name, std::uint64_t index = 0) const {
    return Mix64(Mix64(base_ ^ HashName(name)) ^ Mix64(index + 0x51ed27ULL));
  }
  Rng Stream(std::string_view name, std::uint64_t index = 0) const {
    return Rng(Seed(name, index));
  }
  SeedStreams Child(std::string_view name, std::uint64_t index = 0) const {
    return SeedStreams(Seed(name, index));
  }

 private:
  std::uint64_t base_;
};

// Stream used by trial t of an experiment with the given base seed.
inline SeedStreams TrialStreams(std::uint64_t base, std::uint64_t trial) {
  return SeedStreams(base).Child("trial", trial);
}

}  // namespace sqattack

#endif  // SQATTACK_RNG_H_
