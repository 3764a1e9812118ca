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

#include "sqattack/bit_matrix.h"

#include <bit>
#include <numeric>

namespace sqattack {

namespace {

// One swap stage of the recursive 64x64 transpose: blocks of J rows trade
// their masked halves.
template <int J, std::uint64_t M>
inline void TransposeStage(Block64& a) {
  for (int base = 0; base < 64; base += 2 * J) {
    for (int k = base; k < base + J; ++k) {
      const std::uint64_t t = ((a[k] >> J) ^ a[k + J]) & M;
      a[k] ^= t << J;
      a[k + J] ^= t;
    }
  }
}

}  // namespace

void Transpose64(Block64& a) {
  TransposeStage<32, 0x00000000FFFFFFFFULL>(a);
  TransposeStage<16, 0x0000FFFF0000FFFFULL>(a);
  TransposeStage<8, 0x00FF00FF00FF00FFULL>(a);
  TransposeStage<4, 0x0F0F0F0F0F0F0F0FULL>(a);
  TransposeStage<2, 0x3333333333333333ULL>(a);
  TransposeStage<1, 0x5555555555555555ULL>(a);
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      words_per_row_(WordsFor(cols)),
      words_(rows * WordsFor(cols), 0) {}

void BitMatrix::ClearPadding() {
  if (cols_ % 64 == 0 || words_per_row_ == 0) return;
  const std::uint64_t mask = (std::uint64_t{1} << (cols_ % 64)) - 1;
  for (std::size_t r = 0; r < rows_; ++r) {
    words_[r * words_per_row_ + words_per_row_ - 1] &= mask;
  }
}

std::vector<std::uint32_t> BitMatrix::ColumnCounts(
    std::span<const std::size_t> rows) const {
  std::vector<std::uint32_t> counts(cols_, 0);
  Block64 block;
  for (std::size_t start = 0; start < rows.size(); start += 64) {
    const std::size_t group = std::min<std::size_t>(64, rows.size() - start);
    for (std::size_t w = 0; w < words_per_row_; ++w) {
      for (std::size_t t = 0; t < group; ++t) {
        block[t] = words_[rows[start + t] * words_per_row_ + w];
      }
      for (std::size_t t = group; t < 64; ++t) block[t] = 0;
      Transpose64(block);
      const std::size_t base = w * 64;
      const std::size_t limit = std::min<std::size_t>(64, cols_ - base);
      for (std::size_t c = 0; c < limit; ++c) {
        counts[base + c] += std::popcount(block[c]);
      }
    }
  }
  return counts;
}

std::vector<std::uint32_t> BitMatrix::ColumnCounts() const {
  std::vector<std::size_t> all(rows_);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return ColumnCounts(all);
}

}  // namespace sqattack
